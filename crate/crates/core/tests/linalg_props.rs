use cutfrac::linalg::{dense_lu_solve, norm_inf, solve_lu, TripletBuffer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random sparse, diagonally shifted, nonsymmetric system.
fn random_system(rng: &mut ChaCha8Rng) -> (TripletBuffer, Vec<f64>) {
    let n = rng.gen_range(1..120);
    let mut t = TripletBuffer::new(n);
    for i in 0..n {
        t.push(i, i, rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
        for _ in 0..rng.gen_range(0..6) {
            let j = rng.gen_range(0..n);
            t.push(i, j, rng.gen_range(-1.0..1.0));
        }
        // banded couplings like a finite element stencil
        if i + 3 < n {
            t.push(i, i + 3, rng.gen_range(-0.5..0.5));
            t.push(i + 3, i, rng.gen_range(-0.5..0.5));
        }
    }
    let b = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (t, b)
}

#[test]
fn solve_reproduces_rhs_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut solved = 0;
    while solved < 100 {
        let (t, b) = random_system(&mut rng);
        let a = t.compress().unwrap();
        let dense = a.to_dense();
        // nonsingular by the dense oracle
        let Ok(reference) = dense_lu_solve(&dense, &b) else { continue };
        let x = solve_lu(&a, &b).unwrap();
        let r: Vec<f64> = a.matvec(&x).unwrap().iter().zip(&b).map(|(p, q)| p - q).collect();
        let scale = a.norm_inf() * norm_inf(&x) + norm_inf(&b);
        assert!(norm_inf(&r) <= 1e-10 * scale, "residual {}", norm_inf(&r));
        let diff: Vec<f64> = x.iter().zip(&reference).map(|(p, q)| p - q).collect();
        assert!(norm_inf(&diff) <= 1e-8 * norm_inf(&reference).max(1.0));
        solved += 1;
    }
}
