use cutfrac::fem::{assemble, Discretization, FormParams, SolutionField};
use cutfrac::post::{coercivity_terms, energy_error, max_nodal_error};
use cutfrac::presets::Preset;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coercivity_identity_random_functions(
        pi in 0usize..9,
        nx in 3usize..12,
        tau1 in 1e-3..1e-1f64,
        tau2 in 1e-4..1e-2f64,
        seed in prop::collection::vec(-1.0..1.0f64, 64),
    ) {
        let p = Preset::all()[pi];
        let disc = Discretization::new(p.domain(), nx).unwrap();
        let params = FormParams { tau1, tau2 };
        let sys = assemble(&disc, params, false).unwrap();
        prop_assert!(sys.pinned.is_empty());
        let v: Vec<f64> = (0..disc.dofs.n).map(|i| seed[i % 64] * (1.0 + (i / 64) as f64 * 0.37).sin()).collect();
        let lhs = sys.a.quadratic_form(&v).unwrap();
        let t = coercivity_terms(&SolutionField::new(&disc, v), params).unwrap();
        prop_assert!((lhs - t.total()).abs() <= 1e-8 * t.scale(), "{p} nx={nx}: {lhs} vs {}", t.total());
    }

    /// Exact solutions in `V_h` are reproduced without stabilization. Even `nx`
    /// puts the cracks on mesh edges; a cut crack leaves combinations of dofs
    /// that vanish on the crack, so without `s_h` the matrix is singular there.
    #[test]
    fn galerkin_consistency(half in 2usize..13, tau1 in 1e-3..1.0f64, which in 0usize..5) {
        let nx = 2 * half;
        let p = [Preset::Example1, Preset::Example3, Preset::Example3Speed01, Preset::Example3Speed02, Preset::Example3NoCrack][which];
        let disc = Discretization::new(p.domain(), nx).unwrap();
        let params = FormParams { tau1, tau2: 0.0 };
        let sol = disc.solve(params, false).unwrap();
        let r = energy_error(&sol.field, &p.exact().unwrap(), params).unwrap();
        prop_assert!(r.l2 < 1e-10 && r.energy < 1e-9, "{p} nx={nx}: {r:?}");
    }
}

#[test]
fn stabilization_perturbation_is_linear_in_tau2() {
    let disc = Discretization::new(Preset::Example1.domain(), 10).unwrap();
    let ex = Preset::Example1.exact().unwrap();
    let mut errs = Vec::new();
    for tau2 in [1e-3, 5e-4, 2.5e-4] {
        let sol = disc.solve(FormParams { tau1: 0.01, tau2 }, false).unwrap();
        errs.push(max_nodal_error(&sol.field, &ex));
    }
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 2.0).abs() < 0.1, "{errs:?}");
    }
}

#[test]
fn all_presets_nonsingular() {
    for p in Preset::all() {
        for nx in [4, 7, 10, 16] {
            let disc = Discretization::new(p.domain(), nx).unwrap();
            let sol = disc
                .solve(FormParams::default(), false)
                .unwrap_or_else(|e| panic!("{p} nx={nx}: {e}"));
            assert!(sol.residual < 1e-10, "{p} nx={nx}: residual {}", sol.residual);
            assert!(sol.system.a.pattern_symmetric());
        }
    }
}

#[test]
fn unstabilized_cut_crack_reports_singular_pivot() {
    let disc = Discretization::new(Preset::Example1.domain(), 7).unwrap();
    match disc.solve(FormParams { tau1: 0.01, tau2: 0.0 }, false) {
        Err(cutfrac::Error::Singular { pivot }) => assert!(pivot < disc.dofs.n),
        Err(e) => panic!("unexpected error {e}"),
        Ok(_) => panic!("expected a singular system"),
    }
}

#[test]
fn energy_contributions_nonnegative() {
    for p in Preset::all() {
        let Some(ex) = p.exact() else { continue };
        let disc = Discretization::new(p.domain(), 8).unwrap();
        let sol = disc.solve(FormParams::default(), false).unwrap();
        let r = energy_error(&sol.field, &ex, FormParams::default()).unwrap();
        let mut sum = 0.0;
        for c in &r.components {
            for v in [c.l2, c.mass, c.residual, c.stabilization, c.interface, c.boundary] {
                assert!(v >= 0.0 && v.is_finite(), "{p}: {c:?}");
            }
            sum += c.energy_squared();
        }
        assert!((sum.sqrt() - r.energy).abs() <= 1e-14 * r.energy.max(1.0));
        let l2: f64 = r.components.iter().map(|c| c.l2 * c.l2).sum::<f64>().sqrt();
        assert!((l2 - r.l2).abs() <= 1e-14 * r.l2.max(1.0));
    }
}
