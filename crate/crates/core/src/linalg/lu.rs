//! Direct solve: reverse Cuthill–McKee reordering followed by banded LU with
//! partial pivoting. A dense LU is kept for small systems and as a reference.

use std::collections::VecDeque;

use super::{CsrMatrix, TripletBuffer};
use crate::{Error, Result};

/// Pivots below this fraction of `max |A|` are treated as zero.
const PIVOT_TOL: f64 = 1e-14;

/// Reverse Cuthill–McKee permutation of the symmetrized pattern:
/// `perm[new] = old`.
pub fn rcm_ordering(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for r in 0..n {
        for (c, _) in a.row(r) {
            if c != r {
                adj[r].push(c);
                adj[c].push(r);
            }
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (adj[v].len(), v));
    let bfs = |start: usize, visited: &mut Vec<bool>, out: &mut Vec<usize>| {
        let mut q = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = q.pop_front() {
            out.push(v);
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nb.sort_by_key(|&w| (adj[w].len(), w));
            for w in nb {
                visited[w] = true;
                q.push_back(w);
            }
        }
    };
    for &s in &by_degree {
        if visited[s] {
            continue;
        }
        // pseudo-peripheral start: last vertex of a BFS from s
        let mut probe = Vec::new();
        let mut scratch = visited.clone();
        bfs(s, &mut scratch, &mut probe);
        let start = *probe.last().unwrap_or(&s);
        bfs(start, &mut visited, &mut order);
    }
    order.reverse();
    order
}

fn permuted(a: &CsrMatrix, perm: &[usize]) -> CsrMatrix {
    let mut inv = vec![0; a.n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut t = TripletBuffer::new(a.n);
    for r in 0..a.n {
        for (c, v) in a.row(r) {
            t.push(inv[r], inv[c], v);
        }
    }
    super::compress(&t).expect("permutation keeps indices in range")
}

/// Solve `A x = b`.
pub fn solve_lu(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            got: b.len(),
        });
    }
    let n = a.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let perm = rcm_ordering(a);
    let p = permuted(a, &perm);
    let pb: Vec<f64> = perm.iter().map(|&o| b[o]).collect();
    let y = banded_lu_solve(&p, &pb).map_err(|e| match e {
        Error::Singular { pivot } => Error::Singular { pivot: perm[pivot] },
        other => other,
    })?;
    let mut x = vec![0.0; n];
    for (new, &old) in perm.iter().enumerate() {
        x[old] = y[new];
    }
    Ok(x)
}

/// Banded Gaussian elimination with row partial pivoting. Only a window of
/// `kl + 1` active rows is kept; each finished pivot row is a row of U.
fn banded_lu_solve(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.n;
    let (mut kl, mut ku) = (0usize, 0usize);
    for r in 0..n {
        for (c, _) in a.row(r) {
            if r > c {
                kl = kl.max(r - c);
            } else {
                ku = ku.max(c - r);
            }
        }
    }
    let width = kl + ku + 1;
    let scale = a.max_abs();
    let load = |r: usize, first: usize| {
        let mut row = vec![0.0; width];
        for (c, v) in a.row(r) {
            row[c - first] += v;
        }
        (row, b[r])
    };

    let mut window: VecDeque<(Vec<f64>, f64)> = VecDeque::with_capacity(kl + 1);
    let mut next = 0;
    while next < n && next <= kl {
        window.push_back(load(next, 0));
        next += 1;
    }
    let mut u: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n);
    for k in 0..n {
        let (mut best, mut pmax) = (0, -1.0);
        for (i, (row, _)) in window.iter().enumerate() {
            if row[0].abs() > pmax {
                pmax = row[0].abs();
                best = i;
            }
        }
        if !(pmax > PIVOT_TOL * scale) {
            return Err(Error::Singular { pivot: k });
        }
        window.swap(0, best);
        let (prow, prhs) = window.pop_front().unwrap();
        for (row, rhs) in window.iter_mut() {
            let f = row[0] / prow[0];
            if f != 0.0 {
                for j in 0..width {
                    row[j] -= f * prow[j];
                }
                *rhs -= f * prhs;
            }
        }
        for (row, _) in window.iter_mut() {
            row.rotate_left(1);
            row[width - 1] = 0.0;
        }
        u.push((prow, prhs));
        if next < n {
            window.push_back(load(next, k + 1));
            next += 1;
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let (row, rhs) = &u[k];
        let mut s = *rhs;
        for j in 1..width.min(n - k) {
            s -= row[j] * x[k + j];
        }
        x[k] = s / row[0];
    }
    Ok(x)
}

/// Dense LU with partial pivoting.
pub fn dense_lu_solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.len() });
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
        if !(m[p][k].abs() > PIVOT_TOL * scale) {
            return Err(Error::Singular { pivot: k });
        }
        m.swap(k, p);
        x.swap(k, p);
        for i in (k + 1)..n {
            let f = m[i][k] / m[k][k];
            if f != 0.0 {
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = ((k + 1)..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (x[k] - s) / m[k][k];
    }
    Ok(x)
}
