//! Sparse matrices in compressed-row form and a direct solver.

mod lu;

use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

pub use lu::{dense_lu_solve, rcm_ordering, solve_lu};

/// Unsorted `(row, col, value)` entries of an `n × n` matrix; duplicates are
/// summed on compression.
#[derive(Debug, Clone, Default)]
pub struct TripletBuffer {
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl TripletBuffer {
    pub fn new(n: usize) -> Self {
        TripletBuffer { n, entries: Vec::new() }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.entries.push((row, col, value));
    }

    pub fn extend(&mut self, other: TripletBuffer) {
        self.entries.extend(other.entries);
    }

    pub fn compress(&self) -> Result<CsrMatrix> {
        compress(self)
    }
}

/// Square matrix in compressed-row storage with sorted, unique column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

pub fn compress(t: &TripletBuffer) -> Result<CsrMatrix> {
    let n = t.n;
    if let Some(&(row, col, _)) = t.entries.iter().find(|e| e.0 >= n || e.1 >= n) {
        return Err(Error::IndexOutOfRange { row, col, dim: n });
    }
    let mut counts = vec![0usize; n + 1];
    for &(r, _, _) in &t.entries {
        counts[r + 1] += 1;
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    // bucket by row (stable, so the summation order of duplicates is the
    // insertion order)
    let mut next = counts.clone();
    let mut cols = vec![0usize; t.entries.len()];
    let mut vals = vec![0.0; t.entries.len()];
    for &(r, c, v) in &t.entries {
        let k = next[r];
        cols[k] = c;
        vals[k] = v;
        next[r] += 1;
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(t.entries.len());
    let mut values = Vec::with_capacity(t.entries.len());
    row_ptr.push(0);
    let mut order: Vec<usize> = Vec::new();
    for r in 0..n {
        let (a, b) = (counts[r], counts[r + 1]);
        order.clear();
        order.extend(a..b);
        order.sort_by_key(|&k| cols[k]);
        let start = col_idx.len();
        for &k in &order {
            if col_idx.len() > start && *col_idx.last().unwrap() == cols[k] {
                *values.last_mut().unwrap() += vals[k];
            } else {
                col_idx.push(cols[k]);
                values.push(vals[k]);
            }
        }
        row_ptr.push(col_idx.len());
    }
    Ok(CsrMatrix {
        n,
        row_ptr,
        col_idx,
        values,
    })
}

impl CsrMatrix {
    pub fn zeros(n: usize) -> Self {
        CsrMatrix {
            n,
            row_ptr: vec![0; n + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[a..b].iter().copied().zip(self.values[a..b].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        match self.col_idx[a..b].binary_search(&c) {
            Ok(k) => self.values[a + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect())
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        let y = self.matvec(x)?;
        Ok(x.iter().zip(&y).map(|(a, b)| a * b).sum())
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        d
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut t = TripletBuffer::new(self.n);
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                t.push(c, r, v);
            }
        }
        compress(&t).expect("transpose keeps indices in range")
    }

    /// Whether the sparsity pattern is symmetric.
    pub fn pattern_symmetric(&self) -> bool {
        (0..self.n).all(|r| {
            self.row(r).all(|(c, _)| {
                let (a, b) = (self.row_ptr[c], self.row_ptr[c + 1]);
                self.col_idx[a..b].binary_search(&r).is_ok()
            })
        })
    }

    /// Write in MatrixMarket coordinate format.
    pub fn write_matrix_market(&self, path: &Path) -> Result<()> {
        let io = |e| Error::io(path, e);
        let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        writeln!(f, "%%MatrixMarket matrix coordinate real general").map_err(io)?;
        writeln!(f, "{} {} {}", self.n, self.n, self.nnz()).map_err(io)?;
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                writeln!(f, "{} {} {:.17e}", r + 1, c + 1, v).map_err(io)?;
            }
        }
        f.flush().map_err(io)
    }
}

/// `‖x‖∞`.
pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_summed() {
        let mut t = TripletBuffer::new(2);
        t.push(0, 0, 1.0);
        t.push(0, 0, 2.0);
        let a = t.compress().unwrap();
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.nnz(), 1);
    }

    #[test]
    fn empty_is_zero() {
        let a = TripletBuffer::new(3).compress().unwrap();
        assert_eq!(a, CsrMatrix::zeros(3));
        assert_eq!(a.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn identity_triplets() {
        let mut t = TripletBuffer::new(4);
        for i in (0..4).rev() {
            t.push(i, i, 1.0);
        }
        let a = t.compress().unwrap();
        assert_eq!(a, CsrMatrix::identity(4));
        let x = [1.0, -2.0, 3.5, 0.25];
        assert_eq!(a.matvec(&x).unwrap(), x.to_vec());
    }

    #[test]
    fn diagonal_matvec() {
        let mut t = TripletBuffer::new(2);
        t.push(0, 0, 2.0);
        t.push(1, 1, 3.0);
        assert_eq!(t.compress().unwrap().matvec(&[1.0, 1.0]).unwrap(), vec![2.0, 3.0]);
    }

    #[test]
    fn errors() {
        let mut t = TripletBuffer::new(2);
        t.push(2, 0, 1.0);
        assert!(matches!(t.compress(), Err(Error::IndexOutOfRange { row: 2, col: 0, dim: 2 })));
        let a = CsrMatrix::identity(2);
        assert!(matches!(a.matvec(&[1.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn sorted_columns_and_transpose() {
        let mut t = TripletBuffer::new(3);
        t.push(0, 2, 1.0);
        t.push(0, 0, 4.0);
        t.push(2, 1, -1.0);
        let a = t.compress().unwrap();
        assert_eq!(a.col_idx[0..2], [0, 2]);
        assert!(!a.pattern_symmetric());
        let at = a.transpose();
        assert_eq!(at.get(2, 0), 1.0);
        assert_eq!(at.get(1, 2), -1.0);
        assert_eq!(at.transpose(), a);
    }

    #[test]
    fn matrix_market_dump() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.mtx");
        CsrMatrix::identity(3).write_matrix_market(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("%%MatrixMarket"));
        assert_eq!(text.lines().count(), 5);
    }
}
