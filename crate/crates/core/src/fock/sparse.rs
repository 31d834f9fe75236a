use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entries smaller than this are dropped when commutators are formed.
pub const PRUNE_TOLERANCE: f64 = 1e-14;

/// Complex sparse matrix over a sector basis, stored row-compressed.
///
/// Rows are sorted by column and carry no duplicate `(row, col)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOperator {
    /// Assembles an operator from triplets, summing repeated positions and
    /// dropping entries that are exactly zero.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut items: Vec<(usize, usize, Complex64)> = triplets.into_iter().collect();
        for &(r, c, _) in &items {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.max(c) + 1 });
            }
        }
        items.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(items.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(items.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(items.len());
        for (r, c, v) in items {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        let mut keep_cols = Vec::with_capacity(cols.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != Complex64::new(0.0, 0.0) {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { dim, row_ptr, cols: keep_cols, vals: keep_vals })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let triplets = values.iter().enumerate().map(|(i, &v)| (i, i, Complex64::new(v, 0.0)));
        Self::from_triplets(values.len(), triplets).expect("diagonal indices are in range")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim)
            .flat_map(move |r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k])))
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, got: other.dim })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::from_triplets(self.dim, self.entries().chain(other.entries()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::from_triplets(self.dim, self.entries().chain(other.entries().map(|(r, c, v)| (r, c, -v))))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Sparse product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut touched = vec![false; n];
        let mut pattern: Vec<usize> = Vec::new();
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let mid = self.cols[k];
                let a = self.vals[k];
                for kk in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    let c = other.cols[kk];
                    if !touched[c] {
                        touched[c] = true;
                        pattern.push(c);
                    }
                    acc[c] += a * other.vals[kk];
                }
            }
            pattern.sort_unstable();
            for &c in &pattern {
                let v = acc[c];
                if v != Complex64::new(0.0, 0.0) {
                    cols.push(c);
                    vals.push(v);
                }
                acc[c] = Complex64::new(0.0, 0.0);
                touched[c] = false;
            }
            pattern.clear();
            row_ptr[r + 1] = cols.len();
        }
        Ok(Self { dim: n, row_ptr, cols, vals })
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (c, r, v.conj())))
            .expect("transposed indices are in range")
    }

    /// Drops entries with modulus at or below `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self::from_triplets(self.dim, self.entries().filter(|(_, _, v)| v.norm() > tol)).expect("indices are in range")
    }

    /// `[self, other] = self·other − other·self`, pruned at [`PRUNE_TOLERANCE`].
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(other)?.sub(&other.mul(self)?)?.pruned(PRUNE_TOLERANCE))
    }

    /// Largest entry modulus (the sparse max-norm).
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |H − H†|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries().map(|(r, c, v)| (v - self.get(c, r).conj()).norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, Complex64::new(0.0, 0.0));
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }
}
