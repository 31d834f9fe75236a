//! Exact Schrödinger-picture evolution `ψ(t) = e^{−iHt} ψ(0)`.
//!
//! Sectors up to [`DENSE_LIMIT`] states are diagonalized once and every time
//! point is a phase rotation in the eigenbasis. Larger sectors use Lanczos
//! (Krylov) propagation with an error-controlled step size; the tridiagonal
//! block is itself diagonalized exactly.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::sparse::SparseOperator;
use super::state::StateVector;
use crate::error::{Error, Result};

/// Largest sector handled by dense eigendecomposition.
pub const DENSE_LIMIT: usize = 3000;

/// Maximum tolerated `max |H − H†|` for evolution.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

const KRYLOV_DIM: usize = 30;
const KRYLOV_STEP_TOL: f64 = 1e-14;

fn check_hermitian(h: &SparseOperator) -> Result<()> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOLERANCE {
        Err(Error::NotHermitian { defect })
    } else {
        Ok(())
    }
}

/// Eigendecomposition `H = V E V†` of a Hermitian sector operator.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl SpectralPropagator {
    pub fn new(h: &SparseOperator) -> Result<Self> {
        check_hermitian(h)?;
        let (eigenvalues, eigenvectors) = if h.is_real() {
            let dense = h.to_dense().map(|z| z.re);
            let sym = (&dense + dense.transpose()) * 0.5;
            let eig = SymmetricEigen::new(sym);
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
        } else {
            let dense = h.to_dense();
            let herm = (&dense + dense.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(herm);
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        };
        Ok(Self { eigenvalues, eigenvectors })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Evolves `state` to each of `times`.
    pub fn evolve(&self, state: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
        let n = self.eigenvalues.len();
        if state.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: state.dim() });
        }
        let psi = DVector::from_column_slice(state.amplitudes());
        let coeffs = self.eigenvectors.adjoint() * psi;
        Ok(times
            .iter()
            .map(|&t| {
                let rotated = DVector::from_iterator(
                    n,
                    coeffs.iter().zip(&self.eigenvalues).map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t)),
                );
                let out = &self.eigenvectors * rotated;
                StateVector::from_amplitudes(out.iter().copied().collect())
            })
            .collect())
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Krylov-subspace propagator for sectors too large to diagonalize.
pub struct KrylovPropagator<'a> {
    h: &'a SparseOperator,
}

struct KrylovBasis {
    vectors: Vec<Vec<Complex64>>,
    ritz_values: Vec<f64>,
    ritz_vectors: DMatrix<f64>,
    /// Coupling from the last Lanczos vector to the next (zero on breakdown).
    residual: f64,
}

impl KrylovBasis {
    /// Coefficients of `e^{−iT dt} e₁` and the error estimate
    /// `residual · |e_mᵀ e^{−iT dt} e₁|`.
    fn coefficients(&self, dt: f64) -> (Vec<Complex64>, f64) {
        let m = self.ritz_values.len();
        let mut y = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..m {
            let w = Complex64::from_polar(self.ritz_vectors[(0, k)], -self.ritz_values[k] * dt);
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += w * self.ritz_vectors[(i, k)];
            }
        }
        // the computed |y_m| bottoms out at roundoff, so also use the bound
        // |y_m| <= sum_{k >= m-1} (rho dt)^k / k! from the shifted Ritz spectrum
        let hi = self.ritz_values.iter().copied().fold(f64::MIN, f64::max);
        let lo = self.ritz_values.iter().copied().fold(f64::MAX, f64::min);
        let rho = 0.5 * (hi - lo);
        let x = rho * dt.abs();
        let mut term = 1.0;
        for k in 1..m {
            term *= x / k as f64;
        }
        let bound = term * x.exp();
        let err = self.residual * y[m - 1].norm().min(bound);
        (y, err)
    }
}

impl<'a> KrylovPropagator<'a> {
    pub fn new(h: &'a SparseOperator) -> Result<Self> {
        check_hermitian(h)?;
        Ok(Self { h })
    }

    fn basis(&self, v: &[Complex64]) -> KrylovBasis {
        let n = v.len();
        let beta0 = norm(v);
        let mut vectors: Vec<Vec<Complex64>> = vec![v.iter().map(|x| x / beta0).collect()];
        let mut alphas = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut residual = 0.0;
        let scale = self.h.max_abs().max(1.0);
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..KRYLOV_DIM.min(n) {
            self.h.matvec_into(&vectors[j], &mut w);
            let a = dot(&vectors[j], &w).re;
            alphas.push(a);
            w.iter_mut().zip(&vectors[j]).for_each(|(wi, qi)| *wi -= a * qi);
            if j > 0 {
                let b = betas[j - 1];
                w.iter_mut().zip(&vectors[j - 1]).for_each(|(wi, qi)| *wi -= b * qi);
            }
            let b = norm(&w);
            if b <= 1e-13 * scale || j + 1 == KRYLOV_DIM.min(n) {
                residual = if b <= 1e-13 * scale { 0.0 } else { b };
                break;
            }
            betas.push(b);
            vectors.push(w.iter().map(|x| x / b).collect());
        }
        let m = alphas.len();
        vectors.truncate(m);
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alphas[i];
            if i + 1 < m {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        KrylovBasis {
            vectors,
            ritz_values: eig.eigenvalues.iter().copied().collect(),
            ritz_vectors: eig.eigenvectors,
            residual,
        }
    }

    /// Largest admissible substep not exceeding `dt`, with its coefficients.
    fn admissible(basis: &KrylovBasis, dt: f64) -> Result<(f64, Vec<Complex64>)> {
        let mut sub = dt;
        let (mut y, mut err) = basis.coefficients(sub);
        let mut halvings = 0;
        while err > KRYLOV_STEP_TOL {
            sub *= 0.9;
            halvings += 1;
            if halvings > 400 {
                return Err(Error::Krylov("step size underflow".into()));
            }
            (y, err) = basis.coefficients(sub);
        }
        Ok((sub, y))
    }

    fn combine(basis: &KrylovBasis, y: &[Complex64], amp: f64, dim: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (coef, q) in y.iter().zip(&basis.vectors) {
            let c = coef * amp;
            out.iter_mut().zip(q).for_each(|(o, qi)| *o += c * qi);
        }
        out
    }

    /// Propagates `v` by `dt`, splitting into substeps as needed.
    pub fn step(&self, v: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
        let mut current = v.to_vec();
        let mut remaining = dt;
        let mut guard = 0usize;
        while remaining != 0.0 {
            let amp = norm(&current);
            if amp == 0.0 {
                return Ok(current);
            }
            let basis = self.basis(&current);
            let (sub, y) = Self::admissible(&basis, remaining)?;
            current = Self::combine(&basis, &y, amp, current.len());
            remaining -= sub;
            if remaining.abs() < 1e-15 * dt.abs() {
                remaining = 0.0;
            }
            guard += 1;
            if guard > 1_000_000 {
                return Err(Error::Krylov("too many substeps".into()));
            }
        }
        Ok(current)
    }

    /// Evolves `state` to each of `times`. On an ascending grid one Krylov
    /// basis serves every grid point inside its admissible step.
    pub fn evolve(&self, state: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
        if state.dim() != self.h.dim() {
            return Err(Error::DimensionMismatch { expected: self.h.dim(), got: state.dim() });
        }
        let dim = state.dim();
        let mut out = Vec::with_capacity(times.len());
        let mut current = state.amplitudes().to_vec();
        let mut t_cur = 0.0;
        let mut idx = 0;
        while idx < times.len() {
            let target = times[idx];
            if target == t_cur {
                out.push(StateVector::from_amplitudes(current.clone()));
                idx += 1;
                continue;
            }
            let amp = norm(&current);
            let ascending_tail = times[idx..].windows(2).all(|w| w[0] <= w[1]);
            if amp == 0.0 || target < t_cur || !ascending_tail {
                current = self.step(&current, target - t_cur)?;
                t_cur = target;
                continue;
            }
            let basis = self.basis(&current);
            let last = *times.last().unwrap_or(&target);
            let (reach, y_reach) = Self::admissible(&basis, last - t_cur)?;
            while idx < times.len() && times[idx] - t_cur <= reach {
                let (y, _) = basis.coefficients(times[idx] - t_cur);
                out.push(StateVector::from_amplitudes(Self::combine(&basis, &y, amp, dim)));
                idx += 1;
            }
            current = Self::combine(&basis, &y_reach, amp, dim);
            t_cur += reach;
        }
        Ok(out)
    }
}

/// Exact evolution `e^{−iHt} ψ` at each grid time.
pub fn evolve_exact(h: &SparseOperator, state: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: state.dim() });
    }
    if h.dim() <= DENSE_LIMIT {
        SpectralPropagator::new(h)?.evolve(state, times)
    } else {
        KrylovPropagator::new(h)?.evolve(state, times)
    }
}
