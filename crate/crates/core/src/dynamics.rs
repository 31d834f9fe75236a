//! Closed-form and one-body dynamics for models one and two.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonians::ModelOneConfig;

/// Default number of grid points for generated time grids.
pub const DEFAULT_POINTS: usize = 400;

/// `points` equally spaced times covering `[0, t_max]`.
pub fn time_grid(t_max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect(),
    }
}

/// The matrix of the linear system `i ȧ = X a` for the annihilators:
/// `α_l` on the diagonal and `p_{m l}` at row `l`, column `m`.
pub fn one_body_matrix(cfg: &ModelOneConfig) -> DMatrix<f64> {
    let l = cfg.traders();
    DMatrix::from_fn(l, l, |row, col| if row == col { cfg.alpha[row] } else { cfg.p[col][row] })
}

/// `W(t) = V e^{−i X_d t} V†` so that `a(t) = W(t) a(0)`.
#[derive(Clone, Debug)]
pub struct OneBodyPropagator {
    x: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl OneBodyPropagator {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        if !x.is_square() {
            return Err(Error::Config("one-body matrix must be square".into()));
        }
        let defect = (&x - x.transpose()).amax();
        if defect > 1e-12 {
            return Err(Error::NotHermitian { defect });
        }
        let eig = SymmetricEigen::new(x.clone());
        Ok(Self { x, eigenvalues: eig.eigenvalues.iter().copied().collect(), eigenvectors: eig.eigenvectors })
    }

    pub fn from_config(cfg: &ModelOneConfig) -> Result<Self> {
        cfg.validate()?;
        Self::new(one_body_matrix(cfg))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn at(&self, t: f64) -> DMatrix<Complex64> {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        DMatrix::from_fn(n, n, |j, l| {
            (0..n).map(|k| Complex64::from_polar(v[(j, k)] * v[(l, k)], -self.eigenvalues[k] * t)).sum()
        })
    }

    /// `n_j(t)` for every time in `times`, one row per time.
    pub fn occupations(&self, n0: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>> {
        if n0.len() != self.eigenvalues.len() {
            return Err(Error::DimensionMismatch { expected: self.eigenvalues.len(), got: n0.len() });
        }
        Ok(times.iter().map(|&t| occupations_from_propagator(&self.at(t), n0)).collect())
    }
}

/// `max |W†W − I|`.
pub fn unitarity_defect(w: &DMatrix<Complex64>) -> f64 {
    let prod = w.adjoint() * w;
    let id = DMatrix::<Complex64>::identity(w.nrows(), w.ncols());
    (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// On a number state the cross terms `⟨a_l† a_m⟩` with `l ≠ m` vanish, so
/// `n_j(t) = Σ_l |W_jl(t)|² n_l(0)`.
pub fn occupations_from_propagator(w: &DMatrix<Complex64>, n0: &[f64]) -> Vec<f64> {
    (0..w.nrows()).map(|j| (0..w.ncols()).map(|l| w[(j, l)].norm_sqr() * n0[l]).sum()).collect()
}

/// `Ω = sqrt(α² + 4p²)` for two traders with `α = α₂ − α₁`.
pub fn two_trader_frequency(alpha_diff: f64, p: f64) -> f64 {
    (alpha_diff * alpha_diff + 4.0 * p * p).sqrt()
}

/// Period `2π/Ω`, or `None` when both `α` and `p` vanish.
pub fn two_trader_period(alpha_diff: f64, p: f64) -> Option<f64> {
    let omega = two_trader_frequency(alpha_diff, p);
    (omega > 0.0).then(|| 2.0 * PI / omega)
}

/// Two-trader occupations `(n₁(t), n₂(t))` of model one.
pub fn two_trader_closed_form(alpha_diff: f64, p: f64, n1: f64, n2: f64, t: f64) -> (f64, f64) {
    let omega2 = alpha_diff * alpha_diff + 4.0 * p * p;
    if omega2 == 0.0 {
        return (n1, n2);
    }
    let cos = (omega2.sqrt() * t).cos();
    let pp = 2.0 * p * p;
    let first = (n1 * (alpha_diff * alpha_diff + pp * (1.0 + cos)) + pp * n2 * (1.0 - cos)) / omega2;
    let second = pp * n1 / omega2 * (1.0 - cos) + n2 * (1.0 + pp / omega2 * (cos - 1.0));
    (first, second)
}

/// Mean price and supply `(P_r(t), O_f(t))` of the decoupled subsystem
/// `o†o + p†p + o†p + p†o`.
pub fn price_supply_solution(supply0: f64, price0: f64, t: f64) -> (f64, f64) {
    let sum = price0 + supply0;
    let diff = (price0 - supply0) * (2.0 * t).cos();
    (0.5 * (sum + diff), 0.5 * (sum - diff))
}

/// Integer effective price `M`: the temporal mean `(P_r + O_f)/2` of the
/// price oscillation, rounded half up.
pub fn effective_price(supply0: f64, price0: f64) -> Result<u64> {
    if !(supply0 >= 0.0 && price0 >= 0.0) || !supply0.is_finite() || !price0.is_finite() {
        return Err(Error::Config("supply and price must be finite and non-negative".into()));
    }
    Ok((0.5 * (supply0 + price0) + 0.5).floor() as u64)
}

/// Portfolio, shares and cash per trader on a shared time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PortfolioSeries {
    pub times: Vec<f64>,
    /// `[trader][time]`
    pub portfolio: Vec<Vec<f64>>,
    pub shares: Vec<Vec<f64>>,
    pub cash: Vec<Vec<f64>>,
}

/// `Π_j(t) = Π_j(0) + (γ − M)(n_j(t) − n_j(0))` with the cash recovered
/// from `Q_j = n_j + k_j / M`. `n_series` is indexed `[trader][time]`.
pub fn portfolio_series(
    gamma_share: f64,
    price_m: u32,
    times: &[f64],
    n_series: &[Vec<f64>],
    n0: &[f64],
    pi0: &[f64],
) -> Result<PortfolioSeries> {
    if price_m == 0 {
        return Err(Error::Config("price M must be positive".into()));
    }
    if n0.len() != n_series.len() || pi0.len() != n_series.len() {
        return Err(Error::DimensionMismatch { expected: n_series.len(), got: n0.len().min(pi0.len()) });
    }
    if let Some(bad) = n_series.iter().find(|s| s.len() != times.len()) {
        return Err(Error::DimensionMismatch { expected: times.len(), got: bad.len() });
    }
    let m = price_m as f64;
    let mut portfolio = Vec::with_capacity(n_series.len());
    let mut cash = Vec::with_capacity(n_series.len());
    for (j, series) in n_series.iter().enumerate() {
        let k0 = pi0[j] - gamma_share * n0[j];
        let q = n0[j] + k0 / m;
        portfolio.push(series.iter().map(|n| pi0[j] + (gamma_share - m) * (n - n0[j])).collect());
        cash.push(series.iter().map(|n| m * (q - n)).collect());
    }
    Ok(PortfolioSeries { times: times.to_vec(), portfolio, shares: n_series.to_vec(), cash })
}
