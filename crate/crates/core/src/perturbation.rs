//! Heisenberg nested-commutator series and the two-trader second-order
//! results for model two.
//!
//! For an observable `X`, `ω(X(t)) = Σ_n ω(iⁿ [H,X]_n) tⁿ / n!` with
//! `[H,X]_0 = X` and `[H,X]_{n+1} = [H,[H,X]_n]`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{expectation, falling_factorial, real_value, SparseOperator, StateVector};
use crate::hamiltonians::ModelTwoConfig;

/// Highest series order accepted by [`heisenberg_series`].
pub const MAX_ORDER: usize = 12;

/// Taylor coefficients of `ω(X(t))` around `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesResult {
    pub coefficients: Vec<Complex64>,
    pub order: usize,
    /// `1 / max|H_ij|`, a rough time scale for the series; advisory only.
    pub radius_hint: f64,
}

impl SeriesResult {
    pub fn evaluate(&self, t: f64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
    }

    pub fn evaluate_real(&self, t: f64) -> Result<f64> {
        real_value(self.evaluate(t))
    }
}

pub fn heisenberg_series(
    h: &SparseOperator,
    x: &SparseOperator,
    state: &StateVector,
    order: usize,
) -> Result<SeriesResult> {
    if order > MAX_ORDER {
        return Err(Error::OrderLimit { requested: order, limit: MAX_ORDER });
    }
    if h.dim() != x.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: x.dim() });
    }
    let mut coefficients = Vec::with_capacity(order + 1);
    let mut nested = x.clone();
    let mut factor = Complex64::new(1.0, 0.0);
    coefficients.push(expectation(state, &nested)?);
    for n in 1..=order {
        nested = h.commutator(&nested)?;
        factor *= Complex64::new(0.0, 1.0) / n as f64;
        coefficients.push(factor * expectation(state, &nested)?);
    }
    let hmax = h.max_abs();
    let radius_hint = if hmax > 0.0 { 1.0 / hmax } else { f64::INFINITY };
    Ok(SeriesResult { coefficients, order, radius_hint })
}

/// `ε₊, ε₋` of a two-trader number state: the amplitudes for trader one to
/// buy (`ε₊`) or sell (`ε₋`) one share at price `M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonPair {
    pub eps_plus: f64,
    pub eps_minus: f64,
}

impl EpsilonPair {
    /// `ε₊² − ε₋²`.
    pub fn imbalance(&self) -> f64 {
        self.eps_plus * self.eps_plus - self.eps_minus * self.eps_minus
    }
}

/// A side with less than `M` cash cannot buy, so its amplitude is zero.
pub fn epsilon_pair(n1: u32, n2: u32, k1: u32, k2: u32, price_m: u32) -> EpsilonPair {
    let plus =
        (n1 as f64 + 1.0) * n2 as f64 * falling_factorial(k1, price_m) * falling_factorial(k2 + price_m, price_m);
    let minus =
        (n2 as f64 + 1.0) * n1 as f64 * falling_factorial(k1 + price_m, price_m) * falling_factorial(k2, price_m);
    EpsilonPair { eps_plus: plus.sqrt(), eps_minus: minus.sqrt() }
}

/// Shares, cash and portfolio of both traders to order `t²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoTraderSecondOrder {
    pub n1: f64,
    pub k1: f64,
    pub pi1: f64,
    pub n2: f64,
    pub k2: f64,
    pub pi2: f64,
}

pub fn second_order_two_traders(cfg: &ModelTwoConfig, t: f64) -> Result<TwoTraderSecondOrder> {
    cfg.validate()?;
    if cfg.traders() != 2 {
        return Err(Error::Config(format!("second-order formulas need 2 traders, got {}", cfg.traders())));
    }
    let (n1, n2) = (cfg.initial_n[0], cfg.initial_n[1]);
    let (k1, k2) = (cfg.initial_k[0], cfg.initial_k[1]);
    let m = cfg.price_m as f64;
    let gamma = cfg.gamma_share;
    let p12 = cfg.p[0][1];
    let shift = t * t * p12 * p12 * epsilon_pair(n1, n2, k1, k2, cfg.price_m).imbalance();

    let n1_t = n1 as f64 + shift;
    let k1_t = k1 as f64 - m * shift;
    // trader two from N and Q₂ conservation
    let n2_t = (n1 + n2) as f64 - n1_t;
    let q2 = n2 as f64 + k2 as f64 / m;
    let k2_t = m * (q2 - n2_t);
    Ok(TwoTraderSecondOrder {
        n1: n1_t,
        k1: k1_t,
        pi1: gamma * n1 as f64 + k1 as f64 + (gamma - m) * shift,
        n2: n2_t,
        k2: k2_t,
        pi2: gamma * n2_t + k2_t,
    })
}
