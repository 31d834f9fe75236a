//! KMS equilibrium for the mean-field model at `X₀^∞ = 0`.
//!
//! With a factorized thermal state, the KMS condition for `A = B† = X_l`
//! reduces to `e^{βΦ} = n_a(1 + n_c) / (n_c(1 + n_a))`, where `n_a` and `n_c`
//! are the thermal share and cash occupations and `n_a + n_c = Q_l`.

use std::fmt;

use crate::error::{Error, Result};

/// Residual tolerance for returned pairs.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;

/// Relative tolerance under which `n_a` and `n_c` count as equal.
pub const BALANCE_TOLERANCE: f64 = 1e-12;

/// `n_a(1 + n_c) / (n_c(1 + n_a))`.
pub fn kms_rhs(n_a: f64, n_c: f64) -> Result<f64> {
    if !n_c.is_finite() || n_c <= 0.0 {
        return Err(Error::Undefined(format!("KMS ratio needs n_c > 0, got {n_c}")));
    }
    if !n_a.is_finite() || n_a < 0.0 {
        return Err(Error::Config(format!("n_a must be finite and non-negative, got {n_a}")));
    }
    Ok(n_a * (1.0 + n_c) / (n_c * (1.0 + n_a)))
}

fn ln_rhs(n_a: f64, n_c: f64) -> f64 {
    n_a.ln() + n_c.ln_1p() - n_c.ln() - n_a.ln_1p()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KmsCase {
    Ia,
    Ib,
    Ic,
    IiWith,
    IiWithout,
    IIIa,
    IIIb,
    IIIc,
}

/// What the KMS condition allows in a given case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// A unique pair `(β₀, n_c)` exists.
    UniquePair,
    /// Only `β = 0` satisfies the condition.
    BetaZeroOnly,
    /// Every `β` does (`Φ = 0` on the diagonal).
    AnyBeta,
    NoSolution,
}

impl KmsCase {
    /// Case from the sign of `Φ` and the ordering of `n_a` and `n_c`.
    pub fn classify(phi: f64, n_a: f64, n_c: f64) -> Self {
        let scale = n_a.abs().max(n_c.abs()).max(1.0);
        let balanced = (n_a - n_c).abs() <= BALANCE_TOLERANCE * scale;
        let more_shares = n_a > n_c;
        if phi > 0.0 {
            if balanced {
                Self::Ib
            } else if more_shares {
                Self::Ia
            } else {
                Self::Ic
            }
        } else if phi < 0.0 {
            if balanced {
                Self::IIIb
            } else if more_shares {
                Self::IIIa
            } else {
                Self::IIIc
            }
        } else if balanced {
            Self::IiWith
        } else {
            Self::IiWithout
        }
    }

    pub fn outcome(self) -> Outcome {
        match self {
            Self::Ia | Self::IIIc => Outcome::UniquePair,
            Self::Ib | Self::IIIb => Outcome::BetaZeroOnly,
            Self::IiWith => Outcome::AnyBeta,
            Self::Ic | Self::IIIa | Self::IiWithout => Outcome::NoSolution,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Ia => "ia",
            Self::Ib => "ib",
            Self::Ic => "ic",
            Self::IiWith => "ii-with",
            Self::IiWithout => "ii-without",
            Self::IIIa => "iiia",
            Self::IIIb => "iiib",
            Self::IIIc => "iiic",
        }
    }
}

impl fmt::Display for KmsCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KmsMode {
    /// Given the cash occupation (shares fixed by the budget), find `β`.
    SolveBetaGivenNc { n_c: f64 },
    /// Given `β ≥ 0`, find the occupations on the budget line.
    SolvePair { beta: f64 },
    /// Classify an arbitrary pair of occupations.
    Classify { n_a: f64, n_c: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KmsProblem {
    pub phi: f64,
    /// Conserved budget `Q_l = n_a + n_c`.
    pub q_l: f64,
    pub mode: KmsMode,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KmsSolution {
    pub case: KmsCase,
    pub beta0: Option<f64>,
    pub nc0: Option<f64>,
    pub na0: Option<f64>,
}

impl KmsSolution {
    fn none(case: KmsCase) -> Self {
        Self { case, beta0: None, nc0: None, na0: None }
    }
}

/// Unique split `(n_a, n_c)` of `Q` with `ln rhs(n_a, n_c) = log_target`, by
/// bisection over `[δ, Q − δ]`, `δ = 1e-12·Q`. The minority occupation is the
/// bisection variable so that it keeps full relative precision. `None` means
/// the target lies outside the range reachable inside the bracket.
pub fn solve_budget_split(q_l: f64, log_target: f64) -> Option<(f64, f64)> {
    let delta = 1e-12 * q_l;
    let shares_minor = log_target < 0.0;
    // g is decreasing in the minority variable x
    let g = |x: f64| {
        let value = if shares_minor { ln_rhs(x, q_l - x) } else { ln_rhs(q_l - x, x) };
        if shares_minor {
            log_target - value
        } else {
            value - log_target
        }
    };
    let (mut lo, mut hi) = (delta, 0.5 * q_l);
    if g(lo) < 0.0 || g(hi) > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    Some(if shares_minor { (x, q_l - x) } else { (q_l - x, x) })
}

pub fn solve_equilibrium(problem: &KmsProblem) -> Result<KmsSolution> {
    let KmsProblem { phi, q_l, mode } = *problem;
    if !q_l.is_finite() || q_l <= 0.0 {
        return Err(Error::Config(format!("budget Q_l must be positive, got {q_l}")));
    }
    if !phi.is_finite() {
        return Err(Error::Config("phi must be finite".into()));
    }
    match mode {
        KmsMode::Classify { n_a, n_c } => {
            if !(n_a >= 0.0 && n_c >= 0.0) {
                return Err(Error::Config("occupations must be non-negative".into()));
            }
            Ok(KmsSolution::none(KmsCase::classify(phi, n_a, n_c)))
        }
        KmsMode::SolveBetaGivenNc { n_c } => {
            if !(n_c > 0.0 && n_c <= q_l) {
                return Err(Error::Config(format!("n_c = {n_c} must lie in (0, Q_l]")));
            }
            let n_a = q_l - n_c;
            let case = KmsCase::classify(phi, n_a, n_c);
            let pair = |beta0| KmsSolution { case, beta0, nc0: Some(n_c), na0: Some(n_a) };
            Ok(match case.outcome() {
                Outcome::UniquePair => pair(Some(kms_rhs(n_a, n_c)?.ln() / phi)),
                Outcome::BetaZeroOnly => pair(Some(0.0)),
                Outcome::AnyBeta => pair(None),
                Outcome::NoSolution => KmsSolution::none(case),
            })
        }
        KmsMode::SolvePair { beta } => {
            if !beta.is_finite() || beta < 0.0 {
                return Err(Error::Config(format!("inverse temperature must be finite and non-negative, got {beta}")));
            }
            let log_target = beta * phi;
            if log_target == 0.0 {
                let half = 0.5 * q_l;
                let case = KmsCase::classify(phi, half, half);
                return Ok(KmsSolution { case, beta0: Some(beta), nc0: Some(half), na0: Some(half) });
            }
            match solve_budget_split(q_l, log_target) {
                Some((n_a, n_c)) => Ok(KmsSolution {
                    case: KmsCase::classify(phi, n_a, n_c),
                    beta0: Some(beta),
                    nc0: Some(n_c),
                    na0: Some(n_a),
                }),
                // target beyond the bracket: the occupations would sit at an endpoint
                None => {
                    let case = if log_target > 0.0 {
                        KmsCase::classify(phi, q_l, 0.0)
                    } else {
                        KmsCase::classify(phi, 0.0, q_l)
                    };
                    Ok(KmsSolution::none(case))
                }
            }
        }
    }
}

/// `|e^{β₀Φ} − rhs| / rhs` for a returned pair.
pub fn equilibrium_residual(phi: f64, solution: &KmsSolution) -> Option<f64> {
    let (beta, nc, na) = (solution.beta0?, solution.nc0?, solution.na0?);
    let rhs = kms_rhs(na, nc).ok()?;
    Some(((beta * phi).exp() - rhs).abs() / rhs)
}

/// `Π_l(t̃) = Π_l(0) + (γ − 1)(k_l(0) − n_c)` once equilibrium is reached.
pub fn equilibrium_portfolio(gamma_share: f64, k0: f64, nc0: f64, pi0: f64) -> f64 {
    pi0 + (gamma_share - 1.0) * (k0 - nc0)
}

/// Spread of the KMS ratio across traders; it must not depend on `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraderConsistency {
    pub ratios: Vec<f64>,
    pub max_deviation: f64,
    pub consistent: bool,
}

pub fn check_trader_independence(pairs: &[(f64, f64)], tol: f64) -> Result<TraderConsistency> {
    let ratios = pairs.iter().map(|&(na, nc)| kms_rhs(na, nc)).collect::<Result<Vec<_>>>()?;
    let max_deviation = match ratios.first() {
        Some(&first) => ratios.iter().map(|r| (r - first).abs()).fold(0.0, f64::max),
        None => 0.0,
    };
    Ok(TraderConsistency { consistent: max_deviation <= tol, ratios, max_deviation })
}
