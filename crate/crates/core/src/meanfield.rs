//! Mean-field (infinite trader) solutions of the price-one trading model.
//!
//! With every `p_ij` replaced by `p̃/L` and `L → ∞`, the collective amplitude
//! `X^∞`, the share density `η` and the mean budget `Q` become central
//! elements and are represented here by scalars. Each trader then obeys a
//! closed linear system for `(Z_l, n̂_l, Z_l†)`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `|Φ − ν|` below this counts as resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-12;

/// Tolerance on the Appendix-type constraint `2μ + Φ̃ = 0`.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-12;

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn validate_holdings(n: &[f64], k: &[f64]) -> Result<()> {
    if n.len() != k.len() {
        return Err(Error::Config(format!("{} share entries but {} cash entries", n.len(), k.len())));
    }
    if n.is_empty() {
        return Err(Error::Config("at least one trader is required".into()));
    }
    for (i, (&a, &b)) in n.iter().zip(k).enumerate() {
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0) {
            return Err(Error::Config(format!("trader {i}: shares and cash must be finite and non-negative")));
        }
    }
    Ok(())
}

fn trader_index(l: usize, count: usize) -> Result<()> {
    if l < count {
        Ok(())
    } else {
        Err(Error::Config(format!("trader {l} out of range ({count} traders)")))
    }
}

/// Central data for the homogeneous case `β_l − α_l = Φ` for all traders.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanFieldParams {
    pub phi: f64,
    /// Initial collective amplitude `X₀^∞`.
    pub x0: Complex64,
    /// Mean share density `η`.
    pub eta: f64,
    /// Mean budget `Q`.
    pub qbar: f64,
    pub n: Vec<f64>,
    pub k: Vec<f64>,
    /// Initial `⟨X_l⟩`, needed only on resonance.
    pub x_l0: Option<Vec<Complex64>>,
}

impl MeanFieldParams {
    /// `η` and `Q` default to the means over the supplied traders.
    pub fn new(phi: f64, x0: Complex64, n: Vec<f64>, k: Vec<f64>) -> Result<Self> {
        validate_holdings(&n, &k)?;
        let eta = mean(&n);
        let q: Vec<f64> = n.iter().zip(&k).map(|(a, b)| a + b).collect();
        let qbar = mean(&q);
        Ok(Self { phi, x0, eta, qbar, n, k, x_l0: None })
    }

    pub fn validate(&self) -> Result<()> {
        validate_holdings(&self.n, &self.k)?;
        if !(self.phi.is_finite() && self.eta.is_finite() && self.qbar.is_finite()) {
            return Err(Error::Config("phi, eta and Q must be finite".into()));
        }
        if !(self.x0.re.is_finite() && self.x0.im.is_finite()) {
            return Err(Error::Config("X0 must be finite".into()));
        }
        if let Some(x) = &self.x_l0 {
            if x.len() != self.n.len() {
                return Err(Error::Config(format!("x_l0 has {} entries, expected {}", x.len(), self.n.len())));
            }
        }
        Ok(())
    }

    pub fn traders(&self) -> usize {
        self.n.len()
    }

    /// `ν = Φ + 4η − 2Q`, the rotation frequency of `X^∞(t)`.
    pub fn nu(&self) -> f64 {
        self.phi + 4.0 * self.eta - 2.0 * self.qbar
    }

    /// `Φ − ν`.
    pub fn detuning(&self) -> f64 {
        self.phi - self.nu()
    }

    pub fn is_resonant(&self) -> bool {
        self.detuning().abs() <= RESONANCE_TOLERANCE
    }

    /// `ω = sqrt((Φ − ν)² + 16|X₀^∞|²)`.
    pub fn omega(&self) -> f64 {
        let d = self.detuning();
        (d * d + 16.0 * self.x0.norm_sqr()).sqrt()
    }

    pub fn budget(&self, l: usize) -> f64 {
        self.n[l] + self.k[l]
    }
}

/// The periodic solution away from resonance, period `2π/ω`.
pub fn nl_closed_form(p: &MeanFieldParams, l: usize, t: f64) -> Result<f64> {
    p.validate()?;
    trader_index(l, p.traders())?;
    if p.is_resonant() {
        return Err(Error::Resonant);
    }
    let d2 = p.detuning().powi(2);
    let x2 = p.x0.norm_sqr();
    let omega2 = d2 + 16.0 * x2;
    let cos = (omega2.sqrt() * t).cos();
    let (n, k) = (p.n[l], p.k[l]);
    Ok((n * d2 - 8.0 * x2 * (k * (cos - 1.0) - n * (cos + 1.0))) / omega2)
}

/// The resonant branch `Φ = ν`: oscillation about `Q_l/2` at `ω = 4|X₀^∞|`.
pub fn nl_resonant(p: &MeanFieldParams, l: usize, t: f64) -> Result<f64> {
    p.validate()?;
    trader_index(l, p.traders())?;
    if !p.is_resonant() {
        return Err(Error::Config(format!("not resonant: Phi - nu = {}", p.detuning())));
    }
    let n = p.n[l];
    let omega = 4.0 * p.x0.norm();
    if omega == 0.0 {
        return Ok(n);
    }
    let xl = p
        .x_l0
        .as_ref()
        .map(|v| v[l])
        .ok_or_else(|| Error::Config("resonant branch needs the initial X_l amplitudes".into()))?;
    let b = resonant_sine_amplitude(p.x0, xl, omega);
    let half = 0.5 * p.budget(l);
    Ok(half + (n - half) * (omega * t).cos() + b * (omega * t).sin())
}

/// `B = (2i/ω)(X₀* X_l − X₀ X_l*)`, real by construction.
pub fn resonant_sine_amplitude(x0: Complex64, xl: Complex64, omega: f64) -> f64 {
    let z = Complex64::new(0.0, 2.0 / omega) * (x0.conj() * xl - x0 * xl.conj());
    z.re
}

/// Dispatches to the resonant or non-resonant closed form.
pub fn nl_mean_field(p: &MeanFieldParams, l: usize, t: f64) -> Result<f64> {
    if p.is_resonant() {
        nl_resonant(p, l, t)
    } else {
        nl_closed_form(p, l, t)
    }
}

/// `Δ` of `Θ̇ = iΔΘ` for `Θ = (Z_l, n̂_l, Z_l†)`, with the conjugate amplitude
/// in the rows fed by `Z_l†`.
pub fn delta_matrix(p: &MeanFieldParams) -> Matrix3<Complex64> {
    let d = Complex64::new(p.detuning(), 0.0);
    let x = p.x0;
    let xc = x.conj();
    let zero = Complex64::new(0.0, 0.0);
    Matrix3::new(d, x * 4.0, zero, xc * 2.0, zero, -x * 2.0, zero, -xc * 4.0, -d)
}

/// Eigenvalues of [`delta_matrix`]: `{0, ω, −ω}`.
pub fn delta_eigenvalues(p: &MeanFieldParams) -> [f64; 3] {
    let w = p.omega();
    [0.0, w, -w]
}

/// `n_l(t)` from the eigen-solution `Θ(t) = V e^{iΔ_d t} V⁻¹ Θ(0)`, with
/// `Θ(0) = (−2X₀Q_l/(Φ−ν), n_l, −2X₀*Q_l/(Φ−ν))` on a number state.
pub fn theta_system(p: &MeanFieldParams, l: usize, times: &[f64]) -> Result<Vec<f64>> {
    p.validate()?;
    trader_index(l, p.traders())?;
    if p.is_resonant() {
        if p.x0.norm() == 0.0 {
            return Ok(vec![p.n[l]; times.len()]);
        }
        return Err(Error::Resonant);
    }
    let d = p.detuning();
    let x = p.x0;
    let q = p.budget(l);
    let theta0 = Vector3::new(x * (-2.0 * q / d), Complex64::new(p.n[l], 0.0), x.conj() * (-2.0 * q / d));

    if x.norm() == 0.0 {
        // Δ is diagonal; the share component does not move
        return Ok(vec![p.n[l]; times.len()]);
    }

    let eig = delta_eigenvalues(p);
    let mut v = Matrix3::<Complex64>::zeros();
    for (col, &lam) in eig.iter().enumerate() {
        v[(0, col)] = -x * 4.0 / (d - lam);
        v[(1, col)] = Complex64::new(1.0, 0.0);
        v[(2, col)] = -x.conj() * 4.0 / (d + lam);
    }
    let v_inv = v.try_inverse().ok_or_else(|| Error::Undefined("Delta eigenvector matrix is singular".into()))?;
    let coeffs = v_inv * theta0;
    times
        .iter()
        .map(|&t| {
            let n: Complex64 = (0..3).map(|k| v[(1, k)] * Complex64::from_polar(1.0, eig[k] * t) * coeffs[k]).sum();
            if n.im.abs() > 1e-8 * n.re.abs().max(1.0) {
                Err(Error::Undefined(format!("theta solution has imaginary part {:e}", n.im)))
            } else {
                Ok(n.re)
            }
        })
        .collect()
}

/// Heterogeneous traders `γ_l = β_l − α_l` under `X_γ^∞(0) = 0` and
/// `2μ + Φ̃ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Appendix2Params {
    pub gamma_l: Vec<f64>,
    /// `Φ̃`, the mean of `γ_l`.
    pub phi_tilde: f64,
    /// `μ = 2η − Q`.
    pub mu: f64,
    pub x0: Complex64,
    pub n: Vec<f64>,
    pub k: Vec<f64>,
}

impl Appendix2Params {
    pub fn validate(&self) -> Result<()> {
        validate_holdings(&self.n, &self.k)?;
        if self.gamma_l.len() != self.n.len() {
            return Err(Error::Config(format!(
                "gamma_l has {} entries, expected {}",
                self.gamma_l.len(),
                self.n.len()
            )));
        }
        if self.phi_tilde == 0.0 || !self.phi_tilde.is_finite() {
            return Err(Error::Config("phi_tilde must be finite and non-zero".into()));
        }
        if (2.0 * self.mu + self.phi_tilde).abs() > CONSTRAINT_TOLERANCE {
            return Err(Error::Config(format!(
                "constraint 2 mu + phi_tilde = 0 violated ({})",
                2.0 * self.mu + self.phi_tilde
            )));
        }
        Ok(())
    }

    /// `ω_l = sqrt((γ_l + Φ̃)² + 64μ²|X₀|²/Φ̃²)`.
    pub fn omega(&self, l: usize) -> f64 {
        let s = self.gamma_l[l] + self.phi_tilde;
        (s * s + 64.0 * self.mu * self.mu * self.x0.norm_sqr() / (self.phi_tilde * self.phi_tilde)).sqrt()
    }
}

/// Per-trader periodic solution with frequency `ω_l`.
pub fn nl_appendix2(p: &Appendix2Params, l: usize, t: f64) -> Result<f64> {
    p.validate()?;
    trader_index(l, p.n.len())?;
    let s2 = (p.gamma_l[l] + p.phi_tilde).powi(2);
    let c = 32.0 * p.mu * p.mu * p.x0.norm_sqr() / (p.phi_tilde * p.phi_tilde);
    let omega2 = s2 + 2.0 * c;
    let (n, k) = (p.n[l], p.k[l]);
    if omega2 == 0.0 {
        return Ok(n);
    }
    let cos = (omega2.sqrt() * t).cos();
    Ok((n * s2 - c * (k * (cos - 1.0) - n * (cos + 1.0))) / omega2)
}

/// `Π_l(t) = Π_l(0) + (γ − 1)(n_l(t) − n_l(0))` at unit share price.
pub fn portfolio_meanfield(gamma_share: f64, n_series: &[f64], n0: f64, pi0: f64) -> Vec<f64> {
    n_series.iter().map(|n| pi0 + (gamma_share - 1.0) * (n - n0)).collect()
}

/// Indices where `n_l(t)` leaves `[−tol, Q_l + tol]`. Reported, not clamped.
pub fn range_violations(n_series: &[f64], budget: f64, tol: f64) -> Vec<usize> {
    n_series.iter().enumerate().filter(|(_, &n)| n < -tol || n > budget + tol).map(|(i, _)| i).collect()
}
