//! Scenario files: JSON with a top-level `"model"` discriminator.
//!
//! The on-disk layout is documented in `docs/scenario-schema.md`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use fockmarket_core::hamiltonians::{ModelOneConfig, ModelTwoConfig};
use fockmarket_core::kms::{KmsMode, KmsProblem};
use fockmarket_core::meanfield::{Appendix2Params, MeanFieldParams};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Schrödinger evolution on the conserved sector.
    Exact,
    /// Single-particle propagator (model one only).
    Onebody,
    /// Truncated Heisenberg series.
    Series,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Onebody => "onebody",
            Self::Series => "series",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_max: f64,
    pub points: usize,
}

/// Hooks used only by the test suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestHooks {
    /// Adds `g (a_1† p + p† a_1)`, which breaks share conservation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub break_conservation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model1Spec {
    pub alpha: Vec<f64>,
    pub p: Vec<Vec<f64>>,
    pub initial_n: Vec<u32>,
    pub price_m: u32,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model2Spec {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub p: Vec<Vec<f64>>,
    pub price_m: u32,
    pub initial_n: Vec<u32>,
    pub initial_k: Vec<u32>,
    pub initial_o: u32,
    pub initial_mp: u32,
    pub gamma_share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanFieldSpec {
    pub phi: f64,
    /// `[re, im]`
    pub x0: [f64; 2],
    pub n: Vec<f64>,
    pub k: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qbar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_l0: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_share: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Appendix2Spec {
    pub gamma_l: Vec<f64>,
    pub phi_tilde: f64,
    pub mu: f64,
    pub x0: [f64; 2],
    pub n: Vec<f64>,
    pub k: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KmsSpec {
    pub phi: f64,
    pub q_l: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_a: Option<f64>,
    /// `[γ, k(0), Π(0)]` for the equilibrium portfolio channel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub portfolio: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Model1(Model1Spec),
    Model2(Model2Spec),
    MeanField(MeanFieldSpec),
    Appendix2(Appendix2Spec),
    Kms(KmsSpec),
}

impl ModelSpec {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Model1(_) => "model1",
            Self::Model2(_) => "model2",
            Self::MeanField(_) => "meanfield",
            Self::Appendix2(_) => "meanfield-appendix2",
            Self::Kms(_) => "kms",
        }
    }

    fn config_value(&self) -> Value {
        let v = match self {
            Self::Model1(c) => serde_json::to_value(c),
            Self::Model2(c) => serde_json::to_value(c),
            Self::MeanField(c) => serde_json::to_value(c),
            Self::Appendix2(c) => serde_json::to_value(c),
            Self::Kms(c) => serde_json::to_value(c),
        };
        v.expect("config types serialize to JSON")
    }

    fn from_parts(model: &str, config: Value) -> CliResult<Self> {
        fn typed<T: for<'de> Deserialize<'de>>(config: Value) -> CliResult<T> {
            serde_json::from_value(config).map_err(|e| CliError::Malformed(format!("config: {e}")))
        }
        Ok(match model {
            "model1" => Self::Model1(typed(config)?),
            "model2" => Self::Model2(typed(config)?),
            "meanfield" => Self::MeanField(typed(config)?),
            "meanfield-appendix2" => Self::Appendix2(typed(config)?),
            "kms" => Self::Kms(typed(config)?),
            other => return Err(CliError::UnknownModel(other.to_string())),
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    model: String,
    config: Value,
    time: TimeSpec,
    outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    method: Option<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    test_hooks: Option<TestHooks>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: Option<String>,
    pub model: ModelSpec,
    pub time: TimeSpec,
    pub outputs: Vec<String>,
    pub method: Option<Method>,
    pub order: Option<usize>,
    pub test_hooks: Option<TestHooks>,
}

impl Scenario {
    /// Parses and validates a scenario.
    pub fn from_json(text: &str) -> CliResult<Self> {
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))?;
        let scenario = Self {
            model: ModelSpec::from_parts(&raw.model, raw.config)?,
            name: raw.name,
            time: raw.time,
            outputs: raw.outputs,
            method: raw.method,
            order: raw.order,
            test_hooks: raw.test_hooks,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let raw = RawScenario {
            name: self.name.clone(),
            model: self.model.tag().to_string(),
            config: self.model.config_value(),
            time: self.time,
            outputs: self.outputs.clone(),
            method: self.method,
            order: self.order,
            test_hooks: self.test_hooks,
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("scenario serializes to JSON");
        s.push('\n');
        s
    }

    /// Output stem: the scenario name, else the file stem.
    pub fn stem(&self, path: &Path) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario").to_string(),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.time.t_max > 0.0 && self.time.t_max.is_finite()) {
            return Err(CliError::Invalid(format!("time.t_max = {} must be positive", self.time.t_max)));
        }
        if self.time.points < 2 {
            return Err(CliError::Invalid(format!("time.points = {} must be at least 2", self.time.points)));
        }
        if self.outputs.is_empty() {
            return Err(CliError::Invalid("outputs must list at least one channel".into()));
        }
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) {
                return Err(CliError::Invalid(format!("name '{name}' is not a valid file stem")));
            }
        }
        match &self.model {
            ModelSpec::Model1(c) => model1_config(c).validate()?,
            ModelSpec::Model2(c) => model2_config(c).validate()?,
            ModelSpec::MeanField(c) => meanfield_params(c)?.validate()?,
            ModelSpec::Appendix2(c) => appendix2_params(c).validate()?,
            ModelSpec::Kms(c) => {
                kms_problem(c)?;
            }
        }
        if self.test_hooks.is_some_and(|h| h.break_conservation.is_some())
            && !matches!(self.model, ModelSpec::Model1(_) | ModelSpec::Model2(_))
        {
            return Err(CliError::Invalid("break_conservation applies to model1 and model2 only".into()));
        }
        for name in &self.outputs {
            crate::engine::resolve_channel(&self.model, name)?;
        }
        Ok(())
    }
}

pub fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

pub fn model1_config(c: &Model1Spec) -> ModelOneConfig {
    ModelOneConfig {
        alpha: c.alpha.clone(),
        p: c.p.clone(),
        initial_n: c.initial_n.clone(),
        price_m: c.price_m,
        epsilon: c.epsilon,
    }
}

pub fn model2_config(c: &Model2Spec) -> ModelTwoConfig {
    ModelTwoConfig {
        alpha: c.alpha.clone(),
        beta: c.beta.clone(),
        p: c.p.clone(),
        price_m: c.price_m,
        initial_n: c.initial_n.clone(),
        initial_k: c.initial_k.clone(),
        initial_o: c.initial_o,
        initial_mp: c.initial_mp,
        gamma_share: c.gamma_share,
    }
}

pub fn meanfield_params(c: &MeanFieldSpec) -> CliResult<MeanFieldParams> {
    let mut p = MeanFieldParams::new(c.phi, complex(c.x0), c.n.clone(), c.k.clone())?;
    if let Some(eta) = c.eta {
        p.eta = eta;
    }
    if let Some(q) = c.qbar {
        p.qbar = q;
    }
    p.x_l0 = c.x_l0.as_ref().map(|xs| xs.iter().copied().map(complex).collect());
    if let Some(g) = c.gamma_share {
        if !(g.is_finite() && g > 0.0) {
            return Err(CliError::Invalid(format!("gamma_share = {g} must be positive")));
        }
    }
    Ok(p)
}

pub fn appendix2_params(c: &Appendix2Spec) -> Appendix2Params {
    Appendix2Params {
        gamma_l: c.gamma_l.clone(),
        phi_tilde: c.phi_tilde,
        mu: c.mu,
        x0: complex(c.x0),
        n: c.n.clone(),
        k: c.k.clone(),
    }
}

pub fn kms_problem(c: &KmsSpec) -> CliResult<KmsProblem> {
    let mode = match (c.beta, c.n_c, c.n_a) {
        (Some(beta), None, None) => KmsMode::SolvePair { beta },
        (None, Some(n_c), None) => KmsMode::SolveBetaGivenNc { n_c },
        (None, Some(n_c), Some(n_a)) => KmsMode::Classify { n_a, n_c },
        _ => {
            return Err(CliError::Invalid("kms config needs exactly one of: beta, n_c, or the pair n_a and n_c".into()))
        }
    };
    if !(c.q_l > 0.0 && c.q_l.is_finite()) {
        return Err(CliError::Invalid(format!("q_l = {} must be positive", c.q_l)));
    }
    if let KmsMode::SolvePair { beta } = mode {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(CliError::Invalid(format!("beta = {beta} must be finite and non-negative")));
        }
    }
    if let KmsMode::SolveBetaGivenNc { n_c } = mode {
        if !(n_c > 0.0 && n_c <= c.q_l) {
            return Err(CliError::Invalid(format!("n_c = {n_c} must lie in (0, q_l]")));
        }
    }
    Ok(KmsProblem { phi: c.phi, q_l: c.q_l, mode })
}
