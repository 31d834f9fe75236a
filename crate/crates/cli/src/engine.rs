//! Dispatch from a scenario to the model engines.

use std::fmt::Write;

use fockmarket_core::dynamics::{time_grid, OneBodyPropagator};
use fockmarket_core::fock::{
    evolve_exact, hop_operator, real_expectation, FockSector, Hop, HopTerm, SparseOperator, StateVector,
};
use fockmarket_core::hamiltonians::{build_model1, build_model2, conserved_model1, conserved_model2, NamedOperator};
use fockmarket_core::kms::{equilibrium_portfolio, equilibrium_residual, solve_equilibrium, KmsSolution};
use fockmarket_core::meanfield::{nl_appendix2, nl_mean_field, portfolio_meanfield, range_violations};
use fockmarket_core::perturbation::{heisenberg_series, MAX_ORDER};

use crate::error::{CliError, CliResult};
use crate::output::{format_number, Table};
use crate::scenario::{
    appendix2_params, kms_problem, meanfield_params, model1_config, model2_config, Method, ModelSpec, Scenario,
    TestHooks,
};

/// Pass/fail threshold for conservation drift.
pub const DRIFT_TOLERANCE: f64 = 1e-8;

/// Series order used when none is given.
pub const DEFAULT_ORDER: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Channel {
    Shares(usize),
    Cash(usize),
    Portfolio(usize),
    Supply,
    Price,
    Conserved(String),
    Beta0,
    Nc0,
    Na0,
    EquilibriumPortfolio,
}

fn indexed(name: &str, prefix: &str, traders: usize) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    if rest.starts_with('0') {
        return None;
    }
    let j: usize = rest.parse().ok()?;
    (1..=traders).contains(&j).then(|| j - 1)
}

/// Resolves a channel name against `model`; names are 1-based per trader.
pub fn resolve_channel(model: &ModelSpec, name: &str) -> CliResult<Channel> {
    let unknown = || CliError::Invalid(format!("channel '{name}' does not exist for model {}", model.tag()));
    let found = match model {
        ModelSpec::Model1(c) => {
            let l = c.alpha.len();
            match name {
                "price" => Some(Channel::Price),
                "N" => Some(Channel::Conserved("N".into())),
                _ => indexed(name, "n", l).map(Channel::Shares),
            }
        }
        ModelSpec::Model2(c) => {
            let l = c.alpha.len();
            match name {
                "price" => Some(Channel::Price),
                "supply" => Some(Channel::Supply),
                "N" | "K" | "Gamma" => Some(Channel::Conserved(name.into())),
                _ => indexed(name, "n", l)
                    .map(Channel::Shares)
                    .or_else(|| indexed(name, "k", l).map(Channel::Cash))
                    .or_else(|| indexed(name, "pi", l).map(Channel::Portfolio))
                    .or_else(|| indexed(name, "Q", l).map(|_| Channel::Conserved(name.into()))),
            }
        }
        ModelSpec::MeanField(c) => {
            let l = c.n.len();
            indexed(name, "n", l)
                .map(Channel::Shares)
                .or_else(|| indexed(name, "k", l).map(Channel::Cash))
                .or_else(|| indexed(name, "pi", l).filter(|_| c.gamma_share.is_some()).map(Channel::Portfolio))
        }
        ModelSpec::Appendix2(c) => {
            let l = c.n.len();
            indexed(name, "n", l).map(Channel::Shares).or_else(|| indexed(name, "k", l).map(Channel::Cash))
        }
        ModelSpec::Kms(c) => match name {
            "beta0" => Some(Channel::Beta0),
            "nc0" => Some(Channel::Nc0),
            "na0" => Some(Channel::Na0),
            "pi" if c.portfolio.is_some() => Some(Channel::EquilibriumPortfolio),
            _ => None,
        },
    };
    found.ok_or_else(unknown)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub method: Option<Method>,
    pub order: Option<usize>,
    pub max_dim: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriftEntry {
    pub name: String,
    pub initial: f64,
    pub max_drift: f64,
}

impl DriftEntry {
    fn from_series(name: &str, values: &[f64]) -> Self {
        let initial = values[0];
        let max_drift = values.iter().map(|v| (v - initial).abs()).fold(0.0, f64::max);
        Self { name: name.to_string(), initial, max_drift }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConservationReport {
    pub model: String,
    pub method: String,
    pub entries: Vec<DriftEntry>,
    /// `None` when conservation holds analytically and nothing was measured.
    pub tolerance: Option<f64>,
    pub notes: Vec<String>,
}

impl ConservationReport {
    pub fn passed(&self) -> bool {
        match self.tolerance {
            Some(tol) => self.entries.iter().all(|e| e.max_drift <= tol),
            None => true,
        }
    }

    pub fn render(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {name}");
        let _ = writeln!(s, "model: {}", self.model);
        let _ = writeln!(s, "method: {}", self.method);
        match self.tolerance {
            Some(tol) => {
                let _ = writeln!(s, "tolerance: {tol:e}");
                let _ = writeln!(s, "quantity,initial,max_drift,status");
                for e in &self.entries {
                    let status = if e.max_drift <= tol { "ok" } else { "FAIL" };
                    let _ = writeln!(s, "{},{},{:e},{status}", e.name, format_number(e.initial), e.max_drift);
                }
                let _ = writeln!(s, "result: {}", if self.passed() { "pass" } else { "fail" });
            }
            None => {
                let _ = writeln!(s, "conservation: analytic, not evaluated numerically");
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    pub report: ConservationReport,
}

struct OperatorModel {
    sector: FockSector,
    h: SparseOperator,
    psi: StateVector,
    conserved: Vec<NamedOperator>,
}

/// Extra generator and coupling for the negative-control hook.
fn break_term(sector: &FockSector, share: usize, price: usize, g: f64) -> CliResult<SparseOperator> {
    let up = hop_operator(sector, HopTerm::plain(share, price))?;
    let down = hop_operator(sector, HopTerm::plain(price, share))?;
    Ok(up.add(&down)?.scale_real(g))
}

fn operator_model(model: &ModelSpec, hooks: Option<TestHooks>, max_dim: usize) -> CliResult<OperatorModel> {
    let g = hooks.and_then(|h| h.break_conservation);
    match model {
        ModelSpec::Model1(spec) => {
            let cfg = model1_config(spec);
            cfg.validate()?;
            let mut gens = cfg.generators();
            if g.is_some() {
                gens.push(Hop::transfer(cfg.price_mode(), 0));
            }
            let sector = FockSector::enumerate(cfg.initial_occupation(), gens, max_dim)?;
            let mut h = build_model1(&cfg, &sector)?;
            if let Some(g) = g {
                h = h.add(&break_term(&sector, 0, cfg.price_mode(), g)?)?;
            }
            let psi = cfg.initial_state(&sector)?;
            let conserved = conserved_model1(&cfg, &sector)?;
            Ok(OperatorModel { sector, h, psi, conserved })
        }
        ModelSpec::Model2(spec) => {
            let cfg = model2_config(spec);
            cfg.validate()?;
            let mut gens = cfg.generators();
            if g.is_some() {
                gens.push(Hop::transfer(cfg.price_mode(), cfg.share_mode(0)));
            }
            let sector = FockSector::enumerate(cfg.initial_occupation(), gens, max_dim)?;
            let mut h = build_model2(&cfg, &sector)?;
            if let Some(g) = g {
                h = h.add(&break_term(&sector, cfg.share_mode(0), cfg.price_mode(), g)?)?;
            }
            let psi = cfg.initial_state(&sector)?;
            let conserved = conserved_model2(&cfg, &sector)?;
            Ok(OperatorModel { sector, h, psi, conserved })
        }
        _ => Err(CliError::Unsupported(format!("operator dynamics for model {}", model.tag()))),
    }
}

fn channel_operator(model: &ModelSpec, om: &OperatorModel, channel: &Channel) -> CliResult<SparseOperator> {
    let s = &om.sector;
    let op = match (model, channel) {
        (ModelSpec::Model1(c), Channel::Shares(j)) => model1_config(c).shares(s, *j)?,
        (ModelSpec::Model1(c), Channel::Price) => model1_config(c).price(s)?,
        (ModelSpec::Model2(c), Channel::Shares(j)) => model2_config(c).shares(s, *j)?,
        (ModelSpec::Model2(c), Channel::Cash(j)) => model2_config(c).cash(s, *j)?,
        (ModelSpec::Model2(c), Channel::Portfolio(j)) => model2_config(c).portfolio(s, *j)?,
        (ModelSpec::Model2(c), Channel::Supply) => model2_config(c).supply(s)?,
        (ModelSpec::Model2(c), Channel::Price) => model2_config(c).price(s)?,
        (_, Channel::Conserved(name)) => om
            .conserved
            .iter()
            .find(|c| &c.name == name)
            .map(|c| c.op.clone())
            .ok_or_else(|| CliError::Invalid(format!("no conserved quantity '{name}'")))?,
        _ => return Err(CliError::Invalid(format!("channel {channel:?} is not an operator of model {}", model.tag()))),
    };
    Ok(op)
}

fn default_method(model: &ModelSpec) -> Option<Method> {
    match model {
        ModelSpec::Model1(_) | ModelSpec::Model2(_) => Some(Method::Exact),
        _ => None,
    }
}

/// Runs `scenario` and returns its table and conservation report.
pub fn run(scenario: &Scenario, opts: &RunOptions) -> CliResult<RunOutput> {
    let model = &scenario.model;
    let method = opts.method.or(scenario.method).or_else(|| default_method(model));
    let order = opts.order.or(scenario.order);
    let times = time_grid(scenario.time.t_max, scenario.time.points);
    let channels = scenario.outputs.iter().map(|name| resolve_channel(model, name)).collect::<CliResult<Vec<_>>>()?;
    if order.is_some() && method != Some(Method::Series) {
        return Err(CliError::Invalid("--order applies to the series method only".into()));
    }

    let (columns, report) = match (model, method) {
        (ModelSpec::Model1(_) | ModelSpec::Model2(_), Some(Method::Exact)) => {
            run_exact(scenario, &channels, &times, opts.max_dim)?
        }
        (ModelSpec::Model1(_) | ModelSpec::Model2(_), Some(Method::Series)) => {
            run_series(scenario, &channels, &times, order.unwrap_or(DEFAULT_ORDER), opts.max_dim)?
        }
        (ModelSpec::Model1(spec), Some(Method::Onebody)) => {
            if scenario.test_hooks.is_some_and(|h| h.break_conservation.is_some()) {
                return Err(CliError::Invalid("break_conservation needs the exact or series method".into()));
            }
            run_onebody(spec, &channels, &times)?
        }
        (ModelSpec::MeanField(_) | ModelSpec::Appendix2(_) | ModelSpec::Kms(_), None) => {
            run_analytic(model, &channels, &times)?
        }
        (_, Some(m)) => {
            return Err(CliError::Invalid(format!("method '{}' is not available for model {}", m.name(), model.tag())))
        }
        (_, None) => unreachable!("operator models always have a default method"),
    };
    let table = Table { times, channels: scenario.outputs.clone(), columns };
    Ok(RunOutput { table, report })
}

fn expectation_series(states: &[StateVector], op: &SparseOperator) -> CliResult<Vec<f64>> {
    states.iter().map(|s| real_expectation(s, op).map_err(CliError::from)).collect()
}

fn run_exact(
    scenario: &Scenario,
    channels: &[Channel],
    times: &[f64],
    max_dim: usize,
) -> CliResult<(Vec<Vec<f64>>, ConservationReport)> {
    let om = operator_model(&scenario.model, scenario.test_hooks, max_dim)?;
    let states = evolve_exact(&om.h, &om.psi, times)?;
    let mut columns = Vec::with_capacity(channels.len());
    for ch in channels {
        columns.push(expectation_series(&states, &channel_operator(&scenario.model, &om, ch)?)?);
    }
    let report =
        drift_report(&scenario.model, "exact", &om.conserved, |op| expectation_series(&states, op), om.sector.dim())?;
    Ok((columns, report))
}

fn drift_report(
    model: &ModelSpec,
    method: &str,
    conserved: &[NamedOperator],
    mut series: impl FnMut(&SparseOperator) -> CliResult<Vec<f64>>,
    dim: usize,
) -> CliResult<ConservationReport> {
    let mut entries = Vec::with_capacity(conserved.len());
    for c in conserved {
        entries.push(DriftEntry::from_series(&c.name, &series(&c.op)?));
    }
    Ok(ConservationReport {
        model: model.tag().into(),
        method: method.into(),
        entries,
        tolerance: Some(DRIFT_TOLERANCE),
        notes: vec![format!("sector dimension {dim}")],
    })
}

fn run_series(
    scenario: &Scenario,
    channels: &[Channel],
    times: &[f64],
    order: usize,
    max_dim: usize,
) -> CliResult<(Vec<Vec<f64>>, ConservationReport)> {
    if order > MAX_ORDER {
        return Err(CliError::Invalid(format!("series order {order} exceeds the limit of {MAX_ORDER}")));
    }
    let om = operator_model(&scenario.model, scenario.test_hooks, max_dim)?;
    let mut radius = f64::INFINITY;
    // coefficients of a Hermitian observable are real; the imaginary parts are roundoff
    let mut series = |op: &SparseOperator| -> CliResult<Vec<f64>> {
        let s = heisenberg_series(&om.h, op, &om.psi, order)?;
        radius = s.radius_hint;
        Ok(times.iter().map(|&t| s.evaluate(t).re).collect())
    };
    let mut columns = Vec::with_capacity(channels.len());
    for ch in channels {
        columns.push(series(&channel_operator(&scenario.model, &om, ch)?)?);
    }
    let mut report =
        drift_report(&scenario.model, &format!("series (order {order})"), &om.conserved, &mut series, om.sector.dim())?;
    report.notes.push(format!("radius_hint {} (series is reliable only for t well below this)", format_number(radius)));
    Ok((columns, report))
}

fn run_onebody(
    spec: &crate::scenario::Model1Spec,
    channels: &[Channel],
    times: &[f64],
) -> CliResult<(Vec<Vec<f64>>, ConservationReport)> {
    let cfg = model1_config(spec);
    let prop = OneBodyPropagator::from_config(&cfg)?;
    let n0: Vec<f64> = cfg.initial_n.iter().map(|&n| n as f64).collect();
    let occ = prop.occupations(&n0, times)?;
    let total: Vec<f64> = occ.iter().map(|row| row.iter().sum()).collect();
    let columns = channels
        .iter()
        .map(|ch| match ch {
            Channel::Shares(j) => occ.iter().map(|row| row[*j]).collect(),
            Channel::Price => vec![cfg.epsilon * cfg.price_m as f64; times.len()],
            _ => total.clone(),
        })
        .collect();
    let report = ConservationReport {
        model: "model1".into(),
        method: "onebody".into(),
        entries: vec![DriftEntry::from_series("N", &total)],
        tolerance: Some(DRIFT_TOLERANCE),
        notes: Vec::new(),
    };
    Ok((columns, report))
}

fn run_analytic(
    model: &ModelSpec,
    channels: &[Channel],
    times: &[f64],
) -> CliResult<(Vec<Vec<f64>>, ConservationReport)> {
    let mut notes = Vec::new();
    let columns: Vec<Vec<f64>> = match model {
        ModelSpec::MeanField(spec) => {
            let p = meanfield_params(spec)?;
            let mut shares = Vec::with_capacity(p.traders());
            for l in 0..p.traders() {
                let n = times.iter().map(|&t| nl_mean_field(&p, l, t)).collect::<Result<Vec<_>, _>>()?;
                let bad = range_violations(&n, p.budget(l), 1e-9);
                if !bad.is_empty() {
                    notes.push(format!("n{} leaves [0, Q] at {} grid points", l + 1, bad.len()));
                }
                shares.push(n);
            }
            channels
                .iter()
                .map(|ch| match ch {
                    Channel::Shares(l) => shares[*l].clone(),
                    Channel::Cash(l) => shares[*l].iter().map(|n| p.budget(*l) - n).collect(),
                    Channel::Portfolio(l) => {
                        let gamma = spec.gamma_share.unwrap_or(1.0);
                        portfolio_meanfield(gamma, &shares[*l], p.n[*l], gamma * p.n[*l] + p.k[*l])
                    }
                    _ => unreachable!("resolved against the mean-field model"),
                })
                .collect()
        }
        ModelSpec::Appendix2(spec) => {
            let p = appendix2_params(spec);
            let mut cols = Vec::with_capacity(channels.len());
            for ch in channels {
                let (l, cash) = match ch {
                    Channel::Shares(l) => (*l, false),
                    Channel::Cash(l) => (*l, true),
                    _ => unreachable!("resolved against the appendix model"),
                };
                let q = p.n[l] + p.k[l];
                let col = times
                    .iter()
                    .map(|&t| nl_appendix2(&p, l, t).map(|n| if cash { q - n } else { n }))
                    .collect::<Result<Vec<_>, _>>()?;
                cols.push(col);
            }
            cols
        }
        ModelSpec::Kms(spec) => {
            let problem = kms_problem(spec)?;
            let sol: KmsSolution = solve_equilibrium(&problem)?;
            notes.push(format!("case {}", sol.case));
            notes.push(format!("outcome {:?}", sol.case.outcome()));
            if let Some(r) = equilibrium_residual(problem.phi, &sol) {
                notes.push(format!("residual {r:e}"));
            }
            let nan = f64::NAN;
            channels
                .iter()
                .map(|ch| {
                    let v = match ch {
                        Channel::Beta0 => sol.beta0.unwrap_or(nan),
                        Channel::Nc0 => sol.nc0.unwrap_or(nan),
                        Channel::Na0 => sol.na0.unwrap_or(nan),
                        Channel::EquilibriumPortfolio => match (spec.portfolio, sol.nc0) {
                            (Some([gamma, k0, pi0]), Some(nc)) => equilibrium_portfolio(gamma, k0, nc, pi0),
                            _ => nan,
                        },
                        _ => unreachable!("resolved against the kms model"),
                    };
                    vec![v; times.len()]
                })
                .collect()
        }
        _ => unreachable!("operator models are not analytic"),
    };
    let report = ConservationReport {
        model: model.tag().into(),
        method: "closed form".into(),
        entries: Vec::new(),
        tolerance: None,
        notes,
    };
    Ok((columns, report))
}

/// Evolves the exact dynamics and measures every conserved quantity.
pub fn verify(scenario: &Scenario, max_dim: usize) -> CliResult<ConservationReport> {
    if !matches!(scenario.model, ModelSpec::Model1(_) | ModelSpec::Model2(_)) {
        return Err(CliError::Unsupported(format!("verify for model {}", scenario.model.tag())));
    }
    let times = time_grid(scenario.time.t_max, scenario.time.points);
    let om = operator_model(&scenario.model, scenario.test_hooks, max_dim)?;
    let states = evolve_exact(&om.h, &om.psi, &times)?;
    drift_report(&scenario.model, "exact", &om.conserved, |op| expectation_series(&states, op), om.sector.dim())
}
