//! Model Hamiltonians and their integrals of motion.
//!
//! Model one: `H = Σ α_l n̂_l + Σ_{i≠j} p_ij a_i a_j† + ε p†p` with a frozen
//! price mode. Model two adds one cash mode per trader plus a supply and a
//! price mode; a trade moves one share against `M` cash quanta and the
//! supply/price pair exchanges quanta through `o†p + p†o`.

use crate::error::{Error, Result};
use crate::fock::{hop_operator, number_sum, FockSector, Hop, HopTerm, OccupationVector, SparseOperator, StateVector};

const SYMMETRY_TOLERANCE: f64 = 1e-12;

fn validate_coupling(p: &[Vec<f64>], traders: usize) -> Result<()> {
    if p.len() != traders || p.iter().any(|row| row.len() != traders) {
        return Err(Error::Config(format!("coupling matrix must be {traders}x{traders}")));
    }
    for i in 0..traders {
        if p[i][i] != 0.0 {
            return Err(Error::Config(format!("p[{i}][{i}] must be zero")));
        }
        for j in 0..traders {
            let v = p[i][j];
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!("p[{i}][{j}] = {v} must be finite and non-negative")));
            }
            if (v - p[j][i]).abs() > SYMMETRY_TOLERANCE {
                return Err(Error::Config(format!("coupling matrix is not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

fn check_len<T>(name: &str, v: &[T], traders: usize) -> Result<()> {
    if v.len() == traders {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} has {} entries, expected {traders}", v.len())))
    }
}

fn check_finite(name: &str, v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::Config(format!("{name}[{i}] is not finite"))),
        None => Ok(()),
    }
}

fn check_sector(sector: &FockSector, modes: usize) -> Result<()> {
    if sector.mode_count() == modes {
        Ok(())
    } else {
        Err(Error::ModeCount { expected: modes, got: sector.mode_count() })
    }
}

/// Coupled trader pairs `(i, j)` with `i < j` and `p_ij > 0`.
fn coupled_pairs(p: &[Vec<f64>]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i][j] != 0.0 {
                out.push((i, j, p[i][j]));
            }
        }
    }
    out
}

/// An operator with a display name.
#[derive(Clone, Debug)]
pub struct NamedOperator {
    pub name: String,
    pub op: SparseOperator,
}

impl NamedOperator {
    fn new(name: impl Into<String>, op: SparseOperator) -> Self {
        Self { name: name.into(), op }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelOneConfig {
    pub alpha: Vec<f64>,
    pub p: Vec<Vec<f64>>,
    pub initial_n: Vec<u32>,
    pub price_m: u32,
    pub epsilon: f64,
}

impl ModelOneConfig {
    pub fn traders(&self) -> usize {
        self.alpha.len()
    }

    /// Shares of trader `l` live in mode `l`; the price mode comes last.
    pub fn price_mode(&self) -> usize {
        self.traders()
    }

    pub fn mode_count(&self) -> usize {
        self.traders() + 1
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.traders();
        if l == 0 {
            return Err(Error::Config("at least one trader is required".into()));
        }
        check_finite("alpha", &self.alpha)?;
        check_len("initial_n", &self.initial_n, l)?;
        validate_coupling(&self.p, l)?;
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon = {} must be positive", self.epsilon)));
        }
        Ok(())
    }

    pub fn initial_occupation(&self) -> OccupationVector {
        let mut q = self.initial_n.clone();
        q.push(self.price_m);
        OccupationVector::new(q)
    }

    /// Share hops for each coupled pair.
    pub fn generators(&self) -> Vec<Hop> {
        coupled_pairs(&self.p).into_iter().map(|(i, j, _)| Hop::transfer(i, j)).collect()
    }

    /// Closure of the initial state under [`Self::generators`].
    pub fn sector(&self, max_dim: usize) -> Result<FockSector> {
        self.validate()?;
        FockSector::enumerate(self.initial_occupation(), self.generators(), max_dim)
    }

    pub fn initial_state(&self, sector: &FockSector) -> Result<StateVector> {
        StateVector::basis(sector, &self.initial_occupation())
    }

    pub fn shares(&self, sector: &FockSector, trader: usize) -> Result<SparseOperator> {
        number_sum(sector, &[(trader, 1.0)])
    }

    /// `P̂ = ε p†p`.
    pub fn price(&self, sector: &FockSector) -> Result<SparseOperator> {
        number_sum(sector, &[(self.price_mode(), self.epsilon)])
    }
}

/// Model-one Hamiltonian on `sector`.
pub fn build_model1(cfg: &ModelOneConfig, sector: &FockSector) -> Result<SparseOperator> {
    cfg.validate()?;
    check_sector(sector, cfg.mode_count())?;
    let free: Vec<(usize, f64)> = cfg.alpha.iter().copied().enumerate().collect();
    let mut h = number_sum(sector, &free)?;
    h = h.add(&cfg.price(sector)?)?;
    for (i, j, pij) in coupled_pairs(&cfg.p) {
        // p_ij a_i a_j† + p_ji a_j a_i†
        h = h.add(&hop_operator(sector, HopTerm::plain(j, i))?.scale_real(pij))?;
        h = h.add(&hop_operator(sector, HopTerm::plain(i, j))?.scale_real(cfg.p[j][i]))?;
    }
    Ok(h)
}

/// `{N̂}` for model one.
pub fn conserved_model1(cfg: &ModelOneConfig, sector: &FockSector) -> Result<Vec<NamedOperator>> {
    check_sector(sector, cfg.mode_count())?;
    let modes: Vec<(usize, f64)> = (0..cfg.traders()).map(|l| (l, 1.0)).collect();
    Ok(vec![NamedOperator::new("N", number_sum(sector, &modes)?)])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelTwoConfig {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub p: Vec<Vec<f64>>,
    /// Effective share price `M` in cash quanta.
    pub price_m: u32,
    pub initial_n: Vec<u32>,
    pub initial_k: Vec<u32>,
    /// Supply quanta `O`.
    pub initial_o: u32,
    /// Price quanta.
    pub initial_mp: u32,
    /// Market value `γ` of one share.
    pub gamma_share: f64,
}

impl ModelTwoConfig {
    pub fn traders(&self) -> usize {
        self.alpha.len()
    }

    pub fn share_mode(&self, trader: usize) -> usize {
        trader
    }

    pub fn cash_mode(&self, trader: usize) -> usize {
        self.traders() + trader
    }

    pub fn supply_mode(&self) -> usize {
        2 * self.traders()
    }

    pub fn price_mode(&self) -> usize {
        2 * self.traders() + 1
    }

    pub fn mode_count(&self) -> usize {
        2 * self.traders() + 2
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.traders();
        if l == 0 {
            return Err(Error::Config("at least one trader is required".into()));
        }
        if self.price_m == 0 {
            return Err(Error::Config("price M must be a positive integer".into()));
        }
        check_len("beta", &self.beta, l)?;
        check_finite("alpha", &self.alpha)?;
        check_finite("beta", &self.beta)?;
        check_len("initial_n", &self.initial_n, l)?;
        check_len("initial_k", &self.initial_k, l)?;
        validate_coupling(&self.p, l)?;
        if !self.gamma_share.is_finite() || self.gamma_share <= 0.0 {
            return Err(Error::Config(format!("gamma_share = {} must be positive", self.gamma_share)));
        }
        Ok(())
    }

    pub fn initial_occupation(&self) -> OccupationVector {
        let mut q = self.initial_n.clone();
        q.extend_from_slice(&self.initial_k);
        q.push(self.initial_o);
        q.push(self.initial_mp);
        OccupationVector::new(q)
    }

    /// Trade hops for each coupled pair plus the supply/price exchange.
    pub fn generators(&self) -> Vec<Hop> {
        let mut hops: Vec<Hop> = coupled_pairs(&self.p)
            .into_iter()
            .map(|(i, j, _)| Hop::trade(i, j, self.cash_mode(i), self.cash_mode(j), self.price_m))
            .collect();
        hops.push(Hop::transfer(self.price_mode(), self.supply_mode()));
        hops
    }

    pub fn sector(&self, max_dim: usize) -> Result<FockSector> {
        self.validate()?;
        FockSector::enumerate(self.initial_occupation(), self.generators(), max_dim)
    }

    pub fn initial_state(&self, sector: &FockSector) -> Result<StateVector> {
        StateVector::basis(sector, &self.initial_occupation())
    }

    pub fn shares(&self, sector: &FockSector, trader: usize) -> Result<SparseOperator> {
        number_sum(sector, &[(self.share_mode(trader), 1.0)])
    }

    pub fn cash(&self, sector: &FockSector, trader: usize) -> Result<SparseOperator> {
        number_sum(sector, &[(self.cash_mode(trader), 1.0)])
    }

    /// `Π̂_j = γ n̂_j + k̂_j`.
    pub fn portfolio(&self, sector: &FockSector, trader: usize) -> Result<SparseOperator> {
        number_sum(sector, &[(self.share_mode(trader), self.gamma_share), (self.cash_mode(trader), 1.0)])
    }

    pub fn supply(&self, sector: &FockSector) -> Result<SparseOperator> {
        number_sum(sector, &[(self.supply_mode(), 1.0)])
    }

    pub fn price(&self, sector: &FockSector) -> Result<SparseOperator> {
        number_sum(sector, &[(self.price_mode(), 1.0)])
    }
}

/// The three pieces of the model-two Hamiltonian.
#[derive(Clone, Debug)]
pub struct ModelTwoTerms {
    /// `Σ α_l n̂_l + Σ β_l k̂_l + o†o + p†p`
    pub free: SparseOperator,
    /// `Σ_{i<j} p_ij (a_i† a_j c_i^M c_j†^M + h.c.)`
    pub trading: SparseOperator,
    /// `o†p + p†o`
    pub exchange: SparseOperator,
}

impl ModelTwoTerms {
    pub fn total(&self) -> Result<SparseOperator> {
        self.free.add(&self.trading)?.add(&self.exchange)
    }
}

pub fn build_model2_terms(cfg: &ModelTwoConfig, sector: &FockSector) -> Result<ModelTwoTerms> {
    cfg.validate()?;
    check_sector(sector, cfg.mode_count())?;
    let mut diag: Vec<(usize, f64)> = Vec::new();
    for l in 0..cfg.traders() {
        diag.push((cfg.share_mode(l), cfg.alpha[l]));
        diag.push((cfg.cash_mode(l), cfg.beta[l]));
    }
    diag.push((cfg.supply_mode(), 1.0));
    diag.push((cfg.price_mode(), 1.0));
    let free = number_sum(sector, &diag)?;

    let mut trading = SparseOperator::zero(sector.dim());
    for (i, j, pij) in coupled_pairs(&cfg.p) {
        let (ci, cj) = (cfg.cash_mode(i), cfg.cash_mode(j));
        let buy = hop_operator(sector, HopTerm::trade(i, j, ci, cj, cfg.price_m))?;
        let sell = hop_operator(sector, HopTerm::trade(j, i, cj, ci, cfg.price_m))?;
        trading = trading.add(&buy.add(&sell)?.scale_real(pij))?;
    }

    let exchange = hop_operator(sector, HopTerm::plain(cfg.supply_mode(), cfg.price_mode()))?
        .add(&hop_operator(sector, HopTerm::plain(cfg.price_mode(), cfg.supply_mode()))?)?;
    Ok(ModelTwoTerms { free, trading, exchange })
}

/// Model-two effective Hamiltonian on `sector`.
pub fn build_model2(cfg: &ModelTwoConfig, sector: &FockSector) -> Result<SparseOperator> {
    build_model2_terms(cfg, sector)?.total()
}

/// `N̂, K̂, Γ̂` and `Q̂_j = n̂_j + k̂_j / M` for model two.
pub fn conserved_model2(cfg: &ModelTwoConfig, sector: &FockSector) -> Result<Vec<NamedOperator>> {
    check_sector(sector, cfg.mode_count())?;
    let l = cfg.traders();
    let shares: Vec<(usize, f64)> = (0..l).map(|j| (cfg.share_mode(j), 1.0)).collect();
    let cash: Vec<(usize, f64)> = (0..l).map(|j| (cfg.cash_mode(j), 1.0)).collect();
    let mut out = vec![
        NamedOperator::new("N", number_sum(sector, &shares)?),
        NamedOperator::new("K", number_sum(sector, &cash)?),
        NamedOperator::new("Gamma", number_sum(sector, &[(cfg.supply_mode(), 1.0), (cfg.price_mode(), 1.0)])?),
    ];
    let inv_m = 1.0 / cfg.price_m as f64;
    for j in 0..l {
        out.push(NamedOperator::new(
            format!("Q{}", j + 1),
            number_sum(sector, &[(cfg.share_mode(j), 1.0), (cfg.cash_mode(j), inv_m)])?,
        ));
    }
    Ok(out)
}
