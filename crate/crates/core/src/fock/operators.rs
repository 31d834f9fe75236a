use num_complex::Complex64;

use super::sector::FockSector;
use super::sparse::SparseOperator;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderKind {
    Lower,
    Raise,
    Number,
}

/// Matrix of `a`, `a†` or `a†a` on one mode, restricted to the sector.
/// Raise/lower entries whose target falls outside the sector are dropped.
pub fn ladder_matrix(sector: &FockSector, mode: usize, kind: LadderKind) -> Result<SparseOperator> {
    sector.check_mode(mode)?;
    let mut triplets = Vec::with_capacity(sector.dim());
    for (col, state) in sector.basis().iter().enumerate() {
        let n = state.get(mode);
        match kind {
            LadderKind::Number => {
                if n > 0 {
                    triplets.push((col, col, Complex64::new(n as f64, 0.0)));
                }
            }
            LadderKind::Lower => {
                if n > 0 {
                    let mut q = state.quanta().to_vec();
                    q[mode] -= 1;
                    if let Some(row) = sector.index_of(&q.into()) {
                        triplets.push((row, col, Complex64::new((n as f64).sqrt(), 0.0)));
                    }
                }
            }
            LadderKind::Raise => {
                let mut q = state.quanta().to_vec();
                q[mode] += 1;
                if let Some(row) = sector.index_of(&q.into()) {
                    triplets.push((row, col, Complex64::new((n as f64 + 1.0).sqrt(), 0.0)));
                }
            }
        }
    }
    SparseOperator::from_triplets(sector.dim(), triplets)
}

/// Sum of number operators over `modes`, optionally weighted.
pub fn number_sum(sector: &FockSector, modes: &[(usize, f64)]) -> Result<SparseOperator> {
    for &(m, _) in modes {
        sector.check_mode(m)?;
    }
    let diag: Vec<f64> = sector.basis().iter().map(|s| modes.iter().map(|&(m, w)| w * s.get(m) as f64).sum()).collect();
    Ok(SparseOperator::diagonal(&diag))
}

/// `k! / (k − m)!`, exact in integers while it fits, log-sum beyond.
pub fn falling_factorial(k: u32, m: u32) -> f64 {
    if m > k {
        return 0.0;
    }
    let mut exact: Option<u128> = Some(1);
    for r in 0..m {
        exact = exact.and_then(|acc| acc.checked_mul((k - r) as u128));
    }
    match exact {
        Some(v) if v < (1u128 << 53) => v as f64,
        _ => (0..m).map(|r| ((k - r) as f64).ln()).sum::<f64>().exp(),
    }
}

/// One directed trade term `a_i† a_j (c_i)^M (c_j†)^M`: trader `i` gains a
/// share from trader `j` and pays `price` cash quanta. With `cash = None` this
/// is the plain hop `a_i† a_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HopTerm {
    pub to: usize,
    pub from: usize,
    pub cash: Option<(usize, usize)>,
    pub price: u32,
}

impl HopTerm {
    pub fn plain(to: usize, from: usize) -> Self {
        Self { to, from, cash: None, price: 0 }
    }

    pub fn trade(to: usize, from: usize, to_cash: usize, from_cash: usize, price: u32) -> Self {
        Self { to, from, cash: Some((to_cash, from_cash)), price }
    }
}

/// Matrix of a [`HopTerm`] built directly basis-to-basis, so no truncation
/// enters through intermediate states.
pub fn hop_operator(sector: &FockSector, term: HopTerm) -> Result<SparseOperator> {
    let HopTerm { to: i, from: j, cash, price } = term;
    if i == j {
        return Err(Error::Config(format!("hop needs distinct modes, got {i} twice")));
    }
    sector.check_mode(i)?;
    sector.check_mode(j)?;
    if let Some((ci, cj)) = cash {
        sector.check_mode(ci)?;
        sector.check_mode(cj)?;
        if ci == cj {
            return Err(Error::Config(format!("cash modes must differ, got {ci} twice")));
        }
    }

    let mut triplets = Vec::new();
    for (col, state) in sector.basis().iter().enumerate() {
        let (ni, nj) = (state.get(i), state.get(j));
        if nj == 0 {
            continue;
        }
        let mut q = state.quanta().to_vec();
        q[i] += 1;
        q[j] -= 1;
        let mut weight = ((ni as f64 + 1.0) * nj as f64).sqrt();
        if let Some((ci, cj)) = cash {
            let (ki, kj) = (state.get(ci), state.get(cj));
            if ki < price {
                continue;
            }
            q[ci] -= price;
            q[cj] += price;
            weight *= (falling_factorial(ki, price) * falling_factorial(kj + price, price)).sqrt();
        }
        let row = sector.index_of(&q.into()).ok_or(Error::SectorClosure)?;
        triplets.push((row, col, Complex64::new(weight, 0.0)));
    }
    SparseOperator::from_triplets(sector.dim(), triplets)
}
