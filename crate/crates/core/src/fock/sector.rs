use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Hard cap on the number of basis states a sector may hold unless the
/// caller configures another bound.
pub const DEFAULT_MAX_DIM: usize = 200_000;

/// Quanta per mode. Mode roles (shares, cash, supply, price) are assigned by
/// the model that owns the vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(quanta: Vec<u32>) -> Self {
        Self(quanta)
    }

    pub fn quanta(&self) -> &[u32] {
        &self.0
    }

    pub fn mode_count(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    /// Applies `hop` forwards (`sign = 1`) or backwards (`sign = -1`).
    /// Returns `None` when any occupation would turn negative.
    pub fn shifted(&self, hop: &Hop, sign: i64) -> Option<Self> {
        let mut quanta = self.0.clone();
        for &(mode, delta) in hop.deltas() {
            let value = quanta[mode] as i64 + sign * delta;
            if value < 0 || value > u32::MAX as i64 {
                return None;
            }
            quanta[mode] = value as u32;
        }
        Some(Self(quanta))
    }
}

impl From<Vec<u32>> for OccupationVector {
    fn from(quanta: Vec<u32>) -> Self {
        Self(quanta)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, ")")
    }
}

/// A reversible move of quanta between modes: the per-mode deltas of one
/// Hamiltonian hop term. Closure applies it in both directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hop {
    deltas: Vec<(usize, i64)>,
}

impl Hop {
    pub fn new(deltas: Vec<(usize, i64)>) -> Self {
        Self { deltas }
    }

    /// One quantum leaves `from` and lands in `to`.
    pub fn transfer(from: usize, to: usize) -> Self {
        Self::new(vec![(from, -1), (to, 1)])
    }

    /// Trader `buyer` gains one share from `seller` and pays `price` cash quanta.
    pub fn trade(buyer: usize, seller: usize, buyer_cash: usize, seller_cash: usize, price: u32) -> Self {
        let m = price as i64;
        Self::new(vec![(buyer, 1), (seller, -1), (buyer_cash, -m), (seller_cash, m)])
    }

    pub fn deltas(&self) -> &[(usize, i64)] {
        &self.deltas
    }

    fn max_mode(&self) -> Option<usize> {
        self.deltas.iter().map(|&(m, _)| m).max()
    }
}

/// An ordered finite basis of occupation vectors closed under a set of hops.
#[derive(Clone, Debug)]
pub struct FockSector {
    mode_count: usize,
    basis: Vec<OccupationVector>,
    index: HashMap<OccupationVector, usize>,
    generators: Vec<Hop>,
}

impl FockSector {
    /// Breadth-first closure of `initial` under `generators` applied in both
    /// directions, restricted to non-negative occupations. The basis is sorted
    /// lexicographically.
    pub fn enumerate(initial: OccupationVector, generators: Vec<Hop>, max_dim: usize) -> Result<Self> {
        let mode_count = initial.mode_count();
        for hop in &generators {
            if let Some(mode) = hop.max_mode() {
                if mode >= mode_count {
                    return Err(Error::ModeIndex { mode, mode_count });
                }
            }
        }
        if max_dim == 0 {
            return Err(Error::SectorOverflow { max_dim });
        }

        let mut seen: HashMap<OccupationVector, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        seen.insert(initial.clone(), 0);
        queue.push_back(initial);
        while let Some(state) = queue.pop_front() {
            for hop in &generators {
                for sign in [1, -1] {
                    if let Some(next) = state.shifted(hop, sign) {
                        if !seen.contains_key(&next) {
                            if seen.len() >= max_dim {
                                return Err(Error::SectorOverflow { max_dim });
                            }
                            seen.insert(next.clone(), seen.len());
                            queue.push_back(next);
                        }
                    }
                }
            }
        }

        let mut basis: Vec<OccupationVector> = seen.into_keys().collect();
        basis.sort();
        Ok(Self::from_sorted(mode_count, basis, generators))
    }

    /// Builds a sector from an explicit list of states. Duplicates are
    /// removed and the result is sorted; no closure is implied.
    pub fn from_states(mode_count: usize, states: Vec<OccupationVector>) -> Result<Self> {
        for s in &states {
            if s.mode_count() != mode_count {
                return Err(Error::ModeCount { expected: mode_count, got: s.mode_count() });
            }
        }
        let mut basis = states;
        basis.sort();
        basis.dedup();
        Ok(Self::from_sorted(mode_count, basis, Vec::new()))
    }

    fn from_sorted(mode_count: usize, basis: Vec<OccupationVector>, generators: Vec<Hop>) -> Self {
        let index = basis.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self { mode_count, basis, index, generators }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn basis(&self) -> &[OccupationVector] {
        &self.basis
    }

    pub fn state(&self, i: usize) -> &OccupationVector {
        &self.basis[i]
    }

    pub fn index_of(&self, state: &OccupationVector) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn generators(&self) -> &[Hop] {
        &self.generators
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.mode_count {
            Ok(())
        } else {
            Err(Error::ModeIndex { mode, mode_count: self.mode_count })
        }
    }
}
