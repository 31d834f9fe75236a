use num_complex::Complex64;

use super::sector::{FockSector, OccupationVector};
use super::sparse::SparseOperator;
use crate::error::{Error, Result};

/// Imaginary residue below which an expectation counts as real.
pub const REAL_TOLERANCE: f64 = 1e-10;

/// Complex amplitudes over a sector basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// The number state `occupation` as a unit vector of the sector.
    pub fn basis(sector: &FockSector, occupation: &OccupationVector) -> Result<Self> {
        if occupation.mode_count() != sector.mode_count() {
            return Err(Error::ModeCount { expected: sector.mode_count(), got: occupation.mode_count() });
        }
        let idx = sector
            .index_of(occupation)
            .ok_or_else(|| Error::Config(format!("state {occupation} is not in the sector")))?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); sector.dim()];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }
}

/// `⟨state, op · state⟩`.
pub fn expectation(state: &StateVector, op: &SparseOperator) -> Result<Complex64> {
    let image = op.matvec(state.amplitudes())?;
    Ok(state.amplitudes().iter().zip(&image).map(|(a, b)| a.conj() * b).sum())
}

/// Real part of an expectation, rejecting residues above [`REAL_TOLERANCE`].
pub fn real_value(z: Complex64) -> Result<f64> {
    if z.im.abs() < REAL_TOLERANCE {
        Ok(z.re)
    } else {
        Err(Error::Undefined(format!("expectation has imaginary part {:e}", z.im)))
    }
}

/// Real expectation of a Hermitian observable.
pub fn real_expectation(state: &StateVector, op: &SparseOperator) -> Result<f64> {
    real_value(expectation(state, op)?)
}
