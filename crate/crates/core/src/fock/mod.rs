//! Conserved-sector Fock spaces: basis enumeration, sparse ladder and hop
//! operators, states, expectations and exact evolution.

mod evolve;
mod operators;
mod sector;
mod sparse;
mod state;

pub use evolve::{evolve_exact, KrylovPropagator, SpectralPropagator, DENSE_LIMIT, HERMITIAN_TOLERANCE};
pub use operators::{falling_factorial, hop_operator, ladder_matrix, number_sum, HopTerm, LadderKind};
pub use sector::{FockSector, Hop, OccupationVector, DEFAULT_MAX_DIM};
pub use sparse::{SparseOperator, PRUNE_TOLERANCE};
pub use state::{expectation, real_expectation, real_value, StateVector, REAL_TOLERANCE};
