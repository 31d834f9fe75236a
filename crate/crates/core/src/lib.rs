//! Operator-algebra models of a stock market built on bosonic Fock spaces.
//!
//! Traders hold shares and cash as bosonic quanta. The crate provides exact
//! finite-sector dynamics, closed-form solutions for the quadratic and
//! price/supply subsystems, a Heisenberg nested-commutator series,
//! mean-field (infinite trader) closed forms and a KMS equilibrium solver.

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod hamiltonians;
pub mod kms;
pub mod meanfield;
pub mod perturbation;

pub use error::{Error, Result};
