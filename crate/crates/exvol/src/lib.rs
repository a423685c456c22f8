//! Holomorphic invariants of complex tori, Reinhardt domains and elliptic
//! fibre bundles: extremal volume, complex systoles and classical extremal
//! length, together with brute-force verifiers for the inequalities and
//! minimization properties they satisfy.
//!
//! All values are immutable after construction and every operation is a
//! pure function, so everything here is safe to call concurrently.

mod error;
mod linalg;

pub mod extremal_length;
pub mod invariants;
pub mod lattice;
pub mod minimality;
pub mod reduction;
pub mod reinhardt;
pub mod systole;

pub use error::{Error, Result};
pub use lattice::{ComplexLattice, DecomposableClass, SiegelPoint};
