//! Numerics for thermodynamic formalism on the spin space `{-1, +1}^N`:
//! finite-volume Gibbs measures, FKG checks, the Ruelle transfer operator,
//! involution kernels and the binary model on `[-1, 1]`.

pub mod binary;
pub mod error;
pub mod gibbs;
pub mod kernel;
pub mod par;
pub mod potential;
pub mod space;
pub mod table;
pub mod transfer;

pub use error::{Error, Result};
pub use potential::{CouplingRule, CouplingSpec, PotentialEval, PotentialKind};
pub use space::{BoundaryTail, Configuration, CylinderSet, Spin, SpinWord};
pub use table::TabulatedFunction;
