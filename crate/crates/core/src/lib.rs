//! Finite-level models of the Koopman representation of the Gaussian
//! boolean action of the step-function torus group.
//!
//! Everything is computed at a finite level `n`, degree `l` and cylinder
//! depth; scalars are either exact elements of `ℚ(√2, i)` or `Complex64`.

pub mod alpha;
pub mod combinatorics;
pub mod error;
pub mod fock;
pub mod gauss;
pub mod montecarlo;
pub mod scalar;
pub mod spectral;

pub use combinatorics::{AdmissibleWord, BinarySeq, Limits, Symbol, TorusStep};
pub use error::{Error, Result};
pub use scalar::{Exact, QSqrt2, Scalar};
