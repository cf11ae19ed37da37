//! Numerical laboratory for the Nahm flow on co-Higgs data over the
//! projective line.
//!
//! The crate integrates the matrix flows, monitors their conserved
//! quantities (the spectral coefficients `a_k(z)` and, for non-reduced
//! spectral curves, the divisor `D`), and constructs and verifies fixed
//! points of the flow as commuting quadruples lifted to curves in affine
//! 3-space.

pub mod algebra;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fixed_points;
pub mod moduli;
pub mod ribbon;
pub mod spectral;

pub use algebra::{Complex, Matrix, MatrixPoly, Poly};
pub use dynamics::{FlowForm, NahmState, Trajectory};
pub use error::{Error, Result};
