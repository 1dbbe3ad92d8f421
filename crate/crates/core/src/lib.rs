//! Krylov model reduction for damped rotor-dynamics quadratic eigenvalue
//! problems.
//!
//! The pipeline runs from a declarative rotor description through finite
//! element assembly ([`rotor`]), pencil construction and inversion ([`qep`]),
//! basis construction and Galerkin projection ([`krylov`]) to modal and
//! critical-speed post-processing ([`analysis`]).

// Index loops mirror the matrix notation; negated comparisons reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod krylov;
pub mod linalg;
pub mod mtx;
pub mod qep;
pub mod rotor;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
