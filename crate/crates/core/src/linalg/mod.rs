//! Dense complex linear algebra used by every other module.

pub mod eig;
pub mod gram_schmidt;
pub mod lu;
pub mod matrix;

pub use eig::{dense_eig, dense_eig_unbalanced, EigenDecomposition};
pub use gram_schmidt::{
    orthogonalize_against, orthonormality_error, principal_angle_bound, span_residual, GsOutcome,
    OrthonormalBasis, BREAKDOWN_TOL, DEFAULT_ETA,
};
pub use lu::{lu_factor, lu_solve, LuFactors};
pub use matrix::{axpy, dotc, norm2, normalized, ones, CMatrix, C64, ONE, ZERO};
