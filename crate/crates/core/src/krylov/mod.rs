//! Projection bases for the inverse QEP, Galerkin reduction and the reduced
//! solve.

mod bases;
mod reduce;
mod spec;

pub use bases::{
    arnoldi_basis_linearized, arnoldi_chain, lqar_basis, qar_basis, qar_basis_with_shift,
    qar_power_estimate, second_order_arnoldi, soar_basis, tgsar1_basis, tgsar2_basis, toar_basis,
    toar_factorization, LinearizedArnoldi, SecondOrderBasis, ToarBasis,
};
pub use reduce::{
    galerkin_reduce, reduce_with, run_reduction, solve_reduced, Diagnostics, ReducedOperators,
    ReductionReport, ReductionResult, RitzVector, Timing, SMALL_EIGENVALUE_TOL,
};
pub use spec::{Method, ReductionSpec};
