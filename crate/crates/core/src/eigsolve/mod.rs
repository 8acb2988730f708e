//! Principal Dirichlet eigenpairs and boundary derivative traces.

mod precond;
mod solver;
mod trace;

pub use precond::IncompleteCholesky;
pub use solver::{
    principal_eigenpair, principal_eigenpair_with, rayleigh_upper_bound, EigenPair, SolverOptions,
};
pub use trace::{field_normal_derivative_trace, normal_derivative_trace, BoundaryTrace, TraceSample};
