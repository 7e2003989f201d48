//! Generalized holomorphic vectors: the operator `P`, its adjoint, the
//! finite-rank modification `P̃`, linear solves, jets and spanning families.

mod discrete;
mod modification;
mod solve;
mod spanning;
mod system;

pub use discrete::{kernel_basis, DiscretizedOperator};
pub use modification::{
    build_modification, default_eps, CorrectionChoice, FredholmModification, ModificationReport,
};
pub use solve::{
    jet_eval, solve_linear, solve_with_jet, twisted_b2, JetSolver, JetVector, LinearRhs, LinearSolver,
    SolverReport, VekuaConfig,
};
pub use spanning::{
    check_points, default_sample_points, jet_matrix, jet_sigma_min, spanning_family,
    SpanningFamily, SPAN_FLOOR,
};
pub use system::{apply_adjoint, apply_operator, LinearCRSystem, OperatorMode};
