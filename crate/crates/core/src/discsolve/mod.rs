//! Nonlinear disc equation in a chart: the chart map `F`, its linearization,
//! Newton/Picard/continuation solvers, jets, and Whitney and transversality
//! perturbations.

mod jets;
mod newton;
mod perturb;
mod problem;
mod transversality;

pub use jets::{immersion_margin, jet_extension, real_differential, ImmersionMargin, JetExtension, JetPoint};
pub use newton::{
    deform_family, solve_disc, solve_disc_target, DeformFamily, DiscSolution, SolutionSummary,
    CONTINUATION_STEPS,
};
pub use perturb::{
    family_disc, spanning_family_at, transversality_perturb, whitney_perturb, Perturbation,
    PerturbOptions, PerturbationSummary,
};
pub use problem::{CrResidual, DiscProblem, Method, SolverOptions};
pub use transversality::{
    transversality_report, IntersectionPoint, JetSubmanifold, SubmanifoldJson, TransversalityReport,
    LATTICE, RANK_TOL, ZERO_TOL,
};
