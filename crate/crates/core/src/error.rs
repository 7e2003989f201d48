use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular structure: |det| = {det:.3e} below tolerance {tol:.1e}")]
    SingularStructure { det: f64, tol: f64 },

    #[error("operator is not a complex structure: |J^2 + I| = {defect:.3e}")]
    NotAComplexStructure { defect: f64 },

    #[error("grid {n_r}x{n_theta} cannot resolve degree {degree}")]
    UnderResolved {
        n_r: usize,
        n_theta: usize,
        degree: usize,
    },

    #[error("degree {degree} exceeds the coefficient budget {limit}")]
    DegreeOverflow { degree: usize, limit: usize },

    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no holomorphic complement found: {remaining} singular direction(s) left")]
    ComplementNotFound { remaining: usize },

    #[error("ill-conditioned linear system: condition number {condition:.3e} > {limit:.1e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("point leaves the validity region: |z| = {norm:.4} > {radius:.4}")]
    OutOfValidityRegion { norm: f64, radius: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        log: Vec<f64>,
    },

    #[error("jet evaluation not surjective at {zeta_re:+.4}{zeta_im:+.4}i: sigma_min = {sigma_min:.3e}")]
    SurjectivityFailed {
        zeta_re: f64,
        zeta_im: f64,
        sigma_min: f64,
    },

    #[error("perturbation failed after {attempts} draws (best score {best:.3e})")]
    PerturbationFailed { attempts: usize, best: f64 },

    #[error("jet submanifold is degenerate at a zero: rank {rank} < codimension {codim}")]
    RankHypothesisViolated { rank: usize, codim: usize },

    #[error("schema error: {0}")]
    Schema(String),
}
