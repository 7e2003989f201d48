//! Pseudo-holomorphic discs in almost complex domains of `ℂⁿ`.
//!
//! A structure is described by its complex matrix `A` ([`structure`]); discs
//! solve `g_ζ̄ = A(g)·conj(g_ζ) + b(g)` and are found as preimages of
//! holomorphic data under the Cauchy–Green chart map ([`discsolve`]), built on
//! the linear theory of generalized holomorphic vectors ([`vekua`]) and the
//! transform itself ([`cgreen`]).

pub mod acceptance;
pub mod cgreen;
pub mod discsolve;
pub mod error;
pub mod poly;
pub mod structure;
pub mod vekua;

pub use cgreen::{DiscGrid, GridValues, HolomorphicDatum, SpectralField};
pub use discsolve::{DiscProblem, DiscSolution, Method, PerturbOptions, SolverOptions};
pub use error::{Error, Result};
pub use poly::{PolynomialMap, Var};
pub use structure::{RealLinearOp, StructureChart};
pub use vekua::{FredholmModification, JetVector, LinearCRSystem, VekuaConfig};
