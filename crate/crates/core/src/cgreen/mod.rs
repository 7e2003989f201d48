//! Fields on the unit disc and the Cauchy–Green transform.

mod basis;
mod field;
mod grid;
mod io;
mod ops;

pub use basis::{zernike_moment, zernike_radial, DiscBasis};
pub use field::{
    analyze, mono_count, mono_index, mono_of, monomial_integral, synthesize, Analyzer, GridValues,
    HolomorphicDatum, SpectralField,
};
pub use grid::{gauss_legendre_unit, DiscGrid};
pub use io::{write_field_csv, CoeffDump, CoeffEntry};
pub use ops::{
    cauchy_green, cg_quadrature_oracle, complex_derivative, inner_product, real_inner,
    zeta_derivative_n, Derivative, MAX_DEGREE,
};
