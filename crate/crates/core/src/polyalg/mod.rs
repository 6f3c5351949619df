//! Exact algebra of polynomials in a matrix variable and the differential
//! operators acting on them.

pub mod coeff;
pub mod expquad;
pub mod homog;
pub mod json;
pub mod ops;
pub mod poly;

pub use coeff::{Coeff, GaussRat, Ring};
pub use expquad::ExpQuadPoly;
pub use homog::{basis_homopol, basis_homopol_capped, matches_minor_span};
pub use ops::{
    euler_entry, exp_trace_laplace, homogeneity_degree, inverse_form, laplace_entry, trace_laplace,
    vigneras_apply, MatFunction, OperatorMatrix,
};
pub use poly::{ExactPoly, FloatPoly, MatPoly, PolyEvaluator};
