//! Theta series attached to solutions of the Vignéras equation.

pub mod eval;
pub mod json;
pub mod spec;
pub mod sum;

pub use eval::{borcherds_normalization, borcherds_poly, theta_eval, theta_eval_borcherds, ThetaValue, ThetaValueJson};
pub use json::SpecFile;
pub use spec::{
    build_f_posdef, build_g_indef, indef_spec, posdef_spec, vigneras_residual, IndefFn, ThetaCoeff, ThetaSpec,
};
pub use sum::{lattice_sum, CompensatedSum, LatticeSum, TailModel};
