//! Integral quadratic forms: decomposition into positive and negative parts,
//! discriminant cosets and lattice-point enumeration.

pub mod cosets;
pub mod decompose;
pub mod enumerate;
pub mod form;

pub use cosets::{coset_reps, coset_reps_capped, CosetRep};
pub use decompose::{decompose, ExactParts, QuadFormDecomposition};
pub use enumerate::{brute_force_points, lattice_points, shifted_norm, Enumerator};
pub use form::{fixture_names, is_even, is_unimodular, QuadForm, E8};
