//! Executable checks of the operator identities and the theta transformation laws.
pub mod fourier;
pub mod holomorphy;
pub mod laws;
pub mod operators;
pub mod random;
pub mod report;
pub mod suite;

pub use fourier::{check_fourier, check_fourier_general, check_gauss_transform, check_poisson};
pub use holomorphy::check_holomorphy;
pub use laws::{check_inversion, check_translation, check_vigneras};
pub use operators::{check_commutator, commutator_residual};
pub use report::CheckReport;
pub use suite::{run_suite, Suite, SuiteOptions};
