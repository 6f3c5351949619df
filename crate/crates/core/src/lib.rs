//! Siegel theta series for integral quadratic forms.

pub mod error;
pub mod io;
pub mod linalg;
pub mod polyalg;
pub mod quadform;
pub mod siegel;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
