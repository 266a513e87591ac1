//! Weierstrass data for stationary surfaces in Lorentz 4-space.

pub mod cxratio;
pub mod error;
pub mod nonorientable;
pub mod quadcurv;
pub mod singscan;
pub mod surface_mesh;
pub mod vecform;
pub mod wdf;
pub mod weierstrass;

pub use error::{Error, Result};
