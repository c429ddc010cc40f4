//! Reconstruction of a radiative source inside a 2D absorbing and
//! anisotropically scattering medium from boundary outflow measurements.

pub mod aanalytic;
pub mod cli;
pub mod error;
pub mod forward;
pub mod geom;
pub mod mesh;
pub mod phantoms;
pub mod rayxforms;
pub mod recon;
pub mod textio;

pub use error::{Error, ErrorClass, Result};
