//! Medium coefficients, source phantoms and the scattering kernel.

mod kernel;
mod medium;
mod phantom;
pub mod presets;

pub use kernel::{hg_kernel, hg_mode, truncation_error_sq, ScatteringKernel};
pub use medium::{evaluate_medium, Coefficients, Medium};
pub use phantom::{Blend, Layer, Phantom, Shape, SHEPP_LOGAN_ELLIPSES};
