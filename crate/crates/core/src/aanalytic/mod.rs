mod cauchy;
mod modes;

pub use cauchy::{boundary_weights, cauchy_interior, cauchy_modes, cauchy_stack, riemann_cuts, BoundaryQuadrature, WeightRule};
pub use modes::{boundary_fourier_modes, fourier_modes, modes_to_i, modes_to_j, ModeStack, SiteSet};
