mod ballistic;
mod measurement;
mod solver;

pub use ballistic::{ballistic_forward, ballistic_measurement};
pub use measurement::{AngularGrid, BoundaryMeasurement, BOUNDARY_MAGIC, TANGENT_TOLERANCE};
pub use solver::{
    cell_averages, forward_measurement, sample_outflow, solve_forward, total_outflow, ForwardParams, ForwardSolution,
    DEFAULT_KERNEL_MODES,
};
