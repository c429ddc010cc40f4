mod boundary;
mod fem;
mod pipeline;
mod report;

pub use boundary::{interpolate_boundary, solve_cyclic_tridiagonal, BoundaryProjector, BoundaryTrace};
pub use fem::{
    barycentric_gradients, conjugate_gradient, gauss_points, poisson_step, CgStats, CsrMatrix, PoissonSystem, GAUSS3,
};
pub use pipeline::{
    continuity_mask, e_imag, pseudo_error, reconstruct, select_local_minimum, sweep_m, KernelIndex, ReconParams,
    ReconstructionReport, Reconstructor, SweepResult,
};
pub use report::{parse_summary, report_summary, report_to_csv, write_report, REPORT_HEADER};
