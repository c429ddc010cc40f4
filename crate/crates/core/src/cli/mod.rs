//! Configuration, experiment presets and the subcommands behind the `rte` binary.

mod commands;
mod config;
mod presets;
mod sinogram;
mod validate;

pub use commands::{
    build_mesh, cmd_forward, cmd_gen_mesh, cmd_reconstruct, cmd_sweep, summary_path, sweep_table, MeshRole,
};
pub use config::{parse_range, ForwardConfig, ForwardModel, MeshSource, OutputConfig, ReconConfig, RunConfig};
pub use presets::Preset;
pub use sinogram::{export_sinogram, sinogram_rows, sinogram_to_csv, SinogramRow, SINOGRAM_HEADER};
pub use validate::{run_validation, validation_table, Check, ValidateOptions};
