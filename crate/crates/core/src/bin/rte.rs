use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rte_core::cli::{
    cmd_forward, cmd_gen_mesh, cmd_reconstruct, cmd_sweep, export_sinogram, parse_range, run_validation, summary_path,
    validation_table, MeshRole, Preset, RunConfig, ValidateOptions,
};
use rte_core::forward::BoundaryMeasurement;
use rte_core::{Error, ErrorClass, Result};

/// Source reconstruction for 2D radiative transport from boundary outflow data.
#[derive(Parser)]
#[command(name = "rte", version)]
struct Cli {
    /// Worker threads for the parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// INI run configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Start from a named preset instead of a file (exp1, exp2, exp1-desk, exp2-desk).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Role {
    Forward,
    Recon,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the forward or reconstruction mesh.
    GenMesh {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum, default_value = "recon")]
        role: Role,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the forward problem and write boundary data.
    Forward {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct the source at one truncation order.
    Reconstruct {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long = "M")]
        m: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct over a range of orders and select one by the imaginary-part criterion.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        mesh: Option<PathBuf>,
        /// Orders `a:b`, inclusive.
        #[arg(long = "M-range", value_parser = parse_range)]
        m_range: Option<RangeInclusive<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write boundary data in projection coordinates.
    ExportSinogram {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in oracle suite.
    Validate {
        /// Also check that this boundary data file parses.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Mutation check: flip the Hilbert-term sign (the suite must then fail).
        #[arg(long, hide = true)]
        flip_hilbert_sign: bool,
    },
}

fn load_config(args: &ConfigArgs) -> Result<RunConfig> {
    match (&args.config, &args.preset) {
        (Some(path), _) => RunConfig::read(path),
        (None, Some(name)) => {
            let c = Preset::parse(name).map_err(|msg| Error::Config { line: 0, msg })?.config();
            c.validate()?;
            Ok(c)
        }
        (None, None) => Err(Error::Config { line: 0, msg: "pass --config <path> or --preset <name>".into() }),
    }
}

fn or_default<'a>(given: &'a Option<PathBuf>, fallback: &'a Path) -> &'a Path {
    given.as_deref().unwrap_or(fallback)
}

/// Returns whether every check passed.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::GenMesh { cfg, role, out } => {
            let config = load_config(&cfg)?;
            let role = match role {
                Role::Forward => MeshRole::Forward,
                Role::Recon => MeshRole::Recon,
            };
            let out = or_default(&out, &config.output.mesh);
            let mesh = cmd_gen_mesh(&config, role, out)?;
            println!("{}: {} vertices, {} triangles", out.display(), mesh.num_vertices(), mesh.num_triangles());
        }
        Command::Forward { cfg, out } => {
            let config = load_config(&cfg)?;
            let out = or_default(&out, &config.output.data);
            let meas = cmd_forward(&config, out)?;
            println!("{}: K={} N={}", out.display(), meas.num_points(), meas.num_angles());
        }
        Command::Reconstruct { cfg, data, mesh, m, out } => {
            let config = load_config(&cfg)?;
            let data = or_default(&data, &config.output.data);
            let out = or_default(&out, &config.output.report);
            let report = cmd_reconstruct(&config, data, mesh.as_deref(), m, out)?;
            println!("M={} E_imag={:.16e}", report.params.m, report.e_imag);
            if let Some(p) = report.pseudo_error {
                println!("pseudo_error={p:.16e}");
            }
            println!("wrote {} and {}", out.display(), summary_path(out).display());
        }
        Command::Sweep { cfg, data, mesh, m_range, out } => {
            let config = load_config(&cfg)?;
            let data = or_default(&data, &config.output.data);
            let out = or_default(&out, &config.output.sweep);
            let sweep = cmd_sweep(&config, data, mesh.as_deref(), m_range, out)?;
            for (m, e) in &sweep.table {
                println!("M={m:<3} E_imag={e:.16e}");
            }
            println!("selected M={}", sweep.selected);
        }
        Command::ExportSinogram { data, out } => {
            let rows = export_sinogram(&data, &out)?;
            println!("{}: {rows} rows", out.display());
        }
        Command::Validate { data, flip_hilbert_sign } => {
            if let Some(path) = data {
                let meas = BoundaryMeasurement::read(&path)?;
                println!("{}: K={} N={} ok", path.display(), meas.num_points(), meas.num_angles());
            }
            let checks = run_validation(ValidateOptions { flip_hilbert_sign })?;
            print!("{}", validation_table(&checks));
            return Ok(checks.iter().all(|c| c.passed()));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(ErrorClass::Numeric.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}
