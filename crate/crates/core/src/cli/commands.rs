//! Subcommand bodies. Each writes its outputs atomically and returns the
//! computed objects so callers and tests can inspect them.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::{ForwardModel, MeshSource, RunConfig};
use crate::error::{Error, Result};
use crate::forward::{ballistic_measurement, forward_measurement, BoundaryMeasurement};
use crate::mesh::{generate_mesh, read_mesh, write_mesh, Triangulation};
use crate::recon::{report_summary, sweep_m, write_report, Reconstructor, ReconstructionReport, SweepResult};
use crate::textio::{fmt_f64, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshRole {
    Forward,
    Recon,
}

/// Generates or loads a mesh.
pub fn build_mesh(source: &MeshSource, config: &RunConfig) -> Result<Triangulation> {
    match source {
        MeshSource::EdgeLength(h) => generate_mesh(&config.curve, *h),
        MeshSource::File(p) => read_mesh(p),
    }
}

/// Path of the key=value summary that accompanies a report CSV.
pub fn summary_path(report: &Path) -> PathBuf {
    let mut s = report.as_os_str().to_owned();
    s.push(".summary");
    s.into()
}

pub fn cmd_gen_mesh(config: &RunConfig, role: MeshRole, out: &Path) -> Result<Triangulation> {
    let source = match role {
        MeshRole::Forward => &config.forward.mesh,
        MeshRole::Recon => &config.recon.mesh,
    };
    let mesh = build_mesh(source, config)?;
    log::info!("mesh: {} vertices, {} triangles", mesh.num_vertices(), mesh.num_triangles());
    write_mesh(&mesh, out)?;
    Ok(mesh)
}

/// Synthetic boundary data for the configured medium and source.
pub fn cmd_forward(config: &RunConfig, out: &Path) -> Result<BoundaryMeasurement> {
    config.validate()?;
    let medium = config.medium()?;
    let params = config.forward_params();
    let start = Instant::now();
    let meas = match config.forward.model {
        ForwardModel::Transport => {
            let mesh = build_mesh(&config.forward.mesh, config)?;
            log::info!("forward mesh: {} triangles, {} directions", mesh.num_triangles(), params.n_dir);
            let (sol, meas) = forward_measurement(&mesh, &medium, &config.source, &params).map_err(|e| e.in_stage("forward"))?;
            log::info!("source iteration converged in {} sweeps", sol.iterations);
            meas
        }
        ForwardModel::Ballistic => ballistic_measurement(
            &config.curve,
            &medium,
            &config.source,
            params.k_points,
            params.n_angles,
            config.forward.ray_points,
        )
        .map_err(|e| e.in_stage("forward"))?,
    };
    log::info!("forward data in {:.1}s", start.elapsed().as_secs_f64());
    meas.write(out)?;
    Ok(meas)
}

/// Reads the data and reconstruction mesh and checks that they fit the config.
fn load_inputs(config: &RunConfig, data: &Path, mesh: Option<&Path>) -> Result<(BoundaryMeasurement, Triangulation)> {
    config.validate()?;
    let meas = BoundaryMeasurement::read(data)?;
    if meas.curve != config.curve {
        return Err(Error::Config {
            line: 0,
            msg: format!("data were taken on `{}` but the config domain is `{}`", meas.curve, config.curve),
        });
    }
    let source = match mesh {
        Some(p) => MeshSource::File(p.to_owned()),
        None => config.recon.mesh.clone(),
    };
    if source == config.forward.mesh {
        return Err(Error::Config { line: 0, msg: "reconstruction mesh equals the forward mesh (inverse crime)".into() });
    }
    let mesh = build_mesh(&source, config)?;
    log::info!("reconstruction mesh: {} triangles", mesh.num_triangles());
    Ok((meas, mesh))
}

fn score(config: &RunConfig, mesh: &Triangulation, report: ReconstructionReport) -> ReconstructionReport {
    if config.recon.pseudo_error {
        report.with_ground_truth(mesh, &config.source)
    } else {
        report
    }
}

/// Reconstruction at one order; writes `out` and `<out>.summary`.
pub fn cmd_reconstruct(
    config: &RunConfig,
    data: &Path,
    mesh: Option<&Path>,
    m: Option<usize>,
    out: &Path,
) -> Result<ReconstructionReport> {
    let (meas, mesh) = load_inputs(config, data, mesh)?;
    let medium = config.medium()?;
    let params = config.recon_params(m);
    params.validate()?;
    let report = Reconstructor::new(&meas, &mesh, &medium, &params)?.run(params.m)?;
    let report = score(config, &mesh, report);
    write_report(&report, &mesh, out, &summary_path(out))?;
    Ok(report)
}

/// `M,E_imag[,pseudo_error]` rows, one per order.
pub fn sweep_table(sweep: &SweepResult) -> String {
    let scored = sweep.reports.iter().all(|r| r.pseudo_error.is_some());
    let mut out = String::from(if scored { "M,E_imag,pseudo_error\n" } else { "M,E_imag\n" });
    for (report, &(m, e)) in sweep.reports.iter().zip(&sweep.table) {
        let _ = write!(out, "{m},{}", fmt_f64(e));
        if let (true, Some(p)) = (scored, report.pseudo_error) {
            let _ = write!(out, ",{}", fmt_f64(p));
        }
        out.push('\n');
    }
    out
}

/// Sweeps `M`, writes the table to `out` and the selected reconstruction to
/// the configured report path (plus its summary, which records `selected_M`).
pub fn cmd_sweep(
    config: &RunConfig,
    data: &Path,
    mesh: Option<&Path>,
    orders: Option<RangeInclusive<usize>>,
    out: &Path,
) -> Result<SweepResult> {
    let (meas, mesh) = load_inputs(config, data, mesh)?;
    let medium = config.medium()?;
    let orders = orders.unwrap_or_else(|| config.recon.m_range.clone());
    let mut sweep = sweep_m(&meas, &mesh, &medium, &config.recon_params(None), orders)?;
    sweep.reports = std::mem::take(&mut sweep.reports).into_iter().map(|r| score(config, &mesh, r)).collect();
    write_atomic(out, &sweep_table(&sweep))?;
    let chosen = sweep.reports.iter().find(|r| r.params.m == sweep.selected).expect("selected order was reconstructed");
    let report_path = &config.output.report;
    write_atomic(report_path, &crate::recon::report_to_csv(chosen, &mesh)?)?;
    let summary = format!("selected_M={}\n{}", sweep.selected, report_summary(chosen));
    write_atomic(&summary_path(report_path), &summary)?;
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_sits_next_to_report() {
        assert_eq!(summary_path(Path::new("out/r.csv")), PathBuf::from("out/r.csv.summary"));
    }
}
