use std::fmt::Write as _;
use std::path::Path;

use super::pipeline::ReconstructionReport;
use crate::error::{Error, Result};
use crate::mesh::Triangulation;
use crate::textio::{fmt_f64, write_atomic};

pub const REPORT_HEADER: &str = "cx,cy,q_real,q_imag";

/// Per-triangle CSV: a header line, then `cx,cy,q_real,q_imag` per triangle.
pub fn report_to_csv(report: &ReconstructionReport, mesh: &Triangulation) -> Result<String> {
    if report.q_real.len() != mesh.num_triangles() {
        return Err(Error::invalid("report does not match the mesh"));
    }
    let mut out = String::with_capacity(mesh.num_triangles() * 96);
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for t in 0..mesh.num_triangles() {
        let c = mesh.centroid(t);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(c[0]),
            fmt_f64(c[1]),
            fmt_f64(report.q_real[t]),
            fmt_f64(report.q_imag[t])
        );
    }
    Ok(out)
}

/// `key=value` lines: `M`, `S`, `E_imag`, optional `pseudo_error`, and `time_<stage>_s`.
pub fn report_summary(report: &ReconstructionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "M={}", report.params.m);
    let _ = writeln!(out, "S={}", report.params.s);
    let _ = writeln!(out, "E_imag={}", fmt_f64(report.e_imag));
    if let Some(p) = report.pseudo_error {
        let _ = writeln!(out, "pseudo_error={}", fmt_f64(p));
    }
    let _ = writeln!(out, "near_boundary_vertices={}", report.near_boundary_vertices);
    for (stage, secs) in &report.timings {
        let _ = writeln!(out, "time_{stage}_s={secs:.6}");
    }
    out
}

/// Parses the `key=value` summary into ordered pairs.
pub fn parse_summary(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
                .ok_or_else(|| Error::DataFormat { line: i + 1, msg: format!("expected key=value, found `{l}`") })
        })
        .collect()
}

/// Writes the CSV to `csv_path` and the summary next to it.
pub fn write_report(report: &ReconstructionReport, mesh: &Triangulation, csv_path: &Path, summary_path: &Path) -> Result<()> {
    write_atomic(csv_path, &report_to_csv(report, mesh)?)?;
    write_atomic(summary_path, &report_summary(report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recon::ReconParams;

    #[test]
    fn summary_round_trip() {
        let mesh = Triangulation::new(vec![[-1.0, -1.0], [1.0, -1.0], [0.0, 1.0]], vec![[0, 1, 2]], vec![2, 0, 1]).unwrap();
        let report = ReconstructionReport {
            params: ReconParams::default(),
            q_real: vec![1.5],
            q_imag: vec![-0.25],
            e_imag: 0.125,
            pseudo_error: Some(0.5),
            i0: vec![],
            near_boundary_vertices: 0,
            timings: vec![("poisson".into(), 0.25)],
        };
        let csv = report_to_csv(&report, &mesh).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], REPORT_HEADER);
        let fields: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(fields[2], 1.5);
        assert_eq!(fields[3], -0.25);
        let kv = parse_summary(&report_summary(&report)).unwrap();
        let get = |k: &str| kv.iter().find(|e| e.0 == k).map(|e| e.1.clone()).unwrap();
        assert_eq!(get("M"), "6");
        assert_eq!(get("E_imag").parse::<f64>().unwrap(), 0.125);
        assert_eq!(get("pseudo_error").parse::<f64>().unwrap(), 0.5);
        assert_eq!(get("time_poisson_s"), "0.250000");
        assert!(parse_summary("novalue").is_err());
    }
}
