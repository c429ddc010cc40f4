//! Projection-coordinate view of boundary data.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::forward::BoundaryMeasurement;
use crate::geom::{dot, perp};
use crate::mesh::arg;
use crate::textio::{fmt_f64, write_atomic};

pub const SINOGRAM_HEADER: &str = "arg_perp,offset,intensity";

/// One outflow sample: `Arg ξ⊥ ∈ [0, 2π)`, signed offset `ζ·ξ⊥`, and `I(ζ, ξ)`,
/// with `ξ⊥` the direction rotated a quarter turn counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinogramRow {
    pub angle: f64,
    pub offset: f64,
    pub intensity: f64,
}

/// Rows for every outgoing `(ζ_k, ξ_n)`, point-major.
pub fn sinogram_rows(meas: &BoundaryMeasurement) -> Vec<SinogramRow> {
    let mut rows = Vec::new();
    for k in 0..meas.num_points() {
        for n in 0..meas.num_angles() {
            if !meas.is_outgoing(k, n) {
                continue;
            }
            let normal = perp(meas.grid.direction(n));
            rows.push(SinogramRow { angle: arg(normal), offset: dot(meas.points[k], normal), intensity: meas.value(k, n) });
        }
    }
    rows
}

pub fn sinogram_to_csv(rows: &[SinogramRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 72 + 32);
    out.push_str(SINOGRAM_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{}", fmt_f64(r.angle), fmt_f64(r.offset), fmt_f64(r.intensity));
    }
    out
}

/// Reads a boundary file and writes its sinogram CSV; returns the row count.
pub fn export_sinogram(data: &Path, out: &Path) -> Result<usize> {
    let meas = BoundaryMeasurement::read(data)?;
    let rows = sinogram_rows(&meas);
    write_atomic(out, &sinogram_to_csv(&rows))?;
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryCurve;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn single_sample_geometry() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        let mut m = BoundaryMeasurement::zeros(&c, 4, 8).unwrap();
        m.values[0] = 0.75;
        let rows = sinogram_rows(&m);
        let first = rows[0];
        assert!((first.angle - FRAC_PI_2).abs() < 1e-15);
        assert!(first.offset.abs() < 1e-15);
        assert_eq!(first.intensity, 0.75);
    }

    #[test]
    fn one_row_per_outgoing_sample() {
        let c = BoundaryCurve::ellipse(0.69, 0.92).unwrap();
        let m = BoundaryMeasurement::zeros(&c, 37, 60).unwrap();
        let outgoing = (0..37).flat_map(|k| (0..60).map(move |n| (k, n))).filter(|&(k, n)| m.is_outgoing(k, n)).count();
        let rows = sinogram_rows(&m);
        assert_eq!(rows.len(), outgoing);
        assert!(rows.iter().all(|r| r.intensity == 0.0 && (0.0..std::f64::consts::TAU).contains(&r.angle)));
        // a tangent point on the support line has offset equal to the support radius
        assert!(rows.iter().all(|r| r.offset.abs() <= 0.92 + 1e-12));
    }
}
