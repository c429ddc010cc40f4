use std::f64::consts::TAU;

use delaunator::{triangulate, Point as DPoint};

use super::{BoundaryCurve, CurveKind, Triangulation};
use crate::error::{Error, Result};
use crate::geom::{orient, Point};

/// Ring-template point cloud plus Delaunay triangulation.
///
/// Ring `j` (`1 ≤ j ≤ n`) is the boundary curve scaled by `j/n` and carries
/// `6j` vertices equally spaced in argument; ring `n` is the boundary itself,
/// so boundary vertices lie exactly on the curve. The origin is the last
/// vertex. `n` is one less than the largest ring count whose boundary
/// spacing at the widest radius stays at or above `target_edge_length`, so
/// halving the target maps `n` to at least `2n + 1`.
pub fn generate_mesh(curve: &BoundaryCurve, target_edge_length: f64) -> Result<Triangulation> {
    let h = target_edge_length;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid(format!("edge length must be positive, got {h}")));
    }
    let r_max = max_radius(curve);
    let n = ((TAU * r_max / (6.0 * h)).floor() as usize).saturating_sub(1);
    if 6 * n < 16 {
        return Err(Error::invalid(format!(
            "edge length {h} gives only {} boundary vertices (need at least 16)",
            6 * n
        )));
    }

    let mut points: Vec<Point> = Vec::with_capacity(3 * n * (n + 1) + 1);
    for j in (1..=n).rev() {
        let scale = j as f64 / n as f64;
        let count = 6 * j;
        for k in 0..count {
            let w = TAU * k as f64 / count as f64;
            let p = curve.point(w);
            points.push([scale * p[0], scale * p[1]]);
        }
    }
    points.push([0.0, 0.0]);

    let dpoints: Vec<DPoint> = points.iter().map(|p| DPoint { x: p[0], y: p[1] }).collect();
    let tri = triangulate(&dpoints);
    let mut triangles = Vec::with_capacity(tri.len());
    for t in tri.triangles.chunks_exact(3) {
        let mut t = [t[0], t[1], t[2]];
        let o = orient(points[t[0]], points[t[1]], points[t[2]]);
        if o == 0.0 {
            continue;
        }
        if o < 0.0 {
            t.swap(1, 2);
        }
        triangles.push(t);
    }
    let boundary: Vec<usize> = (0..6 * n).collect();
    Triangulation::new(points, triangles, boundary)
}

fn max_radius(curve: &BoundaryCurve) -> f64 {
    match curve.kind() {
        CurveKind::Circle { radius } => *radius,
        CurveKind::Ellipse { a, b } => a.max(*b),
        CurveKind::Polygon { .. } => curve.circumradius(),
    }
}
