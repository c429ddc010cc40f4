//! Boundary curves of star-shaped convex domains, parameterized by polar angle.
//!
//! Every curve is written as `ζ(ω) = r(ω) e^{iω}`, so the parameter of a
//! boundary point coincides with its argument. Quadrature weights built from
//! argument gaps and derivatives `ζ'(ω)` are then mutually consistent.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::{cross, dot, Point};

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// Convex polygon containing the origin, vertices in increasing argument.
    Polygon { vertices: Vec<Point> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    kind: CurveKind,
}

/// Argument of a point, mapped to `[0, 2π)`.
pub fn arg(p: Point) -> f64 {
    let a = p[1].atan2(p[0]);
    let a = if a < 0.0 { a + TAU } else { a };
    // a tiny negative angle rounds up to exactly 2π
    if a >= TAU {
        0.0
    } else {
        a
    }
}

impl BoundaryCurve {
    pub fn circle(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Self { kind: CurveKind::Circle { radius } })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!("ellipse semi-axes must be positive, got a={a}, b={b}")));
        }
        Ok(Self { kind: CurveKind::Ellipse { a, b } })
    }

    /// Builds a polygonal loop. The vertices must enclose the origin, be
    /// strictly convex and be listed counter-clockwise.
    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::invalid("polygonal boundary needs at least 3 vertices"));
        }
        for i in 0..n {
            let p = vertices[i];
            let q = vertices[(i + 1) % n];
            let r = vertices[(i + 2) % n];
            if cross([q[0] - p[0], q[1] - p[1]], [r[0] - q[0], r[1] - q[1]]) <= 0.0 {
                return Err(Error::invalid(format!("polygonal boundary is not strictly convex at vertex {}", (i + 1) % n)));
            }
            // origin strictly inside: it lies left of every edge
            if cross([q[0] - p[0], q[1] - p[1]], [-p[0], -p[1]]) <= 0.0 {
                return Err(Error::invalid("polygonal boundary must contain the origin"));
            }
        }
        let mut vertices = vertices;
        let start = (0..n)
            .min_by(|&i, &j| arg(vertices[i]).total_cmp(&arg(vertices[j])))
            .unwrap_or(0);
        vertices.rotate_left(start);
        Ok(Self { kind: CurveKind::Polygon { vertices } })
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// Polar radius `r(ω)` and its derivative.
    fn radius_with_derivative(&self, omega: f64) -> (f64, f64) {
        match &self.kind {
            CurveKind::Circle { radius } => (*radius, 0.0),
            CurveKind::Ellipse { a, b } => {
                let (s, c) = omega.sin_cos();
                let d = b * b * c * c + a * a * s * s;
                let r = a * b / d.sqrt();
                let dr = -a * b * (a * a - b * b) * s * c / (d * d.sqrt());
                (r, dr)
            }
            CurveKind::Polygon { vertices } => {
                let dir = [omega.cos(), omega.sin()];
                let n = vertices.len();
                for i in 0..n {
                    let p = vertices[i];
                    let q = vertices[(i + 1) % n];
                    let e = [q[0] - p[0], q[1] - p[1]];
                    let denom = cross(dir, e);
                    if denom.abs() < 1e-300 {
                        continue;
                    }
                    // origin + r dir = p + u e
                    let r = cross(p, e) / denom;
                    let u = cross(p, dir) / denom;
                    if r > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
                        // d r / d ω for a straight edge: r = c / (n·dir)
                        let normal = [e[1], -e[0]];
                        let nd = dot(normal, dir);
                        let dnd = dot(normal, [-dir[1], dir[0]]);
                        return (r, -r * dnd / nd);
                    }
                }
                unreachable!("ray from an interior origin always meets a closed polygon")
            }
        }
    }

    pub fn radius_at(&self, omega: f64) -> f64 {
        self.radius_with_derivative(omega).0
    }

    /// `ζ(ω)`.
    pub fn point(&self, omega: f64) -> Point {
        let r = self.radius_at(omega);
        [r * omega.cos(), r * omega.sin()]
    }

    /// `ζ'(ω) = (r' + i r) e^{iω}`.
    pub fn derivative(&self, omega: f64) -> Point {
        let (r, dr) = self.radius_with_derivative(omega);
        let d = Complex64::new(dr, r) * Complex64::from_polar(1.0, omega);
        [d.re, d.im]
    }

    /// Outward unit normal at `ζ(ω)`.
    pub fn normal(&self, omega: f64) -> Point {
        let t = self.derivative(omega);
        let len = t[0].hypot(t[1]);
        [t[1] / len, -t[0] / len]
    }

    pub fn contains(&self, p: Point) -> bool {
        match &self.kind {
            CurveKind::Circle { radius } => p[0] * p[0] + p[1] * p[1] < radius * radius,
            CurveKind::Ellipse { a, b } => (p[0] / a).powi(2) + (p[1] / b).powi(2) < 1.0,
            CurveKind::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let v = vertices[i];
                    let w = vertices[(i + 1) % n];
                    cross([w[0] - v[0], w[1] - v[1]], [p[0] - v[0], p[1] - v[1]]) > 0.0
                })
            }
        }
    }

    /// Parameter interval `[t0, t1]` where `x + t d` lies in the closed domain,
    /// or `None` when the line misses it.
    pub fn line_interval(&self, x: Point, d: Point) -> Option<(f64, f64)> {
        match &self.kind {
            CurveKind::Circle { radius } => quadric_interval(x, d, *radius, *radius),
            CurveKind::Ellipse { a, b } => quadric_interval(x, d, *a, *b),
            CurveKind::Polygon { vertices } => {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                let n = vertices.len();
                for i in 0..n {
                    let v = vertices[i];
                    let w = vertices[(i + 1) % n];
                    let e = [w[0] - v[0], w[1] - v[1]];
                    // inside: cross(e, x + t d - v) >= 0
                    let c0 = cross(e, [x[0] - v[0], x[1] - v[1]]);
                    let c1 = cross(e, d);
                    if c1.abs() < 1e-300 {
                        if c0 < 0.0 {
                            return None;
                        }
                    } else if c1 > 0.0 {
                        lo = lo.max(-c0 / c1);
                    } else {
                        hi = hi.min(-c0 / c1);
                    }
                }
                (lo <= hi).then_some((lo, hi))
            }
        }
    }

    /// Distance travelled from `x` along the unit vector `xi` before leaving
    /// the domain. Zero when `x` is outside or on the boundary heading out.
    pub fn exit_distance(&self, x: Point, xi: Point) -> f64 {
        match self.line_interval(x, xi) {
            Some((_, t1)) if t1 > 0.0 => t1,
            _ => 0.0,
        }
    }

    /// Radius of the smallest origin-centred disc containing the domain.
    pub fn circumradius(&self) -> f64 {
        match &self.kind {
            CurveKind::Circle { radius } => *radius,
            CurveKind::Ellipse { a, b } => a.max(*b),
            CurveKind::Polygon { vertices } => vertices.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max),
        }
    }

    pub fn area(&self) -> f64 {
        match &self.kind {
            CurveKind::Circle { radius } => PI * radius * radius,
            CurveKind::Ellipse { a, b } => PI * a * b,
            CurveKind::Polygon { vertices } => crate::geom::polygon_area(vertices),
        }
    }

    /// Arc-length samples `(ω_j, s_j)` on a uniform grid of `n` argument steps,
    /// `s_n` being the perimeter.
    pub(crate) fn arc_length_table(&self, n: usize) -> Vec<(f64, f64)> {
        let mut table = Vec::with_capacity(n + 1);
        let mut s = 0.0;
        table.push((0.0, 0.0));
        let dw = TAU / n as f64;
        for j in 0..n {
            // Simpson on each step
            let w0 = j as f64 * dw;
            let speed = |w: f64| {
                let d = self.derivative(w);
                d[0].hypot(d[1])
            };
            s += dw / 6.0 * (speed(w0) + 4.0 * speed(w0 + 0.5 * dw) + speed(w0 + dw));
            table.push((w0 + dw, s));
        }
        table
    }

    pub fn perimeter(&self) -> f64 {
        self.arc_length_table(2048).last().map(|t| t.1).unwrap_or(0.0)
    }

    /// Arguments of `count` points equally spaced in arc length, starting at ω = 0.
    pub fn arc_length_arguments(&self, count: usize) -> Vec<f64> {
        if let CurveKind::Circle { .. } = self.kind {
            return (0..count).map(|k| TAU * k as f64 / count as f64).collect();
        }
        let table = self.arc_length_table(8192);
        let total = table.last().unwrap().1;
        let mut out = Vec::with_capacity(count);
        let mut j = 0;
        for k in 0..count {
            let target = total * k as f64 / count as f64;
            while table[j + 1].1 < target {
                j += 1;
            }
            let (w0, s0) = table[j];
            let (w1, s1) = table[j + 1];
            let t = if s1 > s0 { (target - s0) / (s1 - s0) } else { 0.0 };
            out.push(w0 + t * (w1 - w0));
        }
        out
    }

    /// Compact textual form, e.g. `circle:1` or `ellipse:0.69:0.92`.
    pub fn descriptor(&self) -> String {
        self.to_string()
    }

    pub fn parse_descriptor(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| -> Result<f64> {
            t.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number `{t}` in curve descriptor `{s}`")))
        };
        match parts.as_slice() {
            ["circle", r] => Self::circle(num(r)?),
            ["ellipse", a, b] => Self::ellipse(num(a)?, num(b)?),
            ["polygon", rest @ ..] if !rest.is_empty() && rest.len() % 2 == 0 => {
                let vals = rest.iter().map(|t| num(t)).collect::<Result<Vec<_>>>()?;
                Self::polygon(vals.chunks(2).map(|c| [c[0], c[1]]).collect())
            }
            _ => Err(Error::invalid(format!("unrecognised curve descriptor `{s}`"))),
        }
    }
}

impl fmt::Display for BoundaryCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            CurveKind::Circle { radius } => write!(f, "circle:{radius}"),
            CurveKind::Ellipse { a, b } => write!(f, "ellipse:{a}:{b}"),
            CurveKind::Polygon { vertices } => {
                write!(f, "polygon")?;
                for v in vertices {
                    write!(f, ":{}:{}", v[0], v[1])?;
                }
                Ok(())
            }
        }
    }
}

fn quadric_interval(x: Point, d: Point, a: f64, b: f64) -> Option<(f64, f64)> {
    let (px, py) = (x[0] / a, x[1] / b);
    let (dx, dy) = (d[0] / a, d[1] / b);
    let qa = dx * dx + dy * dy;
    if qa == 0.0 {
        return None;
    }
    let qb = px * dx + py * dy;
    let qc = px * px + py * py - 1.0;
    let disc = qb * qb - qa * qc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // numerically stable roots
    let (t0, t1) = if qb >= 0.0 {
        let t0 = (-qb - sq) / qa;
        (t0, if t0 != 0.0 { qc / (qa * t0) } else { (-qb + sq) / qa })
    } else {
        let t1 = (-qb + sq) / qa;
        (if t1 != 0.0 { qc / (qa * t1) } else { (-qb - sq) / qa }, t1)
    };
    Some((t0.min(t1), t0.max(t1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn argument_stays_below_full_turn() {
        assert_eq!(arg([1.0, -1e-17]), 0.0);
        assert!(arg([1.0, -1e-9]) < TAU);
        assert_eq!(arg([-1.0, 0.0]), std::f64::consts::PI);
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(BoundaryCurve::circle(0.0).is_err());
        assert!(BoundaryCurve::circle(-1.0).is_err());
        assert!(BoundaryCurve::ellipse(0.5, 0.0).is_err());
        assert!(BoundaryCurve::parse_descriptor("square:1").is_err());
    }

    #[test]
    fn ellipse_parameterization_is_by_argument() {
        let c = BoundaryCurve::ellipse(0.69, 0.92).unwrap();
        for k in 0..50 {
            let w = TAU * k as f64 / 50.0;
            let p = c.point(w);
            assert_relative_eq!((p[0] / 0.69).powi(2) + (p[1] / 0.92).powi(2), 1.0, epsilon = 1e-12);
            assert_relative_eq!(arg(p), w, epsilon = 1e-12);
            // derivative against central differences
            let e = 1e-6;
            let (p1, p0) = (c.point(w + e), c.point(w - e));
            let d = c.derivative(w);
            assert_relative_eq!(d[0], (p1[0] - p0[0]) / (2.0 * e), epsilon = 1e-7);
            assert_relative_eq!(d[1], (p1[1] - p0[1]) / (2.0 * e), epsilon = 1e-7);
        }
    }

    #[test]
    fn polygon_curve_matches_edges() {
        let sq = BoundaryCurve::polygon(vec![[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]]).unwrap();
        assert_relative_eq!(sq.radius_at(0.0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(sq.radius_at(PI / 4.0), 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(sq.area(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(sq.exit_distance([0.0, 0.0], [0.0, 1.0]), 1.0, epsilon = 1e-12);
        let d = sq.derivative(0.3);
        let e = 1e-6;
        let (p1, p0) = (sq.point(0.3 + e), sq.point(0.3 - e));
        assert_relative_eq!(d[0], (p1[0] - p0[0]) / (2.0 * e), epsilon = 1e-6);
        assert_relative_eq!(d[1], (p1[1] - p0[1]) / (2.0 * e), epsilon = 1e-6);
        assert!(BoundaryCurve::polygon(vec![[1.0, 1.0], [2.0, 1.0], [2.0, 2.0]]).is_err());
    }

    #[test]
    fn chord_lengths() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        assert_relative_eq!(c.exit_distance([0.5, 0.0], [1.0, 0.0]), 0.5, epsilon = 1e-14);
        assert_relative_eq!(c.exit_distance([0.5, 0.0], [0.0, 1.0]), 0.75f64.sqrt(), epsilon = 1e-14);
        assert_eq!(c.exit_distance([1.0, 0.0], [1.0, 0.0]), 0.0);
        assert_eq!(c.exit_distance([2.0, 0.0], [1.0, 0.0]), 0.0);
        assert!(c.line_interval([0.0, 1.5], [1.0, 0.0]).is_none());
    }

    #[test]
    fn descriptor_round_trip() {
        for c in [BoundaryCurve::circle(1.0).unwrap(), BoundaryCurve::ellipse(0.69, 0.92).unwrap()] {
            assert_eq!(BoundaryCurve::parse_descriptor(&c.descriptor()).unwrap(), c);
        }
    }

    #[test]
    fn ellipse_perimeter() {
        // Ramanujan's second approximation, accurate to ~1e-10 for this eccentricity
        let (a, b) = (0.69f64, 0.92f64);
        let h = ((a - b) / (a + b)).powi(2);
        let p = PI * (a + b) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()));
        let c = BoundaryCurve::ellipse(a, b).unwrap();
        assert_relative_eq!(c.perimeter(), p, epsilon = 1e-8);
    }
}
