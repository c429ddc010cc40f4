use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::{dot, Point};
use crate::mesh::BoundaryCurve;
use crate::textio::{fmt_f64, write_atomic};

pub const BOUNDARY_MAGIC: &str = "RTE-BOUNDARY v1";

/// `ν·ξ` at or below this is treated as tangent or incoming.
pub const TANGENT_TOLERANCE: f64 = 1e-12;

/// `N` equispaced directions `θ_n = 2πn/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularGrid {
    n: usize,
}

impl AngularGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::invalid(format!("angular grid needs at least 4 directions, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn angle(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n as f64
    }

    pub fn direction(&self, i: usize) -> Point {
        let (s, c) = self.angle(i).sin_cos();
        [c, s]
    }
}

/// Outflow samples `I(ζ_k, ξ(θ_n))` on `K` boundary points and `N` directions.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMeasurement {
    pub curve: BoundaryCurve,
    /// `Arg ζ_k`, strictly increasing in `[0, 2π)`.
    pub arguments: Vec<f64>,
    pub points: Vec<Point>,
    pub derivatives: Vec<Point>,
    pub grid: AngularGrid,
    /// Row-major `K × N`: row `k` is point `k`, column `n` is `θ_n`.
    pub values: Vec<f64>,
}

impl BoundaryMeasurement {
    /// All-zero measurement at `k` points equally spaced in arc length.
    pub fn zeros(curve: &BoundaryCurve, k: usize, n: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::invalid(format!("need at least 3 boundary points, got {k}")));
        }
        let grid = AngularGrid::new(n)?;
        let arguments = curve.arc_length_arguments(k);
        let points = arguments.iter().map(|&w| curve.point(w)).collect();
        let derivatives = arguments.iter().map(|&w| curve.derivative(w)).collect();
        Ok(Self { curve: curve.clone(), arguments, points, derivatives, grid, values: vec![0.0; k * n] })
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_angles(&self) -> usize {
        self.grid.len()
    }

    pub fn value(&self, k: usize, n: usize) -> f64 {
        self.values[k * self.grid.len() + n]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [f64] {
        let n = self.grid.len();
        &mut self.values[k * n..(k + 1) * n]
    }

    /// Outward unit normal at `ζ_k`, from the stored derivative.
    pub fn normal(&self, k: usize) -> Point {
        let d = self.derivatives[k];
        let len = d[0].hypot(d[1]);
        [d[1] / len, -d[0] / len]
    }

    /// `ν(ζ_k)·ξ(θ_n) > 0`, with tangent directions counted as incoming.
    pub fn is_outgoing(&self, k: usize, n: usize) -> bool {
        dot(self.normal(k), self.grid.direction(n)) > TANGENT_TOLERANCE
    }

    /// Multiplies every sample by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.points.len();
        if self.arguments.len() != k || self.derivatives.len() != k || self.values.len() != k * self.grid.len() {
            return Err(Error::invalid("inconsistent measurement dimensions"));
        }
        for i in 0..k {
            let w = self.arguments[i];
            if !(0.0..TAU).contains(&w) || (i > 0 && w <= self.arguments[i - 1]) {
                return Err(Error::invalid(format!("argument of point {i} is out of order")));
            }
        }
        for (i, &v) in self.values.iter().enumerate() {
            let (p, n) = (i / self.grid.len(), i % self.grid.len());
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!("sample ({p}, {n}) is {v}")));
            }
            if v != 0.0 && !self.is_outgoing(p, n) {
                return Err(Error::invalid(format!("incoming sample ({p}, {n}) is nonzero")));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let (k, n) = (self.points.len(), self.grid.len());
        let mut out = String::with_capacity(k * n * 24 + k * 120);
        let _ = writeln!(out, "{BOUNDARY_MAGIC},K={k},N={n},curve={}", self.curve.descriptor());
        for i in 0..k {
            let (p, d) = (self.points[i], self.derivatives[i]);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(self.arguments[i]),
                fmt_f64(p[0]),
                fmt_f64(p[1]),
                fmt_f64(d[0]),
                fmt_f64(d[1])
            );
        }
        for i in 0..k {
            let row: Vec<String> = self.row(i).iter().map(|&v| fmt_f64(v)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::DataFormat { line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
        let fields: Vec<&str> = header.split(',').collect();
        if fields.len() != 4 || fields[0] != BOUNDARY_MAGIC {
            return Err(bad(1, format!("expected `{BOUNDARY_MAGIC},K=..,N=..,curve=..`")));
        }
        let field = |s: &str, key: &str| -> Result<String> {
            s.strip_prefix(key).map(str::to_owned).ok_or_else(|| bad(1, format!("missing `{key}`")))
        };
        let k: usize = field(fields[1], "K=")?.parse().map_err(|_| bad(1, "bad K".into()))?;
        let n: usize = field(fields[2], "N=")?.parse().map_err(|_| bad(1, "bad N".into()))?;
        let curve = BoundaryCurve::parse_descriptor(&field(fields[3], "curve=")?).map_err(|e| bad(1, e.to_string()))?;
        let grid = AngularGrid::new(n).map_err(|e| bad(1, e.to_string()))?;

        let mut numbers = |count: usize| -> Result<Vec<f64>> {
            let (no, line) = lines.next().ok_or_else(|| bad(0, "unexpected end of file".into()))?;
            let vals = line
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad(no, format!("bad number `{t}`"))))
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() != count {
                return Err(bad(no, format!("expected {count} values, found {}", vals.len())));
            }
            Ok(vals)
        };
        let mut arguments = Vec::with_capacity(k);
        let mut points = Vec::with_capacity(k);
        let mut derivatives = Vec::with_capacity(k);
        for _ in 0..k {
            let v = numbers(5)?;
            arguments.push(v[0]);
            points.push([v[1], v[2]]);
            derivatives.push([v[3], v[4]]);
        }
        let mut values = Vec::with_capacity(k * n);
        for _ in 0..k {
            values.extend(numbers(n)?);
        }
        let m = Self { curve, arguments, points, derivatives, grid, values };
        m.validate().map_err(|e| bad(0, e.to_string()))?;
        Ok(m)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), &self.to_text())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}
