use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Samples of a function at the midpoints of a uniform grid on `[a, b]`.
///
/// The function is taken to vanish at `a` and `b`; between the outermost
/// midpoints and the interval ends it is interpolated linearly towards zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MidpointSamples {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

impl MidpointSamples {
    pub fn new(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!("sample interval [{a}, {b}] is empty")));
        }
        if values.is_empty() {
            return Err(Error::invalid("no samples"));
        }
        Ok(Self { a, b, values })
    }

    /// Samples `f` at the `count` midpoints of `[a, b]`.
    pub fn from_fn(a: f64, b: f64, count: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let dt = (b - a) / count as f64;
        Self::new(a, b, (0..count).map(|i| f(a + (i as f64 + 0.5) * dt)).collect())
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / self.values.len() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.a + (i as f64 + 0.5) * self.spacing()
    }

    /// Piecewise-linear interpolant through the midpoint samples and the
    /// zero end values; zero outside `[a, b]`.
    pub fn interpolate(&self, t: f64) -> f64 {
        if t <= self.a || t >= self.b {
            return 0.0;
        }
        let dt = self.spacing();
        let u = (t - self.a) / dt - 0.5;
        let p = self.values.len();
        if u < 0.0 {
            return self.values[0] * (t - self.a) / (0.5 * dt);
        }
        let i = u.floor() as usize;
        if i + 1 >= p {
            return self.values[p - 1] * (self.b - t) / (0.5 * dt);
        }
        let w = u - i as f64;
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }

    /// `(1/π) PV∫ f(t) / (s − t) dt`, see [`hilbert_pv`].
    pub fn hilbert(&self, s: f64) -> f64 {
        hilbert_with_value(self, s, None)
    }
}

/// Principal-value Hilbert transform `(1/π) PV∫ f(t) / (s − t) dt` of a
/// function supported in `[a, b]` and sampled at grid midpoints.
///
/// For `s` inside `(a, b)` the singular integral is rewritten as
/// `f(s) log((s − a)/(b − s)) − ∫ (f(s) − f(t))/(s − t) dt`, the bounded
/// integral is split at `s` and both halves use the midpoint rule. Cells whose
/// sample vanishes and that do not touch the cell of `s` contribute `f(s) ∫ dt/(s − t)` exactly, so padding the
/// interval with zeros leaves the result unchanged. Outside `(a, b)` the
/// integrand is regular and the plain midpoint sum is used.
pub fn hilbert_pv(samples: &MidpointSamples, s: f64) -> f64 {
    hilbert_with_value(samples, s, None)
}

/// As [`hilbert_pv`], with `f(s)` supplied by the caller instead of interpolated.
pub fn hilbert_with_value(samples: &MidpointSamples, s: f64, f_at_s: Option<f64>) -> f64 {
    let (a, b) = (samples.a, samples.b);
    let dt = samples.spacing();
    let p = samples.values.len();
    if s <= a || s >= b {
        let sum: f64 = samples.values.iter().enumerate().map(|(i, &f)| f / (s - samples.node(i))).sum();
        return sum * dt / PI;
    }
    let fs = f_at_s.unwrap_or_else(|| samples.interpolate(s));
    let j = (((s - a) / dt).floor() as usize).min(p - 1);
    let mut sum = 0.0;
    for (i, &f) in samples.values.iter().enumerate() {
        if i == j {
            continue;
        }
        if f == 0.0 && i.abs_diff(j) > 1 {
            // g = f(s)/(s − t) on a cell with a vanishing sample; integrate exactly
            let lo = a + i as f64 * dt;
            sum += fs * ((s - lo) / (s - lo - dt)).ln();
        } else {
            sum += (fs - f) / (s - samples.node(i)) * dt;
        }
    }
    let left = a + j as f64 * dt;
    let right = left + dt;
    for (lo, hi) in [(left, s), (s, right)] {
        let len = hi - lo;
        if len > 0.0 {
            let m = 0.5 * (lo + hi);
            sum += (fs - samples.interpolate(m)) / (s - m) * len;
        }
    }
    (fs * ((s - a) / (b - s)).ln() - sum) / PI
}
