use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use super::modes::{ModeStack, SiteSet};
use crate::error::{Error, Result};
use crate::geom::{norm, sub, to_complex, Point};

/// How the boundary parameter is split into quadrature cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightRule {
    /// Characteristic-function cells: `ω_0 = 0`, `ω_K = 2π`, interior cut
    /// points halfway between neighbouring arguments; `Δω_k = ω_{k+1} − ω_k`.
    #[default]
    Riemann,
    /// Hat functions: `Δω_k = (Arg ζ_{k+1} − Arg ζ_{k−1}) / 2`, periodically.
    Trapezoidal,
}

/// Cell boundaries `0 = ω_0 < … < ω_K = 2π` with `Arg ζ_k ∈ [ω_k, ω_{k+1})`,
/// cutting halfway between neighbouring arguments.
pub fn riemann_cuts(arguments: &[f64]) -> Vec<f64> {
    let mut cuts = Vec::with_capacity(arguments.len() + 1);
    cuts.push(0.0);
    cuts.extend(arguments.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    cuts.push(TAU);
    cuts
}

/// Quadrature weights `Δω_k` for strictly increasing arguments in `[0, 2π)`.
pub fn boundary_weights(arguments: &[f64], rule: WeightRule) -> Vec<f64> {
    let k = arguments.len();
    match rule {
        WeightRule::Riemann => riemann_cuts(arguments).windows(2).map(|w| w[1] - w[0]).collect(),
        WeightRule::Trapezoidal => (0..k)
            .map(|i| {
                let prev = if i == 0 { arguments[k - 1] - TAU } else { arguments[i - 1] };
                let next = if i + 1 == k { arguments[0] + TAU } else { arguments[i + 1] };
                0.5 * (next - prev)
            })
            .collect(),
    }
}

/// Boundary nodes `ζ_k`, derivatives `ζ'_k` and weights `Δω_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryQuadrature {
    pub points: Vec<Point>,
    pub derivatives: Vec<Point>,
    pub weights: Vec<f64>,
    /// Points closer than this many local boundary-edge lengths are flagged.
    pub margin: f64,
}

impl BoundaryQuadrature {
    pub fn new(arguments: &[f64], points: Vec<Point>, derivatives: Vec<Point>, rule: WeightRule) -> Result<Self> {
        let k = arguments.len();
        if k < 3 || points.len() != k || derivatives.len() != k {
            return Err(Error::invalid("boundary quadrature needs at least 3 consistent nodes"));
        }
        Ok(Self { points, derivatives, weights: boundary_weights(arguments, rule), margin: 1.0 })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when `z` is closer to the nearest node than `margin` times the
    /// longer of that node's two adjacent boundary edges.
    pub fn near_boundary(&self, z: Point) -> bool {
        let k = self.len();
        let (i, d) = self
            .points
            .iter()
            .map(|&p| norm(sub(p, z)))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty quadrature");
        let prev = norm(sub(self.points[i], self.points[(i + k - 1) % k]));
        let next = norm(sub(self.points[(i + 1) % k], self.points[i]));
        d < self.margin * prev.max(next)
    }
}

/// Interior values `J_m(z)` for `m_lo ≤ m ≤ m_hi` from boundary modes up to
/// `S`, by the discrete Cauchy-type formula with the tail series
/// `Σ_{j≥1, m+2j≤S} J_{m+2j,k} r_k^j`, `r_k = conj(ζ_k − z)/(ζ_k − z)`.
pub fn cauchy_modes(
    j: &ModeStack,
    quad: &BoundaryQuadrature,
    z: Point,
    m_lo: i64,
    m_hi: i64,
    s_max: i64,
) -> Result<Vec<Complex64>> {
    check_range(j, quad, m_lo, m_hi, s_max)?;
    Ok(cauchy_site_major(&site_major(j, m_lo, s_max), quad, z, m_lo, m_hi, s_max))
}

fn check_range(j: &ModeStack, quad: &BoundaryQuadrature, m_lo: i64, m_hi: i64, s_max: i64) -> Result<()> {
    if j.sites() != SiteSet::BoundaryPoints || j.num_sites() != quad.len() {
        return Err(Error::invalid("Cauchy integral needs a stack over the quadrature nodes"));
    }
    if m_hi > s_max - 2 || m_lo > m_hi || !j.contains(m_lo) || !j.contains(s_max) {
        return Err(Error::invalid(format!(
            "modes {m_lo}..={m_hi} with S = {s_max} not available (stack holds {}..={})",
            j.m_lo(),
            j.m_hi()
        )));
    }
    Ok(())
}

/// Modes `m_lo..=s_max` copied node by node: `out[k * span + (m − m_lo)]`.
fn site_major(j: &ModeStack, m_lo: i64, s_max: i64) -> Vec<Complex64> {
    let span = (s_max - m_lo + 1) as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); span * j.num_sites()];
    for m in m_lo..=s_max {
        let i = (m - m_lo) as usize;
        for (k, v) in j.mode(m).iter().enumerate() {
            out[k * span + i] = *v;
        }
    }
    out
}

fn cauchy_site_major(data: &[Complex64], quad: &BoundaryQuadrature, z: Point, m_lo: i64, m_hi: i64, s_max: i64) -> Vec<Complex64> {
    let zc = to_complex(z);
    let span = (s_max - m_lo + 1) as usize;
    let count = (m_hi - m_lo + 1) as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); count];
    let mut tail = vec![Complex64::new(0.0, 0.0); span];
    let to_first = Complex64::new(0.0, -1.0 / TAU);
    for k in 0..quad.len() {
        let jk = &data[k * span..(k + 1) * span];
        let d = to_complex(quad.points[k]) - zc;
        let w = to_complex(quad.derivatives[k]) / d * quad.weights[k];
        let r = d.conj() / d;
        // tail[i] = r (J_{m+2} + tail[i + 2]) with i = m − m_lo
        for i in (0..span).rev() {
            tail[i] = if i + 2 < span { r * (jk[i + 2] + tail[i + 2]) } else { Complex64::new(0.0, 0.0) };
        }
        let first = w * to_first;
        let second = w.im / PI;
        for i in 0..count {
            out[i] += first * jk[i] + tail[i] * second;
        }
    }
    out
}

/// Single mode `J_m(z)`, see [`cauchy_modes`].
pub fn cauchy_interior(j: &ModeStack, quad: &BoundaryQuadrature, z: Point, m: i64, s_max: i64) -> Result<Complex64> {
    Ok(cauchy_modes(j, quad, z, m, m, s_max)?[0])
}

/// [`cauchy_modes`] at many points; returns a stack over `sites` and the
/// number of points flagged by [`BoundaryQuadrature::near_boundary`].
pub fn cauchy_stack(
    j: &ModeStack,
    quad: &BoundaryQuadrature,
    sites: &[Point],
    m_lo: i64,
    m_hi: i64,
    s_max: i64,
) -> Result<(ModeStack, usize)> {
    check_range(j, quad, m_lo, m_hi, s_max)?;
    let data = site_major(j, m_lo, s_max);
    let values: Vec<(Vec<Complex64>, bool)> = sites
        .par_iter()
        .map(|&z| (cauchy_site_major(&data, quad, z, m_lo, m_hi, s_max), quad.near_boundary(z)))
        .collect();
    let mut out = ModeStack::zeros(m_lo, m_hi, SiteSet::MeshVertices, sites.len())?;
    let mut near = 0;
    for (site, (vals, flagged)) in values.into_iter().enumerate() {
        near += flagged as usize;
        for (i, v) in vals.into_iter().enumerate() {
            out.mode_mut(m_lo + i as i64)[site] = v;
        }
    }
    if near > 0 {
        log::info!("{near} evaluation points lie within one boundary edge of the boundary");
    }
    Ok((out, near))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryCurve;
    use proptest::prelude::*;

    fn quadrature(curve: &BoundaryCurve, k: usize, rule: WeightRule) -> BoundaryQuadrature {
        let args = curve.arc_length_arguments(k);
        let pts = args.iter().map(|&w| curve.point(w)).collect();
        let der = args.iter().map(|&w| curve.derivative(w)).collect();
        BoundaryQuadrature::new(&args, pts, der, rule).unwrap()
    }

    fn boundary_stack(q: &BoundaryQuadrature, lo: i64, hi: i64, f: impl Fn(i64, Complex64) -> Complex64) -> ModeStack {
        let mut st = ModeStack::zeros(lo, hi, SiteSet::BoundaryPoints, q.len()).unwrap();
        for m in lo..=hi {
            for (k, v) in st.mode_mut(m).iter_mut().enumerate() {
                *v = f(m, to_complex(q.points[k]));
            }
        }
        st
    }

    #[test]
    fn weights_partition_the_period() {
        let args = [0.1, 0.5, 2.0, 4.0, 6.0];
        for rule in [WeightRule::Riemann, WeightRule::Trapezoidal] {
            let w = boundary_weights(&args, rule);
            assert!((w.iter().sum::<f64>() - TAU).abs() < 1e-14);
        }
        let w = boundary_weights(&args, WeightRule::Riemann);
        assert!((w[0] - 0.3).abs() < 1e-15 && (w[4] - (TAU - 5.0)).abs() < 1e-15);
    }

    #[test]
    fn constant_is_reproduced() {
        let c = Complex64::new(0.7, -0.2);
        let curve = BoundaryCurve::ellipse(0.69, 0.92).unwrap();
        let mut prev = f64::INFINITY;
        for k in [64, 128, 256, 512] {
            let q = quadrature(&curve, k, WeightRule::Riemann);
            let st = boundary_stack(&q, 0, 6, |m, _| if m == 0 { c } else { Complex64::new(0.0, 0.0) });
            let err = (cauchy_interior(&st, &q, [0.1, 0.3], 0, 6).unwrap() - c).norm();
            assert!(err <= prev + 1e-14);
            prev = err;
        }
        assert!(prev < 1e-3, "{prev}");
    }

    #[test]
    fn a_analytic_family_is_reproduced() {
        // (J_M, ..., J_{M+4}) = (z̄, 0, −z, 0, c) solves ∂̄J_m + ∂J_{m+2} = 0
        let c = Complex64::new(0.4, 0.9);
        let m0 = 3;
        let exact = |m: i64, z: Complex64| match m - m0 {
            0 => z.conj(),
            2 => -z,
            4 => c,
            _ => Complex64::new(0.0, 0.0),
        };
        let z = [0.2, -0.1];
        for curve in [BoundaryCurve::circle(1.0).unwrap(), BoundaryCurve::ellipse(0.69, 0.92).unwrap()] {
            for rule in [WeightRule::Riemann, WeightRule::Trapezoidal] {
                let q = quadrature(&curve, 512, rule);
                let s = m0 + 6;
                let st = boundary_stack(&q, m0, s, exact);
                let vals = cauchy_modes(&st, &q, z, m0, s - 2, s).unwrap();
                for (i, v) in vals.iter().enumerate() {
                    let m = m0 + i as i64;
                    assert!((v - exact(m, to_complex(z))).norm() < 1e-3, "m={m}: {v} vs {}", exact(m, to_complex(z)));
                }
            }
        }
    }

    #[test]
    fn power_ratio_has_unit_modulus() {
        let q = quadrature(&BoundaryCurve::ellipse(0.69, 0.92).unwrap(), 50, WeightRule::Riemann);
        for z in [[0.0, 0.0], [0.5, -0.6], [-0.6, 0.1]] {
            for p in &q.points {
                let d = to_complex(*p) - to_complex(z);
                assert!(((d.conj() / d).norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn flags_points_near_the_boundary() {
        let q = quadrature(&BoundaryCurve::circle(1.0).unwrap(), 64, WeightRule::Riemann);
        assert!(q.near_boundary([0.99, 0.0]));
        assert!(!q.near_boundary([0.5, 0.0]));
        let st = ModeStack::zeros(0, 4, SiteSet::BoundaryPoints, 64).unwrap();
        let (_, near) = cauchy_stack(&st, &q, &[[0.99, 0.0], [0.0, 0.0]], 0, 2, 4).unwrap();
        assert_eq!(near, 1);
        assert!(cauchy_modes(&st, &q, [0.0, 0.0], 0, 3, 4).is_err());
    }

    proptest! {
        #[test]
        fn linear_in_boundary_data(
            a in prop::collection::vec(-1.0f64..1.0, 2 * 24 * 5),
            b in prop::collection::vec(-1.0f64..1.0, 2 * 24 * 5),
            s in -2.0f64..2.0,
            x in -0.6f64..0.6,
            y in -0.6f64..0.6,
        ) {
            let q = quadrature(&BoundaryCurve::circle(1.0).unwrap(), 24, WeightRule::Riemann);
            let make = |v: &[f64]| {
                let mut st = ModeStack::zeros(0, 4, SiteSet::BoundaryPoints, 24).unwrap();
                for m in 0..5i64 {
                    for k in 0..24 {
                        let i = 2 * (m as usize * 24 + k);
                        st.mode_mut(m)[k] = Complex64::new(v[i], v[i + 1]);
                    }
                }
                st
            };
            let combo: Vec<f64> = a.iter().zip(&b).map(|(p, r)| p + s * r).collect();
            let ja = cauchy_modes(&make(&a), &q, [x, y], 0, 2, 4).unwrap();
            let jb = cauchy_modes(&make(&b), &q, [x, y], 0, 2, 4).unwrap();
            let jc = cauchy_modes(&make(&combo), &q, [x, y], 0, 2, 4).unwrap();
            for i in 0..3 {
                prop_assert!((jc[i] - (ja[i] + jb[i] * s)).norm() < 1e-10);
            }
        }
    }
}
