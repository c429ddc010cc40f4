use std::f64::consts::TAU;
use std::ops::RangeInclusive;
use std::time::Instant;

use num_complex::Complex64;

use super::boundary::{BoundaryProjector, BoundaryTrace};
use super::fem::{gauss_points, poisson_step, PoissonSystem};
use crate::aanalytic::{
    boundary_fourier_modes, cauchy_stack, modes_to_i, modes_to_j, riemann_cuts, BoundaryQuadrature, ModeStack,
    WeightRule,
};
use crate::error::{Error, Result};
use crate::forward::BoundaryMeasurement;
use crate::geom::Point;
use crate::mesh::{affine_coefficients, P1Field, Triangulation};
use crate::phantoms::{Medium, Phantom};
use crate::rayxforms::{FactorSign, FactorTable, IntegratingFactorModes, RayQuadrature};

/// Which kernel mode multiplies `μs I_{m+1}` in the Poisson cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelIndex {
    /// `p_{m+1}`, as in the mode system.
    #[default]
    Next,
    /// `p_m`, as printed in the variational form.
    Same,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconParams {
    /// Truncation order `M`.
    pub m: usize,
    /// Highest angular mode `S`; at least `M + 3`.
    pub s: usize,
    pub quad: RayQuadrature,
    pub weight_rule: WeightRule,
    /// Relative residual for the conjugate-gradient solves.
    pub cg_tol: f64,
    pub cg_max_iters: usize,
    /// Near-boundary flag distance, in local boundary-edge lengths.
    pub boundary_margin: f64,
    pub kernel_index: KernelIndex,
}

impl Default for ReconParams {
    fn default() -> Self {
        Self {
            m: 6,
            s: 128,
            quad: RayQuadrature::default(),
            weight_rule: WeightRule::Riemann,
            cg_tol: 1e-10,
            cg_max_iters: 20_000,
            boundary_margin: 1.0,
            kernel_index: KernelIndex::Next,
        }
    }
}

impl ReconParams {
    pub fn validate(&self) -> Result<()> {
        if self.s < self.m + 3 {
            return Err(Error::invalid(format!("S = {} must be at least M + 3 = {}", self.s, self.m + 3)));
        }
        if !(self.cg_tol > 0.0) || self.cg_max_iters == 0 {
            return Err(Error::invalid("linear solver tolerance and iteration cap must be positive"));
        }
        if !(self.boundary_margin >= 0.0) {
            return Err(Error::invalid("boundary margin must be non-negative"));
        }
        self.quad.validate()
    }
}

/// Per-triangle reconstruction and diagnostics.
#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub params: ReconParams,
    pub q_real: Vec<f64>,
    pub q_imag: Vec<f64>,
    pub e_imag: f64,
    pub pseudo_error: Option<f64>,
    /// Zeroth mode at the vertices.
    pub i0: Vec<Complex64>,
    /// Interior vertices flagged as close to the boundary during the Cauchy integral.
    pub near_boundary_vertices: usize,
    /// `(stage, seconds)` in execution order.
    pub timings: Vec<(String, f64)>,
}

impl ReconstructionReport {
    /// Fills in the pseudo-error against a known source.
    pub fn with_ground_truth(mut self, mesh: &Triangulation, truth: &Phantom) -> Self {
        let mask = continuity_mask(mesh, truth);
        self.pseudo_error = Some(pseudo_error(&self.q_real, truth, mesh, &mask));
        self
    }
}

fn timed<T>(timings: &mut Vec<(String, f64)>, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f().map_err(|e| e.in_stage(stage))?;
    let secs = start.elapsed().as_secs_f64();
    log::info!("{stage}: {secs:.3}s");
    timings.push((stage.to_owned(), secs));
    Ok(out)
}

/// Everything in the reconstruction that does not depend on `M`, computed once.
pub struct Reconstructor<'a> {
    mesh: &'a Triangulation,
    medium: &'a Medium,
    params: ReconParams,
    boundary_modes: ModeStack,
    vertex_j: ModeStack,
    beta: Vec<IntegratingFactorModes>,
    projector: BoundaryProjector,
    poisson: PoissonSystem<'a>,
    boundary_mask: Vec<bool>,
    mu_s_gauss: Vec<[f64; 3]>,
    mu_t_gauss: Vec<[f64; 3]>,
    near_boundary: usize,
    timings: Vec<(String, f64)>,
}

impl<'a> Reconstructor<'a> {
    /// Runs the `M`-independent steps: integrating factors, boundary modes,
    /// the forward convolution, the interior Cauchy integrals and the
    /// boundary interpolation of `J`. `params.m` is ignored here.
    pub fn new(
        meas: &BoundaryMeasurement,
        mesh: &'a Triangulation,
        medium: &'a Medium,
        params: &ReconParams,
    ) -> Result<Self> {
        let params = *params;
        ReconParams { m: 0, ..params }.validate()?;
        meas.validate()?;
        if meas.curve.descriptor() != medium.domain.descriptor() {
            return Err(Error::invalid(format!(
                "measurement curve `{}` differs from the medium domain `{}`",
                meas.curve.descriptor(),
                medium.domain.descriptor()
            )));
        }
        let s = params.s;
        if meas.num_angles() < 2 * s + 2 {
            return Err(Error::invalid(format!("N = {} directions cannot resolve S = {s} (need N ≥ 2S + 2)", meas.num_angles())));
        }
        let mut timings = Vec::new();

        let (alpha, beta) = timed(&mut timings, "integrating_factor", || {
            let table = FactorTable::new(medium, meas.num_angles(), params.quad)?;
            let alpha = table.modes_at(&meas.points, FactorSign::Minus, s)?;
            let beta = table.modes_at(mesh.vertices(), FactorSign::Plus, s)?;
            Ok((alpha, beta))
        })?;
        let boundary_modes = timed(&mut timings, "boundary_modes", || boundary_fourier_modes(meas, s))?;
        let boundary_j = timed(&mut timings, "convolution", || modes_to_j(&boundary_modes, &alpha, 0, s))?;

        let boundary_mask = mesh.boundary_mask();
        let interior: Vec<usize> = (0..mesh.num_vertices()).filter(|&v| !boundary_mask[v]).collect();
        let (interior_j, near_boundary) = timed(&mut timings, "cauchy", || {
            let mut quad =
                BoundaryQuadrature::new(&meas.arguments, meas.points.clone(), meas.derivatives.clone(), params.weight_rule)?;
            quad.margin = params.boundary_margin;
            let sites: Vec<Point> = interior.iter().map(|&v| mesh.vertices()[v]).collect();
            cauchy_stack(&boundary_j, &quad, &sites, 0, s as i64 - 2, s as i64)
        })?;

        let projector = BoundaryProjector::for_mesh(&riemann_cuts(&meas.arguments), mesh)?;
        let vertex_j = timed(&mut timings, "boundary_interpolation", || {
            let mut out = ModeStack::zeros(0, s as i64 - 2, interior_j.sites(), mesh.num_vertices())?;
            for m in 0..=s as i64 - 2 {
                let trace = projector.project(boundary_j.mode(m))?;
                let row = out.mode_mut(m);
                for (i, &v) in interior.iter().enumerate() {
                    row[v] = interior_j.get(m, i);
                }
                for (pos, &v) in mesh.boundary_loop().iter().enumerate() {
                    row[v] = trace.values[pos];
                }
            }
            Ok(out)
        })?;

        let poisson = PoissonSystem::new(mesh, params.cg_tol, params.cg_max_iters)?;
        let gauss = gauss_points(mesh);
        let mu_s_gauss = gauss.iter().map(|g| g.map(|x| medium.evaluate(x).mu_s)).collect();
        let mu_t_gauss = gauss.iter().map(|g| g.map(|x| medium.mu_t(x))).collect();
        Ok(Self {
            mesh,
            medium,
            params,
            boundary_modes,
            vertex_j,
            beta,
            projector,
            poisson,
            boundary_mask,
            mu_s_gauss,
            mu_t_gauss,
            near_boundary,
            timings,
        })
    }

    pub fn max_order(&self) -> usize {
        self.params.s - 3
    }

    fn boundary_trace(&self, m: i64) -> Result<BoundaryTrace> {
        self.projector.project(self.boundary_modes.mode(m))
    }

    /// Steps 7 to 10 for truncation order `m_order`.
    pub fn run(&self, m_order: usize) -> Result<ReconstructionReport> {
        let params = ReconParams { m: m_order, ..self.params };
        params.validate()?;
        let (mesh, s) = (self.mesh, self.params.s as i64);
        let m_top = m_order as i64;
        let mut timings = self.timings.clone();

        let top = timed(&mut timings, "deconvolution", || modes_to_i(&self.vertex_j, &self.beta, m_order, self.params.s - 2))?;

        let traces = timed(&mut timings, "boundary_traces", || {
            (0..=m_top + 1).map(|m| self.boundary_trace(m)).collect::<Result<Vec<_>>>()
        })?;
        let field_with_trace = |values: &[Complex64], trace: &BoundaryTrace| -> Result<P1Field<'a>> {
            let mut v = values.to_vec();
            for (pos, &vertex) in mesh.boundary_loop().iter().enumerate() {
                v[vertex] = trace.values[pos];
            }
            debug_assert!(self.boundary_mask.iter().filter(|&&b| b).count() == mesh.boundary_loop().len());
            P1Field::new(mesh, v)
        };

        // fields[i] holds mode m_top + 1 − i
        let mut upper = field_with_trace(top.mode(m_top + 1), &traces[(m_top + 1) as usize])?;
        let mut lower = field_with_trace(top.mode(m_top), &traces[m_top as usize])?;
        timed(&mut timings, "poisson", || {
            for m in (0..m_top).rev() {
                let p = match self.params.kernel_index {
                    KernelIndex::Next => self.medium.kernel.mode(m + 1),
                    KernelIndex::Same => self.medium.kernel.mode(m),
                };
                let coef: Vec<[f64; 3]> = self
                    .mu_s_gauss
                    .iter()
                    .zip(&self.mu_t_gauss)
                    .map(|(ms, mt)| [0, 1, 2].map(|g| TAU * ms[g] * p - mt[g]))
                    .collect();
                let next = poisson_step(&self.poisson, &upper, &lower, &coef, &traces[m as usize])?;
                upper = std::mem::replace(&mut lower, next);
            }
            Ok(())
        })?;
        let (i1, i0) = (upper, lower);

        let (q_real, q_imag) = timed(&mut timings, "source", || {
            let p0 = self.medium.kernel.mode(0);
            let mut re = Vec::with_capacity(mesh.num_triangles());
            let mut im = Vec::with_capacity(mesh.num_triangles());
            for t in 0..mesh.num_triangles() {
                let (a, b, _) = affine_coefficients(&i1, t)?;
                let c = self.medium.evaluate(mesh.centroid(t));
                let w = c.mu_t - TAU * c.mu_s * p0;
                let i0c = i0.at_centroid(t);
                re.push(a.re + b.im + w * i0c.re);
                im.push(w * i0c.im);
            }
            Ok((re, im))
        })?;
        let e = e_imag(&i0, self.medium, mesh);
        debug_assert!(s >= m_top + 3);
        Ok(ReconstructionReport {
            params,
            q_real,
            q_imag,
            e_imag: e,
            pseudo_error: None,
            i0: i0.into_values(),
            near_boundary_vertices: self.near_boundary,
            timings,
        })
    }
}

/// Steps 1 to 10 for `params.m`.
pub fn reconstruct(
    meas: &BoundaryMeasurement,
    mesh: &Triangulation,
    medium: &Medium,
    params: &ReconParams,
) -> Result<ReconstructionReport> {
    params.validate()?;
    Reconstructor::new(meas, mesh, medium, params)?.run(params.m)
}

/// `{Σ_τ |τ| (μt − 2πμs p_0)² (Im I_0)²}^{1/2}` with all factors at centroids.
pub fn e_imag(i0: &P1Field<'_>, medium: &Medium, mesh: &Triangulation) -> f64 {
    let p0 = medium.kernel.mode(0);
    (0..mesh.num_triangles())
        .map(|t| {
            let c = medium.evaluate(mesh.centroid(t));
            let w = c.mu_t - TAU * c.mu_s * p0;
            mesh.areas()[t] * (w * i0.at_centroid(t).im).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Triangles on which `truth` shows no interface, judged from the
/// vertices, edge midpoints and centroid.
pub fn continuity_mask(mesh: &Triangulation, truth: &Phantom) -> Vec<bool> {
    (0..mesh.num_triangles())
        .map(|t| {
            let [a, b, c] = mesh.triangle_points(t);
            let mid = |p: Point, q: Point| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            truth.is_continuous_on(&[a, b, c, mid(a, b), mid(b, c), mid(c, a), mesh.centroid(t)])
        })
        .collect()
}

/// `{Σ_{masked τ} |τ| |q(z_τ) − q_τ|²}^{1/2}`, `z_τ` the centroid.
pub fn pseudo_error(q_rec: &[f64], truth: &Phantom, mesh: &Triangulation, mask: &[bool]) -> f64 {
    (0..mesh.num_triangles())
        .filter(|&t| mask[t])
        .map(|t| mesh.areas()[t] * (truth.eval(mesh.centroid(t)) - q_rec[t]).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// First strict local minimum; an endpoint qualifies when it is below its
/// one neighbour. Falls back to the first global minimum when none is strict.
pub fn select_local_minimum(values: &[f64]) -> Option<usize> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(0);
    }
    let strict = (0..n).find(|&i| {
        let left = i == 0 || values[i] < values[i - 1];
        let right = i + 1 == n || values[i] < values[i + 1];
        left && right
    });
    strict.or_else(|| (0..n).min_by(|&a, &b| values[a].total_cmp(&values[b])))
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// `(M, E_imag)` in increasing `M`.
    pub table: Vec<(usize, f64)>,
    pub selected: usize,
    pub reports: Vec<ReconstructionReport>,
}

/// Reconstructs for every `M` in `orders` and selects by [`select_local_minimum`] of `E_imag`.
pub fn sweep_m(
    meas: &BoundaryMeasurement,
    mesh: &Triangulation,
    medium: &Medium,
    base: &ReconParams,
    orders: RangeInclusive<usize>,
) -> Result<SweepResult> {
    if orders.is_empty() {
        return Err(Error::invalid("empty range of truncation orders"));
    }
    if *orders.end() + 3 > base.s {
        return Err(Error::invalid(format!("M = {} exceeds S − 3 = {}", orders.end(), base.s.saturating_sub(3))));
    }
    let rec = Reconstructor::new(meas, mesh, medium, base)?;
    let mut table = Vec::new();
    let mut reports = Vec::new();
    for m in orders {
        let report = rec.run(m)?;
        log::info!("M = {m}: E_imag = {:.6e}", report.e_imag);
        table.push((m, report.e_imag));
        reports.push(report);
    }
    let values: Vec<f64> = table.iter().map(|e| e.1).collect();
    let selected = table[select_local_minimum(&values).expect("nonempty table")].0;
    Ok(SweepResult { table, selected, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, BoundaryCurve};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_triangles() -> Triangulation {
        Triangulation::new(vec![[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]], vec![[0, 1, 2], [0, 2, 3]], vec![1, 2, 3, 0])
            .unwrap()
    }

    #[test]
    fn local_minimum_rule() {
        assert_eq!(select_local_minimum(&[5.0, 3.0, 4.0]), Some(1));
        assert_eq!(select_local_minimum(&[5.0, 4.0, 3.0, 2.0]), Some(3));
        assert_eq!(select_local_minimum(&[1.0, 2.0, 0.5, 3.0]), Some(0));
        assert_eq!(select_local_minimum(&[2.0, 2.0, 2.0]), Some(0));
        assert_eq!(select_local_minimum(&[]), None);
    }

    #[test]
    fn e_imag_by_hand() {
        let mesh = two_triangles();
        let medium = Medium::new(
            BoundaryCurve::circle(2.0).unwrap(),
            Phantom::constant(0.3),
            Phantom::constant(1.2),
            crate::phantoms::ScatteringKernel::henyey_greenstein(0.5).unwrap(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let vals: Vec<Complex64> = (0..4).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let i0 = P1Field::new(&mesh, vals.clone()).unwrap();
        // w = 1.5 − 2π·1.2/(2π) = 0.3, each triangle has area 2
        let w: f64 = 0.3;
        let c0 = (vals[0].im + vals[1].im + vals[2].im) / 3.0;
        let c1 = (vals[0].im + vals[2].im + vals[3].im) / 3.0;
        let expected = (2.0 * w * w * c0 * c0 + 2.0 * w * w * c1 * c1).sqrt();
        assert_abs_diff_eq!(e_imag(&i0, &medium, &mesh), expected, epsilon = 1e-14);

        let shifted = P1Field::new(&mesh, vals.iter().map(|v| v + 3.7).collect()).unwrap();
        assert_abs_diff_eq!(e_imag(&shifted, &medium, &mesh), expected, epsilon = 1e-14);
        let real = P1Field::new(&mesh, vals.iter().map(|v| Complex64::new(v.re, 0.0)).collect()).unwrap();
        assert_eq!(e_imag(&real, &medium, &mesh), 0.0);

        // μt = 2πμs p_0 when μa = 0 and p_0 = 1/2π
        let balanced = Medium { mu_a: Phantom::constant(0.0), ..medium };
        assert_eq!(e_imag(&i0, &balanced, &mesh), 0.0);
    }

    #[test]
    fn pseudo_error_cases() {
        let mesh = generate_mesh(&BoundaryCurve::circle(1.0).unwrap(), 0.2).unwrap();
        let truth = crate::phantoms::presets::experiment1_source();
        let mask = continuity_mask(&mesh, &truth);
        assert!(mask.iter().any(|&m| m) && mask.iter().any(|&m| !m));
        let exact: Vec<f64> = (0..mesh.num_triangles()).map(|t| truth.eval(mesh.centroid(t))).collect();
        assert_eq!(pseudo_error(&exact, &truth, &mesh, &mask), 0.0);
        let offset: Vec<f64> = exact.iter().map(|q| q + 0.1).collect();
        let area: f64 = (0..mesh.num_triangles()).filter(|&t| mask[t]).map(|t| mesh.areas()[t]).sum();
        assert_abs_diff_eq!(pseudo_error(&offset, &truth, &mesh, &mask), 0.1 * area.sqrt(), epsilon = 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let noisy: Vec<f64> = exact.iter().map(|q| q + rng.gen_range(-1.0..1.0)).collect();
        let mut acc = 0.0;
        for t in 0..mesh.num_triangles() {
            if mask[t] {
                acc += mesh.areas()[t] * (noisy[t] - exact[t]).powi(2);
            }
        }
        assert_abs_diff_eq!(pseudo_error(&noisy, &truth, &mesh, &mask), acc.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn source_term_algebra() {
        // ∂̄(conj I_1) + ∂I_1 = Re a + Im b for I_1 = a x + b y + c
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let a = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let b = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let d = (a - Complex64::i() * b) * 0.5;
            let dbar_conj = (a.conj() + Complex64::i() * b.conj()) * 0.5;
            let sum = d + dbar_conj;
            assert!(sum.im.abs() < 1e-14);
            assert_abs_diff_eq!(sum.re, a.re + b.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_small_s() {
        let p = ReconParams { m: 6, s: 8, ..Default::default() };
        assert!(p.validate().is_err());
        assert!(ReconParams { cg_tol: 0.0, ..Default::default() }.validate().is_err());
    }
}
