use std::collections::VecDeque;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::measurement::{AngularGrid, BoundaryMeasurement, TANGENT_TOLERANCE};
use crate::error::{Error, Result};
use crate::geom::{dot, sub, Point};
use crate::mesh::{arg, Neighbor, Triangulation};
use crate::phantoms::{Medium, Phantom};

/// Highest kernel mode used by the scattering operator during data generation.
pub const DEFAULT_KERNEL_MODES: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardParams {
    /// Discrete-ordinates directions used by the solver.
    pub n_dir: usize,
    /// Source iteration stops once the sup-norm change drops below this.
    pub tol: f64,
    pub max_iters: usize,
    /// Measurement points on the boundary.
    pub k_points: usize,
    /// Measurement directions.
    pub n_angles: usize,
    /// Scattering modes `|m| ≤ kernel_modes` kept (further capped by `n_dir/2 − 1`).
    pub kernel_modes: usize,
}

impl Default for ForwardParams {
    fn default() -> Self {
        Self { n_dir: 180, tol: 1e-8, max_iters: 2000, k_points: 1024, n_angles: 360, kernel_modes: DEFAULT_KERNEL_MODES }
    }
}

/// Piecewise-constant angular fluxes and iteration record.
#[derive(Debug, Clone)]
pub struct ForwardSolution {
    pub n_dir: usize,
    pub num_triangles: usize,
    /// Direction-major: `fluxes[n * T + t]`.
    pub fluxes: Vec<f64>,
    pub iterations: usize,
    /// Sup-norm change after each source iteration.
    pub residuals: Vec<f64>,
}

impl ForwardSolution {
    pub fn flux(&self, t: usize, n: usize) -> f64 {
        self.fluxes[n * self.num_triangles + t]
    }

    /// Ratio of the last two residuals, if available.
    pub fn observed_contraction(&self) -> Option<f64> {
        let r = &self.residuals;
        (r.len() >= 3 && r[r.len() - 2] > 0.0).then(|| r[r.len() - 1] / r[r.len() - 2])
    }
}

/// Barycentric centroids of the 16 congruent subtriangles of a 4× refinement.
fn subtriangle_centroids() -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(16);
    for i in 0..4usize {
        for j in 0..4 - i {
            let k = 3 - i - j;
            out.push([(i as f64 + 1.0 / 3.0) / 4.0, (j as f64 + 1.0 / 3.0) / 4.0, (k as f64 + 1.0 / 3.0) / 4.0]);
        }
    }
    for i in 0..3usize {
        for j in 0..3 - i {
            let k = 2 - i - j;
            out.push([(i as f64 + 2.0 / 3.0) / 4.0, (j as f64 + 2.0 / 3.0) / 4.0, (k as f64 + 2.0 / 3.0) / 4.0]);
        }
    }
    out
}

/// Cell averages of `f` from the 16 subtriangle centroids.
pub fn cell_averages(mesh: &Triangulation, f: impl Fn(Point) -> f64 + Sync) -> Vec<f64> {
    let bary = subtriangle_centroids();
    (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let [a, b, c] = mesh.triangle_points(t);
            bary.iter()
                .map(|l| f([l[0] * a[0] + l[1] * b[0] + l[2] * c[0], l[0] * a[1] + l[1] * b[1] + l[2] * c[1]]))
                .sum::<f64>()
                / bary.len() as f64
        })
        .collect()
}

/// Per-triangle edge normals scaled by edge length, edge `e` joining vertices `e` and `e+1`.
fn scaled_normals(mesh: &Triangulation) -> Vec<[Point; 3]> {
    (0..mesh.num_triangles())
        .map(|t| {
            let p = mesh.triangle_points(t);
            let mut n = [[0.0; 2]; 3];
            for e in 0..3 {
                let d = sub(p[(e + 1) % 3], p[e]);
                n[e] = [d[1], -d[0]];
            }
            n
        })
        .collect()
}

/// Upwind dependency order for direction `xi` (Kahn's algorithm). A cycle,
/// which conforming triangulations do not produce for straight
/// characteristics, is broken at the most upstream remaining centroid.
fn sweep_order(mesh: &Triangulation, normals: &[[Point; 3]], xi: Point) -> Vec<u32> {
    let nt = mesh.num_triangles();
    let neighbors = mesh.neighbors();
    let mut indegree = vec![0u8; nt];
    for t in 0..nt {
        for e in 0..3 {
            if dot(xi, normals[t][e]) < 0.0 && matches!(neighbors[t][e], Neighbor::Triangle(_)) {
                indegree[t] += 1;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..nt).filter(|&t| indegree[t] == 0).collect();
    let mut done = vec![false; nt];
    let mut order = Vec::with_capacity(nt);
    while order.len() < nt {
        let t = match queue.pop_front() {
            Some(t) => t,
            None => {
                let t = (0..nt)
                    .filter(|&t| !done[t])
                    .min_by(|&a, &b| dot(mesh.centroid(a), xi).total_cmp(&dot(mesh.centroid(b), xi)))
                    .expect("unfinished triangles remain");
                log::warn!("upwind cycle broken at triangle {t}");
                indegree[t] = 0;
                t
            }
        };
        if done[t] {
            continue;
        }
        done[t] = true;
        order.push(t as u32);
        for e in 0..3 {
            if dot(xi, normals[t][e]) > 0.0 {
                if let Neighbor::Triangle(u) = neighbors[t][e] {
                    if !done[u] {
                        indegree[u] = indegree[u].saturating_sub(1);
                        if indegree[u] == 0 {
                            queue.push_back(u);
                        }
                    }
                }
            }
        }
    }
    order
}

struct Transport<'a> {
    mesh: &'a Triangulation,
    grid: AngularGrid,
    normals: Vec<[Point; 3]>,
    orders: Vec<Vec<u32>>,
    mu_t: Vec<f64>,
}

impl Transport<'_> {
    /// One transport sweep per direction with emission density `source`
    /// (direction-major, same layout as the fluxes).
    fn sweep(&self, source: &[f64], out: &mut [f64]) {
        let nt = self.mesh.num_triangles();
        let areas = self.mesh.areas();
        let neighbors = self.mesh.neighbors();
        out.par_chunks_mut(nt).enumerate().for_each(|(n, flux)| {
            let xi = self.grid.direction(n);
            let src = &source[n * nt..(n + 1) * nt];
            for &t in &self.orders[n] {
                let t = t as usize;
                let mut num = areas[t] * src[t];
                let mut den = areas[t] * self.mu_t[t];
                for e in 0..3 {
                    let a = dot(xi, self.normals[t][e]);
                    if a > 0.0 {
                        den += a;
                    } else if a < 0.0 {
                        if let Neighbor::Triangle(u) = neighbors[t][e] {
                            num -= a * flux[u];
                        }
                    }
                }
                flux[t] = num / den;
            }
        });
    }
}

/// Discrete-ordinates upwind finite-volume solve of
/// `ξ·∇I + μt I = μs ∫ p I + q` with zero inflow, by source iteration.
pub fn solve_forward(
    mesh: &Triangulation,
    medium: &Medium,
    source: &Phantom,
    params: &ForwardParams,
) -> Result<ForwardSolution> {
    if !(params.tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {}", params.tol)));
    }
    let grid = AngularGrid::new(params.n_dir)?;
    let nd = grid.len();
    let nt = mesh.num_triangles();
    let normals = scaled_normals(mesh);
    let orders: Vec<Vec<u32>> = (0..nd).into_par_iter().map(|n| sweep_order(mesh, &normals, grid.direction(n))).collect();
    let mu_t = cell_averages(mesh, |p| medium.mu_t(p));
    let mu_s = cell_averages(mesh, |p| medium.evaluate(p).mu_s);
    let q = cell_averages(mesh, |p| source.eval(p));
    let transport = Transport { mesh, grid, normals, orders, mu_t };

    let top = params.kernel_modes.min(nd / 2 - 1);
    // 2π p_m / N on the FFT index layout, zero beyond the truncation
    let mut weights = vec![0.0; nd];
    for m in 0..=top as i64 {
        let w = TAU * medium.kernel.mode(m) / nd as f64;
        weights[m as usize] = w;
        if m > 0 {
            weights[nd - m as usize] = w;
        }
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(nd);
    let inv = planner.plan_fft_inverse(nd);

    let scattering = mu_s.iter().any(|&s| s > 0.0);
    let mut emission = vec![0.0; nd * nt];
    for n in 0..nd {
        emission[n * nt..(n + 1) * nt].copy_from_slice(&q);
    }
    let mut flux = vec![0.0; nd * nt];
    let mut next = vec![0.0; nd * nt];
    let mut residuals = Vec::new();
    for iter in 1..=params.max_iters.max(1) {
        transport.sweep(&emission, &mut next);
        let change = flux.par_iter().zip(&next).map(|(a, b)| (a - b).abs()).reduce(|| 0.0, f64::max);
        std::mem::swap(&mut flux, &mut next);
        residuals.push(change);
        log::debug!("source iteration {iter}: change {change:e}");
        if !scattering || change < params.tol {
            return Ok(ForwardSolution { n_dir: nd, num_triangles: nt, fluxes: flux, iterations: iter, residuals });
        }
        // emission = q + μs Σ_m 2π p_m Î_m e^{imθ}
        let scat: Vec<Vec<f64>> = (0..nt)
            .into_par_iter()
            .map_init(
                || vec![Complex64::new(0.0, 0.0); nd],
                |buf, t| {
                    for n in 0..nd {
                        buf[n] = Complex64::new(flux[n * nt + t], 0.0);
                    }
                    fwd.process(buf);
                    for (b, w) in buf.iter_mut().zip(&weights) {
                        *b *= *w;
                    }
                    inv.process(buf);
                    buf.iter().map(|c| q[t] + mu_s[t] * c.re).collect()
                },
            )
            .collect();
        for (t, row) in scat.iter().enumerate() {
            for n in 0..nd {
                emission[n * nt + t] = row[n];
            }
        }
    }
    Err(Error::NotConverged { iterations: params.max_iters, residual: residuals.last().copied().unwrap_or(f64::NAN) })
}

/// Mesh boundary triangle whose boundary edge spans argument `w`.
fn boundary_cells(mesh: &Triangulation) -> Vec<(f64, usize)> {
    let loop_ = mesh.boundary_loop();
    let tri = mesh.triangles();
    let mut edge_cell = std::collections::HashMap::new();
    for (t, nb) in mesh.neighbors().iter().enumerate() {
        for e in 0..3 {
            if nb[e] == Neighbor::Boundary {
                edge_cell.insert((tri[t][e], tri[t][(e + 1) % 3]), t);
            }
        }
    }
    let mut out = Vec::with_capacity(loop_.len());
    for i in 0..loop_.len() {
        let (a, b) = (loop_[i], loop_[(i + 1) % loop_.len()]);
        let t = edge_cell.get(&(a, b)).copied().expect("boundary loop edge has a triangle");
        out.push((arg(mesh.vertices()[a]), t));
    }
    out
}

/// Samples the outflow of a solution at `k_points × n_angles`: the
/// piecewise-constant boundary-cell value, linearly interpolated in angle
/// between solver directions, zero for incoming directions.
pub fn sample_outflow(
    mesh: &Triangulation,
    medium: &Medium,
    solution: &ForwardSolution,
    k_points: usize,
    n_angles: usize,
) -> Result<BoundaryMeasurement> {
    let mut meas = BoundaryMeasurement::zeros(&medium.domain, k_points, n_angles)?;
    let cells = boundary_cells(mesh);
    let nd = solution.n_dir as f64;
    for k in 0..k_points {
        let w = meas.arguments[k];
        // last boundary vertex with argument ≤ w (wrapping)
        let idx = match cells.partition_point(|c| c.0 <= w) {
            0 => cells.len() - 1,
            i => i - 1,
        };
        let t = cells[idx].1;
        let nu = meas.normal(k);
        for n in 0..n_angles {
            let xi = meas.grid.direction(n);
            if dot(nu, xi) <= TANGENT_TOLERANCE {
                continue;
            }
            let pos = meas.grid.angle(n) / TAU * nd;
            let lo = pos.floor();
            let frac = pos - lo;
            let i0 = lo as usize % solution.n_dir;
            let i1 = (i0 + 1) % solution.n_dir;
            let v = (1.0 - frac) * solution.flux(t, i0) + frac * solution.flux(t, i1);
            meas.values[k * n_angles + n] = v.max(0.0);
        }
    }
    Ok(meas)
}

/// [`solve_forward`] followed by [`sample_outflow`].
pub fn forward_measurement(
    mesh: &Triangulation,
    medium: &Medium,
    source: &Phantom,
    params: &ForwardParams,
) -> Result<(ForwardSolution, BoundaryMeasurement)> {
    let sol = solve_forward(mesh, medium, source, params)?;
    let meas = sample_outflow(mesh, medium, &sol, params.k_points, params.n_angles)?;
    Ok((sol, meas))
}

/// `∫_{Γ+} I ν·ξ dσ dθ` by the Riemann sum over measurement points and angles.
pub fn total_outflow(meas: &BoundaryMeasurement) -> f64 {
    let k = meas.num_points();
    let n = meas.num_angles();
    let dtheta = TAU / n as f64;
    let mut total = 0.0;
    for i in 0..k {
        let prev = if i == 0 { meas.arguments[k - 1] - TAU } else { meas.arguments[i - 1] };
        let next = if i + 1 == k { meas.arguments[0] + TAU } else { meas.arguments[i + 1] };
        let d = meas.derivatives[i];
        let ds = 0.5 * (next - prev) * d[0].hypot(d[1]);
        let nu = meas.normal(i);
        let row = meas.row(i);
        for (j, &v) in row.iter().enumerate() {
            total += v * dot(nu, meas.grid.direction(j)).max(0.0) * dtheta * ds;
        }
    }
    total
}
