use num_complex::Complex64;
use rayon::prelude::*;

use super::boundary::BoundaryTrace;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::mesh::{wirtinger_derivative, P1Field, Triangulation};

/// Barycentric coordinates of the symmetric 3-point Gauss rule (weights 1/3).
pub const GAUSS3: [[f64; 3]; 3] = [[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0]];

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries of `(row, col, value)` triplets.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("entry exists") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
        match self.cols[lo..hi].binary_search(&c) {
            Ok(i) => self.vals[lo + i],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
            *out = (lo..hi).map(|i| self.vals[i] * x[self.cols[i]]).sum();
        });
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, r)).collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).all(|i| (self.vals[i] - self.get(self.cols[i], r)).abs() <= tol)
        })
    }
}

/// Outcome of a conjugate-gradient solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for an SPD matrix; stops at
/// `‖b − Ax‖ ≤ tol ‖b‖`.
pub fn conjugate_gradient(a: &CsrMatrix, b: &[f64], tol: f64, max_iters: usize) -> Result<(Vec<f64>, CgStats)> {
    let n = a.dim();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, CgStats { iterations: 0, relative_residual: 0.0 }));
    }
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 1..=max_iters {
        a.mul_vec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(Error::LinearSolver { iterations: it, residual: f64::NAN });
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        let res = r.iter().map(|v| v * v).sum::<f64>().sqrt() / bnorm;
        if res <= tol {
            return Ok((x, CgStats { iterations: it, relative_residual: res }));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = r.iter().map(|v| v * v).sum::<f64>().sqrt() / bnorm;
    Err(Error::LinearSolver { iterations: max_iters, residual: res })
}

/// Gradients of the three barycentric functions of triangle `t`.
pub fn barycentric_gradients(mesh: &Triangulation, t: usize) -> [Point; 3] {
    let p = mesh.triangle_points(t);
    let twice_area = 2.0 * mesh.areas()[t];
    let mut g = [[0.0; 2]; 3];
    for i in 0..3 {
        let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        g[i] = [(a[1] - b[1]) / twice_area, (b[0] - a[0]) / twice_area];
    }
    g
}

/// Gauss points of every triangle.
pub fn gauss_points(mesh: &Triangulation) -> Vec<[Point; 3]> {
    (0..mesh.num_triangles())
        .map(|t| {
            let p = mesh.triangle_points(t);
            GAUSS3.map(|l| [l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0], l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1]])
        })
        .collect()
}

/// P1 stiffness system with Dirichlet elimination of the boundary loop.
#[derive(Debug, Clone)]
pub struct PoissonSystem<'m> {
    mesh: &'m Triangulation,
    /// Interior unknown index per vertex, `None` on the boundary.
    interior_index: Vec<Option<usize>>,
    interior: Vec<usize>,
    /// Position in the boundary loop per vertex.
    loop_index: Vec<Option<usize>>,
    stiffness: CsrMatrix,
    /// `(interior row, boundary loop position, K_ib)`.
    coupling: Vec<(usize, usize, f64)>,
    gradients: Vec<[Point; 3]>,
    pub tol: f64,
    pub max_iters: usize,
}

impl<'m> PoissonSystem<'m> {
    pub fn new(mesh: &'m Triangulation, tol: f64, max_iters: usize) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::invalid(format!("linear solver tolerance must be positive, got {tol}")));
        }
        let nv = mesh.num_vertices();
        let mut loop_index = vec![None; nv];
        for (i, &v) in mesh.boundary_loop().iter().enumerate() {
            loop_index[v] = Some(i);
        }
        let mut interior_index = vec![None; nv];
        let mut interior = Vec::new();
        for v in 0..nv {
            if loop_index[v].is_none() {
                interior_index[v] = Some(interior.len());
                interior.push(v);
            }
        }
        if interior.is_empty() {
            return Err(Error::invalid("mesh has no interior vertices"));
        }
        let gradients: Vec<[Point; 3]> = (0..mesh.num_triangles()).map(|t| barycentric_gradients(mesh, t)).collect();
        let mut triplets = Vec::with_capacity(9 * mesh.num_triangles());
        let mut coupling = Vec::new();
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let g = &gradients[t];
            let area = mesh.areas()[t];
            for i in 0..3 {
                let Some(row) = interior_index[tri[i]] else { continue };
                for j in 0..3 {
                    let k = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                    match (interior_index[tri[j]], loop_index[tri[j]]) {
                        (Some(col), _) => triplets.push((row, col, k)),
                        (None, Some(pos)) => coupling.push((row, pos, k)),
                        (None, None) => unreachable!("every vertex is interior or on the loop"),
                    }
                }
            }
        }
        let stiffness = CsrMatrix::from_triplets(interior.len(), triplets);
        Ok(Self { mesh, interior_index, interior, loop_index, stiffness, coupling, gradients, tol, max_iters })
    }

    pub fn mesh(&self) -> &'m Triangulation {
        self.mesh
    }

    /// Stiffness block on the interior unknowns.
    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    pub fn gradients(&self, t: usize) -> [Point; 3] {
        self.gradients[t]
    }

    /// Solves `∫∇u·∇φ = load(φ)` for all interior hat functions `φ` with
    /// `u = boundary` on the loop. `load[v]` is indexed by vertex; boundary entries are ignored.
    pub fn solve(&self, load: &[Complex64], boundary: &BoundaryTrace) -> Result<(P1Field<'m>, CgStats)> {
        if boundary.values.len() != self.mesh.boundary_loop().len() || load.len() != self.mesh.num_vertices() {
            return Err(Error::invalid("load or boundary trace does not match the mesh"));
        }
        let mut rhs: Vec<Complex64> = self.interior.iter().map(|&v| load[v]).collect();
        for &(row, pos, k) in &self.coupling {
            rhs[row] -= boundary.values[pos] * k;
        }
        let re: Vec<f64> = rhs.iter().map(|c| c.re).collect();
        let im: Vec<f64> = rhs.iter().map(|c| c.im).collect();
        let (xr, sr) = conjugate_gradient(&self.stiffness, &re, self.tol, self.max_iters)?;
        let (xi, si) = conjugate_gradient(&self.stiffness, &im, self.tol, self.max_iters)?;
        let values = (0..self.mesh.num_vertices())
            .map(|v| match (self.interior_index[v], self.loop_index[v]) {
                (Some(i), _) => Complex64::new(xr[i], xi[i]),
                (None, Some(pos)) => boundary.values[pos],
                (None, None) => unreachable!("every vertex is interior or on the loop"),
            })
            .collect();
        let stats = CgStats {
            iterations: sr.iterations.max(si.iterations),
            relative_residual: sr.relative_residual.max(si.relative_residual),
        };
        Ok((P1Field::new(self.mesh, values)?, stats))
    }
}

/// One step of the Poisson cascade: solves
/// `∫∇u·∇φ = 4 Σ_τ ∫_τ {−∂u_{m+2} + c u_{m+1}} ∂φ` with Dirichlet data
/// `boundary`, where `coefficient[t][g]` is `c = 2πμs p − μt` at Gauss point `g` of triangle `t`.
pub fn poisson_step<'m>(
    system: &PoissonSystem<'m>,
    next2: &P1Field<'_>,
    next1: &P1Field<'_>,
    coefficient: &[[f64; 3]],
    boundary: &BoundaryTrace,
) -> Result<P1Field<'m>> {
    let mesh = system.mesh();
    if next2.values().len() != mesh.num_vertices()
        || next1.values().len() != mesh.num_vertices()
        || coefficient.len() != mesh.num_triangles()
    {
        return Err(Error::invalid("Poisson step inputs do not match the mesh"));
    }
    let mut load = vec![Complex64::new(0.0, 0.0); mesh.num_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.areas()[t];
        let mut integral = -wirtinger_derivative(next2, t)? * area;
        for (g, lambda) in GAUSS3.iter().enumerate() {
            integral += next1.eval_barycentric(t, *lambda) * (coefficient[t][g] * area / 3.0);
        }
        let grads = system.gradients(t);
        for i in 0..3 {
            let d_phi = Complex64::new(0.5 * grads[i][0], -0.5 * grads[i][1]);
            load[tri[i]] += integral * d_phi * 4.0;
        }
    }
    let (field, stats) = system.solve(&load, boundary)?;
    log::debug!("Poisson solve: {} CG iterations, residual {:e}", stats.iterations, stats.relative_residual);
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, BoundaryCurve};

    fn disc_mesh(h: f64) -> Triangulation {
        generate_mesh(&BoundaryCurve::circle(1.0).unwrap(), h).unwrap()
    }

    fn trace_of(mesh: &Triangulation, f: impl Fn(Point) -> Complex64) -> BoundaryTrace {
        BoundaryTrace { values: mesh.boundary_loop().iter().map(|&v| f(mesh.vertices()[v])).collect() }
    }

    /// H¹ seminorm of `u_h − u` from the per-triangle gradient of `u_h`.
    fn h1_error(field: &P1Field<'_>, grad: impl Fn(Point) -> [Complex64; 2]) -> f64 {
        let mesh = field.mesh();
        let gp = gauss_points(mesh);
        (0..mesh.num_triangles())
            .map(|t| {
                let (a, b, _) = crate::mesh::affine_coefficients(field, t).unwrap();
                gp[t].iter().map(|&x| {
                    let g = grad(x);
                    ((a - g[0]).norm_sqr() + (b - g[1]).norm_sqr()) * mesh.areas()[t] / 3.0
                }).sum::<f64>()
            })
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn stiffness_is_symmetric_positive_definite() {
        let mesh = disc_mesh(0.2);
        let sys = PoissonSystem::new(&mesh, 1e-10, 1000).unwrap();
        let k = sys.stiffness();
        assert!(k.is_symmetric(1e-14));
        for r in 0..k.dim() {
            assert!(k.get(r, r) > 0.0);
        }
        let b: Vec<f64> = (0..k.dim()).map(|i| (i as f64).sin()).collect();
        let (x, stats) = conjugate_gradient(k, &b, 1e-10, 1000).unwrap();
        assert!(stats.relative_residual <= 1e-10);
        let mut ax = vec![0.0; k.dim()];
        k.mul_vec(&x, &mut ax);
        let xax: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        assert!(xax > 0.0);
    }

    #[test]
    fn zero_data_gives_zero() {
        let mesh = disc_mesh(0.2);
        let sys = PoissonSystem::new(&mesh, 1e-10, 1000).unwrap();
        let zero = P1Field::zeros(&mesh);
        let coef = vec![[-1.0; 3]; mesh.num_triangles()];
        let u = poisson_step(&sys, &zero, &zero, &coef, &trace_of(&mesh, |_| Complex64::new(0.0, 0.0))).unwrap();
        assert!(u.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn harmonic_solution_converges() {
        let u = |p: Point| Complex64::new(p[0] * p[0] - p[1] * p[1], p[0] * p[1]);
        let grad = |p: Point| [Complex64::new(2.0 * p[0], p[1]), Complex64::new(-2.0 * p[1], p[0])];
        let mut errs = Vec::new();
        for h in [0.2, 0.1, 0.05, 0.025] {
            let mesh = disc_mesh(h);
            let sys = PoissonSystem::new(&mesh, 1e-10, 10_000).unwrap();
            let zero = P1Field::zeros(&mesh);
            let coef = vec![[0.0; 3]; mesh.num_triangles()];
            let f = poisson_step(&sys, &zero, &zero, &coef, &trace_of(&mesh, u)).unwrap();
            errs.push((mesh.max_diameter(), h1_error(&f, grad)));
        }
        for w in errs.windows(2) {
            let rate = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
            assert!(rate >= 0.8, "{errs:?}");
        }
    }

    #[test]
    fn source_terms_have_the_right_sign() {
        // −∂u_{m+2} = z for u_{m+2} = −z²/2, so Δu = 4 and u = |z|²
        let mesh = disc_mesh(0.05);
        let sys = PoissonSystem::new(&mesh, 1e-10, 10_000).unwrap();
        let z = |p: Point| Complex64::new(p[0], p[1]);
        let next2 = P1Field::from_fn(&mesh, |p| -z(p) * z(p) * 0.5);
        let zero = P1Field::zeros(&mesh);
        let no_coef = vec![[0.0; 3]; mesh.num_triangles()];
        let r2 = |p: Point| Complex64::new(p[0] * p[0] + p[1] * p[1], 0.0);
        let u = poisson_step(&sys, &next2, &zero, &no_coef, &trace_of(&mesh, r2)).unwrap();
        let err = mesh.vertices().iter().zip(u.values()).map(|(&p, v)| (v - r2(p)).norm()).fold(0.0, f64::max);
        assert!(err < 5e-3, "{err}");

        // c u_{m+1} = −z with c = −1, so Δu = −4 and u = −|z|²
        let next1 = P1Field::from_fn(&mesh, z);
        let coef = vec![[-1.0; 3]; mesh.num_triangles()];
        let u = poisson_step(&sys, &zero, &next1, &coef, &trace_of(&mesh, |p| -r2(p))).unwrap();
        let err = mesh.vertices().iter().zip(u.values()).map(|(&p, v)| (v + r2(p)).norm()).fold(0.0, f64::max);
        assert!(err < 5e-3, "{err}");
    }
}
