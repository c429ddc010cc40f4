use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::Triangulation;

/// Solves a symmetric cyclic tridiagonal system. `off[i]` couples unknowns
/// `i` and `i + 1 (mod L)`; requires `L ≥ 3` and a nonsingular matrix.
pub fn solve_cyclic_tridiagonal(diag: &[f64], off: &[f64], rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = diag.len();
    if n < 3 || off.len() != n || rhs.len() != n {
        return Err(Error::invalid("cyclic tridiagonal system needs at least 3 consistent rows"));
    }
    // Sherman–Morrison: split off the corner coupling as u vᵀ
    let corner = off[n - 1];
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= corner * corner / gamma;
    let x = thomas(&d, off, rhs)?;
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    u[0] = Complex64::new(gamma, 0.0);
    u[n - 1] = Complex64::new(corner, 0.0);
    let z = thomas(&d, off, &u)?;
    let denom = Complex64::new(1.0, 0.0) + z[0] + z[n - 1] * (corner / gamma);
    if denom.norm() < 1e-300 {
        return Err(Error::LinearSolver { iterations: 0, residual: f64::INFINITY });
    }
    let fact = (x[0] + x[n - 1] * (corner / gamma)) / denom;
    Ok(x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect())
}

/// Tridiagonal solve ignoring the corner entry `off[n − 1]`.
fn thomas(diag: &[f64], off: &[f64], rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = rhs.to_vec();
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - off[i - 1] * c[i - 1];
            x[i] = (x[i] - x[i - 1] * off[i - 1]) / pivot;
        } else {
            x[0] /= pivot;
        }
        if pivot.abs() < 1e-300 || !pivot.is_finite() {
            return Err(Error::LinearSolver { iterations: i, residual: f64::INFINITY });
        }
        if i + 1 < n {
            c[i] = off[i] / pivot;
        }
    }
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= next * c[i];
    }
    Ok(x)
}

/// Coefficients of a periodic piecewise-linear function on the mesh boundary
/// loop, one per loop vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub values: Vec<Complex64>,
}

/// Least-squares projection, in the boundary parameter, from characteristic
/// functions of the measurement cells onto the periodic hat functions of the
/// mesh boundary loop.
#[derive(Debug, Clone)]
pub struct BoundaryProjector {
    diag: Vec<f64>,
    off: Vec<f64>,
    /// `(loop index, cell index, ∫ χ_cell φ_loop dω)`.
    overlaps: Vec<(usize, usize, f64)>,
    num_cells: usize,
}

impl BoundaryProjector {
    /// `cuts` are the `K + 1` cell boundaries `0 = ω_0 < … < ω_K = 2π`;
    /// `nodes` the increasing arguments of the hat-function peaks.
    pub fn new(cuts: &[f64], nodes: &[f64]) -> Result<Self> {
        let l = nodes.len();
        let k = cuts.len().saturating_sub(1);
        if l < 3 || k < 1 || cuts.windows(2).any(|w| w[1] <= w[0]) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("boundary projection needs increasing cells and at least 3 nodes"));
        }
        if l > k {
            log::warn!("{l} boundary vertices exceed {k} measurement points; the projection is underdetermined locally");
        }
        let gap = |i: usize| if i + 1 < l { nodes[i + 1] - nodes[i] } else { nodes[0] + TAU - nodes[l - 1] };
        let off: Vec<f64> = (0..l).map(|i| gap(i) / 6.0).collect();
        let diag: Vec<f64> = (0..l).map(|i| (gap((i + l - 1) % l) + gap(i)) / 3.0).collect();

        let mut breaks: Vec<f64> = cuts.iter().copied().chain(nodes.iter().copied()).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut overlaps = Vec::new();
        for w in breaks.windows(2) {
            let (u0, u1) = (w[0], w[1]);
            if u1 <= u0 {
                continue;
            }
            let mid = 0.5 * (u0 + u1);
            let cell = cuts[1..k].partition_point(|&c| c <= mid);
            let i = nodes.partition_point(|&x| x <= mid);
            let (left, lpos, right, rpos) = match i {
                0 => (l - 1, nodes[l - 1] - TAU, 0, nodes[0]),
                i if i == l => (l - 1, nodes[l - 1], 0, nodes[0] + TAU),
                i => (i - 1, nodes[i - 1], i, nodes[i]),
            };
            let h = rpos - lpos;
            let down = ((rpos - u0).powi(2) - (rpos - u1).powi(2)) / (2.0 * h);
            let up = ((u1 - lpos).powi(2) - (u0 - lpos).powi(2)) / (2.0 * h);
            overlaps.push((left, cell, down));
            overlaps.push((right, cell, up));
        }
        Ok(Self { diag, off, overlaps, num_cells: k })
    }

    /// Projector from measurement cells with the given `cuts` onto the mesh boundary loop.
    pub fn for_mesh(cuts: &[f64], mesh: &Triangulation) -> Result<Self> {
        Self::new(cuts, &mesh.boundary_arguments())
    }

    pub fn num_nodes(&self) -> usize {
        self.diag.len()
    }

    /// Gram matrix of the hat functions as `(diagonal, cyclic off-diagonal)`.
    pub fn gram(&self) -> (&[f64], &[f64]) {
        (&self.diag, &self.off)
    }

    /// Hat coefficients minimising `‖Σ a_ℓ φ_ℓ − Σ X_k χ_k‖` in `L²(dω)`.
    pub fn project(&self, cell_values: &[Complex64]) -> Result<BoundaryTrace> {
        if cell_values.len() != self.num_cells {
            return Err(Error::invalid(format!("expected {} cell values, got {}", self.num_cells, cell_values.len())));
        }
        let mut rhs = vec![Complex64::new(0.0, 0.0); self.diag.len()];
        for &(node, cell, w) in &self.overlaps {
            rhs[node] += cell_values[cell] * w;
        }
        Ok(BoundaryTrace { values: solve_cyclic_tridiagonal(&self.diag, &self.off, &rhs)? })
    }
}

/// Least-squares P1 boundary trace of values given at measurement points
/// with Riemann cells `cuts`.
pub fn interpolate_boundary(values: &[Complex64], cuts: &[f64], mesh: &Triangulation) -> Result<BoundaryTrace> {
    BoundaryProjector::for_mesh(cuts, mesh)?.project(values)
}
