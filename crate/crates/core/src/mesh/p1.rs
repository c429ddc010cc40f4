use num_complex::Complex64;

use super::Triangulation;
use crate::error::{Error, Result};
use crate::geom::Point;

/// Continuous piecewise-linear complex field, one value per mesh vertex.
#[derive(Debug, Clone)]
pub struct P1Field<'m> {
    mesh: &'m Triangulation,
    values: Vec<Complex64>,
}

impl<'m> P1Field<'m> {
    pub fn new(mesh: &'m Triangulation, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::invalid(format!(
                "field has {} values but mesh has {} vertices",
                values.len(),
                mesh.num_vertices()
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: &'m Triangulation) -> Self {
        Self { mesh, values: vec![Complex64::new(0.0, 0.0); mesh.num_vertices()] }
    }

    pub fn from_fn(mesh: &'m Triangulation, f: impl Fn(Point) -> Complex64) -> Self {
        Self { mesh, values: mesh.vertices().iter().map(|&p| f(p)).collect() }
    }

    pub fn mesh(&self) -> &'m Triangulation {
        self.mesh
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at a point given by barycentric coordinates inside triangle `t`.
    pub fn eval_barycentric(&self, t: usize, lambda: [f64; 3]) -> Complex64 {
        let tri = self.mesh.triangles()[t];
        self.values[tri[0]] * lambda[0] + self.values[tri[1]] * lambda[1] + self.values[tri[2]] * lambda[2]
    }

    pub fn at_centroid(&self, t: usize) -> Complex64 {
        self.eval_barycentric(t, [1.0 / 3.0; 3])
    }
}

/// Coefficients `(a, b, c)` of `a x1 + b x2 + c` interpolating the field on triangle `t`.
pub fn affine_coefficients(field: &P1Field<'_>, t: usize) -> Result<(Complex64, Complex64, Complex64)> {
    let mesh = field.mesh;
    if t >= mesh.num_triangles() {
        return Err(Error::invalid(format!("triangle index {t} out of range")));
    }
    let [p0, p1, p2] = mesh.triangle_points(t);
    let tri = mesh.triangles()[t];
    let [v0, v1, v2] = [field.values[tri[0]], field.values[tri[1]], field.values[tri[2]]];
    Ok(affine_from_points([p0, p1, p2], [v0, v1, v2]).ok_or(Error::DegenerateTriangle(t))?)
}

pub(crate) fn affine_from_points(p: [Point; 3], v: [Complex64; 3]) -> Option<(Complex64, Complex64, Complex64)> {
    let (x10, y10) = (p[1][0] - p[0][0], p[1][1] - p[0][1]);
    let (x20, y20) = (p[2][0] - p[0][0], p[2][1] - p[0][1]);
    let det = x10 * y20 - x20 * y10;
    if det == 0.0 {
        return None;
    }
    let (d1, d2) = (v[1] - v[0], v[2] - v[0]);
    let a = (d1 * y20 - d2 * y10) / det;
    let b = (d2 * x10 - d1 * x20) / det;
    let c = v[0] - a * p[0][0] - b * p[0][1];
    Some((a, b, c))
}

/// `∂ = (∂x1 − i ∂x2)/2` of the field restricted to triangle `t`.
pub fn wirtinger_derivative(field: &P1Field<'_>, t: usize) -> Result<Complex64> {
    let (a, b, _) = affine_coefficients(field, t)?;
    Ok((a - Complex64::i() * b) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, BoundaryCurve};
    use proptest::prelude::*;

    fn mesh() -> Triangulation {
        generate_mesh(&BoundaryCurve::circle(1.0).unwrap(), 0.2).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_and_coordinate_fields() {
        let m = mesh();
        let f = P1Field::from_fn(&m, |_| c(7.0, 0.0));
        let (a, b, cc) = affine_coefficients(&f, 3).unwrap();
        assert!(a.norm() < 1e-14 && b.norm() < 1e-14 && (cc - c(7.0, 0.0)).norm() < 1e-14);

        let f = P1Field::from_fn(&m, |p| c(p[0], 0.0));
        let (a, b, cc) = affine_coefficients(&f, 5).unwrap();
        assert!((a - c(1.0, 0.0)).norm() < 1e-12 && b.norm() < 1e-12 && cc.norm() < 1e-12);
    }

    #[test]
    fn wirtinger_of_z_and_conj_z() {
        let m = mesh();
        let z = P1Field::from_fn(&m, |p| c(p[0], p[1]));
        let zb = P1Field::from_fn(&m, |p| c(p[0], -p[1]));
        for t in 0..m.num_triangles() {
            assert!((wirtinger_derivative(&z, t).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
            assert!(wirtinger_derivative(&zb, t).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn wirtinger_of_x_squared_near_point() {
        let h = 1e-3;
        let p = [[0.3, 0.0], [0.3 + h, 0.0], [0.3, h]];
        let v = p.map(|q| c(q[0] * q[0], 0.0));
        let (a, b, _) = affine_from_points(p, v).unwrap();
        let d = (a - Complex64::i() * b) * 0.5;
        // ∂(x1²) = x1, so the value is ≈ 0.3 up to O(h)
        assert!((d - c(0.3, 0.0)).norm() < 2.0 * h);
    }

    #[test]
    fn out_of_range_triangle() {
        let m = mesh();
        let f = P1Field::zeros(&m);
        assert!(affine_coefficients(&f, m.num_triangles()).is_err());
    }

    proptest! {
        #[test]
        fn coefficients_reproduce_vertex_values(vals in proptest::collection::vec(-10.0f64..10.0, 6),
                                                 pts in proptest::collection::vec(-1.0f64..1.0, 6)) {
            let p = [[pts[0], pts[1]], [pts[2], pts[3]], [pts[4], pts[5]]];
            let det = crate::geom::orient(p[0], p[1], p[2]);
            prop_assume!(det.abs() > 1e-3);
            let v = [c(vals[0], vals[1]), c(vals[2], vals[3]), c(vals[4], vals[5])];
            let (a, b, cc) = affine_from_points(p, v).unwrap();
            // independent route: Cramer's rule on the 3×3 system [x y 1][a b c]^T = v
            let m3 = [[p[0][0], p[0][1], 1.0], [p[1][0], p[1][1], 1.0], [p[2][0], p[2][1], 1.0]];
            let det3 = |m: [[f64; 3]; 3]| {
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            };
            let d = det3(m3);
            for (col, coef) in [a, b, cc].iter().enumerate() {
                let mut re = m3;
                let mut im = m3;
                for r in 0..3 { re[r][col] = v[r].re; im[r][col] = v[r].im; }
                let expect = c(det3(re) / d, det3(im) / d);
                prop_assert!((expect - coef).norm() < 1e-8 * (1.0 + coef.norm()));
            }
            for k in 0..3 {
                let val = a * p[k][0] + b * p[k][1] + cc;
                prop_assert!((val - v[k]).norm() < 1e-12 * 1e3);
            }
        }

        #[test]
        fn continuity_across_incident_triangles(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let m = mesh();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<Complex64> = (0..m.num_vertices()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let f = P1Field::new(&m, vals.clone()).unwrap();
            for t in 0..m.num_triangles() {
                let (a, b, cc) = affine_coefficients(&f, t).unwrap();
                for &v in &m.triangles()[t] {
                    let p = m.vertices()[v];
                    prop_assert!((a * p[0] + b * p[1] + cc - vals[v]).norm() < 1e-12);
                }
            }
        }
    }
}
