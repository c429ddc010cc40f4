//! Triangulations of convex domains and piecewise-linear fields on them.

mod curve;
mod generate;
mod io;
mod p1;

pub use curve::{arg, BoundaryCurve, CurveKind};
pub use generate::generate_mesh;
pub use io::{mesh_to_string, parse_mesh, read_mesh, write_mesh, MESH_MAGIC};
pub use p1::{affine_coefficients, wirtinger_derivative, P1Field};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{orient, Point};

/// Neighbour across a triangle edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbor {
    Triangle(usize),
    Boundary,
}

/// Immutable triangulation with its boundary loop.
///
/// Edge `e` of triangle `t` joins vertices `e` and `(e + 1) % 3` of that triangle.
#[derive(Debug, Clone)]
pub struct Triangulation {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<usize>,
    areas: Vec<f64>,
    neighbors: Vec<[Neighbor; 3]>,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.triangles == other.triangles && self.boundary == other.boundary
    }
}

impl Triangulation {
    /// Validates and indexes a triangulation. Triangles must be CCW with
    /// positive area; the boundary loop must list every boundary-edge vertex
    /// once, in increasing argument.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, boundary: Vec<usize>) -> Result<Self> {
        let nv = vertices.len();
        let mut areas = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::invalid(format!("triangle {t} references a vertex out of range")));
            }
            let a = 0.5 * orient(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if a == 0.0 {
                return Err(Error::DegenerateTriangle(t));
            }
            if a < 0.0 {
                return Err(Error::invalid(format!("triangle {t} is clockwise")));
            }
            areas.push(a);
        }
        if boundary.iter().any(|&v| v >= nv) {
            return Err(Error::invalid("boundary loop references a vertex out of range"));
        }

        let mut edge_owner: HashMap<(usize, usize), (usize, usize)> = HashMap::with_capacity(3 * triangles.len());
        let mut neighbors = vec![[Neighbor::Boundary; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                if let Some((t2, e2)) = edge_owner.remove(&key) {
                    neighbors[t][e] = Neighbor::Triangle(t2);
                    neighbors[t2][e2] = Neighbor::Triangle(t);
                } else {
                    edge_owner.insert(key, (t, e));
                }
            }
        }
        // remaining unmatched edges form the boundary
        let mut on_boundary = vec![false; nv];
        for &(a, b) in edge_owner.keys() {
            on_boundary[a] = true;
            on_boundary[b] = true;
        }
        let expected = on_boundary.iter().filter(|&&b| b).count();
        let mut seen = vec![false; nv];
        for &v in &boundary {
            if !on_boundary[v] || seen[v] {
                return Err(Error::invalid(format!("boundary loop vertex {v} is not a distinct boundary-edge vertex")));
            }
            seen[v] = true;
        }
        if boundary.len() != expected {
            return Err(Error::invalid(format!(
                "boundary loop has {} vertices but the triangulation has {expected} boundary vertices",
                boundary.len()
            )));
        }
        let args: Vec<f64> = boundary.iter().map(|&v| arg(vertices[v])).collect();
        if args.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("boundary loop is not ordered by increasing argument"));
        }

        Ok(Self { vertices, triangles, boundary, areas, neighbors })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_loop(&self) -> &[usize] {
        &self.boundary
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn neighbors(&self) -> &[[Neighbor; 3]] {
        &self.neighbors
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangle_points(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Boundary flag per vertex.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for &v in &self.boundary {
            mask[v] = true;
        }
        mask
    }

    /// Arguments of the boundary-loop vertices, increasing in `[0, 2π)`.
    pub fn boundary_arguments(&self) -> Vec<f64> {
        self.boundary.iter().map(|&v| arg(self.vertices[v])).collect()
    }

    /// Longest edge over all triangles.
    pub fn max_diameter(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle_points(t);
                let d = |p: Point, q: Point| (p[0] - q[0]).hypot(p[1] - q[1]);
                d(a, b).max(d(b, c)).max(d(c, a))
            })
            .fold(0.0, f64::max)
    }

    /// Longest boundary-loop edge.
    pub fn max_boundary_edge(&self) -> f64 {
        let n = self.boundary.len();
        (0..n)
            .map(|i| {
                let p = self.vertices[self.boundary[i]];
                let q = self.vertices[self.boundary[(i + 1) % n]];
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> (Vec<Point>, Vec<[usize; 3]>) {
        (vec![[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]], vec![[0, 1, 2], [0, 2, 3]])
    }

    #[test]
    fn builds_adjacency() {
        let (v, t) = square();
        let mesh = Triangulation::new(v, t, vec![1, 2, 3, 0]).unwrap();
        assert_eq!(mesh.neighbors()[0][2], Neighbor::Triangle(1));
        assert_eq!(mesh.neighbors()[1][0], Neighbor::Triangle(0));
        assert_eq!(mesh.neighbors()[0][0], Neighbor::Boundary);
        assert!((mesh.total_area() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let (v, _) = square();
        assert!(Triangulation::new(v.clone(), vec![[0, 2, 1]], vec![]).is_err());
        assert!(Triangulation::new(v.clone(), vec![[0, 1, 7]], vec![]).is_err());
        assert!(matches!(
            Triangulation::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], vec![[0, 1, 2]], vec![]),
            Err(Error::DegenerateTriangle(0))
        ));
        let (v, t) = square();
        // wrong order
        assert!(Triangulation::new(v, t, vec![0, 1, 2, 3]).is_err());
    }
}
