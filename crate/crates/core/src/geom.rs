//! Small planar geometry helpers.

use num_complex::Complex64;

pub type Point = [f64; 2];

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add_scaled(a: Point, t: f64, d: Point) -> Point {
    [a[0] + t * d[0], a[1] + t * d[1]]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Unit vector `ξ(θ) = (cos θ, sin θ)`.
#[inline]
pub fn direction(theta: f64) -> Point {
    let (s, c) = theta.sin_cos();
    [c, s]
}

/// Counter-clockwise rotation by π/2.
#[inline]
pub fn perp(a: Point) -> Point {
    [-a[1], a[0]]
}

#[inline]
pub fn to_complex(p: Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Twice the signed area of the triangle `(a, b, c)`; positive when CCW.
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

pub fn polygon_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n).map(|i| cross(vertices[i], vertices[(i + 1) % n])).sum::<f64>()
}
