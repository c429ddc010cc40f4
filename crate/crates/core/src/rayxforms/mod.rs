//! Divergent-beam and Radon transforms of the attenuation, the principal-value
//! Hilbert transform, the integrating factor `h` and the angular modes of
//! `e^{∓h}`.

mod hilbert;

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

pub use hilbert::{hilbert_pv, hilbert_with_value, MidpointSamples};

use crate::error::{Error, Result};
use crate::geom::{add_scaled, direction, dot, perp, Point};
use crate::phantoms::Medium;

/// Default number of midpoint samples per line integral and per Hilbert grid.
pub const DEFAULT_SAMPLES: usize = 100;

/// Resolution knobs shared by every ray transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RayQuadrature {
    /// Midpoint samples along each line or ray.
    pub line_points: usize,
    /// Midpoint samples of each Radon profile, i.e. the Hilbert grid.
    pub hilbert_points: usize,
}

impl Default for RayQuadrature {
    fn default() -> Self {
        Self { line_points: DEFAULT_SAMPLES, hilbert_points: DEFAULT_SAMPLES }
    }
}

impl RayQuadrature {
    pub fn validate(&self) -> Result<()> {
        if self.line_points < 2 {
            return Err(Error::invalid(format!("need at least 2 line samples, got {}", self.line_points)));
        }
        if self.hilbert_points < 8 {
            return Err(Error::invalid(format!("need at least 8 Hilbert samples, got {}", self.hilbert_points)));
        }
        Ok(())
    }
}

/// Midpoint rule for `∫_{t0}^{t1} μt(x + t d) dt`.
fn line_integral(medium: &Medium, x: Point, d: Point, t0: f64, t1: f64, n: usize) -> f64 {
    if t1 <= t0 {
        return 0.0;
    }
    let dt = (t1 - t0) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        acc += medium.mu_t(add_scaled(x, t0 + (i as f64 + 0.5) * dt, d));
    }
    acc * dt
}

/// `∫_0^∞ μt(x + t ξ) dt`, truncated where the ray leaves the domain.
pub fn divergent_beam(medium: &Medium, x: Point, xi: Point, quad_points: usize) -> f64 {
    match medium.domain.line_interval(x, xi) {
        Some((t0, t1)) => line_integral(medium, x, xi, t0.max(0.0), t1, quad_points.max(1)),
        None => 0.0,
    }
}

/// `∫ μt(t ω + u ω⊥) du` where `ω` is `normal`.
fn radon_line(medium: &Medium, offset: f64, normal: Point, quad_points: usize) -> f64 {
    let base = [offset * normal[0], offset * normal[1]];
    let along = perp(normal);
    match medium.domain.line_interval(base, along) {
        Some((t0, t1)) => line_integral(medium, base, along, t0, t1, quad_points),
        None => 0.0,
    }
}

/// Radon transform `t ↦ R[μt](t, ω)` sampled at the midpoints of `[−ρ, ρ]`,
/// `ρ` the domain circumradius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadonProfile {
    pub normal: Point,
    pub samples: MidpointSamples,
}

impl RadonProfile {
    pub fn support_radius(&self) -> f64 {
        self.samples.interval().1
    }

    pub fn values(&self) -> &[f64] {
        self.samples.values()
    }

    /// Offsets `t_i` of the samples.
    pub fn offsets(&self) -> Vec<f64> {
        (0..self.samples.values().len()).map(|i| self.samples.node(i)).collect()
    }
}

pub fn radon_profile(medium: &Medium, normal: Point, p: usize, quad_points: usize) -> Result<RadonProfile> {
    if p < 8 {
        return Err(Error::invalid(format!("Radon profile needs at least 8 samples, got {p}")));
    }
    let rho = medium.domain.circumradius();
    let samples = MidpointSamples::from_fn(-rho, rho, p, |t| radon_line(medium, t, normal, quad_points.max(1)))?;
    Ok(RadonProfile { normal, samples })
}

/// Integrating factor from a precomputed profile for `ξ⊥`.
fn factor_from_profile(
    medium: &Medium,
    x: Point,
    xi: Point,
    profile: &RadonProfile,
    quad_points: usize,
    hilbert_sign: f64,
) -> Complex64 {
    let forward = divergent_beam(medium, x, xi, quad_points);
    let backward = divergent_beam(medium, x, [-xi[0], -xi[1]], quad_points);
    // the line through x along ξ is the Radon line at offset x·ξ⊥
    let radon = forward + backward;
    let s = dot(x, profile.normal);
    let hilbert = profile.samples.hilbert(s);
    Complex64::new(forward - 0.5 * radon, hilbert_sign * 0.5 * hilbert)
}

/// `h[μt](x, ξ) = D[μt](x, ξ) − ½ R[μt](x·ξ⊥, ξ⊥) + (i/2) H[R[μt](·, ξ⊥)](x·ξ⊥)`.
pub fn integrating_factor_h(medium: &Medium, x: Point, xi: Point, quad: RayQuadrature) -> Result<Complex64> {
    quad.validate()?;
    let profile = radon_profile(medium, perp(xi), quad.hilbert_points, quad.line_points)?;
    Ok(factor_from_profile(medium, x, xi, &profile, quad.line_points, 1.0))
}

/// Which exponential of the integrating factor is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorSign {
    /// `e^{−h}`, whose modes are the α sequence.
    Minus,
    /// `e^{+h}`, whose modes are the β sequence.
    Plus,
}

/// Angular modes of `θ ↦ e^{∓h(x, ξ(θ))}` at one site.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratingFactorModes {
    pub site: Point,
    pub sign: FactorSign,
    /// Number of angles `N` in the DFT.
    pub n_angles: usize,
    /// Modes `0..=S`, coefficient of `e^{isθ}`.
    pub modes: Vec<Complex64>,
    /// Modes `−1, −2, ..., −S`; zero for an exact integrating factor.
    pub negative: Vec<Complex64>,
}

impl IntegratingFactorModes {
    /// Mode `j` for `−S ≤ j ≤ S`.
    pub fn mode(&self, j: i64) -> Complex64 {
        if j >= 0 {
            self.modes[j as usize]
        } else {
            self.negative[(-j - 1) as usize]
        }
    }

    pub fn max_negative(&self) -> f64 {
        self.negative.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Radon profiles for all `N` directions of an angular grid, reused for
/// every site.
pub struct FactorTable<'a> {
    medium: &'a Medium,
    quad: RayQuadrature,
    directions: Vec<Point>,
    profiles: Vec<RadonProfile>,
    fft: Arc<dyn Fft<f64>>,
    hilbert_sign: f64,
}

impl<'a> FactorTable<'a> {
    pub fn new(medium: &'a Medium, n_angles: usize, quad: RayQuadrature) -> Result<Self> {
        quad.validate()?;
        if n_angles < 4 {
            return Err(Error::invalid(format!("need at least 4 directions, got {n_angles}")));
        }
        let directions: Vec<Point> = (0..n_angles).map(|n| direction(TAU * n as f64 / n_angles as f64)).collect();
        let profiles = directions
            .par_iter()
            .map(|&xi| radon_profile(medium, perp(xi), quad.hilbert_points, quad.line_points))
            .collect::<Result<Vec<_>>>()?;
        let fft = FftPlanner::new().plan_fft_forward(n_angles);
        Ok(Self { medium, quad, directions, profiles, fft, hilbert_sign: 1.0 })
    }

    /// Flips the sign of the Hilbert term; only for mutation checks.
    #[doc(hidden)]
    pub fn with_flipped_hilbert_sign(mut self) -> Self {
        self.hilbert_sign = -self.hilbert_sign;
        self
    }

    pub fn n_angles(&self) -> usize {
        self.directions.len()
    }

    pub fn profile(&self, n: usize) -> &RadonProfile {
        &self.profiles[n]
    }

    /// `h(x, ξ(θ_n))` for every direction.
    pub fn factor_samples(&self, x: Point) -> Vec<Complex64> {
        self.directions
            .iter()
            .zip(&self.profiles)
            .map(|(&xi, prof)| factor_from_profile(self.medium, x, xi, prof, self.quad.line_points, self.hilbert_sign))
            .collect()
    }

    /// Modes `0..=S` of `e^{∓h}` at `x`; requires `N ≥ 2S + 2`.
    pub fn modes(&self, x: Point, sign: FactorSign, s_max: usize) -> Result<IntegratingFactorModes> {
        let n = self.n_angles();
        if n < 2 * s_max + 2 {
            return Err(Error::invalid(format!("{n} directions cannot resolve {s_max} modes (need N ≥ 2S + 2)")));
        }
        let e = match sign {
            FactorSign::Minus => -1.0,
            FactorSign::Plus => 1.0,
        };
        let mut buf: Vec<Complex64> = self.factor_samples(x).into_iter().map(|h| (e * h).exp()).collect();
        self.fft.process(&mut buf);
        let scale = 1.0 / n as f64;
        let modes = buf[..=s_max].iter().map(|c| c * scale).collect();
        let negative = (1..=s_max).map(|s| buf[n - s] * scale).collect();
        Ok(IntegratingFactorModes { site: x, sign, n_angles: n, modes, negative })
    }

    /// [`FactorTable::modes`] at many sites, in site order.
    pub fn modes_at(&self, sites: &[Point], sign: FactorSign, s_max: usize) -> Result<Vec<IntegratingFactorModes>> {
        sites.par_iter().map(|&x| self.modes(x, sign, s_max)).collect()
    }
}

/// Modes `0..=S` of `e^{∓h}` at one site from `N` equispaced directions.
pub fn factor_modes(
    medium: &Medium,
    site: Point,
    sign: FactorSign,
    s_max: usize,
    n_angles: usize,
    quad: RayQuadrature,
) -> Result<IntegratingFactorModes> {
    if s_max < 1 {
        return Err(Error::invalid("need at least one nonzero mode"));
    }
    if n_angles < 2 * s_max + 2 {
        return Err(Error::invalid(format!("{n_angles} directions cannot resolve {s_max} modes (need N ≥ 2S + 2)")));
    }
    FactorTable::new(medium, n_angles, quad)?.modes(site, sign, s_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryCurve;
    use crate::phantoms::{Phantom, Shape};
    use approx::assert_abs_diff_eq;

    fn uniform(c: f64) -> Medium {
        Medium::absorbing(BoundaryCurve::circle(1.0).unwrap(), Phantom::constant(c))
    }

    fn gaussian() -> Medium {
        Medium::absorbing(
            BoundaryCurve::circle(1.0).unwrap(),
            Phantom::constant(0.0).plus(Shape::Gaussian { cx: 0.0, cy: 0.0, width: 0.3 }, 1.0),
        )
    }

    #[test]
    fn divergent_beam_chords() {
        let m = uniform(1.0);
        for k in 0..8 {
            let xi = direction(k as f64 * 0.7);
            assert_abs_diff_eq!(divergent_beam(&m, [0.0, 0.0], xi, 100), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(divergent_beam(&m, [0.5, 0.0], [1.0, 0.0], 100), 0.5, epsilon = 1e-12);
        let x = [0.5, 0.0];
        let xi = [0.0, 1.0];
        let chord = -dot(x, xi) + (1.0 - dot(x, x) + dot(x, xi).powi(2)).sqrt();
        assert_abs_diff_eq!(divergent_beam(&m, x, xi, 100), chord, epsilon = 1e-12);
        assert_abs_diff_eq!(chord, 0.8660254037844386, epsilon = 1e-15);
    }

    #[test]
    fn divergent_beam_misses_support() {
        let m = Medium::absorbing(
            BoundaryCurve::circle(1.0).unwrap(),
            Phantom::constant(0.0).with(Shape::Disc { cx: 0.5, cy: 0.0, r: 0.2 }, 3.0),
        );
        assert_eq!(divergent_beam(&m, [0.0, 0.0], [0.0, 1.0], 100), 0.0);
        assert_eq!(divergent_beam(&m, [0.0, 0.0], [-1.0, 0.0], 100), 0.0);
        assert!(divergent_beam(&m, [0.0, 0.0], [1.0, 0.0], 100) > 0.0);
    }

    #[test]
    fn radon_profile_chords() {
        let m = uniform(1.0);
        let prof = radon_profile(&m, [1.0, 0.0], 100, 100).unwrap();
        // the samples sit at midpoints; check the analytic chord at each one
        for (t, v) in prof.offsets().into_iter().zip(prof.values()) {
            assert_abs_diff_eq!(*v, 2.0 * (1.0 - t * t).sqrt(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(radon_line(&m, 0.0, [0.0, 1.0], 100), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(radon_line(&m, 0.5, [0.0, 1.0], 100), 1.7320508075688772, epsilon = 1e-12);
        assert_eq!(radon_line(&m, 1.2, [0.0, 1.0], 100), 0.0);
        let zero = radon_profile(&uniform(0.0), [0.0, 1.0], 16, 10).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        assert!(radon_profile(&m, [1.0, 0.0], 7, 10).is_err());
    }

    #[test]
    fn factor_vanishes_without_attenuation() {
        let m = uniform(0.0);
        let h = integrating_factor_h(&m, [0.3, -0.2], direction(1.1), RayQuadrature::default()).unwrap();
        assert_eq!(h, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn factor_at_centre_of_uniform_disc() {
        let m = uniform(1.0);
        for k in 0..6 {
            let h = integrating_factor_h(&m, [0.0, 0.0], direction(k as f64), RayQuadrature::default()).unwrap();
            assert_abs_diff_eq!(h.re, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(h.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn negative_modes_are_small() {
        let m = gaussian();
        let modes = factor_modes(&m, [0.2, 0.1], FactorSign::Minus, 64, 360, RayQuadrature::default()).unwrap();
        assert!(modes.max_negative() < 1e-3, "{}", modes.max_negative());
        // the data are far from trivial
        assert!(modes.modes[1].norm() > 1e-2);
    }

    #[test]
    fn flipped_hilbert_sign_breaks_analyticity() {
        let m = gaussian();
        let table = FactorTable::new(&m, 360, RayQuadrature::default()).unwrap().with_flipped_hilbert_sign();
        let modes = table.modes([0.2, 0.1], FactorSign::Minus, 64).unwrap();
        assert!(modes.max_negative() > 1e-2, "{}", modes.max_negative());
    }

    #[test]
    fn uniform_disc_centre_modes() {
        let m = uniform(1.0);
        let a = factor_modes(&m, [0.0, 0.0], FactorSign::Minus, 8, 64, RayQuadrature::default()).unwrap();
        assert_abs_diff_eq!(a.modes[0].re, 1.0, epsilon = 1e-12);
        let zero = factor_modes(&uniform(0.0), [0.1, 0.4], FactorSign::Plus, 8, 64, RayQuadrature::default()).unwrap();
        assert_eq!(zero.modes[0], Complex64::new(1.0, 0.0));
        assert!(zero.modes[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn too_few_angles_rejected() {
        let m = uniform(0.5);
        assert!(factor_modes(&m, [0.0, 0.0], FactorSign::Minus, 10, 21, RayQuadrature::default()).is_err());
        assert!(factor_modes(&m, [0.0, 0.0], FactorSign::Minus, 10, 22, RayQuadrature::default()).is_ok());
    }

    /// `Σ_j α_j β_{s−j}` over `|j|, |s − j| ≤ S`.
    fn full_convolution(a: &IntegratingFactorModes, b: &IntegratingFactorModes, s: i64) -> Complex64 {
        let top = a.modes.len() as i64 - 1;
        (-top..=top).filter(|j| (s - j).abs() <= top).map(|j| a.mode(j) * b.mode(s - j)).sum()
    }

    #[test]
    fn alpha_beta_convolution_is_identity() {
        let shifted = Medium::absorbing(
            BoundaryCurve::circle(1.0).unwrap(),
            Phantom::constant(0.3).plus(Shape::Gaussian { cx: -0.3, cy: 0.2, width: 0.4 }, 2.0),
        );
        for m in [gaussian(), shifted] {
            let table = FactorTable::new(&m, 360, RayQuadrature::default()).unwrap();
            for x in [[0.2, 0.1], [-0.5, 0.3], [0.0, -0.8]] {
                let a = table.modes(x, FactorSign::Minus, 128).unwrap();
                let b = table.modes(x, FactorSign::Plus, 128).unwrap();
                for s in 0..=64 {
                    let target = if s == 0 { 1.0 } else { 0.0 };
                    let conv = full_convolution(&a, &b, s);
                    assert!((conv - target).norm() < 1e-6, "x={x:?} s={s}: {conv}");
                }
            }
        }
    }

    #[test]
    fn nonnegative_convolution_is_nearly_identity_for_smooth_attenuation() {
        let m = gaussian();
        let table = FactorTable::new(&m, 360, RayQuadrature::default()).unwrap();
        let x = [0.2, 0.1];
        let a = table.modes(x, FactorSign::Minus, 128).unwrap();
        let b = table.modes(x, FactorSign::Plus, 128).unwrap();
        for s in 0..=64 {
            let conv: Complex64 = (0..=s).map(|j| a.modes[j] * b.modes[s - j]).sum();
            let target = if s == 0 { 1.0 } else { 0.0 };
            assert!((conv - target).norm() < 1e-5, "s={s}: {conv}");
        }
    }

    #[test]
    fn negative_modes_decay_with_resolution() {
        let m = gaussian();
        let mut last = f64::INFINITY;
        for (n, q) in [(90, 25), (180, 50), (360, 100)] {
            let quad = RayQuadrature { line_points: q, hilbert_points: q };
            let modes = factor_modes(&m, [0.2, 0.1], FactorSign::Minus, 40, n, quad).unwrap();
            let worst = modes.max_negative();
            assert!(worst < last, "N={n}: {worst} !< {last}");
            last = worst;
        }
    }
}
