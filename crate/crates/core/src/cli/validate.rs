//! Self-check suite run by `rte validate`: closed-form oracles for every
//! numerical building block, sized to finish in a few seconds.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::aanalytic::{cauchy_interior, BoundaryQuadrature, ModeStack, SiteSet, WeightRule};
use crate::error::Result;
use crate::forward::{forward_measurement, total_outflow, ForwardParams};
use crate::mesh::{generate_mesh, BoundaryCurve};
use crate::phantoms::{truncation_error_sq, Medium, Phantom, ScatteringKernel, Shape};
use crate::rayxforms::{divergent_beam, FactorSign, FactorTable, IntegratingFactorModes, MidpointSamples, RayQuadrature};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Observed error (or the quantity bounded by `threshold`).
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value < self.threshold
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Flips the Hilbert-term sign in the integrating factor; the analyticity
    /// checks must then fail.
    pub flip_hilbert_sign: bool,
}

fn unit_disc() -> BoundaryCurve {
    BoundaryCurve::circle(1.0).expect("unit circle")
}

fn chord_checks() -> Vec<Check> {
    let m = Medium::absorbing(unit_disc(), Phantom::constant(0.7));
    let centre = (divergent_beam(&m, [0.0, 0.0], [1.0, 0.0], 100) - 0.7).abs();
    let exact = 0.7 * (0.91f64.sqrt() - 0.4);
    let offset = (divergent_beam(&m, [0.3, 0.4], [0.0, 1.0], 100) - exact).abs();
    vec![
        Check { name: "chord length from the centre", value: centre, threshold: 1e-12 },
        Check { name: "chord length from an offset point", value: offset, threshold: 1e-12 },
    ]
}

fn kernel_check() -> Result<Check> {
    let v = truncation_error_sq(0.5, 6)?;
    Ok(Check { name: "kernel truncation tail", value: (v - 0.5f64.powi(14) / 0.75).abs(), threshold: 1e-12 })
}

fn hilbert_check() -> Result<Check> {
    // (1/π) PV ∫_{-1}^{1} (1 − t²)/(s − t) dt = ((1 − s²) ln|(1 + s)/(1 − s)| + 2s)/π
    let s: f64 = 0.3;
    let exact = ((1.0 - s * s) * ((1.0 + s) / (1.0 - s)).abs().ln() + 2.0 * s) / PI;
    let f = MidpointSamples::from_fn(-1.0, 1.0, 400, |t| 1.0 - t * t)?;
    Ok(Check { name: "principal-value Hilbert transform", value: (f.hilbert(s) - exact).abs(), threshold: 1e-3 })
}

fn full_convolution(a: &IntegratingFactorModes, b: &IntegratingFactorModes, s: i64) -> Complex64 {
    let top = a.modes.len() as i64 - 1;
    (-top..=top).filter(|j| (s - j).abs() <= top).map(|j| a.mode(j) * b.mode(s - j)).sum()
}

fn factor_checks(opts: ValidateOptions) -> Result<Vec<Check>> {
    let medium = Medium::absorbing(unit_disc(), Phantom::constant(0.0).plus(Shape::Gaussian { cx: 0.0, cy: 0.0, width: 0.3 }, 1.0));
    let mut table = FactorTable::new(&medium, 360, RayQuadrature::default())?;
    if opts.flip_hilbert_sign {
        table = table.with_flipped_hilbert_sign();
    }
    let x = [0.2, 0.1];
    let alpha = table.modes(x, FactorSign::Minus, 128)?;
    let beta = table.modes(x, FactorSign::Plus, 128)?;
    let negative = alpha.negative[..64].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let identity = (0..=64)
        .map(|s| (full_convolution(&alpha, &beta, s) - if s == 0 { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);
    Ok(vec![
        Check { name: "negative modes of the integrating factor", value: negative, threshold: 1e-3 },
        Check { name: "alpha-beta convolution identity", value: identity, threshold: 1e-6 },
    ])
}

fn cauchy_check() -> Result<Check> {
    let curve = BoundaryCurve::ellipse(0.69, 0.92)?;
    let args = curve.arc_length_arguments(512);
    let pts = args.iter().map(|&w| curve.point(w)).collect();
    let ders = args.iter().map(|&w| curve.derivative(w)).collect();
    let quad = BoundaryQuadrature::new(&args, pts, ders, WeightRule::Riemann)?;
    let c = Complex64::new(0.7, -0.2);
    let mut stack = ModeStack::zeros(0, 6, SiteSet::BoundaryPoints, quad.len())?;
    stack.mode_mut(0).iter_mut().for_each(|v| *v = c);
    let mut worst: f64 = 0.0;
    for z in [[0.0, 0.0], [0.1, 0.3], [-0.3, -0.5], [0.4, 0.2], [-0.2, 0.6]] {
        worst = worst.max((cauchy_interior(&stack, &quad, z, 0, 6)? - c).norm());
    }
    Ok(Check { name: "Cauchy integral of a constant", value: worst, threshold: 1e-3 })
}

fn conservation_check() -> Result<Check> {
    let medium = Medium::new(unit_disc(), Phantom::constant(0.0), Phantom::constant(1.0), ScatteringKernel::henyey_greenstein(0.5)?)?;
    let source = Phantom::constant(0.0).with(Shape::Disc { cx: 0.2, cy: -0.1, r: 0.4 }, 1.0);
    let mesh = generate_mesh(&unit_disc(), 0.06)?;
    let params = ForwardParams { n_dir: 32, tol: 1e-9, max_iters: 5000, k_points: 256, n_angles: 64, ..Default::default() };
    let (_, meas) = forward_measurement(&mesh, &medium, &source, &params)?;
    let expected = TAU * PI * 0.16;
    Ok(Check { name: "particle conservation without absorption", value: (total_outflow(&meas) / expected - 1.0).abs(), threshold: 0.02 })
}

pub fn run_validation(opts: ValidateOptions) -> Result<Vec<Check>> {
    let mut checks = chord_checks();
    checks.push(kernel_check()?);
    checks.push(hilbert_check()?);
    checks.extend(factor_checks(opts)?);
    checks.push(cauchy_check()?);
    checks.push(conservation_check()?);
    Ok(checks)
}

pub fn validation_table(checks: &[Check]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<44} {:>12} {:>10}  result", "check", "value", "limit");
    for c in checks {
        let verdict = if c.passed() { "pass" } else { "FAIL" };
        let _ = writeln!(out, "{:<44} {:>12.3e} {:>10.1e}  {verdict}", c.name, c.value, c.threshold);
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let _ = writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let checks = run_validation(ValidateOptions::default()).unwrap();
        let table = validation_table(&checks);
        assert!(checks.iter().all(Check::passed), "{table}");
    }

    #[test]
    fn sign_flip_is_caught() {
        let checks = factor_checks(ValidateOptions { flip_hilbert_sign: true }).unwrap();
        assert!(!checks[0].passed(), "{checks:?}");
    }
}
