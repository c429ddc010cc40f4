use std::f64::consts::TAU;

use super::{Phantom, ScatteringKernel};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::mesh::BoundaryCurve;

/// Optical coefficients at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub mu_a: f64,
    pub mu_s: f64,
    pub mu_t: f64,
}

/// Absorbing, scattering medium occupying a convex domain. Coefficients are
/// extended by zero outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    pub domain: BoundaryCurve,
    pub mu_a: Phantom,
    pub mu_s: Phantom,
    pub kernel: ScatteringKernel,
}

impl Medium {
    pub fn new(domain: BoundaryCurve, mu_a: Phantom, mu_s: Phantom, kernel: ScatteringKernel) -> Result<Self> {
        let r = domain.circumradius();
        for (name, p) in [("mu_a", &mu_a), ("mu_s", &mu_s)] {
            if p.sampled_min(r, 200) < 0.0 {
                return Err(Error::invalid(format!("{name} takes negative values")));
            }
        }
        Ok(Self { domain, mu_a, mu_s, kernel })
    }

    /// Non-scattering medium with the given absorption.
    pub fn absorbing(domain: BoundaryCurve, mu_a: Phantom) -> Self {
        Self {
            domain,
            mu_a,
            mu_s: Phantom::constant(0.0),
            kernel: ScatteringKernel::HenyeyGreenstein { g: 0.0, truncation: None },
        }
    }

    pub fn evaluate(&self, p: Point) -> Coefficients {
        if !self.domain.contains(p) {
            return Coefficients { mu_a: 0.0, mu_s: 0.0, mu_t: 0.0 };
        }
        let mu_a = self.mu_a.eval(p);
        let mu_s = self.mu_s.eval(p);
        Coefficients { mu_a, mu_s, mu_t: mu_a + mu_s }
    }

    #[inline]
    pub fn mu_t(&self, p: Point) -> f64 {
        if !self.domain.contains(p) {
            return 0.0;
        }
        self.mu_a.eval(p) + self.mu_s.eval(p)
    }

    /// `μt − 2π μs p_m` at `p`.
    pub fn reduced_attenuation(&self, p: Point, m: i64) -> f64 {
        let c = self.evaluate(p);
        c.mu_t - TAU * c.mu_s * self.kernel.mode(m)
    }
}

/// Free-function form of [`Medium::evaluate`].
pub fn evaluate_medium(medium: &Medium, p: Point) -> Coefficients {
    medium.evaluate(p)
}
