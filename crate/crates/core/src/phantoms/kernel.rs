use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Angular Fourier mode `p_m = g^{|m|} / 2π` of the 2D Henyey-Greenstein kernel.
pub fn hg_mode(g: f64, m: i64) -> Result<f64> {
    check_anisotropy(g)?;
    Ok(g.powi(m.unsigned_abs() as i32) / TAU)
}

/// Closed-form 2D Henyey-Greenstein kernel at `cos θ = ξ·ξ'`.
pub fn hg_kernel(g: f64, cos_theta: f64) -> Result<f64> {
    check_anisotropy(g)?;
    if !(-1.0..=1.0).contains(&cos_theta) {
        return Err(Error::invalid(format!("cos θ must lie in [-1, 1], got {cos_theta}")));
    }
    Ok((1.0 - g * g) / (TAU * (1.0 - 2.0 * g * cos_theta + g * g)))
}

/// Squared kernel discrepancy between the Henyey-Greenstein kernel and its
/// order-`M` truncation: `g^{2M+2} / (1 − g²)`.
pub fn truncation_error_sq(g: f64, m: usize) -> Result<f64> {
    check_anisotropy(g)?;
    if g == 0.0 {
        return Ok(0.0);
    }
    Ok(g.powi(2 * m as i32 + 2) / (1.0 - g * g))
}

fn check_anisotropy(g: f64) -> Result<()> {
    if !(0.0..1.0).contains(&g) {
        return Err(Error::invalid(format!("anisotropy g must lie in [0, 1), got {g}")));
    }
    Ok(())
}

/// Scattering kernel described by its real, even angular modes.
#[derive(Debug, Clone, PartialEq)]
pub enum ScatteringKernel {
    /// Henyey-Greenstein kernel, optionally truncated to modes `|m| ≤ truncation`.
    HenyeyGreenstein { g: f64, truncation: Option<usize> },
    /// Explicit table `p_0, p_1, ...`; modes beyond the table vanish.
    ModeTable(Vec<f64>),
}

impl ScatteringKernel {
    pub fn henyey_greenstein(g: f64) -> Result<Self> {
        check_anisotropy(g)?;
        Ok(Self::HenyeyGreenstein { g, truncation: None })
    }

    pub fn truncated(&self, order: usize) -> Self {
        match self {
            Self::HenyeyGreenstein { g, truncation } => Self::HenyeyGreenstein {
                g: *g,
                truncation: Some(truncation.map_or(order, |t| t.min(order))),
            },
            Self::ModeTable(modes) => Self::ModeTable(modes.iter().copied().take(order + 1).collect()),
        }
    }

    /// Mode `p_m`; symmetric in `m`.
    pub fn mode(&self, m: i64) -> f64 {
        let k = m.unsigned_abs() as usize;
        match self {
            Self::HenyeyGreenstein { g, truncation } => {
                if truncation.is_some_and(|t| k > t) {
                    0.0
                } else {
                    g.powi(k as i32) / TAU
                }
            }
            Self::ModeTable(modes) => modes.get(k).copied().unwrap_or(0.0),
        }
    }

    /// Highest nonzero mode, if finite.
    pub fn order(&self) -> Option<usize> {
        match self {
            Self::HenyeyGreenstein { g, truncation } => {
                if *g == 0.0 {
                    Some(0)
                } else {
                    *truncation
                }
            }
            Self::ModeTable(modes) => Some(modes.len().saturating_sub(1)),
        }
    }

    /// Kernel value at angle `θ` between incoming and outgoing directions.
    pub fn value(&self, theta: f64) -> f64 {
        match self {
            Self::HenyeyGreenstein { g, truncation: None } => {
                (1.0 - g * g) / (TAU * (1.0 - 2.0 * g * theta.cos() + g * g))
            }
            _ => {
                let order = self.order().unwrap_or(0) as i64;
                self.mode(0) + 2.0 * (1..=order).map(|m| self.mode(m) * (m as f64 * theta).cos()).sum::<f64>()
            }
        }
    }

    /// `∫_{S¹} p dσ = 2π p_0`.
    pub fn mass(&self) -> f64 {
        2.0 * PI * self.mode(0)
    }
}
