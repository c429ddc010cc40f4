//! Media and sources of the two reference experiments.

use super::{Medium, Phantom, ScatteringKernel, Shape};
use crate::mesh::BoundaryCurve;

pub const SCATTERING: f64 = 5.0;
pub const ANISOTROPY: f64 = 0.5;
/// Brain-region absorption of the Shepp-Logan medium.
pub const SHEPP_LOGAN_BASE: f64 = 0.1;

pub fn rect_r() -> Shape {
    Shape::Rect { x0: -0.25, x1: 0.5, y0: -0.15, y1: 0.15 }
}

pub fn ball_b1() -> Shape {
    Shape::Disc { cx: 0.5, cy: 0.0, r: 0.3 }
}

pub fn ball_b2() -> Shape {
    Shape::Disc { cx: -0.25, cy: 3f64.sqrt() / 4.0, r: 0.2 }
}

pub fn experiment1_absorption() -> Phantom {
    Phantom::constant(0.1).with(ball_b1(), 2.0).with(ball_b2(), 1.0)
}

pub fn experiment1_source() -> Phantom {
    Phantom::constant(0.0).with(rect_r(), 2.0).with(ball_b2(), 1.0)
}

pub fn experiment1_medium() -> Medium {
    Medium {
        domain: BoundaryCurve::circle(1.0).expect("unit circle"),
        mu_a: experiment1_absorption(),
        mu_s: Phantom::constant(SCATTERING),
        kernel: ScatteringKernel::HenyeyGreenstein { g: ANISOTROPY, truncation: None },
    }
}

pub fn experiment2_domain() -> BoundaryCurve {
    BoundaryCurve::ellipse(0.69, 0.92).expect("valid ellipse")
}

pub fn experiment2_source() -> Phantom {
    Phantom::constant(0.0)
        .with(Shape::Disc { cx: -0.4, cy: 0.0, r: 0.1 }, 2.0)
        .with(Shape::Disc { cx: 0.22, cy: 0.0, r: 0.05 }, 2.0)
        .with(Shape::Rect { x0: -0.2, x1: 0.2, y0: -0.705, y1: -0.505 }, 1.0)
}

pub fn experiment2_medium() -> Medium {
    Medium {
        domain: experiment2_domain(),
        mu_a: Phantom::shepp_logan(SHEPP_LOGAN_BASE),
        mu_s: Phantom::constant(SCATTERING),
        kernel: ScatteringKernel::HenyeyGreenstein { g: ANISOTROPY, truncation: None },
    }
}
