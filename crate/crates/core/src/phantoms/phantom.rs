use std::fmt;

use crate::error::{Error, Result};
use crate::geom::Point;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Disc { cx: f64, cy: f64, r: f64 },
    /// Open axis-aligned rectangle `(x0, x1) × (y0, y1)`.
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// Ellipse with semi-axes `a`, `b`, rotated counter-clockwise by `angle_deg`.
    Ellipse { cx: f64, cy: f64, a: f64, b: f64, angle_deg: f64 },
    /// Smooth bump `exp(-|x - c|² / width²)`.
    Gaussian { cx: f64, cy: f64, width: f64 },
    /// Modified Shepp-Logan head phantom, rescaled so the brain region has unit value.
    SheppLogan,
}

/// How a layer combines with what is below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Blend {
    /// Overwrite inside the shape (painter's order).
    Set,
    /// Add `value × indicator` (or `value × bump` for smooth shapes).
    Add,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub shape: Shape,
    pub value: f64,
    pub blend: Blend,
}

/// Piecewise-constant (plus optional smooth bumps) scalar field in the plane.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Phantom {
    pub background: f64,
    pub layers: Vec<Layer>,
}

/// `(intensity, a, b, cx, cy, angle°)` of the modified Shepp-Logan ellipses,
/// with the tiny bottom ellipses placed as in the head-phantom figure used for
/// the ellipse-domain experiment.
pub const SHEPP_LOGAN_ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.605, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
];

/// Value of the unscaled modified Shepp-Logan phantom in the brain region.
const SHEPP_LOGAN_BRAIN: f64 = 0.2;

fn in_ellipse(p: Point, cx: f64, cy: f64, a: f64, b: f64, angle_deg: f64) -> bool {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let (dx, dy) = (p[0] - cx, p[1] - cy);
    let u = c * dx + s * dy;
    let v = -s * dx + c * dy;
    (u / a).powi(2) + (v / b).powi(2) < 1.0
}

impl Shape {
    /// Shape profile at `p`: indicator for sharp shapes, bump value for smooth ones.
    pub fn profile(&self, p: Point) -> f64 {
        match *self {
            Shape::Disc { cx, cy, r } => ((p[0] - cx).powi(2) + (p[1] - cy).powi(2) < r * r) as u8 as f64,
            Shape::Rect { x0, x1, y0, y1 } => (x0 < p[0] && p[0] < x1 && y0 < p[1] && p[1] < y1) as u8 as f64,
            Shape::Ellipse { cx, cy, a, b, angle_deg } => in_ellipse(p, cx, cy, a, b, angle_deg) as u8 as f64,
            Shape::Gaussian { cx, cy, width } => (-((p[0] - cx).powi(2) + (p[1] - cy).powi(2)) / (width * width)).exp(),
            // the intensities cancel to zero in the ventricles; clamp the rounding residue
            Shape::SheppLogan => {
                SHEPP_LOGAN_ELLIPSES
                    .iter()
                    .filter(|e| in_ellipse(p, e.3, e.4, e.1, e.2, e.5))
                    .map(|e| e.0)
                    .sum::<f64>()
                    .max(0.0)
                    / SHEPP_LOGAN_BRAIN
            }
        }
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self, Shape::Gaussian { .. })
    }

    /// Identifier of the region containing `p`, used to detect interfaces.
    fn region(&self, p: Point) -> u32 {
        match self {
            Shape::SheppLogan => SHEPP_LOGAN_ELLIPSES
                .iter()
                .enumerate()
                .filter(|(_, e)| in_ellipse(p, e.3, e.4, e.1, e.2, e.5))
                .fold(0u32, |acc, (i, _)| acc | (1 << i)),
            s => (s.profile(p) > 0.0) as u32,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Shape::Disc { r, .. } => r > 0.0,
            Shape::Rect { x0, x1, y0, y1 } => x0 < x1 && y0 < y1,
            Shape::Ellipse { a, b, .. } => a > 0.0 && b > 0.0,
            Shape::Gaussian { width, .. } => width > 0.0,
            Shape::SheppLogan => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("degenerate shape `{self}`")))
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Disc { cx, cy, r } => write!(f, "disc {cx} {cy} {r}"),
            Shape::Rect { x0, x1, y0, y1 } => write!(f, "rect {x0} {x1} {y0} {y1}"),
            Shape::Ellipse { cx, cy, a, b, angle_deg } => write!(f, "ellipse {cx} {cy} {a} {b} {angle_deg}"),
            Shape::Gaussian { cx, cy, width } => write!(f, "gaussian {cx} {cy} {width}"),
            Shape::SheppLogan => write!(f, "shepp-logan"),
        }
    }
}

impl Layer {
    /// Parses `<shape> <params...> <value>`, e.g. `disc 0.5 0 0.3 2`.
    pub fn parse(spec: &str, blend: Blend) -> Result<Self> {
        let toks: Vec<&str> = spec.split_whitespace().collect();
        let (&kind, rest) = toks.split_first().ok_or_else(|| Error::invalid("empty shape"))?;
        let nums = rest
            .iter()
            .map(|t| t.parse::<f64>().map_err(|_| Error::invalid(format!("bad number `{t}` in shape `{spec}`"))))
            .collect::<Result<Vec<f64>>>()?;
        let want = |n: usize| -> Result<()> {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::invalid(format!("shape `{kind}` expects {n} numbers, got {} in `{spec}`", nums.len())))
            }
        };
        let shape = match kind {
            "disc" => {
                want(4)?;
                Shape::Disc { cx: nums[0], cy: nums[1], r: nums[2] }
            }
            "rect" => {
                want(5)?;
                Shape::Rect { x0: nums[0], x1: nums[1], y0: nums[2], y1: nums[3] }
            }
            "ellipse" => {
                want(6)?;
                Shape::Ellipse { cx: nums[0], cy: nums[1], a: nums[2], b: nums[3], angle_deg: nums[4] }
            }
            "gaussian" => {
                want(4)?;
                Shape::Gaussian { cx: nums[0], cy: nums[1], width: nums[2] }
            }
            "shepp-logan" => {
                want(1)?;
                Shape::SheppLogan
            }
            other => return Err(Error::invalid(format!("unknown shape `{other}`"))),
        };
        shape.validate()?;
        let value = *nums.last().unwrap();
        if !value.is_finite() {
            return Err(Error::invalid(format!("non-finite value in shape `{spec}`")));
        }
        Ok(Layer { shape, value, blend })
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.shape, self.value)
    }
}

impl Phantom {
    pub fn constant(value: f64) -> Self {
        Self { background: value, layers: Vec::new() }
    }

    pub fn with(mut self, shape: Shape, value: f64) -> Self {
        self.layers.push(Layer { shape, value, blend: Blend::Set });
        self
    }

    pub fn plus(mut self, shape: Shape, value: f64) -> Self {
        self.layers.push(Layer { shape, value, blend: Blend::Add });
        self
    }

    /// Modified Shepp-Logan phantom scaled so its brain region equals `base`.
    pub fn shepp_logan(base: f64) -> Self {
        Self::constant(0.0).plus(Shape::SheppLogan, base)
    }

    pub fn eval(&self, p: Point) -> f64 {
        let mut v = self.background;
        for layer in &self.layers {
            let w = layer.shape.profile(p);
            match layer.blend {
                Blend::Set => {
                    if w > 0.0 {
                        v = if layer.shape.is_smooth() { layer.value * w } else { layer.value };
                    }
                }
                Blend::Add => v += layer.value * w,
            }
        }
        v
    }

    /// True when no sharp interface separates any two of `points`.
    pub fn is_continuous_on(&self, points: &[Point]) -> bool {
        self.layers.iter().filter(|l| !l.shape.is_smooth()).all(|l| {
            let first = l.shape.region(points[0]);
            points[1..].iter().all(|&p| l.shape.region(p) == first)
        })
    }

    /// Minimum over a uniform `(n+1)²` grid on `[-r, r]²`.
    pub fn sampled_min(&self, r: f64, n: usize) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..=n {
            for j in 0..=n {
                let p = [-r + 2.0 * r * i as f64 / n as f64, -r + 2.0 * r * j as f64 / n as f64];
                m = m.min(self.eval(p));
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn painter_order() {
        let p = Phantom::constant(0.1)
            .with(Shape::Disc { cx: 0.5, cy: 0.0, r: 0.3 }, 2.0)
            .with(Shape::Rect { x0: -0.25, x1: 0.5, y0: -0.15, y1: 0.15 }, 7.0);
        assert_eq!(p.eval([0.7, 0.0]), 2.0);
        assert_eq!(p.eval([0.4, 0.0]), 7.0);
        assert_eq!(p.eval([-0.8, 0.0]), 0.1);
    }

    #[test]
    fn additive_bump() {
        let p = Phantom::constant(0.1).plus(Shape::Gaussian { cx: 0.0, cy: 0.0, width: 0.3 }, 1.0);
        assert!((p.eval([0.0, 0.0]) - 1.1).abs() < 1e-15);
        assert!((p.eval([0.3, 0.0]) - (0.1 + (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn shepp_logan_levels() {
        let p = Phantom::shepp_logan(0.1);
        // brain region
        assert!((p.eval([0.0, -0.3]) - 0.1).abs() < 1e-12);
        // skull ring
        assert!((p.eval([0.0, 0.9]) - 0.5).abs() < 1e-12);
        // ventricle: 0.2 - 0.2 = 0
        assert!(p.eval([0.22, 0.0]).abs() < 1e-12);
        assert!(p.sampled_min(1.0, 200) >= -1e-12);
    }

    #[test]
    fn parse_layers() {
        let l = Layer::parse("disc 0.5 0 0.3 2", Blend::Set).unwrap();
        assert_eq!(l.shape, Shape::Disc { cx: 0.5, cy: 0.0, r: 0.3 });
        assert_eq!(l.value, 2.0);
        assert_eq!(Layer::parse(&l.to_string(), Blend::Set).unwrap(), l);
        assert!(Layer::parse("disc 0 0 -1 2", Blend::Set).is_err());
        assert!(Layer::parse("disc 0 0 2", Blend::Set).is_err());
        assert!(Layer::parse("blob 0 0 2", Blend::Set).is_err());
        let sl = Layer::parse("shepp-logan 0.1", Blend::Add).unwrap();
        assert_eq!(sl.shape, Shape::SheppLogan);
    }

    #[test]
    fn continuity_mask() {
        let p = Phantom::constant(0.0).with(Shape::Disc { cx: 0.0, cy: 0.0, r: 0.5 }, 1.0);
        assert!(p.is_continuous_on(&[[0.0, 0.0], [0.1, 0.0], [0.0, 0.1]]));
        assert!(!p.is_continuous_on(&[[0.45, 0.0], [0.55, 0.0], [0.5, 0.1]]));
        let g = Phantom::constant(0.0).plus(Shape::Gaussian { cx: 0.0, cy: 0.0, width: 0.3 }, 1.0);
        assert!(g.is_continuous_on(&[[0.45, 0.0], [0.55, 0.0], [0.5, 0.1]]));
    }
}
