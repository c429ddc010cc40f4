use super::measurement::BoundaryMeasurement;
use crate::error::Result;
use crate::geom::{add_scaled, Point};
use crate::mesh::BoundaryCurve;
use crate::phantoms::{Medium, Phantom};

/// Attenuated ray transform `∫_0^L q(ζ − tξ) exp(−∫_0^t μt(ζ − rξ) dr) dt`
/// along the chord ending at `zeta`, by the midpoint rule with `quad_points`
/// cells. Scattering is ignored.
pub fn ballistic_forward(medium: &Medium, source: &Phantom, zeta: Point, xi: Point, quad_points: usize) -> f64 {
    let back = [-xi[0], -xi[1]];
    let (t0, t1) = match medium.domain.line_interval(zeta, back) {
        Some((t0, t1)) if t1 > t0.max(0.0) => (t0.max(0.0), t1),
        _ => return 0.0,
    };
    let n = quad_points.max(1);
    let dt = (t1 - t0) / n as f64;
    let mut optical_depth = 0.0;
    let mut total = 0.0;
    for i in 0..n {
        let p = add_scaled(zeta, t0 + (i as f64 + 0.5) * dt, back);
        let mu = medium.mu_t(p);
        // depth to the midpoint: full preceding cells plus half of this one
        let depth = optical_depth + 0.5 * mu * dt;
        total += source.eval(p) * (-depth).exp() * dt;
        optical_depth += mu * dt;
    }
    total
}

/// Boundary measurement of the ballistic model at `k_points × n_angles`.
pub fn ballistic_measurement(
    curve: &BoundaryCurve,
    medium: &Medium,
    source: &Phantom,
    k_points: usize,
    n_angles: usize,
    quad_points: usize,
) -> Result<BoundaryMeasurement> {
    let mut meas = BoundaryMeasurement::zeros(curve, k_points, n_angles)?;
    for k in 0..k_points {
        for n in 0..n_angles {
            if meas.is_outgoing(k, n) {
                let v = ballistic_forward(medium, source, meas.points[k], meas.grid.direction(n), quad_points);
                meas.values[k * n_angles + n] = v.max(0.0);
            }
        }
    }
    Ok(meas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{direction, dot};
    use approx::assert_relative_eq;

    fn disc(mu: f64) -> Medium {
        Medium::absorbing(BoundaryCurve::circle(1.0).unwrap(), Phantom::constant(mu))
    }

    #[test]
    fn transparent_chord_length() {
        let m = disc(0.0);
        for (w, th) in [(0.3, 0.1), (2.0, 2.5), (4.0, 3.2)] {
            let zeta = direction(w);
            let xi = direction(th);
            let v = ballistic_forward(&m, &Phantom::constant(1.0), zeta, xi, 50);
            assert_relative_eq!(v, 2.0 * dot(zeta, xi), max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_source() {
        let m = disc(1.3);
        assert_eq!(ballistic_forward(&m, &Phantom::constant(0.0), [1.0, 0.0], [1.0, 0.0], 100), 0.0);
    }

    #[test]
    fn constant_attenuation_through_the_centre() {
        let c = 1.7;
        let v = ballistic_forward(&disc(c), &Phantom::constant(1.0), [0.0, 1.0], [0.0, 1.0], 2000);
        let exact = (1.0 - (-c * 2.0f64).exp()) / c;
        assert_relative_eq!(v, exact, max_relative = 1e-6);
    }

    #[test]
    fn incoming_directions_are_zero() {
        let curve = BoundaryCurve::circle(1.0).unwrap();
        let meas = ballistic_measurement(&curve, &disc(0.5), &Phantom::constant(1.0), 16, 16, 20).unwrap();
        meas.validate().unwrap();
        for k in 0..16 {
            for n in 0..16 {
                assert_eq!(meas.value(k, n) > 0.0, meas.is_outgoing(k, n));
            }
        }
    }
}
