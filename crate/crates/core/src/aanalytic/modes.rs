use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::forward::BoundaryMeasurement;
use crate::rayxforms::IntegratingFactorModes;

/// What the sites of a [`ModeStack`] are.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteSet {
    BoundaryPoints,
    MeshVertices,
}

/// Complex Fourier modes `m_lo..=m_hi` of an angular function, one value per site.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeStack {
    m_lo: i64,
    sites: SiteSet,
    num_sites: usize,
    /// `modes[m − m_lo][site]`.
    modes: Vec<Vec<Complex64>>,
}

impl ModeStack {
    pub fn zeros(m_lo: i64, m_hi: i64, sites: SiteSet, num_sites: usize) -> Result<Self> {
        if m_hi < m_lo {
            return Err(Error::invalid(format!("empty mode range {m_lo}..={m_hi}")));
        }
        let count = (m_hi - m_lo + 1) as usize;
        Ok(Self { m_lo, sites, num_sites, modes: vec![vec![Complex64::new(0.0, 0.0); num_sites]; count] })
    }

    pub fn m_lo(&self) -> i64 {
        self.m_lo
    }

    pub fn m_hi(&self) -> i64 {
        self.m_lo + self.modes.len() as i64 - 1
    }

    pub fn contains(&self, m: i64) -> bool {
        (self.m_lo..=self.m_hi()).contains(&m)
    }

    pub fn sites(&self) -> SiteSet {
        self.sites
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    /// Values of mode `m` over all sites. Panics when `m` is out of range.
    pub fn mode(&self, m: i64) -> &[Complex64] {
        assert!(self.contains(m), "mode {m} outside {}..={}", self.m_lo, self.m_hi());
        &self.modes[(m - self.m_lo) as usize]
    }

    pub fn mode_mut(&mut self, m: i64) -> &mut [Complex64] {
        assert!(self.contains(m), "mode {m} outside {}..={}", self.m_lo, self.m_hi());
        let i = (m - self.m_lo) as usize;
        &mut self.modes[i]
    }

    pub fn get(&self, m: i64, site: usize) -> Complex64 {
        self.mode(m)[site]
    }

    /// Largest `|mode(−m) − conj(mode(m))|` over `m` with both in range;
    /// zero for stacks built from real angular data.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in 0..=self.m_hi() {
            if self.contains(m) && self.contains(-m) {
                for (a, b) in self.mode(-m).iter().zip(self.mode(m)) {
                    worst = worst.max((a - b.conj()).norm());
                }
            }
        }
        worst
    }
}

/// `I_{m,k} = (1/N) Σ_n I(ζ_k, ξ(θ_n)) e^{imθ_n}` for `m_lo ≤ m ≤ m_hi`.
pub fn fourier_modes(meas: &BoundaryMeasurement, m_lo: i64, m_hi: i64) -> Result<ModeStack> {
    let n = meas.num_angles();
    let reach = m_lo.unsigned_abs().max(m_hi.unsigned_abs()) as usize;
    if n < 2 * reach + 2 {
        return Err(Error::invalid(format!("{n} directions cannot resolve mode {reach} (need N ≥ 2S + 2)")));
    }
    let k = meas.num_points();
    let mut stack = ModeStack::zeros(m_lo, m_hi, SiteSet::BoundaryPoints, k)?;
    // the inverse transform carries the e^{+imθ} sign
    let ifft = FftPlanner::new().plan_fft_inverse(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for site in 0..k {
        for (b, &v) in buf.iter_mut().zip(meas.row(site)) {
            *b = Complex64::new(v, 0.0);
        }
        ifft.process(&mut buf);
        for m in m_lo..=m_hi {
            stack.mode_mut(m)[site] = buf[m.rem_euclid(n as i64) as usize] / n as f64;
        }
    }
    Ok(stack)
}

/// Modes `0..=S` of the measurement at every boundary point.
pub fn boundary_fourier_modes(meas: &BoundaryMeasurement, s_max: usize) -> Result<ModeStack> {
    fourier_modes(meas, 0, s_max as i64)
}

fn check_factors(factors: &[IntegratingFactorModes], sites: usize, need: usize) -> Result<()> {
    if factors.len() != sites {
        return Err(Error::invalid(format!("integrating factor given at {} sites, stack has {sites}", factors.len())));
    }
    if let Some(i) = factors.iter().position(|f| f.modes.len() <= need) {
        return Err(Error::invalid(format!("integrating factor at site {i} lacks mode {need}")));
    }
    Ok(())
}

/// `J_{m,k} = Σ_{0 ≤ s, s+m ≤ S} α_{s,k} I_{s+m,k}` for `M ≤ m ≤ S`.
pub fn modes_to_j(i_modes: &ModeStack, alpha: &[IntegratingFactorModes], m_min: usize, s_max: usize) -> Result<ModeStack> {
    if s_max < m_min + 3 {
        return Err(Error::invalid(format!("S = {s_max} must be at least M + 3 = {}", m_min + 3)));
    }
    convolve(i_modes, alpha, m_min as i64, s_max as i64)
}

/// `I_m = Σ_{0 ≤ s, s+m ≤ S_eff} β_s J_{s+m}` for `m_lo ≤ m ≤ S_eff`.
pub fn modes_to_i(j_modes: &ModeStack, beta: &[IntegratingFactorModes], m_lo: usize, s_eff: usize) -> Result<ModeStack> {
    convolve(j_modes, beta, m_lo as i64, s_eff as i64)
}

fn convolve(input: &ModeStack, factors: &[IntegratingFactorModes], lo: i64, hi: i64) -> Result<ModeStack> {
    if lo < 0 || !input.contains(lo) || !input.contains(hi) {
        return Err(Error::invalid(format!(
            "modes {lo}..={hi} not available (stack holds {}..={})",
            input.m_lo(),
            input.m_hi()
        )));
    }
    check_factors(factors, input.num_sites(), (hi - lo) as usize)?;
    let mut out = ModeStack::zeros(lo, hi, input.sites(), input.num_sites())?;
    for m in lo..=hi {
        let row = out.mode_mut(m);
        for (site, f) in factors.iter().enumerate() {
            row[site] = (0..=hi - m).map(|s| f.modes[s as usize] * input.get(s + m, site)).sum();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryCurve;
    use crate::rayxforms::FactorSign;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn measurement(f: impl Fn(usize, f64) -> f64) -> BoundaryMeasurement {
        let mut m = BoundaryMeasurement::zeros(&BoundaryCurve::circle(1.0).unwrap(), 5, 32).unwrap();
        for k in 0..5 {
            for n in 0..32 {
                m.values[k * 32 + n] = f(k, m.grid.angle(n));
            }
        }
        m
    }

    fn synthetic_factor(sign: FactorSign, coeffs: Vec<Complex64>) -> IntegratingFactorModes {
        let s = coeffs.len() - 1;
        IntegratingFactorModes { site: [0.0, 0.0], sign, n_angles: 2 * s + 2, modes: coeffs, negative: vec![Complex64::new(0.0, 0.0); s] }
    }

    fn delta(s: usize) -> IntegratingFactorModes {
        let mut c = vec![Complex64::new(0.0, 0.0); s + 1];
        c[0] = Complex64::new(1.0, 0.0);
        synthetic_factor(FactorSign::Minus, c)
    }

    fn random_stack(rng: &mut ChaCha8Rng, lo: i64, hi: i64, sites: usize) -> ModeStack {
        let mut st = ModeStack::zeros(lo, hi, SiteSet::MeshVertices, sites).unwrap();
        for m in lo..=hi {
            for v in st.mode_mut(m) {
                *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        st
    }

    #[test]
    fn constant_and_cosine_data() {
        let st = boundary_fourier_modes(&measurement(|_, _| 2.5), 6).unwrap();
        for k in 0..5 {
            assert_abs_diff_eq!(st.get(0, k).re, 2.5, epsilon = 1e-14);
            for m in 1..=6 {
                assert!(st.get(m, k).norm() < 1e-14);
            }
        }
        let st = boundary_fourier_modes(&measurement(|_, t| t.cos()), 6).unwrap();
        assert_abs_diff_eq!(st.get(1, 3).re, 0.5, epsilon = 1e-14);
        assert!(st.get(1, 3).im.abs() < 1e-14);
        assert!(st.get(2, 3).norm() < 1e-14);
    }

    #[test]
    fn matches_direct_dft_and_is_conjugate_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vals: Vec<f64> = (0..5 * 32).map(|_| rng.gen_range(0.0..1.0)).collect();
        let meas = measurement(|k, t| vals[k * 32 + (t / std::f64::consts::TAU * 32.0).round() as usize]);
        let st = fourier_modes(&meas, -15, 15).unwrap();
        for k in 0..5 {
            for m in -15i64..=15 {
                let direct: Complex64 = (0..32)
                    .map(|n| Complex64::from_polar(meas.value(k, n), m as f64 * meas.grid.angle(n)))
                    .sum::<Complex64>()
                    / 32.0;
                assert!((st.get(m, k) - direct).norm() < 1e-12);
            }
        }
        assert!(st.conjugate_symmetry_defect() < 1e-12);
        assert!(fourier_modes(&meas, 0, 16).is_err());
    }

    #[test]
    fn trivial_factor_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let i = random_stack(&mut rng, 0, 10, 3);
        let j = modes_to_j(&i, &vec![delta(10); 3], 2, 10).unwrap();
        for m in 2..=10 {
            assert_eq!(j.mode(m), i.mode(m));
        }
    }

    #[test]
    fn one_term_factor_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let i = random_stack(&mut rng, 0, 10, 2);
        let a = Complex64::new(0.3, -1.2);
        let mut c = vec![Complex64::new(0.0, 0.0); 11];
        c[1] = a;
        let j = modes_to_j(&i, &vec![synthetic_factor(FactorSign::Minus, c); 2], 1, 10).unwrap();
        for m in 1..10 {
            for k in 0..2 {
                assert!((j.get(m, k) - a * i.get(m + 1, k)).norm() < 1e-15);
            }
        }
        assert_eq!(j.get(10, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn inverse_factors_compose_to_identity() {
        // e^{∓a e^{iθ}} have only nonnegative modes (∓a)^s/s!, whose product is exactly 1
        let s_max = 16usize;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sites = 4;
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        for _ in 0..sites {
            let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let series = |sgn: f64| {
                let mut c = vec![Complex64::new(1.0, 0.0)];
                for s in 1..=s_max {
                    let prev = c[s - 1];
                    c.push(prev * a * sgn / s as f64);
                }
                c
            };
            alpha.push(synthetic_factor(FactorSign::Minus, series(-1.0)));
            beta.push(synthetic_factor(FactorSign::Plus, series(1.0)));
        }
        let i = random_stack(&mut rng, 0, s_max as i64, sites);
        let j = modes_to_j(&i, &alpha, 0, s_max).unwrap();
        let back = modes_to_i(&j, &beta, 0, s_max).unwrap();
        for m in 0..=(s_max / 2) as i64 {
            for k in 0..sites {
                assert!((back.get(m, k) - i.get(m, k)).norm() < 1e-12);
            }
        }
        let i_again = modes_to_j(&modes_to_i(&i, &beta, 0, s_max).unwrap(), &alpha, 0, s_max).unwrap();
        for m in 0..=(s_max / 2) as i64 {
            for k in 0..sites {
                assert!((i_again.get(m, k) - i.get(m, k)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn argument_checks() {
        let st = ModeStack::zeros(0, 8, SiteSet::BoundaryPoints, 2).unwrap();
        assert!(modes_to_j(&st, &vec![delta(8); 2], 6, 8).is_err());
        assert!(modes_to_j(&st, &vec![delta(8); 1], 2, 8).is_err());
        assert!(modes_to_j(&st, &vec![delta(4); 2], 2, 8).is_err());
        assert!(ModeStack::zeros(3, 2, SiteSet::BoundaryPoints, 1).is_err());
    }
}
