//! Gauss-Hermite solutions of the free Schrödinger equation
//! `i∂ₜΨ + (2m_cl)⁻¹ ∂²_Q Ψ = 0` for the collective coordinate.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::params::ModelParams;
use crate::C64;

/// Probabilists' Hermite polynomials `He_0 ..= He_n` at `x`.
pub fn hermite_all(n: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(1.0);
    if n >= 1 {
        h.push(x);
    }
    for k in 1..n {
        let next = x * h[k] - k as f64 * h[k - 1];
        h.push(next);
    }
    h
}

pub fn hermite(n: usize, x: f64) -> f64 {
    hermite_all(n, x)[n]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacket {
    pub n: usize,
    pub sigma: f64,
    pub tau: f64,
    pub m_cl: f64,
}

impl WavePacket {
    pub fn new(n: usize, sigma: f64, p: &ModelParams) -> Result<Self> {
        Self::with_mass(n, sigma, p.m_cl())
    }

    pub fn with_mass(n: usize, sigma: f64, m_cl: f64) -> Result<Self> {
        require(sigma.is_finite() && sigma > 0.0, || format!("width must be positive, got {sigma}"))?;
        require(m_cl.is_finite() && m_cl > 0.0, || format!("mass must be positive, got {m_cl}"))?;
        Ok(Self { n, sigma, tau: 2.0 * sigma * sigma * m_cl, m_cl })
    }

    pub fn with_index(&self, n: usize) -> Self {
        Self { n, ..*self }
    }

    /// `σ(t) = σ √(1 + t²/τ²)`.
    pub fn width(&self, t: f64) -> f64 {
        self.sigma * (1.0 + (t / self.tau).powi(2)).sqrt()
    }

    /// Time-dependent prefactor; the phase `n·arg(t + iτ)` is kept continuous in `t`.
    fn amplitude(&self, t: f64) -> C64 {
        let n = self.n as f64;
        let norm = 1.0 / (factorial(self.n) * (2.0 * PI).sqrt()).sqrt() * (self.tau / self.sigma).sqrt();
        let root = C64::new(t, -self.tau).sqrt();
        let phase = n * self.tau.atan2(t) - (2.0 * n + 1.0) * PI / 4.0;
        norm / root * C64::from_polar(1.0, phase)
    }

    /// Gaussian exponent `a(t)` with `χ ∝ exp(a Q²)`; equals `−m_cl / (2(τ + it))`.
    fn exponent(&self, t: f64) -> C64 {
        -self.m_cl / (2.0 * C64::new(self.tau, t))
    }

    pub fn eval(&self, t: f64, q: f64) -> C64 {
        let s = self.width(t);
        self.amplitude(t) * (self.exponent(t) * q * q).exp() * hermite(self.n, q / s)
    }

    /// `(χ, ∂_Q² χ, ∂ₜ χ)` from closed-form derivatives.
    pub fn derivatives(&self, t: f64, q: f64) -> (C64, C64, C64) {
        let n = self.n;
        let s = self.width(t);
        let y = q / s;
        let he = hermite_all(n, y);
        let h0 = he[n];
        let h1 = if n >= 1 { n as f64 * he[n - 1] } else { 0.0 };
        let h2 = if n >= 2 { (n * (n - 1)) as f64 * he[n - 2] } else { 0.0 };
        let amp = self.amplitude(t);
        let a = self.exponent(t);
        let g = (a * q * q).exp();
        let chi = amp * g * h0;
        let d_qq = amp * g * ((2.0 * a + 4.0 * a * a * q * q) * h0 + 4.0 * a * q * h1 / s + h2 / (s * s));
        let ds = self.sigma * self.sigma * t / (self.tau * self.tau * s);
        let dtheta = -self.tau / (t * t + self.tau * self.tau);
        let damp = amp * (-0.5 / C64::new(t, -self.tau) + C64::new(0.0, n as f64 * dtheta));
        let da = C64::new(0.0, self.m_cl) / (2.0 * C64::new(self.tau, t).powi(2));
        let d_t = damp * g * h0 + amp * da * q * q * g * h0 - amp * g * h1 * q * ds / (s * s);
        (chi, d_qq, d_t)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn chi_eval(wp: &WavePacket, t: f64, q: f64) -> C64 {
    wp.eval(t, q)
}

/// `sup |i∂ₜχ + (2m_cl)⁻¹∂²_Q χ| / sup |χ|` over the samples.
pub fn schrodinger_residual(wp: &WavePacket, t: f64, qs: &[f64]) -> f64 {
    let (res, amp) = qs
        .par_iter()
        .map(|&q| {
            let (chi, d_qq, d_t) = wp.derivatives(t, q);
            ((C64::i() * d_t + d_qq / (2.0 * wp.m_cl)).norm(), chi.norm())
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    if amp == 0.0 {
        res
    } else {
        res / amp
    }
}

/// Uniform quadrature grid `[-L, L]` wide enough for packets up to index `n_max` at time `t`.
pub fn q_grid(wp: &WavePacket, n_max: usize, t: f64, n: usize) -> (Vec<f64>, f64) {
    let half = wp.width(t) * (12.0 + 2.0 * (n_max as f64 + 1.0).sqrt());
    let h = 2.0 * half / (n - 1) as f64;
    ((0..n).map(|j| -half + j as f64 * h).collect(), h)
}

/// `∫ |χ_n(t,Q)|² Q^{2r} dQ` by trapezoid on a wide grid.
pub fn moment(wp: &WavePacket, t: f64, r: u32) -> f64 {
    let (qs, h) = q_grid(wp, wp.n, t, 4001);
    h * qs.iter().map(|&q| wp.eval(t, q).norm_sqr() * q.powi(2 * r as i32)).sum::<f64>()
}

/// `Σ cₙ χₙ(t, ·)` for coefficients indexed from `n = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Superposition {
    pub base: WavePacket,
    pub coeffs: Vec<C64>,
}

impl Superposition {
    pub fn eval(&self, t: f64, q: f64) -> C64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(n, c)| c * self.base.with_index(n).eval(t, q))
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Samples of the superposition at time `t`.
pub fn packet_superposition_evolve(base: &WavePacket, coeffs: &[C64], t: f64, qs: &[f64]) -> Vec<C64> {
    let sp = Superposition { base: *base, coeffs: coeffs.to_vec() };
    qs.par_iter().map(|&q| sp.eval(t, q)).collect()
}

/// Coefficients `⟨χ_n(0), f⟩` for `n ≤ n_max` by trapezoid on the samples.
pub fn project(base: &WavePacket, n_max: usize, qs: &[f64], h: f64, f: &[C64]) -> Vec<C64> {
    (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let wp = base.with_index(n);
            h * qs.iter().zip(f).map(|(&q, &v)| wp.eval(0.0, q).conj() * v).sum::<C64>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rustfft::FftPlanner;

    fn packet(n: usize) -> WavePacket {
        WavePacket::new(n, 0.7, &ModelParams::default()).unwrap()
    }

    fn explicit_hermite(n: usize, x: f64) -> f64 {
        let f = factorial;
        (0..=n / 2)
            .map(|m| (-1f64).powi(m as i32) * x.powi((n - 2 * m) as i32) / (f(m) * f(n - 2 * m) * 2f64.powi(m as i32)))
            .sum::<f64>()
            * f(n)
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        for n in 0..=10 {
            for x in [-2.7, -0.3, 0.0, 1.1, 3.4] {
                let (a, b) = (hermite(n, x), explicit_hermite(n, x));
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{n} {x}");
            }
        }
    }

    #[test]
    fn normalized_at_all_times() {
        for n in [0, 1, 2, 5] {
            let wp = packet(n);
            for t in [0.0, wp.tau, 5.0 * wp.tau] {
                let (qs, h) = q_grid(&wp, n, t, 4001);
                let norm: f64 = h * qs.iter().map(|&q| wp.eval(t, q).norm_sqr()).sum::<f64>();
                assert!((norm - 1.0).abs() < 1e-10, "{n} {t} {norm}");
            }
        }
    }

    #[test]
    fn real_at_time_zero() {
        for n in 0..6 {
            let wp = packet(n);
            let (qs, _) = q_grid(&wp, n, 0.0, 401);
            let im = qs.iter().map(|&q| wp.eval(0.0, q).im.abs()).fold(0.0, f64::max);
            assert!(im < 1e-12, "{n} {im}");
            let y = 0.8;
            let chi0 = (2.0 * PI).powf(-0.25) / factorial(n).sqrt() * (-y * y / 4.0f64).exp() * hermite(n, y);
            assert!((wp.eval(0.0, y * wp.sigma).re - chi0 / wp.sigma.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn orthonormal_at_fixed_time() {
        let wp = packet(0);
        let t = 2.3 * wp.tau;
        let (qs, h) = q_grid(&wp, 6, t, 4001);
        for a in 0..6 {
            for b in 0..6 {
                let (pa, pb) = (wp.with_index(a), wp.with_index(b));
                let ip: C64 = h * qs.iter().map(|&q| pa.eval(t, q).conj() * pb.eval(t, q)).sum::<C64>();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - want).norm() < 1e-10, "{a} {b} {ip}");
            }
        }
    }

    #[test]
    fn exact_schrodinger_solution() {
        for n in 0..=5 {
            let wp = packet(n);
            for t in [-3.0 * wp.tau, 0.0, 0.4 * wp.tau, 7.0 * wp.tau] {
                let (qs, _) = q_grid(&wp, n, t, 801);
                let r = schrodinger_residual(&wp, t, &qs);
                assert!(r < 1e-8, "{n} {t} {r}");
            }
        }
    }

    #[test]
    fn phase_is_continuous_through_negative_times() {
        let wp = packet(3);
        let mut prev = wp.eval(-4.0 * wp.tau, 0.3);
        for i in 1..=800 {
            let t = -4.0 * wp.tau + i as f64 * 0.01 * wp.tau;
            let cur = wp.eval(t, 0.3);
            assert!((cur - prev).norm() < 0.05, "{t}");
            prev = cur;
        }
    }

    #[test]
    fn variance_and_moment_scaling() {
        let wp = packet(0);
        for t in [0.0, wp.tau, 3.0 * wp.tau] {
            assert!((moment(&wp, t, 1) - wp.width(t).powi(2)).abs() < 1e-10);
        }
        for n in [1, 3] {
            let wp = packet(n);
            for r in 1..=3 {
                let c = moment(&wp, 0.0, r) / (2f64.powi(r as i32) * wp.sigma.powi(2 * r as i32));
                let t = 2.0 * wp.tau;
                let scale = (1.0 + 4.0f64).powi(r as i32);
                let at_t = moment(&wp, t, r) / (2f64.powi(r as i32) * wp.sigma.powi(2 * r as i32) * scale);
                assert!((c - at_t).abs() < 1e-9 * c, "{n} {r}");
            }
        }
    }

    #[test]
    fn gaussian_projection_captures_norm() {
        let wp = packet(0);
        let (qs, h) = q_grid(&wp, 30, 0.0, 6001);
        let s = 1.2 * wp.sigma;
        let f: Vec<C64> = qs
            .iter()
            .map(|&q| C64::from((-(q - 2.0 * wp.sigma).powi(2) / (4.0 * s * s)).exp() / (2.0 * PI * s * s).powf(0.25)))
            .collect();
        let c = project(&wp, 30, &qs, h, &f);
        let captured: f64 = c.iter().map(|c| c.norm_sqr()).sum();
        assert!((captured - 1.0).abs() < 1e-8, "{captured}");
    }

    #[test]
    fn superposition_matches_fourier_propagator() {
        let wp = packet(0);
        let coeffs = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let n = 2048;
        let half = 60.0 * wp.sigma;
        let h = 2.0 * half / n as f64;
        let qs: Vec<f64> = (0..n).map(|j| -half + j as f64 * h).collect();
        let mut psi = packet_superposition_evolve(&wp, &coeffs, 0.0, &qs);
        let t = 4.0 * wp.tau;
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(n).process(&mut psi);
        for (j, v) in psi.iter_mut().enumerate() {
            let jj = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            let k = 2.0 * PI * jj / (n as f64 * h);
            *v *= C64::from_polar(1.0 / n as f64, -k * k * t / (2.0 * wp.m_cl));
        }
        planner.plan_fft_inverse(n).process(&mut psi);
        let exact = packet_superposition_evolve(&wp, &coeffs, t, &qs);
        let err = psi.iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");

        // ⟨Q⟩ drifts linearly with ⟨P⟩/m_cl
        let mean = |t: f64| {
            let v = packet_superposition_evolve(&wp, &coeffs, t, &qs);
            h * qs.iter().zip(&v).map(|(&q, c)| q * c.norm_sqr()).sum::<f64>()
        };
        let (q0, q1, q2) = (mean(0.0), mean(wp.tau), mean(2.0 * wp.tau));
        assert!((q2 - 2.0 * q1 + q0).abs() < 1e-10);
        assert!((q1 - q0).abs() > 1e-3);
    }

    proptest! {
        #[test]
        fn norm_is_conserved(re in proptest::collection::vec(-1.0..1.0f64, 4), t in -10.0..10.0f64) {
            let wp = packet(0);
            let coeffs: Vec<C64> = re.iter().enumerate().map(|(i, &r)| C64::from_polar(r, i as f64)).collect();
            let (qs, h) = q_grid(&wp, 4, t, 3001);
            let v = packet_superposition_evolve(&wp, &coeffs, t, &qs);
            let norm: f64 = h * v.iter().map(|c| c.norm_sqr()).sum::<f64>();
            let want: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
            prop_assert!((norm - want).abs() < 1e-10);
        }
    }
}
