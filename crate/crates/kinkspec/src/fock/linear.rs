//! Linearized field dynamics about the kink in first-order form.
//!
//! With `K₀ = -∂² + 4m²` and `V = -6m² sech²(mx)` the pair `(α, β)` obeys
//! `α' = -iK₀^{1/2}α - (i/2)W(α+β)`, `β' = iK₀^{1/2}β + (i/2)W(α+β)`, where
//! `W = K₀^{-1/4} V K₀^{-1/4}`. The form `‖α‖² - ‖β‖²` is conserved.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::dopri::{integrate, Stats, Tolerance};
use crate::error::{require, Result};
use crate::params::ModelParams;
use crate::quad::Rule;
use crate::spectral::{psi0, sech};
use crate::C64;

pub struct LinearizedSystem {
    pub xs: Vec<f64>,
    pub h: f64,
    omega: Vec<f64>,
    v: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl LinearizedSystem {
    /// Periodic grid of `n` points on `[-half_length, half_length)`.
    pub fn new(n: usize, half_length: f64, p: &ModelParams) -> Result<Self> {
        require(n >= 16 && n.is_power_of_two(), || format!("grid size {n} must be a power of two ≥ 16"))?;
        require(half_length * p.m >= 10.0, || format!("box half-length {half_length} too small for the kink"))?;
        let h = 2.0 * half_length / n as f64;
        let xs: Vec<f64> = (0..n).map(|j| -half_length + j as f64 * h).collect();
        let omega = (0..n)
            .map(|j| {
                let jj = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                p.omega(2.0 * PI * jj / (n as f64 * h))
            })
            .collect();
        let v = xs.iter().map(|&x| -6.0 * p.m * p.m * sech(p.m * x).powi(2)).collect();
        let mut planner = FftPlanner::new();
        Ok(Self { fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n), xs, h, omega, v })
    }

    pub fn for_model(p: &ModelParams) -> Self {
        Self::new(256, 20.0 / p.m, p).expect("default linearized grid is valid")
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// `K₀^s f` as a Fourier multiplier.
    pub fn k0_power(&self, s: f64, f: &[C64]) -> Vec<C64> {
        let n = self.len() as f64;
        let mut buf = f.to_vec();
        self.fwd.process(&mut buf);
        for (b, w) in buf.iter_mut().zip(&self.omega) {
            *b *= w.powf(2.0 * s) / n;
        }
        self.inv.process(&mut buf);
        buf
    }

    fn w_apply(&self, f: &[C64]) -> Vec<C64> {
        let g = self.k0_power(-0.25, f);
        let vg: Vec<C64> = g.iter().zip(&self.v).map(|(a, v)| a * v).collect();
        self.k0_power(-0.25, &vg)
    }

    pub fn rhs(&self, eta: &[C64], d: &mut [C64]) {
        let n = self.len();
        let (a, b) = eta.split_at(n);
        let sum: Vec<C64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        let w = self.w_apply(&sum);
        let ka = self.k0_power(0.5, a);
        let kb = self.k0_power(0.5, b);
        let i = C64::i();
        for j in 0..n {
            d[j] = -i * ka[j] - 0.5 * i * w[j];
            d[n + j] = i * kb[j] + 0.5 * i * w[j];
        }
    }

    pub fn norm_sqr(&self, f: &[C64]) -> f64 {
        self.h * f.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// `‖α‖² - ‖β‖²`.
    pub fn pseudo_norm(&self, eta: &[C64]) -> f64 {
        let (a, b) = eta.split_at(self.len());
        self.norm_sqr(a) - self.norm_sqr(b)
    }

    /// The exact zero-mode solution `α = tK₀^{1/4}ψ₀ + iK₀^{-1/4}ψ₀`, `β = tK₀^{1/4}ψ₀ - iK₀^{-1/4}ψ₀`.
    pub fn zero_mode_solution(&self, t: f64, p: &ModelParams) -> Vec<C64> {
        let z: Vec<C64> = self.xs.iter().map(|&x| C64::new(psi0(x, p), 0.0)).collect();
        let up = self.k0_power(0.25, &z);
        let down = self.k0_power(-0.25, &z);
        let i = C64::i();
        let mut eta: Vec<C64> = up.iter().zip(&down).map(|(u, d)| t * u + i * d).collect();
        eta.extend(up.iter().zip(&down).map(|(u, d)| t * u - i * d));
        eta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedEvolution {
    pub eta: Vec<C64>,
    /// `max |(‖α‖²-‖β‖²)(t) - (‖α‖²-‖β‖²)(0)| / (‖α‖²+‖β‖²)(0)` over the sample times.
    pub pseudo_defect: f64,
    pub stats: Stats,
}

/// Integrates the first-order system from 0 to `t`, sampling the conserved form `samples` times.
pub fn linearized_classical_evolution(
    sys: &LinearizedSystem,
    eta0: &[C64],
    t: f64,
    samples: usize,
    tol: Tolerance,
) -> Result<LinearizedEvolution> {
    require(eta0.len() == 2 * sys.len(), || format!("state length {} ≠ 2 × grid {}", eta0.len(), sys.len()))?;
    let form0 = sys.pseudo_norm(eta0);
    let scale = sys.norm_sqr(eta0).max(f64::MIN_POSITIVE);
    let mut eta = eta0.to_vec();
    let mut stats = Stats::default();
    let mut defect: f64 = 0.0;
    let segments = samples.max(1);
    for s in 0..segments {
        let (a, b) = (t * s as f64 / segments as f64, t * (s + 1) as f64 / segments as f64);
        let (next, st) = integrate(|_, y, d| sys.rhs(y, d), &eta, a, b, tol)?;
        eta = next;
        stats.accepted += st.accepted;
        stats.rejected += st.rejected;
        defect = defect.max((sys.pseudo_norm(&eta) - form0).abs() / scale);
    }
    Ok(LinearizedEvolution { eta, pseudo_defect: defect, stats })
}

/// `V̂(q)` for `V = -6m² sech²(mx)`.
pub fn potential_transform(q: f64, p: &ModelParams) -> f64 {
    let m = p.m;
    let a = PI * q / (2.0 * m);
    if a.abs() < 1e-8 {
        -12.0 * m
    } else {
        -6.0 * m * m * (PI * q / (m * m)) / a.sinh()
    }
}

/// `∬_{[-K,K]²} |V̂(k-l)|² ω_k^{-1} ω_l^{-1} dk dl` on unit panels of order 12.
pub fn hilbert_schmidt_integral(k_max: f64, p: &ModelParams) -> f64 {
    let panels = (2.0 * k_max / p.m).ceil() as usize;
    let edges: Vec<f64> = (0..=panels).map(|i| -k_max + 2.0 * k_max * i as f64 / panels as f64).collect();
    let r = Rule::composite(&edges, 12);
    let mut acc = 0.0;
    for (&k, &wk) in r.nodes.iter().zip(&r.weights) {
        let inner: f64 = r
            .nodes
            .iter()
            .zip(&r.weights)
            .map(|(&l, &wl)| wl * potential_transform(k - l, p).powi(2) / p.omega(l))
            .sum();
        acc += wk * inner / p.omega(k);
    }
    acc
}

/// Norm data for `‖a†(K₀^{-1/4}ψ₀, t)Ω₀‖ / t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRatio {
    pub t: f64,
    pub ratio: f64,
    /// `‖K₀^{1/4}ψ₀‖`, the large-time limit.
    pub limit: f64,
    /// `‖K₀^{-1/4}ψ₀‖`.
    pub initial: f64,
    /// `Re⟨K₀^{-1/4}ψ₀, iK₀^{1/4}ψ₀⟩` by grid quadrature.
    pub cross_term: f64,
}

/// `‖K₀^s ψ₀‖²` from the closed-form transform of `sech²`.
fn k0_moment(s: f64, p: &ModelParams) -> f64 {
    let m = p.m;
    let edges: Vec<f64> = (0..=400).map(|i| i as f64 * 0.25 * m).collect();
    let amp = (0.75 * m).sqrt();
    // ∫|ψ̂₀|² ω^{4s} dk / 2π over the full line
    Rule::composite(&edges, 12).integrate(|k| {
        let f = amp * potential_transform(k, p) / (-6.0 * m * m);
        f * f * p.omega(k).powf(4.0 * s)
    }) / PI
}

pub fn zero_mode_growth_ratio(t: f64, sys: &LinearizedSystem, p: &ModelParams) -> Result<GrowthRatio> {
    require(t > 0.0 && t.is_finite(), || format!("growth ratio needs t > 0, got {t}"))?;
    let a2 = k0_moment(-0.25, p);
    let b2 = k0_moment(0.25, p);
    let z: Vec<C64> = sys.xs.iter().map(|&x| C64::new(psi0(x, p), 0.0)).collect();
    let up = sys.k0_power(0.25, &z);
    let down = sys.k0_power(-0.25, &z);
    let cross_term = sys.h * down.iter().zip(&up).map(|(d, u)| (d.conj() * C64::i() * u).re).sum::<f64>();
    Ok(GrowthRatio { t, ratio: (a2 + t * t * b2).sqrt() / t, limit: b2.sqrt(), initial: a2.sqrt(), cross_term })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn packet(sys: &LinearizedSystem) -> Vec<C64> {
        let mut eta: Vec<C64> =
            sys.xs.iter().map(|&x| C64::from_polar((-(x - 3.0).powi(2)).exp(), 1.5 * x)).collect();
        eta.extend(sys.xs.iter().map(|&x| C64::new(0.3 * (-(x + 2.0).powi(2) / 2.0).exp(), 0.0)));
        eta
    }

    #[test]
    fn multipliers_compose() {
        let p = ModelParams::default();
        let sys = LinearizedSystem::for_model(&p);
        let f: Vec<C64> = sys.xs.iter().map(|&x| C64::new((-x * x).exp(), 0.0)).collect();
        let g = sys.k0_power(-0.25, &sys.k0_power(0.25, &f));
        assert!(f.iter().zip(&g).all(|(a, b)| (a - b).norm() < 1e-13));
    }

    #[test]
    fn pseudo_unitary_over_twenty_periods() {
        let p = ModelParams::default();
        let sys = LinearizedSystem::for_model(&p);
        let ev = linearized_classical_evolution(&sys, &packet(&sys), 20.0, 20, Tolerance::default()).unwrap();
        assert!(ev.pseudo_defect < 1e-8, "{}", ev.pseudo_defect);
    }

    #[test]
    fn zero_mode_solution_is_tracked() {
        let p = ModelParams::default();
        let sys = LinearizedSystem::for_model(&p);
        let t = 20.0;
        let ev = linearized_classical_evolution(&sys, &sys.zero_mode_solution(0.0, &p), t, 4, Tolerance::default())
            .unwrap();
        let exact = sys.zero_mode_solution(t, &p);
        let err: f64 = ev.eta.iter().zip(&exact).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let norm: f64 = exact.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(err / norm < 1e-6, "{}", err / norm);
    }

    #[test]
    fn hilbert_schmidt_converges() {
        let p = ModelParams::default();
        let vals: Vec<f64> = [10.0, 20.0, 40.0, 80.0].iter().map(|&k| hilbert_schmidt_integral(k, &p)).collect();
        let d1 = (vals[2] - vals[1]).abs();
        let d2 = (vals[3] - vals[2]).abs();
        assert!(d2 < 0.6 * d1, "{vals:?}");
        assert!(vals.iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn growth_ratio_limits() {
        let p = ModelParams::default();
        let sys = LinearizedSystem::for_model(&p);
        let r = zero_mode_growth_ratio(1e3, &sys, &p).unwrap();
        assert!((r.ratio - r.limit).abs() < 1e-4);
        assert!(r.cross_term.abs() < 1e-12);
        // grid norms agree with the closed-form transform
        let z: Vec<C64> = sys.xs.iter().map(|&x| C64::new(psi0(x, &p), 0.0)).collect();
        assert!((sys.norm_sqr(&sys.k0_power(0.25, &z)).sqrt() - r.limit).abs() < 1e-10);
        assert!((sys.norm_sqr(&sys.k0_power(-0.25, &z)).sqrt() - r.initial).abs() < 1e-10);
        let ts = [0.5, 1.0, 10.0, 100.0];
        let rs: Vec<f64> = ts.iter().map(|&t| zero_mode_growth_ratio(t, &sys, &p).unwrap().ratio).collect();
        assert!(rs.windows(2).all(|w| w[1] < w[0]));
        assert!(zero_mode_growth_ratio(0.0, &sys, &p).is_err());
    }
}
