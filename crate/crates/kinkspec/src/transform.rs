//! Distorted Fourier transform built on the scattering states `E_k`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::grid::{Grid, MomentumGrid};
use crate::params::ModelParams;
use crate::quad::filon_linear;
use crate::spectral::{eigenfunction_prefactor, psi0, psi1, scattering_phase, sech};

/// Beyond this phase advance per grid cell the x-integral switches to the Filon rule.
const FILON_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    pub c0: C64,
    pub c1: C64,
    pub k: MomentumGrid,
    pub u_tilde: Vec<C64>,
    pub warnings: Vec<String>,
}

impl SpectralCoefficients {
    pub fn continuum(k: MomentumGrid, u_tilde: Vec<C64>) -> Self {
        Self { c0: C64::ZERO, c1: C64::ZERO, k, u_tilde, warnings: Vec::new() }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr() + self.k.norm_c(&self.u_tilde).powi(2)
    }
}

/// Tabulated `tanh(mx)` and `sech²(mx)` so that `E_k(x)` costs one complex exponential.
pub(crate) struct Profiles {
    pub t: Vec<f64>,
    pub s2: Vec<f64>,
}

impl Profiles {
    pub fn new(grid: &Grid, p: &ModelParams) -> Self {
        Self {
            t: grid.sample(|x| (p.m * x).tanh()),
            s2: grid.sample(|x| sech(p.m * x).powi(2)),
        }
    }

    /// `ℱ(k, x_i)`.
    #[inline]
    pub fn symbol(&self, k: f64, i: usize, m: f64) -> C64 {
        C64::new(-k * k + 2.0 * m * m - 3.0 * m * m * self.s2[i], -3.0 * m * k * self.t[i])
    }
}

fn real_samples(grid: &Grid, f: impl Fn(f64) -> f64) -> Vec<C64> {
    grid.nodes.iter().map(|&x| C64::new(f(x), 0.0)).collect()
}

/// `Ũ(k) = (2π)^{-1/2} ∫ conj(E_k) U dx` together with the bound-state overlaps.
pub fn forward(u: &[C64], grid: &Grid, kgrid: &MomentumGrid, p: &ModelParams) -> SpectralCoefficients {
    assert_eq!(u.len(), grid.n, "samples must match the grid");
    let prof = Profiles::new(grid, p);
    let c0 = grid.inner(&real_samples(grid, |x| psi0(x, p)), u);
    let c1 = grid.inner(&real_samples(grid, |x| psi1(x, p)), u);
    let norm = (2.0 * PI).sqrt();
    let u_tilde = kgrid
        .nodes
        .par_iter()
        .map(|&k| {
            let pref = eigenfunction_prefactor(k, p).conj();
            if (k * grid.h).abs() > FILON_THRESHOLD {
                let smooth: Vec<C64> = (0..grid.n).map(|i| pref * prof.symbol(k, i, p.m).conj() * u[i]).collect();
                filon_linear(&smooth, grid.nodes[0], grid.h, -k) / norm
            } else {
                let mut acc = C64::ZERO;
                for (i, ui) in u.iter().enumerate() {
                    let e = prof.symbol(k, i, p.m).conj() * C64::from_polar(grid.weights[i], -k * grid.nodes[i]);
                    acc += e * ui;
                }
                pref * acc / norm
            }
        })
        .collect();
    let mut warnings = Vec::new();
    let peak = u.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let edge = u[0].norm().max(u[grid.n - 1].norm());
    if peak > 0.0 && edge > 1e-6 * peak {
        warnings.push(format!("input does not decay at the grid boundary: |U(edge)|/max|U| = {:.3e}", edge / peak));
    }
    SpectralCoefficients { c0, c1, k: kgrid.clone(), u_tilde, warnings }
}

/// `U(x) = c0 ψ₀ + c1 ψ₁ + (2π)^{-1/2} ∫ E_k(x) Ũ(k) dk`.
pub fn inverse(s: &SpectralCoefficients, grid: &Grid, p: &ModelParams) -> Vec<C64> {
    let prof = Profiles::new(grid, p);
    let norm = (2.0 * PI).sqrt();
    let coef: Vec<C64> = s
        .k
        .nodes
        .iter()
        .zip(&s.k.weights)
        .zip(&s.u_tilde)
        .map(|((&k, &w), &f)| eigenfunction_prefactor(k, p) * f * w / norm)
        .collect();
    (0..grid.n)
        .into_par_iter()
        .map(|i| {
            let x = grid.nodes[i];
            let mut acc = s.c0 * psi0(x, p) + s.c1 * psi1(x, p);
            for (j, &k) in s.k.nodes.iter().enumerate() {
                acc += coef[j] * prof.symbol(k, i, p.m) * C64::from_polar(1.0, k * x);
            }
            acc
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveSign {
    Plus,
    Minus,
}

/// Multiplier `e^{+2iδ_k}` for `k > 0`, `e^{-2iδ_k}` for `k < 0`.
pub fn scattering_multiplier(k: f64, p: &ModelParams) -> C64 {
    let d = scattering_phase(k, p);
    C64::from_polar(1.0, if k > 0.0 { 2.0 * d } else { -2.0 * d })
}

/// `W±*` acting on a momentum-space function: `∫ f(k) e^{ikx} dk`, with the
/// scattering phases inserted for the minus sign.
pub fn wave_operator_adjoint(sign: WaveSign, f: &[C64], kgrid: &MomentumGrid, grid: &Grid, p: &ModelParams) -> Vec<C64> {
    assert_eq!(f.len(), kgrid.len(), "function must match the momentum grid");
    let coef: Vec<C64> = kgrid
        .nodes
        .iter()
        .zip(&kgrid.weights)
        .zip(f)
        .map(|((&k, &w), &v)| match sign {
            WaveSign::Plus => v * w,
            WaveSign::Minus => v * w * scattering_multiplier(k, p),
        })
        .collect();
    grid.nodes
        .par_iter()
        .map(|&x| kgrid.nodes.iter().zip(&coef).map(|(&k, &c)| c * C64::from_polar(1.0, k * x)).sum())
        .collect()
}

/// The scattering operator as a pointwise unimodular multiplier.
pub fn scattering_operator(g: &[C64], kgrid: &MomentumGrid, p: &ModelParams) -> Vec<C64> {
    g.iter().zip(&kgrid.nodes).map(|(&v, &k)| v * scattering_multiplier(k, p)).collect()
}
