//! Aggregated consistency reports for the spectral decomposition and for `𝕊(θ)`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{Grid, MomentumGrid};
use crate::kernels::{build_s_matrix, PlaneWaveBox};
use crate::params::ModelParams;
use crate::spectral::{
    discrete_eigenpairs, eigen_residual, eigenfunction_envelope, generalized_eigenfunction, resolvent_identity_defect,
    scattering_phase, ResolventSide,
};
use crate::transform::{forward, inverse};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub psi_norms: [f64; 2],
    /// `max |⟨ψ_i, ψ_j⟩ - δ_ij|` over the bound states.
    pub orthonormality: f64,
    /// `max |⟨ψ_i, E_k⟩| / sup|E_k|` over the sample momenta.
    pub bound_continuum_overlap: f64,
    pub eigen_residual: f64,
    /// `‖U - T⁻¹TU‖ / ‖U‖`, worst over the test profiles.
    pub completeness: f64,
    /// `|‖TU‖² - ‖U‖²| / ‖U‖²`, worst over the test profiles.
    pub parseval: f64,
    pub phase_at_zero: f64,
    pub phase_at_large_k: f64,
    /// Worst resolvent boundary-value defect over both sides at `k ∈ {0.5, 1, 3}·m`, `ε = RESOLVENT_EPS·m²`.
    pub resolvent_identity: f64,
}

pub const RESOLVENT_EPS: f64 = 1e-6;

fn profiles(grid: &Grid, p: &ModelParams) -> Vec<Vec<C64>> {
    let m = p.m;
    let shapes: [(f64, f64, f64); 3] = [(0.3, 1.0, 0.0), (-1.2, 0.7, 2.0), (0.0, 2.0, -0.5)];
    shapes
        .iter()
        .map(|&(x0, w, k)| {
            grid.nodes
                .iter()
                .map(|&x| {
                    let y = (x - x0 / m) * m / w;
                    C64::from_polar((-0.5 * y * y).exp(), k * m * x)
                })
                .collect()
        })
        .collect()
}

pub fn spectral_suite(grid: &Grid, kgrid: &MomentumGrid, sample_ks: &[f64], p: &ModelParams) -> Result<SpectralReport> {
    let pairs = discrete_eigenpairs(grid, p);
    let dot = |a: &[f64], b: &[f64]| grid.integrate(&a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<_>>());
    let psi_norms = [dot(&pairs[0].samples, &pairs[0].samples).sqrt(), dot(&pairs[1].samples, &pairs[1].samples).sqrt()];
    let mut orthonormality: f64 = 0.0;
    for (i, a) in pairs.iter().enumerate() {
        for (j, b) in pairs.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            orthonormality = orthonormality.max((dot(&a.samples, &b.samples) - want).abs());
        }
    }
    let mut overlap: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for &k in sample_ks {
        let e = generalized_eigenfunction(k, grid, p)?;
        for b in &pairs {
            let bc: Vec<C64> = b.samples.iter().map(|&v| C64::new(v, 0.0)).collect();
            overlap = overlap.max(grid.inner(&bc, &e.samples).norm() / eigenfunction_envelope(k, p));
        }
        residual = residual.max(eigen_residual(k, grid, p));
    }
    let mut completeness: f64 = 0.0;
    let mut parseval: f64 = 0.0;
    for u in profiles(grid, p) {
        let norm2 = grid.norm_c(&u).powi(2);
        let s = forward(&u, grid, kgrid, p);
        parseval = parseval.max((s.norm_sqr() - norm2).abs() / norm2);
        let back = inverse(&s, grid, p);
        let diff: Vec<C64> = back.iter().zip(&u).map(|(a, b)| a - b).collect();
        completeness = completeness.max(grid.norm_c(&diff) / norm2.sqrt());
    }
    let mut resolvent: f64 = 0.0;
    for side in [ResolventSide::Plus, ResolventSide::Minus] {
        for k in [0.5, 1.0, 3.0] {
            let d = resolvent_identity_defect(side, k * p.m, RESOLVENT_EPS * p.m * p.m, 5.0 / p.m, grid, p)?;
            resolvent = resolvent.max(d);
        }
    }
    Ok(SpectralReport {
        psi_norms,
        orthonormality,
        bound_continuum_overlap: overlap,
        eigen_residual: residual,
        completeness,
        parseval,
        phase_at_zero: scattering_phase(0.0, p),
        phase_at_large_k: scattering_phase(1e3 * p.m, p),
        resolvent_identity: resolvent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SMatrixReport {
    pub theta: f64,
    pub modes: usize,
    /// Eigenvalue closest to -1.
    pub eigenvalue: f64,
    /// `|⟨v, K₀^{1/4}ψ₀⟩|` for its normalized eigenvector.
    pub overlap: f64,
    pub trace_norm: f64,
    /// `Σ_{n>200}|λ_n| / Σ|λ_n|`.
    pub tail_fraction: f64,
    pub refined_trace_norm: f64,
    pub refined_tail_fraction: f64,
    /// `|λ_n|` in descending order.
    pub singular_values: Vec<f64>,
}

pub const TAIL_START: usize = 200;

/// Spectrum of `𝕊(θ)` on `bx` and on the box with twice the modes.
pub fn s_matrix_report(theta: f64, bx: &PlaneWaveBox, p: &ModelParams) -> Result<SMatrixReport> {
    let s = build_s_matrix(theta, bx, p)?;
    let fine = build_s_matrix(theta, &bx.refined(), p)?;
    let (eigenvalue, overlap) = s.zero_mode_eigen();
    Ok(SMatrixReport {
        theta,
        modes: bx.modes,
        eigenvalue,
        overlap,
        trace_norm: s.trace_norm(),
        tail_fraction: s.tail_fraction(TAIL_START),
        refined_trace_norm: fine.trace_norm(),
        refined_tail_fraction: fine.tail_fraction(TAIL_START),
        singular_values: s.singular_values(),
    })
}
