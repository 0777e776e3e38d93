//! Interacting versus free evolution on `span{χ_n} ⊗ (truncated Fock space)`.
//!
//! `Q = σ(b + b†)` and `P = -(i/2σ)(b - b†)` act on the Hermite packets
//! `χ_n(0, ·; σ)`; `H₀ = P²/2m_cl + Σ ω_μ n_μ` and `H_I` is assembled from the
//! monomial kernels. Both evolutions use exact eigendecompositions of the
//! truncated matrices.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::interaction::{build_interaction_kernels, InteractionKernels};
use super::space::{free_energies, FockBasis, ModeSet};
use super::wick::wick_matrix;
use crate::error::{require, Error, Result};
use crate::grid::Grid;
use crate::mollifier::Mollifier;
use crate::params::ModelParams;
use crate::spectral::sech;
use crate::wavepacket::WavePacket;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuhamelSetup {
    pub packet_states: usize,
    pub continuum_modes: usize,
    pub k_max: f64,
    pub n_max: usize,
    pub kappa: f64,
    pub sigma: f64,
    pub time_samples: usize,
}

impl DuhamelSetup {
    pub fn for_model(p: &ModelParams) -> Self {
        Self {
            packet_states: 12,
            continuum_modes: 3,
            k_max: 3.0 * p.m,
            n_max: 3,
            kappa: 100.0 * p.m,
            sigma: 1.0 / p.m,
            time_samples: 200,
        }
    }
}

/// `Q` and `P²/2m_cl` on the first `n` Hermite packets.
pub fn packet_operators(n: usize, wp: &WavePacket) -> (DMatrix<C64>, DMatrix<C64>) {
    let s = wp.sigma;
    let mut q = DMatrix::zeros(n, n);
    let mut kin = DMatrix::zeros(n, n);
    for j in 0..n {
        if j + 1 < n {
            let v = C64::new(s * ((j + 1) as f64).sqrt(), 0.0);
            q[(j + 1, j)] = v;
            q[(j, j + 1)] = v;
        }
        // P² = -(b² + b†² - 2b†b - 1)/4σ²
        kin[(j, j)] = C64::new((2.0 * j as f64 + 1.0) / (4.0 * s * s), 0.0);
        if j + 2 < n {
            let v = C64::new(-(((j + 1) * (j + 2)) as f64).sqrt() / (4.0 * s * s), 0.0);
            kin[(j + 2, j)] = v;
            kin[(j, j + 2)] = v;
        }
    }
    (q, kin / C64::new(2.0 * wp.m_cl, 0.0))
}

/// Hamiltonian pieces: `H(g) = h0 + g h1 + g² h2`.
pub struct DuhamelHamiltonian {
    pub h0: DMatrix<C64>,
    pub h1: DMatrix<C64>,
    pub h2: DMatrix<C64>,
    pub dim: usize,
    pub packet: WavePacket,
    pub kernels: InteractionKernels,
}

fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    DMatrix::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

pub fn assemble(setup: &DuhamelSetup, p: &ModelParams) -> Result<DuhamelHamiltonian> {
    require(setup.packet_states >= 4, || "need at least 4 packet states".into())?;
    let modes = ModeSet::new(p, setup.continuum_modes, setup.k_max, true)?;
    let basis = Arc::new(FockBasis::new(modes.len(), setup.n_max)?);
    let wp = WavePacket::new(0, setup.sigma, p)?;
    let grid = Grid::new(20.0 / p.m, 401)?;
    let b = grid.sample(|x| sech(0.5 * p.m * x).powi(2));
    let mol = Mollifier::new(setup.kappa)?;
    let kernels = build_interaction_kernels(&b, &grid, &mol, &modes, p, None)?;

    let nq = setup.packet_states;
    let (q, kin) = packet_operators(nq, &wp);
    let nf = basis.dim();
    let energies = free_energies(&basis, &modes.frequencies());
    let field0 = DMatrix::from_fn(nf, nf, |i, j| if i == j { C64::new(energies[i], 0.0) } else { C64::new(0.0, 0.0) });
    let h0 = kron(&kin, &DMatrix::identity(nf, nf)) + kron(&DMatrix::identity(nq, nq), &field0);

    let mut h1 = DMatrix::zeros(nq * nf, nq * nf);
    let mut h2 = DMatrix::zeros(nq * nf, nq * nf);
    let mut q_pow = vec![DMatrix::<C64>::identity(nq, nq)];
    for a in 1..=4 {
        let next = &q_pow[a - 1] * &q;
        q_pow.push(next);
    }
    for t in &kernels.terms {
        let mut field = DMatrix::zeros(nf, nf);
        for k in &t.kernels {
            field += wick_matrix(k, &basis);
        }
        let term = kron(&q_pow[t.q_power], &field) * C64::new(t.coupling, 0.0);
        match t.g_power {
            1 => h1 += term,
            _ => h2 += term,
        }
    }
    Ok(DuhamelHamiltonian { h0, h1, h2, dim: nq * nf, packet: wp, kernels })
}

fn hermitian_defect(h: &DMatrix<C64>) -> f64 {
    (h - h.adjoint()).norm() / h.norm().max(1.0)
}

struct Propagator {
    vecs: DMatrix<C64>,
    vals: DVector<f64>,
}

impl Propagator {
    fn new(h: &DMatrix<C64>) -> Self {
        let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        Self { vecs: eig.eigenvectors, vals: eig.eigenvalues }
    }

    fn apply(&self, psi0: &DVector<C64>, t: f64) -> DVector<C64> {
        let mut c = self.vecs.adjoint() * psi0;
        for (ci, &e) in c.iter_mut().zip(self.vals.iter()) {
            *ci *= C64::from_polar(1.0, -e * t);
        }
        &self.vecs * c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuhamelPoint {
    pub g: f64,
    pub t1: f64,
    /// `sup_t min_θ ‖Ψ_g(t) - e^{iθ}Ψ₀(t)‖` over `[0, t1]`.
    pub sup_distance: f64,
    /// `∫₀^{t1} ‖H_I e^{-isH₀}Ψ(0)‖ ds`.
    pub duhamel_bound: f64,
    /// `g t₁ (1 + τ/m_cl + t₁²/(τ m_cl))`.
    pub envelope: f64,
    pub hermitian_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuhamelReport {
    pub points: Vec<DuhamelPoint>,
    /// `sup_distance / envelope` at the largest coupling.
    pub fitted_c: f64,
    pub decreasing: bool,
    pub within_envelope: bool,
    pub within_duhamel: bool,
}

/// Runs the comparison at each coupling with `t₁ = g^{-1/4}`, starting from
/// `χ₀ ⊗ Ω`. The constant `C` is fitted at the largest `g`.
pub fn duhamel_experiment(setup: &DuhamelSetup, gs: &[f64], p: &ModelParams) -> Result<DuhamelReport> {
    require(!gs.is_empty() && gs.iter().all(|&g| g > 0.0 && g.is_finite()), || "couplings must be positive".into())?;
    let ham = assemble(setup, p)?;
    let mut psi0 = DVector::zeros(ham.dim);
    psi0[0] = C64::new(1.0, 0.0);
    let free = Propagator::new(&ham.h0);
    let wp = ham.packet;
    let mut points = Vec::with_capacity(gs.len());
    for &g in gs {
        let hi = &ham.h1 * C64::new(g, 0.0) + &ham.h2 * C64::new(g * g, 0.0);
        let full = &ham.h0 + &hi;
        let defect = hermitian_defect(&full);
        let inter = Propagator::new(&full);
        let t1 = g.powf(-0.25);
        let n = setup.time_samples.max(2);
        let dt = t1 / (n - 1) as f64;
        let mut sup: f64 = 0.0;
        let mut integrand = Vec::with_capacity(n);
        for s in 0..n {
            let t = s as f64 * dt;
            let a = free.apply(&psi0, t);
            let b = inter.apply(&psi0, t);
            let overlap = a.dotc(&b).norm();
            sup = sup.max((2.0 - 2.0 * overlap).max(0.0).sqrt());
            integrand.push((&hi * &a).norm());
        }
        let bound = dt * (integrand.iter().sum::<f64>() - 0.5 * (integrand[0] + integrand[n - 1]));
        let envelope = g * t1 * (1.0 + wp.tau / wp.m_cl + t1 * t1 / (wp.tau * wp.m_cl));
        if !sup.is_finite() {
            return Err(Error::Numerical(format!("non-finite distance at g = {g}")));
        }
        points.push(DuhamelPoint { g, t1, sup_distance: sup, duhamel_bound: bound, envelope, hermitian_defect: defect });
    }
    let mut by_g = points.clone();
    by_g.sort_by(|a, b| b.g.total_cmp(&a.g));
    let fitted_c = by_g[0].sup_distance / by_g[0].envelope;
    let decreasing = by_g.windows(2).all(|w| w[1].sup_distance < w[0].sup_distance);
    let within_envelope = by_g.iter().all(|pt| pt.sup_distance <= fitted_c * pt.envelope * (1.0 + 1e-12));
    // the trapezoid estimate of the Duhamel integral carries O(dt²) error
    let within_duhamel = by_g.iter().all(|pt| pt.sup_distance <= pt.duhamel_bound * 1.01);
    Ok(DuhamelReport { points, fitted_c, decreasing, within_envelope, within_duhamel })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packet_operators_match_closed_forms() {
        let p = ModelParams::default();
        let wp = WavePacket::new(0, 0.7, &p).unwrap();
        let (q, kin) = packet_operators(10, &wp);
        // ⟨χ₀|Q²|χ₀⟩ = σ² and ⟨χ₀|P²|χ₀⟩ = 1/(4σ²)
        let q2 = &q * &q;
        assert!((q2[(0, 0)].re - 0.49).abs() < 1e-14);
        assert!((kin[(0, 0)].re * 2.0 * wp.m_cl - 1.0 / (4.0 * 0.49)).abs() < 1e-14);
        assert!(hermitian_defect(&kin) < 1e-15);
    }

    #[test]
    fn free_packet_spreads_like_the_wave_packet() {
        // the truncated kinetic generator reproduces ⟨Q²⟩(t) = σ(t)² while the packet stays inside the truncation
        let p = ModelParams::default();
        let wp = WavePacket::new(0, 1.0, &p).unwrap();
        let (q, kin) = packet_operators(30, &wp);
        let prop = Propagator::new(&kin);
        let mut psi = DVector::zeros(30);
        psi[0] = C64::new(1.0, 0.0);
        let t = 0.5 * wp.tau;
        let out = prop.apply(&psi, t);
        let q2 = (out.adjoint() * (&q * &q) * &out)[(0, 0)].re;
        assert!((q2 - wp.width(t).powi(2)).abs() < 1e-8, "{q2}");
    }

    #[test]
    fn interacting_distance_shrinks_with_coupling() {
        let p = ModelParams::default();
        let setup = DuhamelSetup { packet_states: 8, n_max: 2, time_samples: 60, ..DuhamelSetup::for_model(&p) };
        let r = duhamel_experiment(&setup, &[0.2, 0.1, 0.05], &p).unwrap();
        for pt in &r.points {
            assert!(pt.hermitian_defect < 1e-12);
            assert!(pt.sup_distance > 0.0);
        }
        assert!(r.decreasing, "{r:?}");
        assert!(r.within_duhamel, "{r:?}");
    }
}
