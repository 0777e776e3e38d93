//! Free evolution of a packet ⊗ boson state: mode phases rotate, the packet spreads.

use serde::{Deserialize, Serialize};

use super::space::{free_energies, TruncatedFockState};
use crate::wavepacket::Superposition;
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    pub packet: Superposition,
    /// Time at which `packet` is to be evaluated.
    pub t: f64,
    pub fock: TruncatedFockState,
}

impl ProductState {
    pub fn norm_sqr(&self) -> f64 {
        self.packet.norm_sqr() * self.fock.norm_sqr()
    }
}

/// `exp(-it H₀)` with `H₀ = P²/2m_cl + Σ ω_μ n_μ`; `freqs` in slot order.
pub fn quadratic_evolution(state: &ProductState, freqs: &[f64], t: f64) -> ProductState {
    let e = free_energies(&state.fock.basis, freqs);
    let amps = state.fock.amps.iter().zip(&e).map(|(a, e)| a * C64::from_polar(1.0, -t * e)).collect();
    ProductState {
        packet: state.packet.clone(),
        t: state.t + t,
        fock: TruncatedFockState { basis: state.fock.basis.clone(), amps },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitarityReport {
    pub max_defect: f64,
    pub steps: usize,
}

/// Largest `|‖U(t)Ψ‖ - ‖Ψ‖|` over the time samples.
pub fn unitarity_sweep(state: &ProductState, freqs: &[f64], times: &[f64]) -> UnitarityReport {
    let n0 = state.norm_sqr().sqrt();
    let max_defect = times
        .iter()
        .map(|&t| (quadratic_evolution(state, freqs, t).fock.norm() * state.packet.norm_sqr().sqrt() - n0).abs())
        .fold(0.0, f64::max);
    UnitarityReport { max_defect, steps: times.len() }
}
