//! Occupation-number basis with a total-number cap.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::params::ModelParams;
use crate::quad::gauss_legendre;
use crate::C64;

/// Shape mode plus continuum modes at Gauss-Legendre nodes on `[-k_max, k_max]`.
/// The quadrature weight of each node is carried into the mode functions so
/// that sums over modes approximate `∫ dk`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    pub with_discrete: bool,
    pub omega_d: f64,
    pub ks: Vec<f64>,
    pub weights: Vec<f64>,
    pub omegas: Vec<f64>,
}

impl ModeSet {
    pub fn new(p: &ModelParams, continuum: usize, k_max: f64, with_discrete: bool) -> Result<Self> {
        require(k_max.is_finite() && k_max > 0.0, || format!("k_max must be positive, got {k_max}"))?;
        require(continuum > 0 || with_discrete, || "empty mode set".into())?;
        let (ks, weights) = if continuum == 0 {
            (vec![], vec![])
        } else {
            let (x, w) = gauss_legendre(continuum);
            (x.iter().map(|u| u * k_max).collect(), w.iter().map(|w| w * k_max).collect())
        };
        let omegas = ks.iter().map(|&k| p.omega(k)).collect();
        Ok(Self { with_discrete, omega_d: p.omega_d(), ks, weights, omegas })
    }

    pub fn len(&self) -> usize {
        self.ks.len() + usize::from(self.with_discrete)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Frequencies in slot order: the shape mode first when present.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut f = Vec::with_capacity(self.len());
        if self.with_discrete {
            f.push(self.omega_d);
        }
        f.extend_from_slice(&self.omegas);
        f
    }

    /// Momentum of a slot, `None` for the shape mode.
    pub fn momentum(&self, slot: usize) -> Option<f64> {
        let off = usize::from(self.with_discrete);
        (slot >= off).then(|| self.ks[slot - off])
    }
}

/// Occupation vectors with `Σ n ≤ n_max`, sorted by total number and then
/// lexicographically (first mode most significant, descending).
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    pub n_modes: usize,
    pub n_max: usize,
    pub states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    sector_start: Vec<usize>,
}

fn compositions(n_modes: usize, total: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() + 1 == n_modes {
        prefix.push(total as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first as u8);
        compositions(n_modes, total - first, prefix, out);
        prefix.pop();
    }
}

impl FockBasis {
    pub fn new(n_modes: usize, n_max: usize) -> Result<Self> {
        require(n_modes > 0, || "need at least one mode".into())?;
        require(n_max < 64, || format!("occupation cap {n_max} too large"))?;
        let mut states = Vec::new();
        let mut sector_start = Vec::with_capacity(n_max + 2);
        for total in 0..=n_max {
            sector_start.push(states.len());
            compositions(n_modes, total, &mut Vec::with_capacity(n_modes), &mut states);
        }
        sector_start.push(states.len());
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self { n_modes, n_max, states, index, sector_start })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Index range of the states with exactly `n` bosons.
    pub fn sector(&self, n: usize) -> std::ops::Range<usize> {
        if n > self.n_max {
            return self.dim()..self.dim();
        }
        self.sector_start[n]..self.sector_start[n + 1]
    }

    pub fn total(&self, i: usize) -> usize {
        self.states[i].iter().map(|&n| n as usize).sum()
    }
}

/// A vector in the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedFockState {
    pub basis: Arc<FockBasis>,
    pub amps: Vec<C64>,
}

/// Result of a ladder operation: the image plus the norm² that fell above the cap.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub state: TruncatedFockState,
    pub dropped: f64,
}

impl TruncatedFockState {
    pub fn zero(basis: Arc<FockBasis>) -> Self {
        let amps = vec![C64::new(0.0, 0.0); basis.dim()];
        Self { basis, amps }
    }

    pub fn vacuum(basis: Arc<FockBasis>) -> Self {
        let mut s = Self::zero(basis);
        s.amps[0] = C64::new(1.0, 0.0);
        s
    }

    pub fn basis_state(basis: Arc<FockBasis>, occ: &[u8]) -> Result<Self> {
        let i = basis
            .index_of(occ)
            .ok_or_else(|| crate::Error::InvalidParam(format!("occupation {occ:?} outside the truncated basis")))?;
        let mut s = Self::zero(basis);
        s.amps[i] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn axpy(&mut self, c: C64, other: &Self) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self { basis: self.basis.clone(), amps: self.amps.iter().map(|a| a * c).collect() }
    }

    /// `(1 + N)^α` applied sector by sector.
    pub fn number_power(&self, alpha: f64) -> Self {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| a * (1.0 + self.basis.total(i) as f64).powf(alpha))
            .collect();
        Self { basis: self.basis.clone(), amps }
    }

    pub fn number_expectation(&self) -> f64 {
        self.amps.iter().enumerate().map(|(i, a)| a.norm_sqr() * self.basis.total(i) as f64).sum()
    }
}

fn check_mode(state: &TruncatedFockState, mode: usize) {
    assert!(mode < state.basis.n_modes, "mode {mode} out of range");
}

pub fn apply_annihilation(mode: usize, state: &TruncatedFockState) -> TruncatedFockState {
    check_mode(state, mode);
    let basis = &state.basis;
    let mut out = TruncatedFockState::zero(basis.clone());
    let mut occ = vec![0u8; basis.n_modes];
    for (i, a) in state.amps.iter().enumerate() {
        let n = basis.states[i][mode];
        if n == 0 || a.norm_sqr() == 0.0 {
            continue;
        }
        occ.copy_from_slice(&basis.states[i]);
        occ[mode] -= 1;
        let j = basis.index_of(&occ).expect("lowered state stays in the basis");
        out.amps[j] += a * (n as f64).sqrt();
    }
    out
}

pub fn apply_creation(mode: usize, state: &TruncatedFockState) -> Applied {
    check_mode(state, mode);
    let basis = &state.basis;
    let mut out = TruncatedFockState::zero(basis.clone());
    let mut dropped = 0.0;
    let mut occ = vec![0u8; basis.n_modes];
    for (i, a) in state.amps.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let n = basis.states[i][mode];
        let v = a * (n as f64 + 1.0).sqrt();
        if basis.total(i) == basis.n_max {
            dropped += v.norm_sqr();
            continue;
        }
        occ.copy_from_slice(&basis.states[i]);
        occ[mode] += 1;
        let j = basis.index_of(&occ).expect("raised state below the cap");
        out.amps[j] += v;
    }
    Applied { state: out, dropped }
}

/// Diagonal of `Σ ω_μ n_μ` in basis order.
pub fn free_energies(basis: &FockBasis, freqs: &[f64]) -> Vec<f64> {
    basis.states.iter().map(|s| s.iter().zip(freqs).map(|(&n, w)| n as f64 * w).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(m: usize, n: usize) -> Arc<FockBasis> {
        Arc::new(FockBasis::new(m, n).unwrap())
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn graded_lexicographic_layout() {
        let b = basis(3, 2);
        assert_eq!(b.dim(), binom(5, 3));
        assert_eq!(b.states[0], vec![0, 0, 0]);
        assert_eq!(&b.states[1..4], &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(b.states[4], vec![2, 0, 0]);
        for (i, s) in b.states.iter().enumerate() {
            assert_eq!(b.index_of(s), Some(i));
        }
        assert_eq!(b.sector(1), 1..4);
        assert_eq!(basis(5, 8).dim(), binom(13, 5));
    }

    #[test]
    fn annihilation_kills_vacuum() {
        let b = basis(3, 4);
        let v = TruncatedFockState::vacuum(b);
        for mode in 0..3 {
            assert_eq!(apply_annihilation(mode, &v).norm(), 0.0);
        }
    }

    #[test]
    fn canonical_commutator_below_cap() {
        let b = basis(2, 5);
        let mut s = TruncatedFockState::zero(b.clone());
        for (i, a) in s.amps.iter_mut().enumerate() {
            if b.total(i) < b.n_max {
                *a = C64::new(i as f64 * 0.3 - 1.0, 0.1 * i as f64);
            }
        }
        for mode in 0..2 {
            let aad = apply_annihilation(mode, &apply_creation(mode, &s).state);
            let ada = apply_creation(mode, &apply_annihilation(mode, &s)).state;
            let mut diff = aad;
            diff.axpy(C64::new(-1.0, 0.0), &ada);
            diff.axpy(C64::new(-1.0, 0.0), &s);
            assert!(diff.norm() < 1e-12);
        }
        let cross = apply_annihilation(0, &apply_creation(1, &s).state);
        let cross2 = apply_creation(1, &apply_annihilation(0, &s)).state;
        let mut d = cross;
        d.axpy(C64::new(-1.0, 0.0), &cross2);
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn overflow_is_reported() {
        let b = basis(2, 2);
        let s = TruncatedFockState::basis_state(b, &[2, 0]).unwrap();
        let up = apply_creation(0, &s);
        assert_eq!(up.state.norm(), 0.0);
        assert!((up.dropped - 3.0).abs() < 1e-14);
    }

    #[test]
    fn number_operator_is_integer_diagonal() {
        let b = basis(3, 4);
        for i in 0..b.dim() {
            let s = TruncatedFockState::basis_state(b.clone(), &b.states[i]).unwrap();
            let mut n = TruncatedFockState::zero(b.clone());
            for mode in 0..3 {
                let lowered = apply_annihilation(mode, &s);
                n.axpy(C64::new(1.0, 0.0), &apply_creation(mode, &lowered).state);
            }
            let expect = b.total(i) as f64;
            let mut d = n.clone();
            d.axpy(C64::new(-expect, 0.0), &s);
            assert!(d.norm() < 1e-12);
        }
    }

    #[test]
    fn mode_set_layout() {
        let p = ModelParams::default();
        let ms = ModeSet::new(&p, 4, 3.0, true).unwrap();
        assert_eq!(ms.len(), 5);
        assert_eq!(ms.momentum(0), None);
        assert!((ms.weights.iter().sum::<f64>() - 6.0).abs() < 1e-12);
        assert!(ms.frequencies().iter().all(|&w| w > 0.0));
        assert!((ms.frequencies()[0] - 3f64.sqrt()).abs() < 1e-15);
    }
}
