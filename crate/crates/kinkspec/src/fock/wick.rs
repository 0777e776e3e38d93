//! Normal-ordered operators `Σ a†_{i₁}…a†_{i_m} w(i; j) a_{j₁}…a_{j_n}`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::space::{Applied, FockBasis, TruncatedFockState};
use crate::error::{require, Result};
use crate::C64;

/// Dense kernel over `n_modes^(m_out + n_in)` slots, outgoing indices first,
/// each index running fastest at the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WickKernel {
    pub m_out: usize,
    pub n_in: usize,
    pub n_modes: usize,
    pub data: Vec<C64>,
}

fn tuple_of(mut flat: usize, len: usize, base: usize, out: &mut [usize]) {
    for slot in (0..len).rev() {
        out[slot] = flat % base;
        flat /= base;
    }
}

fn flat_of(t: &[usize], base: usize) -> usize {
    t.iter().fold(0, |acc, &i| acc * base + i)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

impl WickKernel {
    pub fn zeros(m_out: usize, n_in: usize, n_modes: usize) -> Self {
        Self { m_out, n_in, n_modes, data: vec![C64::new(0.0, 0.0); n_modes.pow((m_out + n_in) as u32)] }
    }

    pub fn from_fn(m_out: usize, n_in: usize, n_modes: usize, f: impl Fn(&[usize], &[usize]) -> C64) -> Self {
        let mut k = Self::zeros(m_out, n_in, n_modes);
        let mut t = vec![0; m_out + n_in];
        for (flat, v) in k.data.iter_mut().enumerate() {
            tuple_of(flat, m_out + n_in, n_modes, &mut t);
            *v = f(&t[..m_out], &t[m_out..]);
        }
        k
    }

    pub fn get(&self, out: &[usize], inp: &[usize]) -> C64 {
        self.data[flat_of(out, self.n_modes) * self.n_modes.pow(self.n_in as u32) + flat_of(inp, self.n_modes)]
    }

    /// Average over permutations of the outgoing and of the incoming slots.
    pub fn symmetrized(&self) -> Self {
        let (po, pi) = (permutations(self.m_out), permutations(self.n_in));
        let scale = 1.0 / (po.len() * pi.len()) as f64;
        Self::from_fn(self.m_out, self.n_in, self.n_modes, |o, i| {
            let mut acc = C64::new(0.0, 0.0);
            let mut oo = vec![0; o.len()];
            let mut ii = vec![0; i.len()];
            for p in &po {
                for (d, &s) in oo.iter_mut().zip(p) {
                    *d = o[s];
                }
                for q in &pi {
                    for (d, &s) in ii.iter_mut().zip(q) {
                        *d = i[s];
                    }
                    acc += self.get(&oo, &ii);
                }
            }
            acc * scale
        })
    }

    pub fn symmetry_defect(&self) -> f64 {
        let s = self.symmetrized();
        self.data.iter().zip(&s.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Kernel of the adjoint operator, `w*(j; i) = conj w(i; j)`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n_in, self.m_out, self.n_modes, |o, i| self.get(i, o).conj())
    }

    pub fn hilbert_schmidt(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Norm of `w` as a map `Sym^n → Sym^m` of the one-particle space.
    pub fn operator_norm(&self) -> f64 {
        let a_out = symmetric_embedding(self.n_modes, self.m_out);
        let a_in = symmetric_embedding(self.n_modes, self.n_in);
        let rows = self.n_modes.pow(self.m_out as u32);
        let cols = self.n_modes.pow(self.n_in as u32);
        let w = DMatrix::from_row_slice(rows, cols, &self.data);
        let m = &a_out * w * a_in.transpose();
        spectral_norm(&m)
    }
}

/// Rows: normalized symmetric tensors of `n` bosons; columns: all index tuples.
fn symmetric_embedding(n_modes: usize, n: usize) -> DMatrix<C64> {
    let basis = FockBasis::new(n_modes, n).expect("valid sector");
    let sector = basis.sector(n);
    let len = n_modes.pow(n as u32);
    let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
    let mut a = DMatrix::zeros(sector.len(), len);
    let mut t = vec![0; n];
    let mut occ = vec![0u8; n_modes];
    for flat in 0..len {
        tuple_of(flat, n, n_modes, &mut t);
        occ.iter_mut().for_each(|o| *o = 0);
        for &i in &t {
            occ[i] += 1;
        }
        let row = basis.index_of(&occ).expect("tuple in sector") - sector.start;
        let c = (occ.iter().map(|&o| fact(o as usize)).product::<f64>() / fact(n)).sqrt();
        a[(row, flat)] = C64::new(c, 0.0);
    }
    a
}

fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Applies the Wick operator; amplitude pushed above the cap is reported as dropped.
pub fn apply_wick(wk: &WickKernel, state: &TruncatedFockState) -> Applied {
    let basis = &state.basis;
    assert_eq!(wk.n_modes, basis.n_modes, "kernel and basis disagree on the mode count");
    let n_in_tuples = wk.n_modes.pow(wk.n_in as u32);
    let n_out_tuples = wk.n_modes.pow(wk.m_out as u32);
    let (mut out, mut dropped) = (TruncatedFockState::zero(basis.clone()), 0.0);
    let mut lowered = vec![0u8; wk.n_modes];
    let mut raised = vec![0u8; wk.n_modes];
    let mut ti = vec![0; wk.n_in];
    let mut to = vec![0; wk.m_out];
    let mut spill = std::collections::HashMap::<Vec<u8>, C64>::new();
    for (s, amp) in state.amps.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        for ji in 0..n_in_tuples {
            tuple_of(ji, wk.n_in, wk.n_modes, &mut ti);
            lowered.copy_from_slice(&basis.states[s]);
            let mut fa = 1.0;
            for &j in &ti {
                if lowered[j] == 0 {
                    fa = 0.0;
                    break;
                }
                fa *= (lowered[j] as f64).sqrt();
                lowered[j] -= 1;
            }
            if fa == 0.0 {
                continue;
            }
            for jo in 0..n_out_tuples {
                let w = wk.data[jo * n_in_tuples + ji];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                tuple_of(jo, wk.m_out, wk.n_modes, &mut to);
                raised.copy_from_slice(&lowered);
                let mut fc = 1.0;
                for &i in &to {
                    raised[i] += 1;
                    fc *= (raised[i] as f64).sqrt();
                }
                let v = amp * w * fa * fc;
                match basis.index_of(&raised) {
                    Some(t) => out.amps[t] += v,
                    None => *spill.entry(raised.clone()).or_default() += v,
                }
            }
        }
    }
    for v in spill.values() {
        dropped += v.norm_sqr();
    }
    Applied { state: out, dropped }
}

/// Matrix of the Wick operator in the truncated basis.
pub fn wick_matrix(wk: &WickKernel, basis: &Arc<FockBasis>) -> DMatrix<C64> {
    let cols: Vec<Vec<C64>> = (0..basis.dim())
        .into_par_iter()
        .map(|j| {
            let mut e = TruncatedFockState::zero(basis.clone());
            e.amps[j] = C64::new(1.0, 0.0);
            apply_wick(wk, &e).state.amps
        })
        .collect();
    DMatrix::from_fn(basis.dim(), basis.dim(), |i, j| cols[j][i])
}

/// `‖(1+N)^{-m/2} W (1+N)^{-n/2}‖` in the truncated space, block by block in `N`.
pub fn weighted_norm(wk: &WickKernel, basis: &Arc<FockBasis>) -> f64 {
    let w = wick_matrix(wk, basis);
    let mut best: f64 = 0.0;
    for n in 0..=basis.n_max {
        let target = n + wk.m_out;
        if target < wk.n_in || target - wk.n_in > basis.n_max {
            continue;
        }
        let (ri, ci) = (basis.sector(target - wk.n_in), basis.sector(n));
        let scale = (1.0 + (target - wk.n_in) as f64).powf(-(wk.m_out as f64) / 2.0)
            * (1.0 + n as f64).powf(-(wk.n_in as f64) / 2.0);
        let block = w.view((ri.start, ci.start), (ri.len(), ci.len())).map(|v| v * scale);
        best = best.max(spectral_norm(&block));
    }
    best
}

pub fn random_kernel(rng: &mut impl Rng, m_out: usize, n_in: usize, n_modes: usize) -> WickKernel {
    let mut raw = WickKernel::zeros(m_out, n_in, n_modes);
    for v in raw.data.iter_mut() {
        *v = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    raw.symmetrized()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTrial {
    pub m_out: usize,
    pub n_in: usize,
    pub n_modes: usize,
    pub n_max: usize,
    pub weighted: f64,
    pub kernel_norm: f64,
}

impl BoundTrial {
    pub fn ratio(&self) -> f64 {
        self.weighted / self.kernel_norm
    }

    pub fn violates(&self) -> bool {
        self.weighted > self.kernel_norm * (1.0 + 1e-10)
    }
}

/// Randomized check of the weighted Wick bound with `(m, n) ∈ {1,2}²`.
pub fn wick_bound_trials(seed: u64, trials: usize, max_modes: usize, max_cap: usize) -> Result<Vec<BoundTrial>> {
    require(max_modes >= 1 && max_cap >= 2, || "need at least one mode and a cap of two".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let setups: Vec<(WickKernel, usize)> = (0..trials)
        .map(|_| {
            let (m, n) = (rng.random_range(1..=2), rng.random_range(1..=2));
            let modes = rng.random_range(1..=max_modes);
            let cap = rng.random_range(2..=max_cap);
            (random_kernel(&mut rng, m, n, modes), cap)
        })
        .collect();
    setups
        .into_par_iter()
        .map(|(wk, cap)| {
            let basis = Arc::new(FockBasis::new(wk.n_modes, cap)?);
            Ok(BoundTrial {
                m_out: wk.m_out,
                n_in: wk.n_in,
                n_modes: wk.n_modes,
                n_max: cap,
                weighted: weighted_norm(&wk, &basis),
                kernel_norm: wk.operator_norm(),
            })
        })
        .collect()
}
