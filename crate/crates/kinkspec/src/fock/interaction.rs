//! Wick-monomial kernels of the kink-sector interaction density
//! `b(x)[2mg tanh(mx) :φ³_κ: + ½g² :φ⁴_κ:]` after the shift `φ_κ = Y + φ̃_κ`,
//! with `Y = -√m_cl Q ψ₀(x)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::space::ModeSet;
use super::wick::WickKernel;
use crate::error::{require, Result};
use crate::grid::Grid;
use crate::kernels::{smeared_symbol, Q_MAX};
use crate::mollifier::{profile_matrix, Mollifier, SmearTable};
use crate::params::ModelParams;
use crate::quad::{cutoff_edges, Rule};
use crate::spectral::{eigenfunction_prefactor, psi0, psi1, sech};
use crate::C64;

/// Smeared mode functions `u_μ(x)` with `φ̃_κ(x) = Σ u_μ(x) a_μ + conj(u_μ(x)) a†_μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFunctions {
    pub xs: Vec<f64>,
    pub u: Vec<Vec<C64>>,
}

pub fn mode_functions(modes: &ModeSet, mol: &Mollifier, xs: &[f64], p: &ModelParams) -> ModeFunctions {
    let mut u = Vec::with_capacity(modes.len());
    if modes.with_discrete {
        let c = 1.0 / (2.0 * modes.omega_d).sqrt();
        u.push(xs.iter().map(|&x| C64::new(c * mol.smear(|y| psi1(y, p), x), 0.0)).collect());
    }
    let g = smeared_symbol(&modes.ks, xs, Some(mol), p);
    for (i, (&k, &w)) in modes.ks.iter().zip(&modes.weights).enumerate() {
        let c = eigenfunction_prefactor(k, p) * (w / (2.0 * PI * 2.0 * modes.omegas[i])).sqrt();
        u.push(xs.iter().enumerate().map(|(j, &x)| c * g[(i, j)] * C64::from_polar(1.0, k * x)).collect());
    }
    ModeFunctions { xs: xs.to_vec(), u }
}

/// `δγ_κ(x) = ⟨0|φ̃_κ(x)²|0⟩ - γ_κ`, shape mode included, on the given points.
pub fn delta_gamma(mol: &Mollifier, xs: &[f64], p: &ModelParams) -> Vec<f64> {
    let m = p.m;
    let rule = Rule::composite(&cutoff_edges(mol.kappa, m, Q_MAX), 16);
    let q: Vec<f64> = rule.nodes.iter().map(|k| k / mol.kappa).collect();
    let table = SmearTable::new(mol, &q);
    let d = table.d();
    let (tr, ti) = table.apply(&profile_matrix(mol, xs, |y| (m * y).tanh()));
    let (sr, si) = table.apply(&profile_matrix(mol, xs, |y| sech(m * y).powi(2)));
    let m2 = m * m;
    xs.iter()
        .enumerate()
        .map(|(j, &x)| {
            let cont: f64 = (0..rule.len())
                .map(|i| {
                    let k = rule.nodes[i];
                    let pk = (k * k + m2) * (k * k + 4.0 * m2);
                    let re = (2.0 * m2 - k * k) * d[i] + 3.0 * m * k * ti[(i, j)] - 3.0 * m2 * sr[(i, j)];
                    let im = -3.0 * m * k * tr[(i, j)] - 3.0 * m2 * si[(i, j)];
                    rule.weights[i] * (re * re + im * im - pk * d[i] * d[i]) / (pk * p.omega(k))
                })
                .sum::<f64>()
                / (2.0 * PI);
            cont + mol.smear(|y| psi1(y, p), x).powi(2) / (2.0 * p.omega_d())
        })
        .collect()
}

/// One monomial `coupling · Q^a · ∫ c(x) :φ̃ⁿ:(x) dx`, with `c` absorbed into the kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionTerm {
    pub label: String,
    pub q_power: usize,
    pub field_power: usize,
    /// Power of `g` multiplying the term.
    pub g_power: i32,
    /// Everything except `g`: `2m` or `½`, the binomial weight and `(-√m_cl)^a`.
    pub coupling: f64,
    /// Kernels for `r = 0..=n` creators.
    pub kernels: Vec<WickKernel>,
}

impl InteractionTerm {
    /// The c-number `∫ c(x) dx` of a term without field operators.
    pub fn scalar(&self) -> Option<C64> {
        (self.field_power == 0).then(|| self.kernels[0].data[0])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionKernels {
    pub kappa: f64,
    pub terms: Vec<InteractionTerm>,
    pub delta_gamma: Vec<f64>,
    pub warnings: Vec<String>,
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Kernels of `∫ c(x) :φ̃ⁿ:(x) dx`, one per number of creators.
pub fn monomial_kernels(c: &[f64], weights: &[f64], mf: &ModeFunctions, n: usize) -> Vec<WickKernel> {
    let n_modes = mf.u.len();
    (0..=n)
        .map(|r| {
            let scale = binomial(n, r);
            WickKernel::from_fn(r, n - r, n_modes, |o, i| {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..c.len() {
                    let mut v = C64::new(c[j] * weights[j], 0.0);
                    for &mu in o {
                        v *= mf.u[mu][j].conj();
                    }
                    for &nu in i {
                        v *= mf.u[nu][j];
                    }
                    acc += v;
                }
                acc * scale
            })
        })
        .collect()
}

// (label, Y power, field power, δγ power, binomial weight)
const CUBIC: [(&str, usize, usize, i32, f64); 6] = [
    ("Y^3", 3, 0, 0, 1.0),
    ("3Y^2 phi", 2, 1, 0, 3.0),
    ("3Y :phi^2:", 1, 2, 0, 3.0),
    (":phi^3:", 0, 3, 0, 1.0),
    ("3 dgamma phi", 0, 1, 1, 3.0),
    ("3Y dgamma", 1, 0, 1, 3.0),
];
const QUARTIC: [(&str, usize, usize, i32, f64); 9] = [
    ("Y^4", 4, 0, 0, 1.0),
    ("4Y^3 phi", 3, 1, 0, 4.0),
    ("6Y^2 :phi^2:", 2, 2, 0, 6.0),
    ("4Y :phi^3:", 1, 3, 0, 4.0),
    (":phi^4:", 0, 4, 0, 1.0),
    ("6Y^2 dgamma", 2, 0, 1, 6.0),
    ("12Y dgamma phi", 1, 1, 1, 12.0),
    ("-6 dgamma :phi^2:", 0, 2, 1, -6.0),
    ("3 dgamma^2", 0, 0, 2, 3.0),
];

/// Assembles every monomial of the shifted cubic and quartic densities against
/// the spatial cutoff `b` sampled on `grid`. With `lower_bound = Some(δ)` a
/// warning is recorded where `b < δ sech²(mx)`.
pub fn build_interaction_kernels(
    b: &[f64],
    grid: &Grid,
    mol: &Mollifier,
    modes: &ModeSet,
    p: &ModelParams,
    lower_bound: Option<f64>,
) -> Result<InteractionKernels> {
    require(b.len() == grid.n, || format!("cutoff has {} samples, grid has {}", b.len(), grid.n))?;
    require(b.iter().all(|v| v.is_finite()), || "cutoff samples must be finite".into())?;
    let m = p.m;
    let mut warnings = Vec::new();
    if let Some(delta) = lower_bound {
        let worst = grid.nodes.iter().zip(b).map(|(&x, &bv)| bv - delta * sech(m * x).powi(2)).fold(f64::INFINITY, f64::min);
        if worst < 0.0 {
            warnings.push(format!(
                "spatial cutoff drops below {delta}·sech²(mx) (by {:.3e}); the lower bound on the spectrum assumes it does not",
                -worst
            ));
        }
    }
    let xs = &grid.nodes;
    let dg = delta_gamma(mol, xs, p);
    let mf = mode_functions(modes, mol, xs, p);
    let y_unit = -p.m_cl().sqrt();
    let mut terms = Vec::new();
    for (table, g_power, pref, odd) in [(&CUBIC[..], 1, 2.0 * m, true), (&QUARTIC[..], 2, 0.5, false)] {
        for &(label, a, n, dpow, weight) in table {
            let c: Vec<f64> = xs
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    let shape = if odd { (m * x).tanh() } else { 1.0 };
                    b[j] * shape * psi0(x, p).powi(a as i32) * dg[j].powi(dpow)
                })
                .collect();
            terms.push(InteractionTerm {
                label: format!("{} {label}", if odd { "phi^3:" } else { "phi^4:" }),
                q_power: a,
                field_power: n,
                g_power,
                coupling: pref * weight * y_unit.powi(a as i32),
                kernels: monomial_kernels(&c, &grid.weights, &mf, n),
            });
        }
    }
    Ok(InteractionKernels { kappa: mol.kappa, terms, delta_gamma: dg, warnings })
}

/// `Σ_r ‖w_r‖` for `∫ b :φ̃ⁿ: dx`, which dominates `‖(∫ b :φ̃ⁿ:)(1+N)^{-n/2}‖`
/// up to the combinatorial constant of the weighted Wick bound.
pub fn monomial_norm(b: &[f64], grid: &Grid, mf: &ModeFunctions, n: usize) -> f64 {
    monomial_kernels(b, &grid.weights, mf, n).iter().map(WickKernel::operator_norm).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(kappa: f64) -> (ModelParams, Grid, Mollifier, ModeSet) {
        let p = ModelParams::default();
        let grid = Grid::new(20.0, 401).unwrap();
        let mol = Mollifier::new(kappa).unwrap();
        let modes = ModeSet::new(&p, 3, 3.0, true).unwrap();
        (p, grid, mol, modes)
    }

    #[test]
    fn delta_gamma_is_bounded_in_kappa() {
        let p = ModelParams::default();
        let xs: Vec<f64> = (0..=40).map(|i| -4.0 + 0.2 * i as f64).collect();
        let sup = |kappa: f64| {
            let mol = Mollifier::new(kappa).unwrap();
            delta_gamma(&mol, &xs, &p).iter().fold(0.0f64, |a, v| a.max(v.abs()))
        };
        let (a, b) = (sup(100.0), sup(1000.0));
        assert!(a.is_finite() && a > 0.0);
        assert!((a - b).abs() < 0.05 * a, "{a} {b}");
        let far = delta_gamma(&Mollifier::new(100.0).unwrap(), &[18.0], &p)[0];
        assert!(far.abs() < 1e-6 * a);
    }

    #[test]
    fn vacuum_two_point_matches_mode_sum() {
        // with many modes the mode sum Σ|u_μ|² approaches γ_κ + δγ_κ at a point
        let p = ModelParams::default();
        let mol = Mollifier::new(2.0).unwrap();
        let modes = ModeSet::new(&p, 800, 80.0, true).unwrap();
        let xs = [0.4];
        let mf = mode_functions(&modes, &mol, &xs, &p);
        let sum: f64 = mf.u.iter().map(|u| u[0].norm_sqr()).sum();
        let want = crate::kernels::gamma_kappa(&mol, &p) + delta_gamma(&mol, &xs, &p)[0];
        assert!((sum - want).abs() < 1e-6 * want, "{sum} {want}");
    }

    #[test]
    fn odd_cubic_scalar_vanishes_for_even_cutoff() {
        let (p, grid, mol, modes) = setup(100.0);
        let b = grid.sample(|x| sech(0.5 * x).powi(2));
        let ik = build_interaction_kernels(&b, &grid, &mol, &modes, &p, None).unwrap();
        let y3 = ik.terms.iter().find(|t| t.label.ends_with(" Y^3")).unwrap();
        assert!(y3.scalar().unwrap().norm() < 1e-14);
        let y4 = ik.terms.iter().find(|t| t.label.ends_with(" Y^4")).unwrap();
        assert!(y4.scalar().unwrap().re > 0.0);
        assert_eq!(ik.terms.len(), 15);
        for t in &ik.terms {
            assert_eq!(t.kernels.len(), t.field_power + 1);
            for k in &t.kernels {
                assert!(k.symmetry_defect() < 1e-12);
            }
            // the r and n-r kernels are adjoint, so each term is Hermitian
            for (r, k) in t.kernels.iter().enumerate() {
                let partner = &t.kernels[t.field_power - r];
                let adj = k.adjoint();
                assert!(adj.data.iter().zip(&partner.data).all(|(a, b)| (a - b).norm() < 1e-12));
            }
        }
    }

    #[test]
    fn positivity_warning() {
        let (p, grid, mol, modes) = setup(100.0);
        let narrow = grid.sample(|x| (-x * x).exp());
        let ik = build_interaction_kernels(&narrow, &grid, &mol, &modes, &p, Some(0.5)).unwrap();
        assert_eq!(ik.warnings.len(), 1);
        let wide = grid.sample(|x| sech(0.5 * x).powi(2));
        let ok = build_interaction_kernels(&wide, &grid, &mol, &modes, &p, Some(0.5)).unwrap();
        assert!(ok.warnings.is_empty());
    }

    #[test]
    fn monomial_norms_are_stable_in_kappa() {
        let p = ModelParams::default();
        let grid = Grid::new(20.0, 401).unwrap();
        let modes = ModeSet::new(&p, 3, 3.0, true).unwrap();
        let b = grid.sample(|x| sech(0.5 * x).powi(2));
        for n in 2..=4 {
            let norms: Vec<f64> = [100.0, 1000.0]
                .iter()
                .map(|&k| monomial_norm(&b, &grid, &mode_functions(&modes, &Mollifier::new(k).unwrap(), &grid.nodes, &p), n))
                .collect();
            assert!(norms[0].is_finite() && norms[0] > 0.0);
            assert!((norms[0] - norms[1]).abs() < 1e-3 * norms[0], "{n} {norms:?}");
        }
    }
}
