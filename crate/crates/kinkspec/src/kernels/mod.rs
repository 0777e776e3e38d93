//! Regularized operator kernels, Wick constants and counter-terms.

mod smatrix;

pub use smatrix::{a2_diagonal_l1, build_s_matrix, log_det_factor, PlaneWaveBox, SMatrix, ThetaDeformation};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::grid::MomentumGrid;
use crate::mollifier::{profile_matrix, Mollifier, SmearTable};
use crate::params::ModelParams;
use crate::quad::{cutoff_edges, Rule};
use crate::spectral::{eigenfunction_prefactor, psi0, psi1, sech, spectral_weight, symbol};

/// Beyond `|k/κ| = 250` the squared mollifier transform is below 1e-18.
pub const Q_MAX: f64 = 250.0;

fn half_line_rule(mol: &Mollifier, p: &ModelParams, q_max: f64) -> Rule {
    Rule::composite(&cutoff_edges(mol.kappa, p.m, q_max), 16)
}

/// `γ_κ = ½ ∫ |δ̂^[1](k/κ)|² / ω_k dk`.
pub fn gamma_kappa(mol: &Mollifier, p: &ModelParams) -> f64 {
    let r = half_line_rule(mol, p, Q_MAX);
    r.integrate(|k| mol.d(k / mol.kappa).powi(2) / p.omega(k)) / (2.0 * PI)
}

/// `K₀^{1/2}_κ(x, x) = (2π)^{-1} ∫ ω_k D(k/κ)² dk`, independent of `x`.
pub fn k0_half_diagonal(mol: &Mollifier, p: &ModelParams) -> f64 {
    let r = half_line_rule(mol, p, Q_MAX);
    r.integrate(|k| mol.d(k / mol.kappa).powi(2) * p.omega(k)) / PI
}

/// A function of the spectral parameter `λ` with its power-law growth exponent.
pub struct SpectralMultiplier {
    f: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    pub growth: f64,
    pub name: String,
}

impl SpectralMultiplier {
    pub fn new(name: &str, growth: f64, f: impl Fn(f64) -> f64 + Sync + Send + 'static) -> Self {
        Self { f: Box::new(f), growth, name: name.into() }
    }

    /// `λ^s`, with `0^s` taken as 0 for `s ≤ 0`.
    pub fn power(s: f64) -> Self {
        Self::new(&format!("lambda^{s}"), s, move |l| if l == 0.0 && s <= 0.0 { 0.0 } else { l.powf(s) })
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        (self.f)(lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Position,
    Momentum,
}

/// Dense discretization of an integral kernel on a set of axis points.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub label: String,
    pub axis: Axis,
    pub points: Vec<f64>,
    pub data: DMatrix<C64>,
}

impl KernelMatrix {
    /// `max |K - K^†| / max |K|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.data.nrows();
        let scale = self.data.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.data.nrows()).map(|i| self.data[(i, i)]).collect()
    }

    /// `Σ_ij conj(f_i) K_ij g_j w_i w_j`.
    pub fn pair(&self, f: &[f64], g: &[f64], weights: &[f64]) -> C64 {
        let n = self.points.len();
        let mut acc = C64::ZERO;
        for i in 0..n {
            let mut row = C64::ZERO;
            for j in 0..n {
                row += self.data[(i, j)] * g[j] * weights[j];
            }
            acc += f[i] * weights[i] * row;
        }
        acc
    }
}

/// Smeared symbol `G(k, x) = (2m² - k²) D(q) - 3imk T(x, q) - 3m² Σ(x, q)`, `q = k/κ`,
/// so that `(δ^[κ] * E_k)(x) = c_k e^{ikx} G(k, x)`. Rows index `k`.
pub(crate) fn smeared_symbol(ks: &[f64], xs: &[f64], mol: Option<&Mollifier>, p: &ModelParams) -> DMatrix<C64> {
    let m = p.m;
    match mol {
        None => DMatrix::from_fn(ks.len(), xs.len(), |i, j| symbol(ks[i], xs[j], p)),
        Some(mol) => {
            let q: Vec<f64> = ks.iter().map(|k| k / mol.kappa).collect();
            let table = SmearTable::new(mol, &q);
            let d = table.d();
            let (tr, ti) = table.apply(&profile_matrix(mol, xs, |y| (m * y).tanh()));
            let (sr, si) = table.apply(&profile_matrix(mol, xs, |y| sech(m * y).powi(2)));
            DMatrix::from_fn(ks.len(), xs.len(), |i, j| {
                let k = ks[i];
                let t = C64::new(tr[(i, j)], ti[(i, j)]);
                let s = C64::new(sr[(i, j)], si[(i, j)]);
                (2.0 * m * m - k * k) * d[i] - C64::new(0.0, 3.0 * m * k) * t - 3.0 * m * m * s
            })
        }
    }
}

fn smeared_bound_state(xs: &[f64], mol: Option<&Mollifier>, f: impl Fn(f64) -> f64) -> Vec<f64> {
    xs.iter().map(|&x| mol.map_or_else(|| f(x), |m| m.smear(&f, x))).collect()
}

fn check_regularity(f: &SpectralMultiplier, mol: Option<&Mollifier>) -> Result<()> {
    if mol.is_none() && 2.0 * f.growth >= -1.0 {
        return Err(Error::Divergent(format!(
            "the diagonal of {} diverges without a cutoff (growth exponent {})",
            f.name, f.growth
        )));
    }
    Ok(())
}

/// Kernel of `F(K)` smeared by the mollifier on both sides.
pub fn regularized_kernel(
    f: &SpectralMultiplier,
    mol: Option<&Mollifier>,
    xs: &[f64],
    kgrid: &MomentumGrid,
    p: &ModelParams,
) -> Result<KernelMatrix> {
    check_regularity(f, mol)?;
    let g = smeared_symbol(&kgrid.nodes, xs, mol, p);
    let nk = kgrid.len();
    // columns carry e^{ikx}; rows the k index
    let a = DMatrix::from_fn(nk, xs.len(), |i, j| {
        let k = kgrid.nodes[i];
        eigenfunction_prefactor(k, p) * g[(i, j)] * C64::from_polar(1.0, k * xs[j])
    });
    let scale: Vec<f64> = kgrid
        .nodes
        .iter()
        .zip(&kgrid.weights)
        .map(|(&k, &w)| w * f.eval(k * k + 4.0 * p.m * p.m) / (2.0 * PI))
        .collect();
    let b = DMatrix::from_fn(nk, xs.len(), |i, j| a[(i, j)] * scale[i]);
    let mut data = a.transpose() * b.map(|v| v.conj());
    let z = smeared_bound_state(xs, mol, |x| psi0(x, p));
    let s = smeared_bound_state(xs, mol, |x| psi1(x, p));
    let (f0, f1) = (f.eval(0.0), f.eval(3.0 * p.m * p.m));
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            data[(i, j)] += f0 * z[i] * z[j] + f1 * s[i] * s[j];
        }
    }
    Ok(KernelMatrix { label: format!("{}(K)", f.name), axis: Axis::Position, points: xs.to_vec(), data })
}

/// Kernel of `F(K₀)` smeared by the mollifier on both sides.
pub fn regularized_free_kernel(
    f: &SpectralMultiplier,
    mol: Option<&Mollifier>,
    xs: &[f64],
    kgrid: &MomentumGrid,
    p: &ModelParams,
) -> Result<KernelMatrix> {
    check_regularity(f, mol)?;
    let c: Vec<f64> = kgrid
        .nodes
        .iter()
        .zip(&kgrid.weights)
        .map(|(&k, &w)| {
            let d = mol.map_or(1.0, |m| m.d(k / m.kappa));
            w * d * d * f.eval(k * k + 4.0 * p.m * p.m) / (2.0 * PI)
        })
        .collect();
    let data = DMatrix::from_fn(xs.len(), xs.len(), |i, j| {
        let r = xs[i] - xs[j];
        kgrid.nodes.iter().zip(&c).map(|(&k, &w)| C64::from_polar(w, k * r)).sum()
    });
    Ok(KernelMatrix { label: format!("{}(K0)", f.name), axis: Axis::Position, points: xs.to_vec(), data })
}

/// Continuum integrand of `A₃(x, y)` at momentum `k`, without the `(2π)^{-1}`.
pub fn a3_continuum_integrand(k: f64, x: f64, y: f64, p: &ModelParams) -> C64 {
    let pk = spectral_weight(k, p);
    (symbol(k, y, p).conj() * symbol(k, x, p) - pk) * C64::from_polar(1.0, k * (x - y)) / (pk * p.omega(k))
}

/// Kernel of `(K^θ)^{-1/2} - K₀^{-1/2}` with `K^θ = K + θ P₀`.
pub fn kernel_a3(theta: f64, xs: &[f64], kgrid: &MomentumGrid, p: &ModelParams) -> Result<KernelMatrix> {
    require(theta.is_finite() && theta > 0.0, || format!("theta must be positive, got {theta}"))?;
    let nk = kgrid.len();
    let fx = DMatrix::from_fn(nk, xs.len(), |i, j| {
        let k = kgrid.nodes[i];
        symbol(k, xs[j], p) * C64::from_polar(1.0, k * xs[j])
    });
    let ex = DMatrix::from_fn(nk, xs.len(), |i, j| C64::from_polar(1.0, kgrid.nodes[i] * xs[j]));
    let c: Vec<f64> = kgrid
        .nodes
        .iter()
        .zip(&kgrid.weights)
        .map(|(&k, &w)| w / (spectral_weight(k, p) * p.omega(k) * 2.0 * PI))
        .collect();
    let pk: Vec<f64> = kgrid.nodes.iter().map(|&k| spectral_weight(k, p)).collect();
    let fx_w = DMatrix::from_fn(nk, xs.len(), |i, j| fx[(i, j)].conj() * c[i]);
    let ex_w = DMatrix::from_fn(nk, xs.len(), |i, j| ex[(i, j)].conj() * c[i] * pk[i]);
    let mut data = fx.transpose() * fx_w - ex.transpose() * ex_w;
    let a = 1.0 / (3f64.sqrt() * p.m);
    let b = 1.0 / theta.sqrt();
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            data[(i, j)] += a * psi1(xs[i], p) * psi1(xs[j], p) + b * psi0(xs[i], p) * psi0(xs[j], p);
        }
    }
    Ok(KernelMatrix { label: format!("A3(theta={theta})"), axis: Axis::Position, points: xs.to_vec(), data })
}

/// Wick power `:φⁿ:` with respect to variance `γ`, by the Hermite recurrence
/// `:φ^{n+1}: = φ :φⁿ: - n γ :φ^{n-1}:`.
pub fn wick_power(phi: f64, n: u32, gamma: f64) -> f64 {
    let (mut a, mut b) = (1.0, phi);
    if n == 0 {
        return a;
    }
    for j in 1..n {
        let c = phi * b - j as f64 * gamma * a;
        a = b;
        b = c;
    }
    b
}

/// `2mg φ³ + ½ g² φ⁴`.
pub fn raw_interaction_density(phi: f64, p: &ModelParams) -> f64 {
    2.0 * p.m * p.g * phi.powi(3) + 0.5 * p.g * p.g * phi.powi(4)
}

/// `2mg :φ³: + ½ g² :φ⁴:`.
pub fn wick_interaction_density(phi: f64, gamma: f64, p: &ModelParams) -> f64 {
    2.0 * p.m * p.g * wick_power(phi, 3, gamma) + 0.5 * p.g * p.g * wick_power(phi, 4, gamma)
}

/// Vacuum-sector counter-term density
/// `-3g²γφ² - 6mgγφ - ½K₀^{1/2}_κ(x,x) + (3g²/2)γ²`.
pub fn vacuum_counterterm_density(phi: f64, gamma: f64, k0_half_diag: f64, p: &ModelParams) -> f64 {
    let g = p.g;
    -3.0 * g * g * gamma * phi * phi - 6.0 * p.m * g * gamma * phi - 0.5 * k0_half_diag + 1.5 * g * g * gamma * gamma
}

/// The same subtraction expressed in the kink sector, where the vacuum field
/// is `-Φ₀ + Φ_S(x) + φ`.
pub fn soliton_counterterm_density(phi: f64, x: f64, gamma: f64, k0_half_diag: f64, p: &ModelParams) -> f64 {
    let shifted = -p.phi0() + crate::spectral::soliton_profile(x, p) + phi;
    vacuum_counterterm_density(shifted, gamma, k0_half_diag, p)
}

/// Report for the zero-point discrepancy integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroPoint {
    pub kappa: f64,
    /// `∫ [6m²γ_κ sech²(mx) - 6m² ∭ ...] dx` as written, with the `(2π)^{-1}` measure on `k`.
    pub value: f64,
    /// The same quantity after the substitution `w = κ(x' - x)`.
    pub substituted: f64,
    /// `∫ |ρ(x)| dx` of the pointwise integrand before the x-integration.
    pub density_l1: f64,
    /// `κ^{-1} ∫ |δ̂^[1](k/κ)| / ω_k dk`, the scale that controls the bound.
    pub bound_scale: f64,
}

/// The discrepancy between the two ways of writing the `sech²` zero-point
/// term, on a uniform x-grid of spacing `h` over `[-x_max, x_max]`.
pub fn zero_point_discrepancy(mol: &Mollifier, x_max: f64, h: f64, p: &ModelParams) -> Result<ZeroPoint> {
    require(mol.kappa > p.m, || format!("cutoff {} must exceed m = {}", mol.kappa, p.m))?;
    let m = p.m;
    let rule = half_line_rule(mol, p, Q_MAX);
    let n = (x_max / h).round() as usize;
    let xs: Vec<f64> = (0..=2 * n).map(|i| -x_max + i as f64 * h).collect();
    let wx: Vec<f64> = (0..xs.len()).map(|i| if i == 0 || i == 2 * n { 0.5 * h } else { h }).collect();
    let gamma = gamma_kappa(mol, p);
    let q: Vec<f64> = rule.nodes.iter().map(|k| k / mol.kappa).collect();
    let table = SmearTable::new(mol, &q);
    let d = table.d();
    let (sr, _) = table.apply(&profile_matrix(mol, &xs, |y| sech(m * y).powi(2)));
    // Inner k-integral over the full line: the real part is even in k.
    let mut value = 0.0;
    let mut l1 = 0.0;
    for (j, &x) in xs.iter().enumerate() {
        let inner: f64 = (0..rule.len()).map(|i| rule.weights[i] * d[i] * sr[(i, j)] / p.omega(rule.nodes[i])).sum::<f64>() / PI;
        let rho = 6.0 * m * m * gamma * sech(m * x).powi(2) - 6.0 * m * m * 0.5 * inner;
        value += wx[j] * rho;
        l1 += wx[j] * rho.abs();
    }
    // Substituted form: with w = κ(x' - x) the x-integral of the sech² difference
    // has the closed antiderivative tanh/m on the window [-x_max, x_max].
    let tw = (m * x_max).tanh();
    let xi = mol.xi_nodes();
    let wxi = mol.xi_weights();
    let mut substituted = 0.0;
    for (i, &k) in rule.nodes.iter().enumerate() {
        let qq = q[i];
        let window: f64 = xi
            .iter()
            .zip(wxi)
            .map(|(&w, &c)| {
                let a = w / mol.kappa;
                c * (qq * w).cos() * (2.0 * tw - (m * (x_max + a)).tanh() - (m * (x_max - a)).tanh()) / m
            })
            .sum();
        substituted += rule.weights[i] * d[i] * window / p.omega(k);
    }
    substituted *= 3.0 * m * m / PI;
    let bound_scale = rule.integrate(|k| mol.hat(k / mol.kappa).abs() / p.omega(k)) * 2.0 / mol.kappa;
    Ok(ZeroPoint { kappa: mol.kappa, value, substituted, density_l1: l1, bound_scale })
}
