//! The bump mollifier `δ^[κ](x) = κ δ^[1](κx)` with `δ^[1] ∝ exp(-1/(1-x²))`.
//!
//! All transforms of the bump use one trapezoid rule in `ξ ∈ (-1, 1)`;
//! because the bump is flat to all orders at ±1 the rule converges faster
//! than any power of the node count.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{require, Result};

pub const DEFAULT_XI_NODES: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct Mollifier {
    pub kappa: f64,
    norm: f64,
    xi: Vec<f64>,
    w: Vec<f64>,
}

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

impl Mollifier {
    pub fn new(kappa: f64) -> Result<Self> {
        Self::with_nodes(kappa, DEFAULT_XI_NODES)
    }

    pub fn with_nodes(kappa: f64, n: usize) -> Result<Self> {
        require(kappa.is_finite() && kappa > 0.0, || format!("cutoff must be positive, got {kappa}"))?;
        require(n >= 16, || format!("mollifier rule needs at least 16 cells, got {n}"))?;
        let h = 2.0 / n as f64;
        let xi: Vec<f64> = (1..n).map(|j| -1.0 + j as f64 * h).collect();
        let raw: Vec<f64> = xi.iter().map(|&x| bump(x) * h).collect();
        let norm = 1.0 / raw.iter().sum::<f64>();
        let w = raw.iter().map(|v| v * norm).collect();
        Ok(Self { kappa, norm, xi, w })
    }

    /// Same ξ-rule at a different cutoff.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        require(kappa.is_finite() && kappa > 0.0, || format!("cutoff must be positive, got {kappa}"))?;
        Ok(Self { kappa, ..self.clone() })
    }

    /// Unit-mass base profile `δ^[1]`.
    pub fn base(&self, x: f64) -> f64 {
        self.norm * bump(x)
    }

    /// `δ^[κ](x)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.kappa * self.base(self.kappa * x)
    }

    pub fn xi_nodes(&self) -> &[f64] {
        &self.xi
    }

    /// Weights `δ^[1](ξ_j) h`; they sum to one.
    pub fn xi_weights(&self) -> &[f64] {
        &self.w
    }

    /// `D(q) = ∫ δ^[1](ξ) cos(qξ) dξ = √(2π) δ̂^[1](q)`.
    pub fn d(&self, q: f64) -> f64 {
        self.xi.iter().zip(&self.w).map(|(&x, &w)| w * (q * x).cos()).sum()
    }

    /// `D'(q) = -∫ ξ δ^[1](ξ) sin(qξ) dξ`.
    pub fn d_prime(&self, q: f64) -> f64 {
        -self.xi.iter().zip(&self.w).map(|(&x, &w)| w * x * (q * x).sin()).sum::<f64>()
    }

    /// Unitary-convention Fourier transform `δ̂^[1](q)`.
    pub fn hat(&self, q: f64) -> f64 {
        self.d(q) / (2.0 * PI).sqrt()
    }

    /// `(δ^[κ] * f)(x) = ∫ δ^[1](ξ) f(x + ξ/κ) dξ` (the bump is even).
    pub fn smear(&self, f: impl Fn(f64) -> f64, x: f64) -> f64 {
        self.xi.iter().zip(&self.w).map(|(&s, &w)| w * f(x + s / self.kappa)).sum()
    }

    /// Largest `q` for which the ξ-rule still resolves `e^{iqξ}` comfortably.
    pub fn q_resolved(&self) -> f64 {
        0.5 * PI * (self.xi.len() + 1) as f64 / 2.0
    }
}

/// Weighted `cos(qξ)` and `sin(qξ)` rows for a batch of `q` values. Applying
/// the table to a matrix of profile samples `f(x + ξ/κ)` yields the smeared
/// transforms `∫ δ^[1](ξ) e^{iqξ} f(x + ξ/κ) dξ` for every `(q, x)` pair.
pub struct SmearTable {
    pub q: Vec<f64>,
    cos: DMatrix<f64>,
    sin: DMatrix<f64>,
}

impl SmearTable {
    pub fn new(mol: &Mollifier, q: &[f64]) -> Self {
        let (nq, nx) = (q.len(), mol.xi.len());
        let cos = DMatrix::from_fn(nq, nx, |i, j| mol.w[j] * (q[i] * mol.xi[j]).cos());
        let sin = DMatrix::from_fn(nq, nx, |i, j| mol.w[j] * (q[i] * mol.xi[j]).sin());
        Self { q: q.to_vec(), cos, sin }
    }

    /// `D(q_i)` for every row.
    pub fn d(&self) -> Vec<f64> {
        self.cos.row_iter().map(|r| r.sum()).collect()
    }

    /// Real and imaginary parts of the smeared transform, shape `(n_q, n_x)`.
    pub fn apply(&self, profile: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        (&self.cos * profile, &self.sin * profile)
    }
}

/// Samples `f(x_j + ξ_i/κ)`, shape `(n_ξ, n_x)`.
pub fn profile_matrix(mol: &Mollifier, xs: &[f64], f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    DMatrix::from_fn(mol.xi.len(), xs.len(), |i, j| f(xs[j] + mol.xi[i] / mol.kappa))
}
