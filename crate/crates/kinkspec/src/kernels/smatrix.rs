//! Plane-wave discretization of `𝕊(θ) = C₀^{1/4}((K^θ)^{1/2} - K₀^{1/2})C₀^{1/4}`
//! with `C₀ = K₀^{-1}` and `K^θ = K + θ P₀`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::params::ModelParams;

const ZERO_EIGEN_TOL: f64 = 1e-10;

/// Periodic box `[-L, L)` with `N` plane waves `e^{ik_n x}/√(2L)`, `k_n = πn/L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveBox {
    pub half_length: f64,
    pub modes: usize,
}

impl PlaneWaveBox {
    /// `L = 20/m`, 512 modes (`k_max ≈ 40m`).
    pub fn for_model(p: &ModelParams) -> Self {
        Self { half_length: 20.0 / p.m, modes: 512 }
    }

    pub fn refined(&self) -> Self {
        Self { modes: 2 * self.modes, ..*self }
    }

    pub fn momenta(&self) -> Vec<f64> {
        let n = self.modes as i64;
        (-n / 2..n - n / 2).map(|j| PI * j as f64 / self.half_length).collect()
    }

    fn validate(&self) -> Result<()> {
        require(self.half_length > 0.0 && self.half_length.is_finite(), || "box half-length must be positive".into())?;
        require(self.modes >= 8 && self.modes.is_multiple_of(2), || format!("mode count must be even and ≥ 8, got {}", self.modes))
    }
}

/// `∫ sech²(mx) e^{-iqx} dx = πq / (m² sinh(πq/2m))`.
pub fn sech2_transform(q: f64, m: f64) -> f64 {
    let a = PI * q / (2.0 * m);
    if a.abs() < 1e-8 {
        2.0 / m
    } else if a.abs() > 700.0 {
        0.0
    } else {
        PI * q / (m * m * a.sinh())
    }
}

/// Parameter of the deformation `K^θ = K + θ P₀` and the packet width it pairs with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaDeformation {
    pub theta: f64,
    pub sigma: f64,
}

impl ThetaDeformation {
    pub fn from_theta(theta: f64, p: &ModelParams) -> Result<Self> {
        require(theta.is_finite() && theta > 0.0, || format!("theta must be positive, got {theta}"))?;
        Ok(Self { theta, sigma: (1.0 / (2.0 * theta.sqrt() * p.m_cl())).sqrt() })
    }

    /// Inverse of `√θ = 1/(2σ² m_cl)`.
    pub fn from_sigma(sigma: f64, p: &ModelParams) -> Result<Self> {
        require(sigma.is_finite() && sigma > 0.0, || format!("sigma must be positive, got {sigma}"))?;
        let root = 1.0 / (2.0 * sigma * sigma * p.m_cl());
        Ok(Self { theta: root * root, sigma })
    }
}

/// Discretized `𝕊(θ)` with its spectrum.
#[derive(Debug, Clone)]
pub struct SMatrix {
    pub theta: f64,
    pub k: Vec<f64>,
    pub matrix: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
    /// `K₀^{1/4} ψ₀` in the plane-wave basis, normalized.
    pub zero_direction: DVector<f64>,
}

impl SMatrix {
    /// Eigenvalue closest to -1 and the overlap of its eigenvector with `K₀^{1/4}ψ₀`.
    pub fn zero_mode_eigen(&self) -> (f64, f64) {
        let (i, lam) = self
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 + 1.0).abs().total_cmp(&(b.1 + 1.0).abs()))
            .map(|(i, &l)| (i, l))
            .expect("non-empty spectrum");
        (lam, self.eigenvectors.column(i).dot(&self.zero_direction).abs())
    }

    /// `|λ_n|` sorted descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self.eigenvalues.iter().map(|l| l.abs()).collect();
        a.sort_by(|x, y| y.total_cmp(x));
        a
    }

    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).sum()
    }

    /// `Σ_{n>N} |λ_n| / Σ_n |λ_n|`.
    pub fn tail_fraction(&self, n: usize) -> f64 {
        let a = self.singular_values();
        let total: f64 = a.iter().sum();
        a.iter().skip(n).sum::<f64>() / total
    }
}

struct Discretization {
    k: Vec<f64>,
    root_k: DMatrix<f64>,
    psi0_hat: DVector<f64>,
}

fn discretize(bx: &PlaneWaveBox, p: &ModelParams) -> Result<Discretization> {
    bx.validate()?;
    let k = bx.momenta();
    let n = k.len();
    let m = p.m;
    let two_l = 2.0 * bx.half_length;
    let kmat = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { k[i] * k[i] + 4.0 * m * m } else { 0.0 };
        diag - 6.0 * m * m * sech2_transform(k[i] - k[j], m) / two_l
    });
    let eig = SymmetricEigen::try_new(kmat, 1e-14, 10_000)
        .ok_or_else(|| Error::Numerical(format!("eigen-solver did not converge for K on {n} modes")))?;
    let lo = eig.eigenvalues.min();
    if lo < -1e-8 * m * m {
        return Err(Error::Numerical(format!("discretized K has a negative eigenvalue {lo:.3e}; box too small")));
    }
    // The discretized zero mode carries round-off of order 1e-14 m²; its root is set to zero.
    let roots = eig.eigenvalues.map(|l| if l < ZERO_EIGEN_TOL * m * m { 0.0 } else { l.sqrt() });
    let u = &eig.eigenvectors;
    let root_k = u * DMatrix::from_diagonal(&roots) * u.transpose();
    let c = (0.75 * m).sqrt() / two_l.sqrt();
    let psi0_hat = DVector::from_iterator(n, k.iter().map(|&q| c * sech2_transform(q, m)));
    Ok(Discretization { k, root_k, psi0_hat })
}

fn assemble(d: &Discretization, theta: f64, p: &ModelParams) -> DMatrix<f64> {
    let n = d.k.len();
    let quarter: Vec<f64> = d.k.iter().map(|&q| (q * q + 4.0 * p.m * p.m).powf(-0.25)).collect();
    let st = theta.sqrt();
    DMatrix::from_fn(n, n, |i, j| {
        let proj = st * d.psi0_hat[i] * d.psi0_hat[j];
        let id = if i == j { 1.0 } else { 0.0 };
        quarter[i] * (d.root_k[(i, j)] + proj) * quarter[j] - id
    })
}

/// Assemble `𝕊(θ)` for `θ ≥ 0` and diagonalize it.
pub fn build_s_matrix(theta: f64, bx: &PlaneWaveBox, p: &ModelParams) -> Result<SMatrix> {
    require(theta.is_finite() && theta >= 0.0, || format!("theta must be non-negative, got {theta}"))?;
    let d = discretize(bx, p)?;
    s_from(&d, theta, p)
}

fn s_from(d: &Discretization, theta: f64, p: &ModelParams) -> Result<SMatrix> {
    let matrix = assemble(d, theta, p);
    let eig = SymmetricEigen::try_new(matrix.clone(), 1e-14, 10_000).ok_or_else(|| {
        let cond = matrix.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Error::Numerical(format!("eigen-solver did not converge for S(theta); max entry {cond:.3e}"))
    })?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(matrix.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    let mut zero_direction =
        DVector::from_iterator(d.k.len(), d.k.iter().zip(d.psi0_hat.iter()).map(|(&q, &c)| c * (q * q + 4.0 * p.m * p.m).powf(0.25)));
    zero_direction /= zero_direction.norm();
    Ok(SMatrix { theta, k: d.k.clone(), matrix, eigenvalues, eigenvectors, zero_direction })
}

/// `½ Σ ln(1 + λ_n)` over the spectrum of `𝕊(θ)`.
pub fn log_det_factor(theta: f64, bx: &PlaneWaveBox, p: &ModelParams) -> Result<f64> {
    let s = build_s_matrix(theta, bx, p)?;
    log_det_of(&s)
}

pub fn log_det_of(s: &SMatrix) -> Result<f64> {
    let mut acc = 0.0;
    for &l in &s.eigenvalues {
        if 1.0 + l <= ZERO_EIGEN_TOL.sqrt() {
            return Err(Error::Numerical(format!(
                "1 + lambda = {:.3e} is not positive at theta = {}; theta too small or grid artifact",
                1.0 + l,
                s.theta
            )));
        }
        acc += (1.0 + l).ln();
    }
    Ok(0.5 * acc)
}

/// `∫ |A₂(x, x)| dx` for `A₂ = K₀^{1/4} A₃ K₀^{1/4}`, evaluated in the
/// plane-wave basis on `n_x` points of the box.
pub fn a2_diagonal_l1(theta: f64, bx: &PlaneWaveBox, n_x: usize, p: &ModelParams) -> Result<f64> {
    require(theta > 0.0, || format!("theta must be positive, got {theta}"))?;
    let d = discretize(bx, p)?;
    let n = d.k.len();
    let m2 = p.m * p.m;
    // (K^θ)^{-1/2} from the spectrum of K: invert the square root off the zero mode.
    let kmat = &d.root_k * &d.root_k;
    let eig = SymmetricEigen::try_new(kmat, 1e-14, 10_000)
        .ok_or_else(|| Error::Numerical("eigen-solver did not converge for K".into()))?;
    let u = &eig.eigenvectors;
    let mut inv = DMatrix::zeros(n, n);
    for (c, &l) in eig.eigenvalues.iter().enumerate() {
        if l > ZERO_EIGEN_TOL * m2 {
            let col = u.column(c);
            inv += col * col.transpose() / l.sqrt();
        }
    }
    inv += &d.psi0_hat * d.psi0_hat.transpose() / theta.sqrt();
    let quarter: Vec<f64> = d.k.iter().map(|&q| (q * q + 4.0 * m2).powf(0.25)).collect();
    let a2 = DMatrix::from_fn(n, n, |i, j| {
        let free = if i == j { 1.0 / (quarter[i] * quarter[i]) } else { 0.0 };
        quarter[i] * (inv[(i, j)] - free) * quarter[j]
    });
    let l = bx.half_length;
    let h = 2.0 * l / n_x as f64;
    let mut total = 0.0;
    for s in 0..n_x {
        let x = -l + (s as f64 + 0.5) * h;
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for i in 0..n {
            let ei = num_complex::Complex64::from_polar(1.0, d.k[i] * x);
            let mut row = num_complex::Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += a2[(i, j)] * num_complex::Complex64::from_polar(1.0, -d.k[j] * x);
            }
            acc += ei * row;
        }
        total += h * acc.norm() / (2.0 * l);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (ModelParams, PlaneWaveBox) {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        (p, PlaneWaveBox { half_length: 16.0, modes: 256 })
    }

    #[test]
    fn sech2_transform_matches_quadrature() {
        let r = crate::quad::Rule::composite(&(0..=80).map(|i| -20.0 + 0.5 * i as f64).collect::<Vec<_>>(), 16);
        for q in [0.0, 0.3, 2.0, 7.5] {
            let v = r.integrate(|x| (q * x).cos() / (1.3 * x).cosh().powi(2));
            assert!((v - sech2_transform(q, 1.3)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_mode_eigenvalue_is_minus_one() {
        let (p, bx) = small();
        let s = build_s_matrix(0.0, &bx, &p).unwrap();
        let (lam, ov) = s.zero_mode_eigen();
        assert!((lam + 1.0).abs() < 1e-6, "{lam}");
        assert!(ov > 0.999);
        assert!(log_det_of(&s).is_err());
    }

    #[test]
    fn rank_one_theta_shift() {
        let (p, bx) = small();
        let d = discretize(&bx, &p).unwrap();
        let (t1, t2) = (0.4, 2.5);
        let a = assemble(&d, t1, &p);
        let b = assemble(&d, t2, &p);
        let quarter: Vec<f64> = d.k.iter().map(|&q| (q * q + 4.0).powf(-0.25)).collect();
        let c = t1.sqrt() - t2.sqrt();
        let n = d.k.len();
        for i in 0..n {
            for j in 0..n {
                let want = c * quarter[i] * d.psi0_hat[i] * d.psi0_hat[j] * quarter[j];
                assert!((a[(i, j)] - b[(i, j)] - want).abs() < 1e-15);
            }
        }
        let diff = &a - &b;
        let sv = diff.singular_values();
        assert!(sv.iter().filter(|&&v| v > 1e-12).count() == 1);
    }

    #[test]
    fn theta_root_agrees_with_direct_spectral_root() {
        let (p, bx) = small();
        let d = discretize(&bx, &p).unwrap();
        let theta: f64 = 0.7;
        let ktheta = &d.root_k * &d.root_k + theta * &d.psi0_hat * d.psi0_hat.transpose();
        let e = SymmetricEigen::new(ktheta);
        let root = &e.eigenvectors * DMatrix::from_diagonal(&e.eigenvalues.map(|l| l.max(0.0).sqrt())) * e.eigenvectors.transpose();
        let via = &d.root_k + theta.sqrt() * &d.psi0_hat * d.psi0_hat.transpose();
        assert!((root - via).amax() < 1e-8);
    }

    #[test]
    fn log_det_ratio_is_quarter_log_theta() {
        let (p, bx) = small();
        let a = log_det_factor(0.5, &bx, &p).unwrap();
        let b = log_det_factor(4.0, &bx, &p).unwrap();
        assert!(((b - a) - 0.25 * (8.0f64).ln()).abs() < 1e-9);
        assert!(b > a);
    }

    #[test]
    fn theta_sigma_round_trip() {
        let p = ModelParams::new(1.2, 0.3).unwrap();
        let t = ThetaDeformation::from_theta(0.8, &p).unwrap();
        let s = ThetaDeformation::from_sigma(t.sigma, &p).unwrap();
        assert!((s.theta - 0.8).abs() < 1e-12);
        assert!((t.sigma.powi(2) - 1.0 / (2.0 * 0.8f64.sqrt() * p.m_cl())).abs() < 1e-15);
        assert!(ThetaDeformation::from_theta(0.0, &p).is_err());
    }

    #[test]
    fn a2_diagonal_finite() {
        let (p, bx) = small();
        let v = a2_diagonal_l1(1.0, &bx, 256, &p).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}
