//! Closed-form spectral data of `K = -∂² + 4m² - 6m² sech²(mx)`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::ModelParams;

pub fn sech(x: f64) -> f64 {
    if x.abs() > 700.0 {
        0.0
    } else {
        1.0 / x.cosh()
    }
}

/// Classical kink `(m/g) tanh(mx)`.
pub fn soliton_profile(x: f64, p: &ModelParams) -> f64 {
    p.phi0() * (p.m * x).tanh()
}

/// Normalized zero mode `√(3m/4) sech²(mx)`.
pub fn psi0(x: f64, p: &ModelParams) -> f64 {
    (0.75 * p.m).sqrt() * sech(p.m * x).powi(2)
}

/// Normalized shape mode `√(3m/2) tanh(mx) sech(mx)`.
pub fn psi1(x: f64, p: &ModelParams) -> f64 {
    (1.5 * p.m).sqrt() * (p.m * x).tanh() * sech(p.m * x)
}

pub fn psi0_jet(x: f64, p: &ModelParams) -> [f64; 3] {
    let (m, t, s2) = (p.m, (p.m * x).tanh(), sech(p.m * x).powi(2));
    let c = (0.75 * m).sqrt();
    [c * s2, -2.0 * c * m * s2 * t, c * m * m * s2 * (4.0 * t * t - 2.0 * s2)]
}

pub fn psi1_jet(x: f64, p: &ModelParams) -> [f64; 3] {
    let (m, t, s) = (p.m, (p.m * x).tanh(), sech(p.m * x));
    let c = (1.5 * m).sqrt();
    // (t s)' = m s (s² - t²),  (t s)'' = m² t s (t² - 5 s²)
    [c * t * s, c * m * s * (s * s - t * t), c * m * m * t * s * (t * t - 5.0 * s * s)]
}

/// `δ_k = -arctan(k/m) - arctan(k/2m)`: the continuous branch of
/// `arg[(-k² - 3imk + 2m²)/√((k²+m²)(k²+4m²))]` with `δ_0 = 0`. Odd in `k`,
/// tends to `∓π` as `k → ±∞`.
pub fn scattering_phase(k: f64, p: &ModelParams) -> f64 {
    -(k / p.m).atan() - (k / (2.0 * p.m)).atan()
}

/// `e^{iδ_k}` evaluated from the rational form.
pub fn phase_factor(k: f64, p: &ModelParams) -> C64 {
    let m = p.m;
    C64::new(2.0 * m * m - k * k, -3.0 * m * k) / ((k * k + m * m) * (k * k + 4.0 * m * m)).sqrt()
}

/// `(k²+m²)(k²+4m²)`.
pub fn spectral_weight(k: f64, p: &ModelParams) -> f64 {
    let m2 = p.m * p.m;
    (k * k + m2) * (k * k + 4.0 * m2)
}

/// `ℱ(k, x) = -k² - 3imk tanh(mx) + 2m² - 3m² sech²(mx)`, so that `B†A† e^{ikx} = ℱ e^{ikx}`.
pub fn symbol(k: f64, x: f64, p: &ModelParams) -> C64 {
    let m = p.m;
    let t = (m * x).tanh();
    let s2 = sech(m * x).powi(2);
    C64::new(-k * k + 2.0 * m * m - 3.0 * m * m * s2, -3.0 * m * k * t)
}

/// Normalization constant `e^{±iδ_k}/√((k²+m²)(k²+4m²))` multiplying `ℱ e^{ikx}`.
pub fn eigenfunction_prefactor(k: f64, p: &ModelParams) -> C64 {
    let ph = phase_factor(k, p);
    let ph = if k >= 0.0 { ph } else { ph.conj() };
    ph / spectral_weight(k, p).sqrt()
}

pub fn eigenfunction_value(k: f64, x: f64, p: &ModelParams) -> C64 {
    eigenfunction_prefactor(k, p) * symbol(k, x, p) * C64::from_polar(1.0, k * x)
}

/// `E_k(x)` with its first two x-derivatives, all in closed form.
pub fn eigenfunction_jet(k: f64, x: f64, p: &ModelParams) -> [C64; 3] {
    let m = p.m;
    let t = (m * x).tanh();
    let s2 = sech(m * x).powi(2);
    let i = C64::i();
    let f = C64::new(-k * k + 2.0 * m * m - 3.0 * m * m * s2, -3.0 * m * k * t);
    let f1 = C64::new(6.0 * m.powi(3) * s2 * t, -3.0 * m * m * k * s2);
    let f2 = C64::new(6.0 * m.powi(4) * s2 * (s2 - 2.0 * t * t), 6.0 * m.powi(3) * k * s2 * t);
    let c = eigenfunction_prefactor(k, p) * C64::from_polar(1.0, k * x);
    [c * f, c * (f1 + i * k * f), c * (f2 + 2.0 * i * k * f1 - k * k * f)]
}

/// Pointwise bound `(k² + 3m|k| + 2m²)/√((k²+m²)(k²+4m²))` on `|E_k|`.
pub fn eigenfunction_envelope(k: f64, p: &ModelParams) -> f64 {
    let m = p.m;
    (k * k + 3.0 * m * k.abs() + 2.0 * m * m) / spectral_weight(k, p).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeLabel {
    ZeroMode,
    ShapeMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteEigenpair {
    pub eigenvalue: f64,
    pub samples: Vec<f64>,
    pub label: ModeLabel,
}

pub fn discrete_eigenpairs(grid: &Grid, p: &ModelParams) -> [DiscreteEigenpair; 2] {
    [
        DiscreteEigenpair { eigenvalue: 0.0, samples: grid.sample(|x| psi0(x, p)), label: ModeLabel::ZeroMode },
        DiscreteEigenpair {
            eigenvalue: 3.0 * p.m * p.m,
            samples: grid.sample(|x| psi1(x, p)),
            label: ModeLabel::ShapeMode,
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringState {
    pub k: f64,
    pub delta: f64,
    pub omega: f64,
    pub samples: Vec<C64>,
}

pub fn generalized_eigenfunction(k: f64, grid: &Grid, p: &ModelParams) -> Result<ScatteringState> {
    if !k.is_finite() {
        return Err(Error::InvalidParam(format!("momentum must be finite, got {k}")));
    }
    let samples = grid.nodes.iter().map(|&x| eigenfunction_value(k, x, p)).collect();
    Ok(ScatteringState { k, delta: scattering_phase(k, p), omega: p.omega(k), samples })
}

/// Residual `‖K E_k - (k²+4m²) E_k‖_∞` on the grid from the analytic jet.
pub fn eigen_residual(k: f64, grid: &Grid, p: &ModelParams) -> f64 {
    let lam = k * k + 4.0 * p.m * p.m;
    let kf = apply_k_analytic(|x| eigenfunction_jet(k, x, p), grid, p);
    grid.nodes
        .iter()
        .zip(&kf)
        .map(|(&x, v)| (v - lam * eigenfunction_value(k, x, p)).norm())
        .fold(0.0, f64::max)
}

/// Boundary value of the free resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResolventSide {
    /// `k² + iε`: outgoing, pairs with `E_k` normalized at `x → -∞`.
    Plus,
    /// `k² - iε`: incoming, pairs with `e^{-2iδ_k} E_k` normalized at `x → +∞`.
    Minus,
}

/// `sup |(1 + R₀(k² ± iε) V) F - e^{ikx}|` over `|x| ≤ x_check`, for `k > 0`,
/// with `R₀` the resolvent of `-∂²` shifted by `4m²` and `V = -6m² sech²(mx)`.
/// The kernel is `i e^{is|x-y|} / 2s` with `s = √(k² ± iε)`, `Im s > 0`; the
/// trapezoid sum carries the Euler-Maclaurin correction for its cusp at `y = x`.
pub fn resolvent_identity_defect(
    side: ResolventSide,
    k: f64,
    eps: f64,
    x_check: f64,
    grid: &Grid,
    p: &ModelParams,
) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) || !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidParam(format!("need k > 0 and ε ≥ 0, got k = {k}, ε = {eps}")));
    }
    let m = p.m;
    let (z, shift) = match side {
        ResolventSide::Plus => (C64::new(k * k, eps), C64::new(1.0, 0.0)),
        ResolventSide::Minus => (C64::new(k * k, -eps), C64::from_polar(1.0, -2.0 * scattering_phase(k, p))),
    };
    let mut s = z.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && side == ResolventSide::Minus) {
        s = -s;
    }
    let v: Vec<C64> =
        grid.nodes.iter().map(|&y| -6.0 * m * m * sech(m * y).powi(2) * shift * eigenfunction_value(k, y, p)).collect();
    let vf: Vec<C64> = v.iter().zip(&grid.weights).map(|(a, w)| a * w).collect();
    let h2 = grid.h * grid.h;
    let pre = C64::i() / (2.0 * s);
    let defect = grid
        .nodes
        .par_iter()
        .zip(&v)
        .filter(|(x, _)| x.abs() <= x_check)
        .map(|(&x, vx)| {
            let conv: C64 = grid.nodes.iter().zip(&vf).map(|(&y, v)| (C64::i() * s * (x - y).abs()).exp() * v).sum();
            let lhs = shift * eigenfunction_value(k, x, p) + pre * conv - h2 / 12.0 * vx;
            (lhs - C64::from_polar(1.0, k * x)).norm()
        })
        .reduce(|| 0.0, f64::max);
    Ok(defect)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ladder {
    A,
    ADag,
    B,
    BDag,
}

impl Ladder {
    /// (sign of ∂, coefficient c of m·tanh)
    fn coefficients(self) -> (f64, f64) {
        match self {
            Ladder::A => (1.0, 1.0),
            Ladder::ADag => (-1.0, 1.0),
            Ladder::B => (1.0, 2.0),
            Ladder::BDag => (-1.0, 2.0),
        }
    }
}

/// `±∂_x f + c m tanh(mx) f` with the derivative by fourth-order differences.
pub fn ladder_apply(which: Ladder, f: &[C64], grid: &Grid, p: &ModelParams) -> Vec<C64> {
    let (sd, c) = which.coefficients();
    let df = first_derivative(f, grid.h);
    grid.nodes
        .iter()
        .zip(f.iter().zip(&df))
        .map(|(&x, (&v, &d))| sd * d + c * p.m * (p.m * x).tanh() * v)
        .collect()
}

/// `K f` for `f` given by its analytic jet `[f, f', f'']`.
pub fn apply_k_analytic(jet: impl Fn(f64) -> [C64; 3] + Sync, grid: &Grid, p: &ModelParams) -> Vec<C64> {
    let m2 = p.m * p.m;
    grid.nodes
        .par_iter()
        .map(|&x| {
            let [f, _, f2] = jet(x);
            -f2 + (4.0 * m2 - 6.0 * m2 * sech(p.m * x).powi(2)) * f
        })
        .collect()
}

/// `K f` for sampled `f` via fourth-order differences; fails when the
/// second- and fourth-order stencils disagree by more than 5% of the signal.
pub fn apply_k(f: &[C64], grid: &Grid, p: &ModelParams) -> Result<Vec<C64>> {
    if f.len() != grid.n {
        return Err(Error::InvalidParam(format!("sample count {} does not match grid {}", f.len(), grid.n)));
    }
    let d2 = second_derivative(f, grid.h);
    let coarse = second_derivative_o2(f, grid.h);
    let d2_scale = d2[2..f.len() - 2].iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let m2 = p.m * p.m;
    let out: Vec<C64> = grid
        .nodes
        .iter()
        .zip(f.iter().zip(&d2))
        .map(|(&x, (&v, &d))| -d + (4.0 * m2 - 6.0 * m2 * sech(p.m * x).powi(2)) * v)
        .collect();
    let scale = d2_scale + m2 * f.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let est = d2.iter().zip(&coarse).skip(2).take(f.len().saturating_sub(4)).fold(0.0f64, |a, (x, y)| a.max((x - y).norm()));
    if scale > 0.0 && est > 0.05 * scale {
        return Err(Error::Resolution(format!(
            "grid spacing {} too coarse: stencil disagreement {est:.3e} against scale {scale:.3e}",
            grid.h
        )));
    }
    Ok(out)
}

pub fn first_derivative(f: &[C64], h: f64) -> Vec<C64> {
    let n = f.len();
    assert!(n >= 5, "need at least 5 samples");
    let mut d = vec![C64::ZERO; n];
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    d[n - 1] = -(-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]) / (12.0 * h);
    d[n - 2] = -(-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]) / (12.0 * h);
    d
}

pub fn second_derivative(f: &[C64], h: f64) -> Vec<C64> {
    let n = f.len();
    assert!(n >= 6, "need at least 6 samples");
    let h2 = 12.0 * h * h;
    let mut d = vec![C64::ZERO; n];
    for i in 2..n - 2 {
        d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / h2;
    }
    let edge = |g: [C64; 6]| (45.0 * g[0] - 154.0 * g[1] + 214.0 * g[2] - 156.0 * g[3] + 61.0 * g[4] - 10.0 * g[5]) / h2;
    let near = |g: [C64; 6]| (10.0 * g[0] - 15.0 * g[1] - 4.0 * g[2] + 14.0 * g[3] - 6.0 * g[4] + g[5]) / h2;
    let head = [f[0], f[1], f[2], f[3], f[4], f[5]];
    let tail = [f[n - 1], f[n - 2], f[n - 3], f[n - 4], f[n - 5], f[n - 6]];
    d[0] = edge(head);
    d[1] = near(head);
    d[n - 1] = edge(tail);
    d[n - 2] = near(tail);
    d
}

fn second_derivative_o2(f: &[C64], h: f64) -> Vec<C64> {
    let n = f.len();
    let mut d = vec![C64::ZERO; n];
    for i in 1..n - 1 {
        d[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) / (h * h);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn resolvent_identity_holds_and_is_linear_in_eps() {
        let p = ModelParams::default();
        let grid = Grid::for_model(&p);
        for side in [ResolventSide::Plus, ResolventSide::Minus] {
            for k in [0.5, 1.0, 3.0] {
                let d = |eps| resolvent_identity_defect(side, k, eps, 5.0, &grid, &p).unwrap();
                assert!(d(0.0) < 1e-8, "{side:?} {k}");
                let (a, b) = (d(1e-6), d(1e-4));
                assert!(a < 1e-5 && (b / a - 100.0).abs() < 1.0, "{side:?} {k} {a} {b}");
            }
        }
        assert!(resolvent_identity_defect(ResolventSide::Plus, 0.0, 1e-6, 5.0, &grid, &p).is_err());
    }

    fn setup() -> (ModelParams, Grid) {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        (p, Grid::for_model(&p))
    }

    fn real(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&a| C64::new(a, 0.0)).collect()
    }

    #[test]
    fn profile_values() {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        assert_eq!(soliton_profile(0.0, &p), 0.0);
        assert!((soliton_profile(1.0, &p) - 0.761_594_155_955_764_9).abs() < 1e-15);
        let q = ModelParams::new(2.0, 0.5).unwrap();
        assert!((soliton_profile(50.0, &q) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn discrete_orthonormality() {
        let (p, g) = setup();
        let [z, s] = discrete_eigenpairs(&g, &p);
        let dot = |a: &[f64], b: &[f64]| g.integrate(&a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<_>>());
        assert!((dot(&z.samples, &z.samples) - 1.0).abs() < 1e-8);
        assert!((dot(&s.samples, &s.samples) - 1.0).abs() < 1e-8);
        assert!(dot(&z.samples, &s.samples).abs() < 1e-12);
    }

    #[test]
    fn phase_limits() {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        assert_eq!(scattering_phase(0.0, &p), 0.0);
        let big = scattering_phase(1e3, &p);
        assert!((big.abs() - std::f64::consts::PI).abs() < 5e-3);
        assert!((phase_factor(1e3, &p) + 1.0).norm() < 5e-3);
        for k in [-7.0, -0.3, 0.0, 0.4, 2.0, 30.0] {
            let f = phase_factor(k, &p);
            assert!((f.norm() - 1.0).abs() < 1e-14);
            assert!((C64::from_polar(1.0, scattering_phase(k, &p)) - f).norm() < 1e-13);
        }
    }

    #[test]
    fn eigen_residual_small() {
        let (p, g) = setup();
        for k in [-3.0, 0.0, 1.0, 5.5] {
            let r = eigen_residual(k, &g, &p);
            assert!(r < 1e-8, "k={k}: residual {r}");
        }
    }

    #[test]
    fn asymptotic_normalization() {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        let e = eigenfunction_value(2.0, -15.0, &p);
        assert!((e - C64::from_polar(1.0, -30.0)).norm() < 1e-5);
        let e = eigenfunction_value(-2.0, 15.0, &p);
        assert!((e - C64::from_polar(1.0, -30.0)).norm() < 1e-5);
    }

    #[test]
    fn continuum_orthogonal_to_bound_states() {
        let (p, g) = setup();
        let [z, s] = discrete_eigenpairs(&g, &p);
        for k in [0.5, 1.0, 3.0, -2.0] {
            let e = generalized_eigenfunction(k, &g, &p).unwrap();
            let bound = eigenfunction_envelope(k, &p);
            for b in [&z.samples, &s.samples] {
                let ov = g.inner(&real(b), &e.samples).norm();
                assert!(ov < 1e-6 * bound, "k={k}: overlap {ov}");
            }
        }
    }

    #[test]
    fn ladder_identities() {
        let (p, g) = setup();
        let sech_f = real(&g.sample(sech));
        let aa = ladder_apply(Ladder::ADag, &ladder_apply(Ladder::A, &sech_f, &g, &p), &g, &p);
        assert!(aa.iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-7);

        let p1 = real(&g.sample(|x| psi1(x, &p)));
        let bb = ladder_apply(Ladder::BDag, &ladder_apply(Ladder::B, &p1, &g, &p), &g, &p);
        let err = bb.iter().zip(&p1).map(|(a, b)| (a - 3.0 * b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-7, "B†B ψ₁ error {err}");
    }

    #[test]
    fn ladder_builds_scattering_state() {
        let (p, g) = setup();
        let k = 1.3;
        let wave: Vec<C64> = g.nodes.iter().map(|&x| C64::from_polar(1.0, k * x)).collect();
        let ba = ladder_apply(Ladder::BDag, &ladder_apply(Ladder::ADag, &wave, &g, &p), &g, &p);
        let c = eigenfunction_prefactor(k, &p);
        let err = g
            .nodes
            .iter()
            .zip(&ba)
            .skip(4)
            .take(g.n - 8)
            .map(|(&x, v)| (c * v - eigenfunction_value(k, x, &p)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-7, "B†A† e^ikx mismatch {err}");
    }

    #[test]
    fn apply_k_on_bound_states() {
        let (p, g) = setup();
        let z = apply_k_analytic(|x| psi0_jet(x, &p).map(|v| C64::new(v, 0.0)), &g, &p);
        assert!(z.iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-8);
        let s = apply_k_analytic(|x| psi1_jet(x, &p).map(|v| C64::new(v, 0.0)), &g, &p);
        let err = g.nodes.iter().zip(&s).map(|(&x, v)| (v - 3.0 * psi1(x, &p)).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8);

        let fd = apply_k(&real(&g.sample(|x| psi0(x, &p))), &g, &p).unwrap();
        assert!(fd.iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-7);
    }

    #[test]
    fn apply_k_on_constant() {
        let (p, g) = setup();
        let c = vec![C64::new(2.5, 0.0); g.n];
        let out = apply_k(&c, &g, &p).unwrap();
        for (i, &x) in g.nodes.iter().enumerate() {
            let want = 2.5 * (4.0 - 6.0 * sech(x).powi(2));
            assert!((out[i].re - want).abs() < 1e-8);
        }
    }

    #[test]
    fn apply_k_rejects_coarse_grid() {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        let g = Grid::new(20.0, 41).unwrap();
        let wave: Vec<C64> = g.nodes.iter().map(|&x| C64::from_polar(1.0, 3.0 * x)).collect();
        assert!(matches!(apply_k(&wave, &g, &p), Err(Error::Resolution(_))));
    }

    #[test]
    fn stencils_exact_on_quartics() {
        let h = 0.1;
        let f: Vec<C64> = (0..12).map(|i| C64::new((i as f64 * h).powi(4) - (i as f64 * h), 0.0)).collect();
        let d1 = first_derivative(&f, h);
        let d2 = second_derivative(&f, h);
        for i in 0..12 {
            let x = i as f64 * h;
            assert!((d1[i].re - (4.0 * x.powi(3) - 1.0)).abs() < 1e-10, "d1 at {i}");
            assert!((d2[i].re - 12.0 * x * x).abs() < 1e-8, "d2 at {i}");
        }
    }

    proptest! {
        #[test]
        fn phase_is_odd_and_unimodular(k in -200.0f64..200.0, m in 0.2f64..5.0) {
            let p = ModelParams::new(m, 1.0).unwrap();
            prop_assert!((scattering_phase(-k, &p) + scattering_phase(k, &p)).abs() < 1e-14);
            prop_assert!((phase_factor(k, &p).norm() - 1.0).abs() < 1e-13);
            prop_assert!(scattering_phase(k, &p).abs() < std::f64::consts::PI);
        }

        #[test]
        fn eigenfunction_within_envelope(k in -50.0f64..50.0, x in -30.0f64..30.0, m in 0.3f64..3.0) {
            let p = ModelParams::new(m, 1.0).unwrap();
            prop_assert!(eigenfunction_value(k, x, &p).norm() <= eigenfunction_envelope(k, &p) * (1.0 + 1e-12));
        }

        #[test]
        fn reflection_symmetry(k in 0.01f64..40.0, x in -10.0f64..10.0) {
            // E_{-k} = e^{2iδ_k} conj(E_k)
            let p = ModelParams::new(1.0, 1.0).unwrap();
            let lhs = eigenfunction_value(-k, x, &p);
            let rhs = C64::from_polar(1.0, 2.0 * scattering_phase(k, &p)) * eigenfunction_value(k, x, &p).conj();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
