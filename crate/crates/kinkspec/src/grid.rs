use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::params::ModelParams;
use crate::quad::Rule;

/// Uniform symmetric position grid with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x_max: f64,
    pub n: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn new(x_max: f64, n: usize) -> Result<Self> {
        require(x_max.is_finite() && x_max > 0.0, || format!("x_max must be positive, got {x_max}"))?;
        require(n >= 5, || format!("grid needs at least 5 points, got {n}"))?;
        let h = 2.0 * x_max / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| -x_max + i as f64 * h).collect();
        let mut weights = vec![h; n];
        weights[0] *= 0.5;
        weights[n - 1] *= 0.5;
        Ok(Self { x_max, n, h, nodes, weights })
    }

    /// `m·x_max = 20`, 4096 points.
    pub fn for_model(p: &ModelParams) -> Self {
        Self::new(20.0 / p.m, 4096).expect("default grid is valid")
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    pub fn integrate_c(&self, f: &[C64]) -> C64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    pub fn inner(&self, f: &[C64], g: &[C64]) -> C64 {
        f.iter().zip(g).zip(&self.weights).map(|((a, b), w)| a.conj() * b * w).sum()
    }

    pub fn norm_c(&self, f: &[C64]) -> f64 {
        self.inner(f, f).re.max(0.0).sqrt()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }
}

/// Momentum axis as a composite Gauss-Legendre rule, symmetric about 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub k_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumSpec {
    pub k_max: f64,
    pub panel_width: f64,
    pub order: usize,
}

impl MomentumGrid {
    /// Panels of width `panel_width` on [-k_max, k_max], with the two
    /// panels adjacent to k = 0 split in half.
    pub fn new(spec: MomentumSpec) -> Result<Self> {
        let MomentumSpec { k_max, panel_width, order } = spec;
        require(k_max.is_finite() && k_max > 0.0, || format!("k_max must be positive, got {k_max}"))?;
        require(panel_width > 0.0 && panel_width <= k_max, || {
            format!("panel width {panel_width} must lie in (0, k_max]")
        })?;
        require(order >= 2, || "panel order must be at least 2".into())?;
        let mut right = vec![0.0, 0.5 * panel_width];
        let mut e = panel_width;
        while e < k_max - 1e-12 * k_max {
            right.push(e);
            e += panel_width;
        }
        right.push(k_max);
        let mut edges: Vec<f64> = right.iter().rev().map(|&e| -e).collect();
        edges.extend_from_slice(&right[1..]);
        let rule = Rule::composite(&edges, order);
        Ok(Self { nodes: rule.nodes, weights: rule.weights, k_max })
    }

    /// `k_max = 40m`, panels of width `m/4`, 8 nodes each.
    pub fn for_model(p: &ModelParams) -> Self {
        Self::new(MomentumSpec { k_max: 40.0 * p.m, panel_width: 0.25 * p.m, order: 8 })
            .expect("default momentum grid is valid")
    }

    /// Symmetric rule reaching `|k| = κ q_max`, adapted to integrands that carry `D(k/κ)`.
    pub fn cutoff(kappa: f64, m: f64, q_max: f64) -> Result<Self> {
        require(kappa.is_finite() && kappa > 0.0, || format!("cutoff must be positive, got {kappa}"))?;
        let right = crate::quad::cutoff_edges(kappa, m, q_max);
        let mut edges: Vec<f64> = right.iter().rev().map(|&e| -e).collect();
        edges.extend_from_slice(&right[1..]);
        let rule = Rule::composite(&edges, 16);
        Ok(Self { nodes: rule.nodes, weights: rule.weights, k_max: kappa * q_max })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate_c(&self, f: &[C64]) -> C64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    pub fn norm_c(&self, f: &[C64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a.norm_sqr() * w).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        let g = Grid::new(20.0, 4001).unwrap();
        assert!((g.h * (g.n - 1) as f64 - 40.0).abs() < 1e-12);
        assert_eq!(g.nodes[0], -g.nodes[g.n - 1]);
        assert!(g.nodes[2000].abs() < 1e-12);
        let sech2 = g.sample(|x| 1.0 / x.cosh().powi(2));
        assert!((g.integrate(&sech2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn default_grid_resolves_tails() {
        let p = ModelParams::new(2.0, 1.0).unwrap();
        let g = Grid::for_model(&p);
        assert!(g.x_max * p.m >= 20.0);
        assert!(1.0 / (p.m * g.x_max).cosh().powi(2) < 2e-17);
    }

    #[test]
    fn momentum_grid_symmetric() {
        let k = MomentumGrid::new(MomentumSpec { k_max: 10.0, panel_width: 1.0, order: 8 }).unwrap();
        let n = k.len();
        assert!(k.nodes.windows(2).all(|p| p[0] < p[1]));
        assert!(k.weights.iter().all(|&w| w > 0.0));
        for i in 0..n {
            assert!((k.nodes[i] + k.nodes[n - 1 - i]).abs() < 1e-12);
            assert!((k.weights[i] - k.weights[n - 1 - i]).abs() < 1e-14);
        }
        let total: f64 = k.weights.iter().sum();
        assert!((total - 20.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(-1.0, 100).is_err());
        assert!(Grid::new(1.0, 3).is_err());
        assert!(MomentumGrid::new(MomentumSpec { k_max: 1.0, panel_width: 2.0, order: 8 }).is_err());
    }
}
