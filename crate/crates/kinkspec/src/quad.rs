//! Gauss-Legendre rules, composite panels and a linear Filon rule.

use num_complex::Complex64 as C64;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        if 2 * i + 1 == n {
            z = 0.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A quadrature rule as parallel node/weight arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Composite Gauss-Legendre rule of the given order over consecutive `edges`.
    pub fn composite(edges: &[f64], order: usize) -> Self {
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(order * edges.len());
        let mut weights = Vec::with_capacity(order * edges.len());
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (&x, &w) in gx.iter().zip(&gw) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Panel edges on [0, κ·q_max] for integrands carrying a mollifier factor
/// `D(k/κ)`: geometric refinement toward the origin up to κ, then unit panels in `k/κ`.
pub fn cutoff_edges(kappa: f64, m: f64, q_max: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut e = 0.5 * m;
    while e < kappa {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(kappa);
    let mut q = 1.0;
    while q < q_max {
        q += 1.0;
        edges.push(q * kappa);
    }
    edges
}

/// `∫ L(x) e^{ikx} dx` for the piecewise-linear interpolant `L` of samples
/// `f` on the uniform grid `x0 + j h`. Exact in the phase for any `k h`.
pub fn filon_linear(f: &[C64], x0: f64, h: f64, k: f64) -> C64 {
    let n = f.len();
    if n < 2 {
        return C64::new(0.0, 0.0);
    }
    let th = k * h;
    let (interior, left, right) = filon_weights(th);
    let mut acc = C64::new(0.0, 0.0);
    for (j, &fj) in f.iter().enumerate().take(n - 1).skip(1) {
        acc += fj * C64::from_polar(1.0, k * (x0 + j as f64 * h));
    }
    acc *= interior;
    acc += f[0] * left * C64::from_polar(1.0, k * x0);
    acc += f[n - 1] * right * C64::from_polar(1.0, k * (x0 + (n - 1) as f64 * h));
    acc * h
}

fn filon_weights(th: f64) -> (f64, C64, C64) {
    let interior = if th == 0.0 {
        1.0
    } else {
        let s = (0.5 * th).sin() / (0.5 * th);
        s * s
    };
    // ∫_0^1 (1-u) e^{iθu} du; the series avoids cancellation for small θ.
    let left = if th.abs() < 0.5 {
        let mut term = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.5, 0.0);
        for n in 1..24 {
            term *= C64::new(0.0, th) / n as f64;
            acc += term / ((n + 1) * (n + 2)) as f64;
        }
        acc
    } else {
        let e = C64::from_polar(1.0, th);
        C64::i() / th - (e - 1.0) / (th * th)
    };
    (interior, left, left.conj())
}
