//! Gauss–Legendre rules and the spectral cumulative-integration matrix used
//! on every panel of a spatial grid.

use std::f64::consts::PI;

/// `P_0(x), …, P_n(x)` by the three-term recurrence.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
    }
    for k in 1..n {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
    }
    p
}

/// Nodes (ascending) and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let p = legendre_all(n, x);
            dp = nf * (x * p[n] - p[n - 1]) / (x * x - 1.0);
            let dx = p[n] / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let p = legendre_all(n, x);
        dp = if dp == 0.0 { 1.0 } else { nf * (x * p[n] - p[n - 1]) / (x * x - 1.0) };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Reference panel `[-1, 1]`: nodes, weights and `C[m][n] = ∫_{-1}^{x_m} ℓ_n`,
/// with `ℓ_n` the Lagrange basis on the nodes.
#[derive(Debug, Clone)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub cumulative: Vec<Vec<f64>>,
}

impl PanelRule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        // ℓ_n(s) = w_n Σ_k (k + 1/2) P_k(x_n) P_k(s), exact for degree < order
        let at_nodes: Vec<Vec<f64>> = nodes.iter().map(|&x| legendre_all(order, x)).collect();
        let integrals: Vec<Vec<f64>> = at_nodes
            .iter()
            .zip(&nodes)
            .map(|(p, &x)| {
                (0..order)
                    .map(|k| {
                        if k == 0 {
                            x + 1.0
                        } else {
                            (p[k + 1] - p[k - 1]) / (2.0 * k as f64 + 1.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let cumulative = (0..order)
            .map(|m| {
                (0..order)
                    .map(|n| {
                        (0..order)
                            .map(|k| weights[n] * (k as f64 + 0.5) * at_nodes[n][k] * integrals[m][k])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Self {
            nodes,
            weights,
            cumulative,
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// Composite Gauss–Legendre integral of `f` over `[a, b]` split at `breaks`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rule: &PanelRule) -> f64 {
    breaks
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&s, &wt)| wt * f(mid + half * s))
                .sum::<f64>()
                * half
        })
        .sum()
}
