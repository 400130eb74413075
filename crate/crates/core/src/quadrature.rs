//! Gauss–Legendre and Gauss–Hermite rules.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of an n-point rule.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// n-point Gauss–Legendre rule on [-1, 1], computed by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

const CACHED: [usize; 6] = [64, 128, 256, 512, 1024, 2048];

/// Cached Gauss–Legendre rule for the sizes used by the SAUC integrator.
pub fn gauss_legendre_cached(n: usize) -> &'static Rule {
    static RULES: [OnceLock<Rule>; 6] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let idx = CACHED
        .iter()
        .position(|&k| k == n)
        .unwrap_or_else(|| panic!("no cached Gauss-Legendre rule with {n} nodes"));
    RULES[idx].get_or_init(|| gauss_legendre(n))
}

/// Integrate `f` over [a, b] with the given rule.
pub fn integrate<F: Fn(f64) -> f64>(rule: &Rule, a: f64, b: f64, f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite rule: `panels` equal sub-intervals of [a, b], each with `rule`.
pub fn integrate_composite<F: Fn(f64) -> f64>(
    rule: &Rule,
    a: f64,
    b: f64,
    panels: usize,
    f: F,
) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * h;
            integrate(rule, lo, lo + h, &f)
        })
        .sum()
}

/// n-point Gauss–Hermite rule for the weight `exp(-x²)`.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut z = 0.0;
    for i in 0..m {
        // Initial guesses from Numerical Recipes' gauher.
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = 2.0 / (pp * pp);
    }
    // gauher fills descending from the largest root; mirror into ascending order.
    let mut out_nodes = vec![0.0; n];
    let mut out_weights = vec![0.0; n];
    for i in 0..m {
        out_nodes[i] = -nodes[i];
        out_weights[i] = weights[i];
        out_nodes[n - 1 - i] = nodes[i];
        out_weights[n - 1 - i] = weights[i];
    }
    Rule {
        nodes: out_nodes,
        weights: out_weights,
    }
}

/// Gauss–Hermite rule rescaled for expectations under N(0, 1).
pub fn gauss_hermite_normal(n: usize) -> Rule {
    let r = gauss_hermite(n);
    let s = std::f64::consts::SQRT_2;
    let norm = 1.0 / PI.sqrt();
    Rule {
        nodes: r.nodes.iter().map(|x| x * s).collect(),
        weights: r.weights.iter().map(|w| w * norm).collect(),
    }
}
