//! Probit selection on a t-type statistic for a contrast of the two logits.
//!
//! A study with `tᵢ = cᵀyᵢ / √(cᵀΣᵢc)` is published with probability
//! `a(tᵢ) = Φ(βtᵢ + α)`. Integrating over `yᵢ | Σᵢ ~ N₂(μ, Ω + Σᵢ)` gives the
//! marginal probability `b(Σᵢ)`, and for a target overall publication rate `p`
//! the intercept `α_p` solves `N / Σᵢ b(Σᵢ)⁻¹ = p`.

use serde::{Deserialize, Serialize};

use crate::data::StudySummary;
use crate::error::{Error, Result};
use crate::normal::{cdf, log_cdf};
use crate::optimize::brent_root;
use crate::reitsma::BivariateParams;

/// Initial bracket for the α_p root.
pub const ALPHA_BRACKET: (f64, f64) = (-50.0, 50.0);
const ALPHA_LIMIT: f64 = 1.0e4;
const ALPHA_XTOL: f64 = 1e-14;

/// Unit-norm, non-negative contrast `(c1, c2)` with `c2 = √(1 − c1²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastVector {
    c1: f64,
}

impl ContrastVector {
    pub fn from_c1(c1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c1) {
            return Err(Error::Domain(format!(
                "contrast c1 must lie in [0, 1], got {c1}"
            )));
        }
        Ok(ContrastVector { c1 })
    }

    /// Normalize a non-negative direction `(w1, w2)`.
    pub fn normalized(w1: f64, w2: f64) -> Result<Self> {
        if !(w1 >= 0.0 && w2 >= 0.0 && w1 + w2 > 0.0) {
            return Err(Error::Domain(format!(
                "contrast weights must be non-negative and not both zero, got ({w1}, {w2})"
            )));
        }
        let c1 = w1 / w1.hypot(w2);
        Ok(ContrastVector { c1: c1.min(1.0) })
    }

    /// (1/√2, 1/√2): selection driven by the log diagnostic odds ratio.
    pub fn dor() -> Self {
        ContrastVector {
            c1: std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    /// (1, 0): selection driven by sensitivity only.
    pub fn sensitivity() -> Self {
        ContrastVector { c1: 1.0 }
    }

    /// (0, 1): selection driven by specificity only.
    pub fn specificity() -> Self {
        ContrastVector { c1: 0.0 }
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        (1.0 - self.c1 * self.c1).max(0.0).sqrt()
    }

    /// cᵀy
    #[inline]
    pub fn apply(&self, y1: f64, y2: f64) -> f64 {
        self.c1 * y1 + self.c2() * y2
    }

    /// cᵀ diag(s1², s2²) c
    #[inline]
    pub fn quad_diag(&self, s1_sq: f64, s2_sq: f64) -> f64 {
        let c2 = self.c2();
        self.c1 * self.c1 * s1_sq + c2 * c2 * s2_sq
    }

    /// cᵀΩc
    #[inline]
    pub fn quad_omega(&self, biv: &BivariateParams) -> f64 {
        let c2 = self.c2();
        let om = biv.omega();
        self.c1 * self.c1 * om[0][0] + 2.0 * self.c1 * c2 * om[0][1] + c2 * c2 * om[1][1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    pub contrast: ContrastVector,
    pub beta: f64,
    pub alpha: f64,
}

/// tᵢ = cᵀyᵢ / √(cᵀΣᵢc).
pub fn t_statistic(summary: &StudySummary, contrast: &ContrastVector) -> f64 {
    contrast.apply(summary.y1, summary.y2) / contrast.quad_diag(summary.s1_sq, summary.s2_sq).sqrt()
}

/// a(t) = Φ(βt + α).
pub fn select_prob_a(t: f64, beta: f64, alpha: f64) -> f64 {
    cdf(beta * t + alpha)
}

/// The pieces of b(Σᵢ) that do not involve α: `b = Φ((shift + α) / scale)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MarginalTerm {
    pub shift: f64,
    pub scale: f64,
}

#[inline]
pub(crate) fn marginal_term(
    s1_sq: f64,
    s2_sq: f64,
    biv: &BivariateParams,
    contrast: &ContrastVector,
    beta: f64,
) -> MarginalTerm {
    let csc = contrast.quad_diag(s1_sq, s2_sq);
    let coc = contrast.quad_omega(biv);
    let cmu = contrast.apply(biv.mu1, biv.mu2);
    MarginalTerm {
        shift: beta * cmu / csc.sqrt(),
        scale: (1.0 + beta * beta * (1.0 + coc / csc)).sqrt(),
    }
}

/// b(Σᵢ) = Φ{(β·cᵀμ/√(cᵀΣᵢc) + α) / √(1 + β²(1 + cᵀΩc/cᵀΣᵢc))}.
pub fn marginal_prob_b(
    summary_var: (f64, f64),
    biv: &BivariateParams,
    sel: &SelectionParams,
) -> f64 {
    let m = marginal_term(summary_var.0, summary_var.1, biv, &sel.contrast, sel.beta);
    cdf((m.shift + sel.alpha) / m.scale)
}

/// log b(Σᵢ), finite deep in the lower tail.
pub fn log_marginal_prob_b(
    summary_var: (f64, f64),
    biv: &BivariateParams,
    sel: &SelectionParams,
) -> f64 {
    let m = marginal_term(summary_var.0, summary_var.1, biv, &sel.contrast, sel.beta);
    log_cdf((m.shift + sel.alpha) / m.scale)
}

/// N / Σᵢ b(Σᵢ)⁻¹ for the given selection parameters.
pub fn implied_selection_prob(
    data_vars: &[(f64, f64)],
    biv: &BivariateParams,
    sel: &SelectionParams,
) -> f64 {
    let n = data_vars.len() as f64;
    let inv_sum: f64 = data_vars
        .iter()
        .map(|&v| (-log_marginal_prob_b(v, biv, sel)).exp())
        .sum();
    n / inv_sum
}

/// log(N / Σ exp(−log bᵢ)) as a function of α; increasing in α.
fn log_implied_p(terms: &[MarginalTerm], alpha: f64) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let neg_logs: Vec<f64> = terms
        .iter()
        .map(|m| {
            let v = -log_cdf((m.shift + alpha) / m.scale);
            max = max.max(v);
            v
        })
        .collect();
    let lse = max + neg_logs.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    (terms.len() as f64).ln() - lse
}

pub(crate) fn solve_alpha_terms(p: f64, terms: &[MarginalTerm]) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!(
            "selection probability must lie in (0, 1], got {p}"
        )));
    }
    if terms.is_empty() {
        return Err(Error::TooFewStudies(0));
    }
    if p == 1.0 {
        return Ok(f64::INFINITY);
    }
    let target = p.ln();
    let g = |a: f64| log_implied_p(terms, a) - target;

    let (mut lo, mut hi) = ALPHA_BRACKET;
    while g(lo) > 0.0 {
        hi = lo;
        lo *= 2.0;
        if lo < -ALPHA_LIMIT {
            return Err(Error::BracketingFailed {
                lo,
                hi: ALPHA_BRACKET.1,
            });
        }
    }
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > ALPHA_LIMIT {
            return Err(Error::BracketingFailed {
                lo: ALPHA_BRACKET.0,
                hi,
            });
        }
    }
    brent_root(g, lo, hi, ALPHA_XTOL, 200).ok_or(Error::BracketingFailed { lo, hi })
}

/// Intercept α_p with `N / Σᵢ b(Σᵢ; α_p)⁻¹ = p`; `+∞` when `p = 1`.
pub fn solve_alpha_p(
    p: f64,
    data_vars: &[(f64, f64)],
    biv: &BivariateParams,
    contrast: &ContrastVector,
    beta: f64,
) -> Result<f64> {
    let terms: Vec<MarginalTerm> = data_vars
        .iter()
        .map(|&(s1, s2)| marginal_term(s1, s2, biv, contrast, beta))
        .collect();
    solve_alpha_terms(p, &terms)
}
