//! Bivariate normal (Reitsma) random-effects model, SROC and SAUC.
//!
//! Marginally `yᵢ ~ N₂(μ, Ω + Σᵢ)` with `Σᵢ = diag(s₁ᵢ², s₂ᵢ²)` known and
//! `Ω = [[τ₁², ρτ₁τ₂], [ρτ₁τ₂, τ₂²]]`. Log-likelihoods include the `-log 2π`
//! constant of each bivariate normal density.

use serde::{Deserialize, Serialize};

use crate::data::StudySummary;
use crate::error::{Error, Result};
use crate::normal::{expit, logit};
use crate::optimize::{maximize, Bounds, MaximizeOptions};
use crate::quadrature::{gauss_legendre_cached, integrate};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Box used for `mu1`, `mu2`.
pub const MU_BOUNDS: (f64, f64) = (-5.0, 5.0);
/// Box used for `tau1`, `tau2`; the open lower end is replaced by a small positive floor.
pub const TAU_BOUNDS: (f64, f64) = (1e-4, 3.0);
/// Optimizer box for `rho`; keeps Ω + Σᵢ well away from singular.
pub const RHO_BOUNDS: (f64, f64) = (-0.999, 0.999);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateParams {
    pub mu1: f64,
    pub mu2: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub rho: f64,
}

impl BivariateParams {
    pub fn new(mu1: f64, mu2: f64, tau1: f64, tau2: f64, rho: f64) -> Result<Self> {
        let p = BivariateParams {
            mu1,
            mu2,
            tau1,
            tau2,
            rho,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.mu1, self.mu2, self.tau1, self.tau2, self.rho]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("non-finite bivariate parameter".into()));
        }
        if self.tau1 <= 0.0 || self.tau2 <= 0.0 {
            return Err(Error::Domain(format!(
                "tau must be positive, got ({}, {})",
                self.tau1, self.tau2
            )));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::Domain(format!(
                "rho must lie in [-1, 1], got {}",
                self.rho
            )));
        }
        Ok(())
    }

    /// Between-study covariance τ₁₂ = ρτ₁τ₂.
    pub fn tau12(&self) -> f64 {
        self.rho * self.tau1 * self.tau2
    }

    /// Ω as `[[a, b], [b, c]]`.
    pub fn omega(&self) -> [[f64; 2]; 2] {
        let t12 = self.tau12();
        [[self.tau1 * self.tau1, t12], [t12, self.tau2 * self.tau2]]
    }

    /// Slope of logit SROC against logit FPR, `-τ₁₂/τ₂²`.
    pub fn sroc_slope(&self) -> f64 {
        -self.rho * self.tau1 / self.tau2
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.mu1, self.mu2, self.tau1, self.tau2, self.rho]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        BivariateParams {
            mu1: x[0],
            mu2: x[1],
            tau1: x[2],
            tau2: x[3],
            rho: x[4],
        }
    }

    /// Summary operating point (sensitivity, specificity) = (expit μ₁, expit μ₂).
    pub fn summary_point(&self) -> (f64, f64) {
        (expit(self.mu1), expit(self.mu2))
    }
}

/// Log-density of one study under the marginal model; `None` if Ω + Σ is singular.
#[inline]
pub(crate) fn study_loglik(p: &BivariateParams, s: &StudySummary) -> Option<f64> {
    let t12 = p.tau12();
    let v11 = p.tau1 * p.tau1 + s.s1_sq;
    let v22 = p.tau2 * p.tau2 + s.s2_sq;
    let det = v11 * v22 - t12 * t12;
    if det.is_nan() || det <= 0.0 {
        return None;
    }
    let r1 = s.y1 - p.mu1;
    let r2 = s.y2 - p.mu2;
    let quad = (v22 * r1 * r1 - 2.0 * t12 * r1 * r2 + v11 * r2 * r2) / det;
    Some(-0.5 * quad - 0.5 * det.ln() - LN_2PI)
}

/// Σᵢ [ -½ rᵢᵀ(Σᵢ+Ω)⁻¹rᵢ - ½ log|Σᵢ+Ω| - log 2π ].
pub fn reitsma_loglik(params: &BivariateParams, data: &[StudySummary]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::TooFewStudies(0));
    }
    let mut total = 0.0;
    for (i, s) in data.iter().enumerate() {
        total += study_loglik(params, s).ok_or(Error::SingularCovariance { study: i })?;
    }
    Ok(total)
}

/// Analytic gradient of [`reitsma_loglik`] in (μ₁, μ₂, τ₁, τ₂, ρ).
pub fn reitsma_gradient(params: &BivariateParams, data: &[StudySummary]) -> Result<[f64; 5]> {
    let (t1, t2, rho) = (params.tau1, params.tau2, params.rho);
    let t12 = params.tau12();
    let mut g = [0.0; 5];
    for (i, s) in data.iter().enumerate() {
        let v11 = t1 * t1 + s.s1_sq;
        let v22 = t2 * t2 + s.s2_sq;
        let det = v11 * v22 - t12 * t12;
        if det.is_nan() || det <= 0.0 {
            return Err(Error::SingularCovariance { study: i });
        }
        // V⁻¹
        let (i11, i12, i22) = (v22 / det, -t12 / det, v11 / det);
        let r1 = s.y1 - params.mu1;
        let r2 = s.y2 - params.mu2;
        let a1 = i11 * r1 + i12 * r2;
        let a2 = i12 * r1 + i22 * r2;
        g[0] += a1;
        g[1] += a2;
        // dℓ/dV = ½ (V⁻¹ r rᵀ V⁻¹ − V⁻¹)
        let g11 = 0.5 * (a1 * a1 - i11);
        let g12 = 0.5 * (a1 * a2 - i12);
        let g22 = 0.5 * (a2 * a2 - i22);
        // tr(G·dV) for symmetric dV.
        g[2] += g11 * 2.0 * t1 + 2.0 * g12 * rho * t2;
        g[3] += g22 * 2.0 * t2 + 2.0 * g12 * rho * t1;
        g[4] += 2.0 * g12 * t1 * t2;
    }
    Ok(g)
}

/// SROC(x) = expit[μ₁ − (τ₁₂/τ₂²)(logit x + μ₂)].
pub fn sroc(params: &BivariateParams, fpr: f64) -> Result<f64> {
    if !(fpr > 0.0 && fpr < 1.0) {
        return Err(Error::Domain(format!("fpr must lie in (0, 1), got {fpr}")));
    }
    Ok(sroc_at_logit(params, logit(fpr)))
}

#[inline]
fn sroc_at_logit(params: &BivariateParams, logit_fpr: f64) -> f64 {
    expit(params.mu1 + params.sroc_slope() * (logit_fpr + params.mu2))
}

/// SROC evaluated on a grid of FPR values.
pub fn sroc_curve(params: &BivariateParams, fprs: &[f64]) -> Result<Vec<(f64, f64)>> {
    fprs.iter().map(|&x| Ok((x, sroc(params, x)?))).collect()
}

/// `n` equally spaced FPR values on `[lo, hi]`.
pub fn fpr_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Area under the SROC curve over FPR ∈ (0, 1).
///
/// The integral is taken in `s` with `logit x = 3·logit s`, which flattens
/// the `x^k` behaviour of the integrand at both ends; the Gauss–Legendre rule
/// is doubled from 64 nodes until successive estimates agree to 1e-7.
pub fn sauc(params: &BivariateParams) -> f64 {
    let slope = params.sroc_slope();
    let integrand = |s: f64| {
        let l = 3.0 * logit(s);
        let tpr = expit(params.mu1 + slope * (l + params.mu2));
        // dx/ds = 3·x(1−x) / (s(1−s))
        let jac = 3.0 * expit(l) * expit(-l) / (s * (1.0 - s));
        tpr * jac
    };
    let mut n = 64;
    let mut prev = integrate(gauss_legendre_cached(n), 0.0, 1.0, integrand);
    while n < 2048 {
        n *= 2;
        let next = integrate(gauss_legendre_cached(n), 0.0, 1.0, integrand);
        let done = (next - prev).abs() <= 1e-7;
        prev = next;
        if done {
            break;
        }
    }
    prev
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReitsmaFit {
    pub params: BivariateParams,
    pub loglik: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Moment-based starting values, clamped into the optimizer box.
pub fn initial_values(data: &[StudySummary]) -> BivariateParams {
    let n = data.len() as f64;
    let m1 = data.iter().map(|s| s.y1).sum::<f64>() / n;
    let m2 = data.iter().map(|s| s.y2).sum::<f64>() / n;
    let (mut v1, mut v2, mut c12) = (0.0, 0.0, 0.0);
    for s in data {
        v1 += (s.y1 - m1).powi(2);
        v2 += (s.y2 - m2).powi(2);
        c12 += (s.y1 - m1) * (s.y2 - m2);
    }
    let rho = if v1 > 0.0 && v2 > 0.0 {
        (c12 / (v1 * v2).sqrt()).clamp(-0.95, 0.95)
    } else {
        0.0
    };
    let sd = |v: f64| {
        if data.len() > 1 {
            (v / (n - 1.0)).sqrt().clamp(0.05, 3.0)
        } else {
            0.5
        }
    };
    BivariateParams {
        mu1: m1.clamp(MU_BOUNDS.0, MU_BOUNDS.1),
        mu2: m2.clamp(MU_BOUNDS.0, MU_BOUNDS.1),
        tau1: sd(v1),
        tau2: sd(v2),
        rho,
    }
}

pub fn default_bounds() -> Bounds {
    Bounds::new(
        vec![
            MU_BOUNDS.0,
            MU_BOUNDS.0,
            TAU_BOUNDS.0,
            TAU_BOUNDS.0,
            RHO_BOUNDS.0,
        ],
        vec![
            MU_BOUNDS.1,
            MU_BOUNDS.1,
            TAU_BOUNDS.1,
            TAU_BOUNDS.1,
            RHO_BOUNDS.1,
        ],
    )
}

/// Studies in a fixed canonical order so that fits do not depend on input order.
pub(crate) fn canonical_order(data: &[StudySummary]) -> Vec<StudySummary> {
    let mut v = data.to_vec();
    v.sort_by(|a, b| {
        a.y1.total_cmp(&b.y1)
            .then(a.y2.total_cmp(&b.y2))
            .then(a.s1_sq.total_cmp(&b.s1_sq))
            .then(a.s2_sq.total_cmp(&b.s2_sq))
    });
    v
}

/// Maximum-likelihood fit of the bivariate model with Σᵢ known.
pub fn fit_reitsma(data: &[StudySummary]) -> Result<ReitsmaFit> {
    if data.is_empty() {
        return Err(Error::TooFewStudies(0));
    }
    if data.len() < 3 {
        log::warn!(
            "fitting the bivariate model to {} studies; between-study covariance is weakly identified",
            data.len()
        );
    }
    let data = canonical_order(data);
    let start = initial_values(&data);
    let bounds = default_bounds();
    let objective = |x: &[f64]| {
        let p = BivariateParams::from_slice(x);
        let mut total = 0.0;
        for s in &data {
            match study_loglik(&p, s) {
                Some(v) => total += v,
                None => return f64::NAN,
            }
        }
        total
    };
    let opt = maximize(
        objective,
        &start.to_vec(),
        &bounds,
        &MaximizeOptions::default(),
    )?;
    Ok(ReitsmaFit {
        params: BivariateParams::from_slice(&opt.x),
        loglik: opt.value,
        converged: opt.converged,
        evaluations: opt.evaluations,
    })
}
