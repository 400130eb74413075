//! Conditional likelihood of the selected studies at a fixed marginal
//! selection probability `p`, and its maximization.
//!
//! The log-likelihood is the bivariate-model term plus
//! `Σ log Φ(β tᵢ + α_p) − Σ log b(Σᵢ)`, where `α_p` is re-solved from
//! `N / Σ b(Σᵢ)⁻¹ = p` at every evaluation rather than being a free
//! coordinate. At `p = 1` both selection terms vanish.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::StudySummary;
use crate::error::{Error, Result};
use crate::inference::{self, CiResult};
use crate::normal::{log_cdf, quantile};
use crate::optimize::{maximize, Bounds, MaximizeOptions};
use crate::reitsma::{self, canonical_order, sauc, study_loglik, BivariateParams, RHO_BOUNDS};
use crate::selection::{
    marginal_term, solve_alpha_terms, t_statistic, ContrastVector, MarginalTerm, SelectionParams,
};

/// Relative distance to a bound below which a coordinate counts as pinned.
const PIN_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContrastMode {
    /// c1 is a free parameter in [0, 1].
    Estimate,
    Fixed(ContrastVector),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    pub p: f64,
    pub contrast_mode: ContrastMode,
    pub beta_bounds: (f64, f64),
    pub mu_bounds: (f64, f64),
    pub tau_bounds: (f64, f64),
    pub initial_beta: f64,
    pub initial_c1: f64,
    /// Confidence level of the SAUC interval.
    pub level: f64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            p: 1.0,
            contrast_mode: ContrastMode::Estimate,
            beta_bounds: (0.0, 2.0),
            mu_bounds: reitsma::MU_BOUNDS,
            tau_bounds: (0.0, 3.0),
            initial_beta: 1.0,
            initial_c1: 0.5,
            level: 0.95,
        }
    }
}

impl SaConfig {
    pub fn with_p(&self, p: f64) -> Self {
        SaConfig { p, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::Domain(format!(
                "p must lie in (0, 1], got {}",
                self.p
            )));
        }
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo < hi;
        if !ok(self.beta_bounds) || self.beta_bounds.0 < 0.0 {
            return Err(Error::Domain(format!(
                "invalid beta bounds {:?}",
                self.beta_bounds
            )));
        }
        if !ok(self.mu_bounds) {
            return Err(Error::Domain(format!(
                "invalid mu bounds {:?}",
                self.mu_bounds
            )));
        }
        if !ok(self.tau_bounds)
            || self.tau_bounds.0 < 0.0
            || self.tau_bounds.1 <= reitsma::TAU_BOUNDS.0
        {
            return Err(Error::Domain(format!(
                "invalid tau bounds {:?}",
                self.tau_bounds
            )));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Domain(format!(
                "level must lie in (0, 1), got {}",
                self.level
            )));
        }
        Ok(())
    }

    fn bounds(&self) -> Bounds {
        let tau_lo = self.tau_bounds.0.max(reitsma::TAU_BOUNDS.0);
        let mut lower = vec![
            self.mu_bounds.0,
            self.mu_bounds.0,
            tau_lo,
            tau_lo,
            RHO_BOUNDS.0,
            self.beta_bounds.0,
        ];
        let mut upper = vec![
            self.mu_bounds.1,
            self.mu_bounds.1,
            self.tau_bounds.1,
            self.tau_bounds.1,
            RHO_BOUNDS.1,
            self.beta_bounds.1,
        ];
        if self.contrast_mode == ContrastMode::Estimate {
            lower.push(0.0);
            upper.push(1.0);
        }
        Bounds::new(lower, upper)
    }
}

/// Names of the optimizer coordinates, in order.
pub const PARAM_NAMES: [&str; 7] = ["mu1", "mu2", "tau1", "tau2", "rho", "beta", "c1"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaFit {
    pub p: f64,
    pub biv: BivariateParams,
    /// Fitted selection function; `None` at `p = 1`, where β and c drop out.
    pub sel: Option<SelectionParams>,
    pub loglik: f64,
    pub sauc: f64,
    pub sauc_ci: Option<CiResult>,
    /// Wald interval for β from the same observed information.
    pub beta_ci: Option<(f64, f64)>,
    pub converged: bool,
    pub n_studies: usize,
    /// Coordinates sitting on a box bound, excluded from the information matrix.
    pub boundary: Vec<String>,
    pub warnings: Vec<String>,
}

impl SaFit {
    /// Expected number of unpublished studies, N(1 − p)/p.
    pub fn implied_unpublished(&self) -> f64 {
        self.n_studies as f64 * (1.0 - self.p) / self.p
    }

    /// Summary operating point as (FPR, TPR).
    pub fn summary_point(&self) -> (f64, f64) {
        let (se, sp) = self.biv.summary_point();
        (1.0 - sp, se)
    }
}

/// Per-study quantities that do not depend on parameters.
struct Prepared {
    data: Vec<StudySummary>,
}

impl Prepared {
    fn new(data: &[StudySummary]) -> Self {
        Prepared {
            data: canonical_order(data),
        }
    }

    fn eval(
        &self,
        biv: &BivariateParams,
        contrast: &ContrastVector,
        beta: f64,
        p: f64,
    ) -> Result<(f64, f64)> {
        let mut total = 0.0;
        for (i, s) in self.data.iter().enumerate() {
            total += study_loglik(biv, s).ok_or(Error::SingularCovariance { study: i })?;
        }
        if p == 1.0 {
            return Ok((total, f64::INFINITY));
        }
        let terms: Vec<MarginalTerm> = self
            .data
            .iter()
            .map(|s| marginal_term(s.s1_sq, s.s2_sq, biv, contrast, beta))
            .collect();
        let alpha = solve_alpha_terms(p, &terms)?;
        for (s, m) in self.data.iter().zip(&terms) {
            total += log_cdf(beta * t_statistic(s, contrast) + alpha);
            total -= log_cdf((m.shift + alpha) / m.scale);
        }
        Ok((total, alpha))
    }
}

/// Conditional log-likelihood of the selected studies at selection probability `p`.
pub fn conditional_loglik(
    biv: &BivariateParams,
    contrast: &ContrastVector,
    beta: f64,
    p: f64,
    data: &[StudySummary],
) -> Result<f64> {
    conditional_loglik_with_alpha(biv, contrast, beta, p, data).map(|(v, _)| v)
}

/// As [`conditional_loglik`], also returning the solved α_p.
pub fn conditional_loglik_with_alpha(
    biv: &BivariateParams,
    contrast: &ContrastVector,
    beta: f64,
    p: f64,
    data: &[StudySummary],
) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::TooFewStudies(0));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1], got {p}")));
    }
    Prepared::new(data).eval(biv, contrast, beta, p)
}

fn unpack(x: &[f64], mode: &ContrastMode) -> Option<(BivariateParams, ContrastVector, f64)> {
    let biv = BivariateParams::from_slice(&x[..5]);
    let contrast = match mode {
        ContrastMode::Estimate => ContrastVector::from_c1(x[6]).ok()?,
        ContrastMode::Fixed(c) => *c,
    };
    Some((biv, contrast, x[5]))
}

/// Delta-method SAUC interval over the unpinned coordinates of `x`.
fn delta_interval<F>(
    objective: F,
    x: &[f64],
    free: &[usize],
    level: f64,
) -> Result<(CiResult, nalgebra::DMatrix<f64>)>
where
    F: FnMut(&[f64]) -> f64,
{
    let info = inference::observed_information(objective, x, free)?;
    let est = sauc(&BivariateParams::from_slice(&x[..5]));
    let grad = inference::gradient(
        |z: &[f64]| {
            if z.len() >= 5 {
                sauc(&BivariateParams::from_slice(&z[..5]))
            } else {
                f64::NAN
            }
        },
        x,
        free,
    );
    let ci = inference::sauc_ci(est, &grad, &info, level)?;
    Ok((ci, info))
}

fn free_coordinates(x: &[f64], bounds: &Bounds, names: &[&str]) -> (Vec<usize>, Vec<String>) {
    let mut free = Vec::new();
    let mut pinned = Vec::new();
    for (j, name) in names.iter().enumerate().take(x.len()) {
        if bounds.at_bound(x, j, PIN_TOL) {
            pinned.push(name.to_string());
        } else {
            free.push(j);
        }
    }
    (free, pinned)
}

/// Bivariate-model fit reported in the sensitivity-analysis shape (p = 1).
pub fn fit_at_full_selection(data: &[StudySummary], level: f64) -> Result<SaFit> {
    let fit = reitsma::fit_reitsma(data)?;
    let prepared = Prepared::new(data);
    let x = fit.params.to_vec();
    let bounds = reitsma::default_bounds();
    let (free, boundary) = free_coordinates(&x, &bounds, &PARAM_NAMES[..5]);
    let objective = |z: &[f64]| {
        let b = BivariateParams::from_slice(z);
        prepared
            .data
            .iter()
            .map(|s| study_loglik(&b, s).unwrap_or(f64::NAN))
            .sum::<f64>()
    };
    let mut warnings = Vec::new();
    let sauc_ci = match delta_interval(objective, &x, &free, level) {
        Ok((ci, _)) => Some(ci),
        Err(e) => {
            warnings.push(format!("SAUC interval unavailable: {e}"));
            None
        }
    };
    if !boundary.is_empty() {
        warnings.push(format!(
            "interval conditional on boundary: {}",
            boundary.join(", ")
        ));
    }
    Ok(SaFit {
        p: 1.0,
        biv: fit.params,
        sel: None,
        loglik: fit.loglik,
        sauc: sauc(&fit.params),
        sauc_ci,
        beta_ci: None,
        converged: fit.converged,
        n_studies: data.len(),
        boundary,
        warnings,
    })
}

/// Starting point for a sensitivity-analysis fit.
#[derive(Debug, Clone, Copy, Default)]
pub struct WarmStart {
    pub biv: Option<BivariateParams>,
    pub beta: Option<f64>,
    pub c1: Option<f64>,
}

/// Maximize the conditional likelihood at `config.p`.
pub fn fit_sa(
    data: &[StudySummary],
    config: &SaConfig,
    init: Option<BivariateParams>,
) -> Result<SaFit> {
    fit_sa_from(
        data,
        config,
        WarmStart {
            biv: init,
            ..WarmStart::default()
        },
    )
}

pub fn fit_sa_from(data: &[StudySummary], config: &SaConfig, start: WarmStart) -> Result<SaFit> {
    config.validate()?;
    if data.len() < 3 {
        return Err(Error::TooFewStudies(data.len()));
    }
    if config.p == 1.0 {
        let mut fit = fit_at_full_selection(data, config.level)?;
        if let ContrastMode::Fixed(c) = config.contrast_mode {
            fit.warnings.push(format!(
                "p = 1: selection terms vanish, contrast ({:.3}, {:.3}) unused",
                c.c1(),
                c.c2()
            ));
        }
        return Ok(fit);
    }

    let biv0 = match start.biv {
        Some(b) => b,
        None => reitsma::fit_reitsma(data)?.params,
    };
    let bounds = config.bounds();
    let mode = config.contrast_mode;
    let mut x0 = biv0.to_vec();
    x0.push(start.beta.unwrap_or(config.initial_beta));
    if mode == ContrastMode::Estimate {
        x0.push(start.c1.unwrap_or(config.initial_c1));
    }
    bounds.project(&mut x0);

    let prepared = Prepared::new(data);
    let p = config.p;
    let objective = |x: &[f64]| -> f64 {
        match unpack(x, &mode) {
            Some((b, c, beta)) => prepared
                .eval(&b, &c, beta, p)
                .map(|(v, _)| v)
                .unwrap_or(f64::NAN),
            None => f64::NAN,
        }
    };
    let opt = maximize(objective, &x0, &bounds, &MaximizeOptions::default())?;
    let (biv, contrast, beta) =
        unpack(&opt.x, &mode).ok_or_else(|| Error::OptimizationFailed("invalid optimum".into()))?;
    let (loglik, alpha) = prepared.eval(&biv, &contrast, beta, p)?;

    let (mut free, boundary) = free_coordinates(&opt.x, &bounds, &PARAM_NAMES);
    let mut warnings = Vec::new();
    // With β pinned at zero the contrast has no effect on the likelihood.
    if mode == ContrastMode::Estimate
        && boundary.iter().any(|n| n == "beta")
        && beta <= bounds.lower[5]
    {
        free.retain(|&j| j != 6);
    }
    let (sauc_ci, beta_ci) = match delta_interval(objective, &opt.x, &free, config.level) {
        Ok((ci, info)) => {
            let beta_ci = free.iter().position(|&j| j == 5).and_then(|k| {
                let cov = inference::covariance(&info).ok()?;
                let se = cov[(k, k)].max(0.0).sqrt();
                let z = quantile(0.5 + 0.5 * config.level);
                Some((beta - z * se, beta + z * se))
            });
            (Some(ci), beta_ci)
        }
        Err(e) => {
            log::warn!("p = {p}: SAUC interval unavailable: {e}");
            warnings.push(format!("SAUC interval unavailable: {e}"));
            (None, None)
        }
    };
    if !boundary.is_empty() {
        warnings.push(format!("estimates on boundary: {}", boundary.join(", ")));
    }

    Ok(SaFit {
        p,
        biv,
        sel: Some(SelectionParams {
            contrast,
            beta,
            alpha,
        }),
        loglik,
        sauc: sauc(&biv),
        sauc_ci,
        beta_ci,
        converged: opt.converged,
        n_studies: data.len(),
        boundary,
        warnings,
    })
}

/// One entry of a p-grid analysis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridEntry {
    pub p: f64,
    pub fit: Option<SaFit>,
    pub error: Option<String>,
}

/// Fit every `p` in `p_grid`.
///
/// With `warm_start` the fits run in grid order, each starting from the
/// previous converged estimates (the first from the bivariate fit). Without
/// it every entry starts from the bivariate fit and entries run in parallel.
pub fn sa_grid_with(
    data: &[StudySummary],
    p_grid: &[f64],
    config: &SaConfig,
    warm_start: bool,
) -> Vec<GridEntry> {
    let base = match reitsma::fit_reitsma(data) {
        Ok(f) => Some(f.params),
        Err(e) => {
            return p_grid
                .iter()
                .map(|&p| GridEntry {
                    p,
                    fit: None,
                    error: Some(e.to_string()),
                })
                .collect();
        }
    };
    let run = |p: f64, start: WarmStart| -> GridEntry {
        match fit_sa_from(data, &config.with_p(p), start) {
            Ok(fit) => GridEntry {
                p,
                fit: Some(fit),
                error: None,
            },
            Err(e) => GridEntry {
                p,
                fit: None,
                error: Some(e.to_string()),
            },
        }
    };
    if !warm_start {
        let start = WarmStart {
            biv: base,
            ..WarmStart::default()
        };
        return p_grid.par_iter().map(|&p| run(p, start)).collect();
    }
    let mut out = Vec::with_capacity(p_grid.len());
    let mut start = WarmStart {
        biv: base,
        ..WarmStart::default()
    };
    for &p in p_grid {
        let entry = run(p, start);
        if let Some(fit) = entry.fit.as_ref().filter(|f| f.converged) {
            start.biv = Some(fit.biv);
            if let Some(sel) = fit.sel {
                start.beta = Some(sel.beta);
                if config.contrast_mode == ContrastMode::Estimate {
                    start.c1 = Some(sel.contrast.c1());
                }
            }
        }
        out.push(entry);
    }
    out
}

/// Warm-started grid (sequential).
pub fn sa_grid(data: &[StudySummary], p_grid: &[f64], config: &SaConfig) -> Vec<GridEntry> {
    sa_grid_with(data, p_grid, config, true)
}

/// Summary operating points `(p, FPR, TPR)` of the successful grid entries.
pub fn trajectory(entries: &[GridEntry]) -> Vec<(f64, f64, f64)> {
    entries
        .iter()
        .filter_map(|e| e.fit.as_ref())
        .map(|f| {
            let (fpr, tpr) = f.summary_point();
            (f.p, fpr, tpr)
        })
        .collect()
}
