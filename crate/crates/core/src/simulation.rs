//! Monte Carlo study of the selection process: population generation,
//! Bernoulli thinning, refits and summaries.
//!
//! Random streams: every replication owns two ChaCha8 streams. The key is
//! `seed_from_u64(splitmix64(base_seed ^ splitmix64(scenario.key())))` and the
//! stream id is `2·rep` for the population and `2·rep + 1` for the selection
//! indicators, so any replication can be regenerated on its own and results
//! do not depend on scheduling.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::StudySummary;
use crate::error::{Error, Result};
use crate::likelihood::{fit_sa, ContrastMode, SaConfig};
use crate::normal::cdf;
use crate::reitsma::{fit_reitsma, sauc, BivariateParams};
use crate::selection::{t_statistic, ContrastVector};

/// Environment variable capping the replication thread pool.
pub const THREADS_ENV: &str = "DTA_SA_THREADS";

/// Which linear combination of the logits drives selection in a built-in scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionVariant {
    /// c1 = c2
    Equal,
    /// c1 = 1
    Sensitivity,
    /// c1 = 0
    Specificity,
}

impl SelectionVariant {
    pub const ALL: [SelectionVariant; 3] = [
        SelectionVariant::Equal,
        SelectionVariant::Sensitivity,
        SelectionVariant::Specificity,
    ];

    pub fn contrast(self) -> ContrastVector {
        match self {
            SelectionVariant::Equal => ContrastVector::dor(),
            SelectionVariant::Sensitivity => ContrastVector::sensitivity(),
            SelectionVariant::Specificity => ContrastVector::specificity(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "equal" | "dor" | "c1=c2" => Some(SelectionVariant::Equal),
            "se" | "sens" | "sensitivity" | "c1=1" => Some(SelectionVariant::Sensitivity),
            "sp" | "spec" | "specificity" | "c1=0" => Some(SelectionVariant::Specificity),
            _ => None,
        }
    }

    fn index(self) -> usize {
        match self {
            SelectionVariant::Equal => 0,
            SelectionVariant::Sensitivity => 1,
            SelectionVariant::Specificity => 2,
        }
    }
}

/// A data-generating setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: u32,
    pub mu1: f64,
    pub mu2: f64,
    pub tau1: f64,
    pub tau2: f64,
    /// Between-study covariance; filled from `rho·tau1·tau2` when omitted.
    #[serde(default)]
    pub tau12: Option<f64>,
    pub rho: f64,
    pub beta: f64,
    pub alpha: f64,
    /// First contrast component of the true selection function.
    pub c1: f64,
    /// Contrast used by the misspecified fit; defaults to (1, 0) when the
    /// truth is c1 = c2 and to c1 = c2 otherwise.
    #[serde(default)]
    pub misspecified_c1: Option<f64>,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(default)]
    pub sauc_true: Option<f64>,
}

// (μ1, μ2, τ1, τ2, ρ, α for c1=c2, c1=1, c1=0, tabulated SAUC); β = 0.5 throughout.
const TAU_HALF: f64 = FRAC_1_SQRT_2;
type CatalogRow = (f64, f64, f64, f64, f64, [f64; 3], f64);
const CATALOG: [CatalogRow; 12] = [
    (0.0, 1.735, 1.0, 2.0, -0.3, [-0.165, 0.891, -0.429], 0.564),
    (0.0, 1.735, 1.0, 2.0, -0.6, [-0.251, 0.894, -0.433], 0.620),
    (
        1.386,
        1.386,
        1.0,
        2.0,
        -0.3,
        [-0.766, -0.570, -0.111],
        0.828,
    ),
    (
        1.386,
        1.386,
        1.0,
        2.0,
        -0.6,
        [-0.848, -0.573, -0.118],
        0.846,
    ),
    (
        2.197,
        -0.405,
        1.0,
        2.0,
        -0.3,
        [-0.198, -1.269, 1.744],
        0.892,
    ),
    (
        2.197,
        -0.405,
        1.0,
        2.0,
        -0.6,
        [-0.284, -1.269, 1.733],
        0.877,
    ),
    (
        0.0,
        1.735,
        TAU_HALF,
        TAU_HALF,
        -0.3,
        [-0.423, 0.794, -0.993],
        0.620,
    ),
    (
        0.0,
        1.735,
        TAU_HALF,
        TAU_HALF,
        -0.6,
        [-0.461, 0.795, -0.996],
        0.702,
    ),
    (
        1.386,
        1.386,
        TAU_HALF,
        TAU_HALF,
        -0.3,
        [-1.003, -0.698, -0.697],
        0.846,
    ),
    (
        1.386,
        1.386,
        TAU_HALF,
        TAU_HALF,
        -0.6,
        [-1.032, -0.701, -0.698],
        0.864,
    ),
    (
        2.197,
        -0.405,
        TAU_HALF,
        TAU_HALF,
        -0.3,
        [-0.457, -1.362, 1.342],
        0.877,
    ),
    (
        2.197,
        -0.405,
        TAU_HALF,
        TAU_HALF,
        -0.6,
        [-0.492, -1.362, 1.335],
        0.835,
    ),
];

/// Selection slope shared by every built-in scenario.
pub const CATALOG_BETA: f64 = 0.5;

/// Number of built-in scenarios.
pub const CATALOG_LEN: usize = CATALOG.len();

impl Scenario {
    /// Built-in scenario `id` (1-based) with the given selection variant and population size.
    pub fn builtin(id: u32, variant: SelectionVariant, s: usize) -> Result<Scenario> {
        let row = (id as usize)
            .checked_sub(1)
            .and_then(|i| CATALOG.get(i))
            .ok_or_else(|| {
                Error::Domain(format!(
                    "unknown scenario {id}; available: {}",
                    catalog_listing()
                ))
            })?;
        let (mu1, mu2, tau1, tau2, rho, alphas, sauc_true) = *row;
        Ok(Scenario {
            id,
            mu1,
            mu2,
            tau1,
            tau2,
            tau12: Some(rho * tau1 * tau2),
            rho,
            beta: CATALOG_BETA,
            alpha: alphas[variant.index()],
            c1: variant.contrast().c1(),
            misspecified_c1: None,
            s,
            sauc_true: Some(sauc_true),
        })
    }

    /// Every built-in scenario in the given variant.
    pub fn catalog(variant: SelectionVariant, s: usize) -> Vec<Scenario> {
        (1..=CATALOG_LEN as u32)
            .map(|id| Scenario::builtin(id, variant, s).expect("catalog id"))
            .collect()
    }

    /// Check parameter ranges and fill `tau12`.
    pub fn validated(mut self) -> Result<Scenario> {
        self.params()?;
        ContrastVector::from_c1(self.c1)?;
        if let Some(m) = self.misspecified_c1 {
            ContrastVector::from_c1(m)?;
        }
        if !(self.beta.is_finite() && self.beta >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Domain(format!(
                "scenario {}: invalid selection function",
                self.id
            )));
        }
        if self.s == 0 {
            return Err(Error::Domain(format!(
                "scenario {}: S must be positive",
                self.id
            )));
        }
        let implied = self.rho * self.tau1 * self.tau2;
        match self.tau12 {
            Some(t) if (t - implied).abs() > 1e-9 * (1.0 + implied.abs()) => {
                return Err(Error::Domain(format!(
                    "scenario {}: tau12 = {t} disagrees with rho·tau1·tau2 = {implied}",
                    self.id
                )));
            }
            _ => self.tau12 = Some(implied),
        }
        Ok(self)
    }

    pub fn params(&self) -> Result<BivariateParams> {
        BivariateParams::new(self.mu1, self.mu2, self.tau1, self.tau2, self.rho)
    }

    pub fn contrast(&self) -> ContrastVector {
        ContrastVector::from_c1(self.c1).expect("validated contrast")
    }

    pub fn misspecified_contrast(&self) -> ContrastVector {
        match self.misspecified_c1 {
            Some(c1) => ContrastVector::from_c1(c1).expect("validated contrast"),
            None if (self.c1 - FRAC_1_SQRT_2).abs() < 1e-9 => ContrastVector::sensitivity(),
            None => ContrastVector::dor(),
        }
    }

    /// True SAUC of the bivariate parameters.
    pub fn sauc(&self) -> Result<f64> {
        Ok(sauc(&self.params()?))
    }

    /// Stream key distinguishing scenarios that share a base seed.
    pub fn key(&self) -> u64 {
        splitmix64(((self.id as u64) << 32) ^ self.c1.to_bits().rotate_left(17) ^ self.s as u64)
    }
}

/// `1: μ=(0, 1.735) τ=(1, 2) ρ=-0.3, ...` one line per built-in scenario.
pub fn catalog_listing() -> String {
    CATALOG
        .iter()
        .enumerate()
        .map(|(i, r)| {
            format!(
                "{}: mu=({}, {}) tau=({:.3}, {:.3}) rho={}",
                i + 1,
                r.0,
                r.1,
                r.2,
                r.3,
                r.4
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Read a scenario from a TOML or JSON file (by extension; JSON otherwise).
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    let parsed: std::result::Result<Scenario, String> =
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|e| e.to_string()),
            _ => serde_json::from_str(&text).map_err(|e| e.to_string()),
        };
    parsed
        .map_err(|message| Error::Parse { row: 0, message })?
        .validated()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for `(base_seed, scenario key, replication, sub-stream)`.
pub fn replication_rng(base_seed: u64, scenario_key: u64, rep: u64, sub: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(base_seed ^ splitmix64(scenario_key)));
    rng.set_stream(rep.wrapping_mul(2).wrapping_add(sub & 1));
    rng
}

/// A generated study together with its publication probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationStudy {
    pub summary: StudySummary,
    pub p: f64,
}

fn positive_sd<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let s = 0.5 + 0.5 * z;
        if s != 0.0 {
            return s;
        }
    }
}

/// Draw `scenario.s` population studies from `rng`.
pub fn generate_population_with<R: Rng>(
    scenario: &Scenario,
    rng: &mut R,
) -> Result<Vec<PopulationStudy>> {
    let biv = scenario.params()?;
    let contrast = ContrastVector::from_c1(scenario.c1)?;
    let om = biv.omega();
    let mut out = Vec::with_capacity(scenario.s);
    for _ in 0..scenario.s {
        let s1 = positive_sd(rng);
        let s2 = positive_sd(rng);
        let (v1, v2) = (s1 * s1, s2 * s2);
        // Cholesky of Ω + Σ.
        let a = om[0][0] + v1;
        let b = om[0][1];
        let d = om[1][1] + v2;
        let l11 = a.sqrt();
        let l21 = b / l11;
        let l22 = (d - l21 * l21).sqrt();
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let summary = StudySummary::new(biv.mu1 + l11 * z1, biv.mu2 + l21 * z1 + l22 * z2, v1, v2);
        let p = cdf(scenario.beta * t_statistic(&summary, &contrast) + scenario.alpha);
        out.push(PopulationStudy { summary, p });
    }
    Ok(out)
}

/// Population for `seed`, using sub-stream 0 of replication 0.
pub fn generate_population(scenario: &Scenario, seed: u64) -> Result<Vec<PopulationStudy>> {
    generate_population_with(scenario, &mut replication_rng(seed, scenario.key(), 0, 0))
}

/// Bernoulli thinning. Returns the selected studies and `p̂`, the mean of the `pᵢ`.
pub fn apply_selection_with<R: Rng>(
    population: &[PopulationStudy],
    rng: &mut R,
) -> Result<(Vec<StudySummary>, f64)> {
    if population.is_empty() {
        return Err(Error::EmptySelection);
    }
    let selected: Vec<StudySummary> = population
        .iter()
        .filter(|s| rng.random::<f64>() < s.p)
        .map(|s| s.summary)
        .collect();
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    let p_hat = population.iter().map(|s| s.p).sum::<f64>() / population.len() as f64;
    Ok((selected, p_hat))
}

pub fn apply_selection(
    population: &[PopulationStudy],
    seed: u64,
) -> Result<(Vec<StudySummary>, f64)> {
    apply_selection_with(population, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Estimators compared in the study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Bivariate model on the whole population.
    #[serde(rename = "Reitsma_P")]
    ReitsmaP,
    /// Bivariate model on the selected studies.
    #[serde(rename = "Reitsma_O")]
    ReitsmaO,
    #[serde(rename = "Proposed-estimated")]
    ProposedEstimated,
    #[serde(rename = "Proposed-correct")]
    ProposedCorrect,
    #[serde(rename = "Proposed-misspecified")]
    ProposedMisspecified,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ReitsmaP,
        Method::ReitsmaO,
        Method::ProposedEstimated,
        Method::ProposedCorrect,
        Method::ProposedMisspecified,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::ReitsmaP => "Reitsma_P",
            Method::ReitsmaO => "Reitsma_O",
            Method::ProposedEstimated => "Proposed-estimated",
            Method::ProposedCorrect => "Proposed-correct",
            Method::ProposedMisspecified => "Proposed-misspecified",
        }
    }

    /// Accepts the label or a snake_case form such as `reitsma_o` or `proposed_correct`.
    pub fn parse(s: &str) -> Option<Method> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "reitsma_p" => Some(Method::ReitsmaP),
            "reitsma_o" => Some(Method::ReitsmaO),
            "proposed_estimated" | "proposed" => Some(Method::ProposedEstimated),
            "proposed_correct" => Some(Method::ProposedCorrect),
            "proposed_misspecified" => Some(Method::ProposedMisspecified),
            _ => None,
        }
    }
}

/// SAUC estimates of one replication, aligned with the requested methods.
/// `None` marks a failed or non-convergent fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub rep: u64,
    pub n_selected: usize,
    pub p_hat: f64,
    pub sauc: Vec<Option<f64>>,
}

/// Generate, thin and refit replication `rep`.
pub fn run_replication(
    scenario: &Scenario,
    methods: &[Method],
    base_seed: u64,
    rep: u64,
) -> Replication {
    let key = scenario.key();
    let mut failed = Replication {
        rep,
        n_selected: 0,
        p_hat: f64::NAN,
        sauc: vec![None; methods.len()],
    };
    let population =
        match generate_population_with(scenario, &mut replication_rng(base_seed, key, rep, 0)) {
            Ok(p) => p,
            Err(_) => return failed,
        };
    let selection = apply_selection_with(&population, &mut replication_rng(base_seed, key, rep, 1));
    let needs_selected = methods.iter().any(|&m| m != Method::ReitsmaP);

    let (selected, p_hat) = match selection {
        Ok(v) => v,
        Err(_) if !needs_selected => (Vec::new(), f64::NAN),
        Err(_) => {
            if let Some(i) = methods.iter().position(|&m| m == Method::ReitsmaP) {
                let all: Vec<StudySummary> = population.iter().map(|s| s.summary).collect();
                failed.sauc[i] = fit_reitsma(&all)
                    .ok()
                    .filter(|f| f.converged)
                    .map(|f| sauc(&f.params));
            }
            return failed;
        }
    };

    let observed = if needs_selected {
        fit_reitsma(&selected).ok()
    } else {
        None
    };
    let sa = |mode: ContrastMode| -> Option<f64> {
        let init = observed.as_ref().map(|f| f.params);
        let config = SaConfig {
            p: p_hat.min(1.0),
            contrast_mode: mode,
            ..SaConfig::default()
        };
        fit_sa(&selected, &config, init)
            .ok()
            .filter(|f| f.converged)
            .map(|f| f.sauc)
    };
    let sauc_values = methods
        .iter()
        .map(|&m| match m {
            Method::ReitsmaP => {
                let all: Vec<StudySummary> = population.iter().map(|s| s.summary).collect();
                fit_reitsma(&all)
                    .ok()
                    .filter(|f| f.converged)
                    .map(|f| sauc(&f.params))
            }
            Method::ReitsmaO => observed
                .as_ref()
                .filter(|f| f.converged)
                .map(|f| sauc(&f.params)),
            Method::ProposedEstimated => sa(ContrastMode::Estimate),
            Method::ProposedCorrect => sa(ContrastMode::Fixed(scenario.contrast())),
            Method::ProposedMisspecified => {
                sa(ContrastMode::Fixed(scenario.misspecified_contrast()))
            }
        })
        .collect();
    Replication {
        rep,
        n_selected: selected.len(),
        p_hat,
        sauc: sauc_values,
    }
}

/// Median, quartiles and convergence rate of one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub scenario_id: u32,
    pub method: Method,
    #[serde(rename = "S")]
    pub s: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    /// Percentage of replications with a converged fit.
    pub convergence_rate: f64,
    pub reps: usize,
}

/// Sample quantile with linear interpolation between order statistics
/// (`h = (n − 1)q`). `sorted` must be ascending and non-empty.
pub fn quantile_linear(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Summarize replications per method. Non-convergent entries count against
/// the convergence rate and are left out of the quartiles.
pub fn summarize(scenario: &Scenario, methods: &[Method], reps: &[Replication]) -> Vec<SimSummary> {
    methods
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let mut v: Vec<f64> = reps.iter().filter_map(|r| r.sauc[k]).collect();
            v.sort_by(f64::total_cmp);
            let (median, q1, q3) = if v.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                (
                    quantile_linear(&v, 0.5),
                    quantile_linear(&v, 0.25),
                    quantile_linear(&v, 0.75),
                )
            };
            SimSummary {
                scenario_id: scenario.id,
                method,
                s: scenario.s,
                median,
                q1,
                q3,
                convergence_rate: if reps.is_empty() {
                    0.0
                } else {
                    100.0 * v.len() as f64 / reps.len() as f64
                },
                reps: reps.len(),
            }
        })
        .collect()
}

/// Thread count from `DTA_SA_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Run all replications on a pool of `threads` workers (rayon's default when `None`).
pub fn run_replications(
    scenario: &Scenario,
    reps: usize,
    methods: &[Method],
    base_seed: u64,
    threads: Option<usize>,
) -> Result<Vec<Replication>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        (0..reps as u64)
            .into_par_iter()
            .map(|rep| run_replication(scenario, methods, base_seed, rep))
            .collect()
    }))
}

/// Replicate, refit and summarize. The pool size comes from `DTA_SA_THREADS`.
pub fn run_study(
    scenario: &Scenario,
    reps: usize,
    methods: &[Method],
    base_seed: u64,
) -> Result<Vec<SimSummary>> {
    if reps == 0 {
        return Err(Error::Domain("reps must be at least 1".into()));
    }
    let results = run_replications(scenario, reps, methods, base_seed, thread_cap())?;
    Ok(summarize(scenario, methods, &results))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_covariances() {
        for v in SelectionVariant::ALL {
            for sc in Scenario::catalog(v, 50) {
                assert_eq!(sc.tau12, Some(sc.rho * sc.tau1 * sc.tau2));
                sc.clone().validated().unwrap();
            }
        }
        let s1 = Scenario::builtin(1, SelectionVariant::Equal, 50).unwrap();
        assert!((s1.tau12.unwrap() + 0.6).abs() < 1e-12);
        let s7 = Scenario::builtin(7, SelectionVariant::Equal, 50).unwrap();
        assert!((s7.tau12.unwrap() + 0.15).abs() < 1e-12);
        assert!(Scenario::builtin(13, SelectionVariant::Equal, 50).is_err());
        assert!(Scenario::builtin(0, SelectionVariant::Equal, 50).is_err());
    }

    #[test]
    fn mismatched_tau12_rejected() {
        let mut s = Scenario::builtin(3, SelectionVariant::Equal, 50).unwrap();
        s.tau12 = Some(-0.5);
        assert!(s.validated().is_err());
    }

    #[test]
    fn zero_slope_gives_constant_probability() {
        let mut s = Scenario::builtin(3, SelectionVariant::Equal, 300).unwrap();
        s.beta = 0.0;
        let pop = generate_population(&s, 7).unwrap();
        let want = cdf(s.alpha);
        assert!(pop.iter().all(|p| p.p == want));
    }

    #[test]
    fn population_is_deterministic() {
        let s = Scenario::builtin(5, SelectionVariant::Sensitivity, 100).unwrap();
        assert_eq!(
            generate_population(&s, 11).unwrap(),
            generate_population(&s, 11).unwrap()
        );
        assert_ne!(
            generate_population(&s, 11).unwrap(),
            generate_population(&s, 12).unwrap()
        );
    }

    #[test]
    fn certain_selection_keeps_everything() {
        let s = Scenario::builtin(1, SelectionVariant::Equal, 40).unwrap();
        let pop: Vec<_> = generate_population(&s, 3)
            .unwrap()
            .into_iter()
            .map(|p| PopulationStudy { p: 1.0, ..p })
            .collect();
        let (sel, p_hat) = apply_selection(&pop, 5).unwrap();
        assert_eq!(sel.len(), 40);
        assert_eq!(p_hat, 1.0);
    }

    #[test]
    fn half_selection_concentrates() {
        let s = Scenario::builtin(1, SelectionVariant::Equal, 10_000).unwrap();
        let pop: Vec<_> = generate_population(&s, 3)
            .unwrap()
            .into_iter()
            .map(|p| PopulationStudy { p: 0.5, ..p })
            .collect();
        let (sel, _) = apply_selection(&pop, 9).unwrap();
        assert!((sel.len() as i64 - 5000).abs() <= 150, "{}", sel.len());
    }

    #[test]
    fn empty_selection_is_an_error() {
        let s = Scenario::builtin(1, SelectionVariant::Equal, 10).unwrap();
        let pop: Vec<_> = generate_population(&s, 3)
            .unwrap()
            .into_iter()
            .map(|p| PopulationStudy { p: 0.0, ..p })
            .collect();
        assert!(matches!(
            apply_selection(&pop, 1),
            Err(Error::EmptySelection)
        ));
        assert!(matches!(
            apply_selection(&[], 1),
            Err(Error::EmptySelection)
        ));
    }

    #[test]
    fn linear_quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_linear(&v, 0.5), 2.5);
        assert_eq!(quantile_linear(&v, 0.25), 1.75);
        assert_eq!(quantile_linear(&v, 0.75), 3.25);
        assert_eq!(quantile_linear(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.label()), Some(m));
        }
        assert_eq!(Method::parse("reitsma_o"), Some(Method::ReitsmaO));
        assert_eq!(Method::parse("bogus"), None);
    }

    #[test]
    fn misspecified_contrast_defaults() {
        let eq = Scenario::builtin(1, SelectionVariant::Equal, 50).unwrap();
        assert_eq!(eq.misspecified_contrast(), ContrastVector::sensitivity());
        let se = Scenario::builtin(1, SelectionVariant::Sensitivity, 50).unwrap();
        assert_eq!(se.misspecified_contrast(), ContrastVector::dor());
    }

    #[test]
    fn replications_independent_of_thread_count() {
        let s = Scenario::builtin(9, SelectionVariant::Equal, 25).unwrap();
        let m = [Method::ReitsmaP, Method::ReitsmaO];
        let a = run_replications(&s, 6, &m, 42, Some(1)).unwrap();
        let b = run_replications(&s, 6, &m, 42, Some(3)).unwrap();
        assert_eq!(a, b);
        // A replication regenerated alone matches its batch counterpart.
        assert_eq!(run_replication(&s, &m, 42, 4), a[4]);
    }
}
