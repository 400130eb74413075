//! Command-line interface: `dta-sa fit|sa|simulate|sroc`.
//!
//! Exit codes: 0 success, 2 bad input or usage, 3 estimation failure,
//! 4 no converged simulation replication.

mod output;
pub mod svg;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::data::{read_studies_path, summarize_all, StudySummary};
use crate::error::Error;
use crate::likelihood::{
    fit_at_full_selection, sa_grid_with, trajectory, ContrastMode, SaConfig, SaFit,
};
use crate::normal::{cdf, expit};
use crate::reitsma::{fpr_grid, sauc, sroc_curve, BivariateParams};
use crate::selection::{t_statistic, ContrastVector};
use crate::simulation::{self, Method, Scenario, SelectionVariant};

pub use output::Precision;
use output::{csv_text, grid_record, write_json};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FIT: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;

const FPR_RANGE: (f64, f64) = (0.001, 0.999);

#[derive(Debug, Parser)]
#[command(
    name = "dta-sa",
    version,
    about = "Bivariate meta-analysis of diagnostic accuracy with publication-bias sensitivity analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the bivariate random-effects model; writes reitsma.json and sroc.csv.
    Fit(FitArgs),
    /// Sensitivity analysis over a grid of marginal selection probabilities.
    Sa(SaArgs),
    /// Monte Carlo study on a built-in or file-defined scenario.
    Simulate(SimulateArgs),
    /// Tabulate an SROC curve from a data file or explicit parameters.
    Sroc(SrocArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Write numbers with 17 significant digits instead of 6.
    #[arg(long)]
    pub full_precision: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with columns id,tp,fn,tn,fp.
    pub input: PathBuf,
    /// Confidence level of the SAUC interval.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Number of FPR points in sroc.csv.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Also write sroc.svg.
    #[arg(long)]
    pub svg: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SaArgs {
    pub input: PathBuf,
    /// Comma-separated marginal selection probabilities in (0, 1].
    #[arg(long, default_value = "1,0.8,0.6,0.4")]
    pub p_grid: String,
    /// estimate | dor | se | sp | c1=<value>
    #[arg(long, default_value = "estimate")]
    pub contrast: String,
    /// Upper bound of the selection slope β.
    #[arg(long, default_value_t = 2.0)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Start every p from the bivariate fit instead of the previous p.
    #[arg(long)]
    pub cold_start: bool,
    /// Also write sa_sroc.svg and selection.svg.
    #[arg(long)]
    pub svg: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Built-in scenario number (1-12).
    #[arg(
        long,
        conflicts_with = "scenario_file",
        required_unless_present = "scenario_file"
    )]
    pub scenario: Option<u32>,
    /// TOML or JSON scenario definition.
    #[arg(long)]
    pub scenario_file: Option<PathBuf>,
    /// True selection contrast for built-in scenarios: equal (c1=c2), se (c1=1) or sp (c1=0).
    #[arg(long, default_value = "equal")]
    pub selection: String,
    /// Population size per replication (built-in scenarios).
    #[arg(long = "S", default_value_t = 200)]
    pub s: usize,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Comma-separated subset of reitsma_p, reitsma_o, proposed_estimated,
    /// proposed_correct, proposed_misspecified; or `all`.
    #[arg(long, default_value = "all")]
    pub methods: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SrocArgs {
    /// CSV to fit; omit when giving --params.
    #[arg(required_unless_present = "params")]
    pub input: Option<PathBuf>,
    /// mu1,mu2,tau1,tau2,rho
    #[arg(long, conflicts_with = "input")]
    pub params: Option<String>,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long)]
    pub svg: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OptimizationFailed(_)
            | Error::NonInvertibleHessian
            | Error::SingularCovariance { .. }
            | Error::BracketingFailed { .. } => EXIT_FIT,
            _ => EXIT_INPUT,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: &Command) -> CliResult<()> {
    match command {
        Command::Fit(a) => cmd_fit(a),
        Command::Sa(a) => cmd_sa(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sroc(a) => cmd_sroc(a),
    }
}

fn load_data(path: &Path) -> CliResult<Vec<StudySummary>> {
    let studies = read_studies_path(path).map_err(|e| match e {
        Error::Io(io) => CliError::input(format!("{}: {io}", path.display())),
        other => CliError::input(format!("{}: {other}", path.display())),
    })?;
    if studies.is_empty() {
        return Err(CliError::input(format!("{}: no studies", path.display())));
    }
    Ok(summarize_all(&studies)?)
}

fn prepare_out(out: &Path) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| CliError::input(format!("{}: {e}", out.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_manifest(
    out: &Path,
    command: &str,
    input: Option<&Path>,
    options: BTreeMap<&str, Value>,
    seed: Option<u64>,
) -> CliResult<()> {
    let manifest = json!({
        "command": command,
        "input": input.map(|p| p.display().to_string()),
        "output": out.display().to_string(),
        "options": options,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
    });
    Ok(write_json(&out.join("manifest.json"), &manifest)?)
}

fn check_level(level: f64) -> CliResult<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(CliError::input(format!(
            "--level must lie in (0, 1), got {level}"
        )))
    }
}

fn check_points(points: usize) -> CliResult<()> {
    if points >= 2 {
        Ok(())
    } else {
        Err(CliError::input("--points must be at least 2"))
    }
}

fn sroc_rows(biv: &BivariateParams, points: usize) -> CliResult<Vec<(f64, f64)>> {
    Ok(sroc_curve(
        biv,
        &fpr_grid(points, FPR_RANGE.0, FPR_RANGE.1),
    )?)
}

fn study_points(data: &[StudySummary]) -> Vec<(f64, f64)> {
    data.iter()
        .map(|s| (1.0 - expit(s.y2), expit(s.y1)))
        .collect()
}

fn cmd_fit(a: &FitArgs) -> CliResult<()> {
    check_level(a.level)?;
    check_points(a.points)?;
    let data = load_data(&a.input)?;
    let prec = Precision::new(a.output.full_precision);
    let fit = fit_at_full_selection(&data, a.level)?;
    prepare_out(&a.output.out)?;

    let mut record = output::fit_record(&fit, prec);
    if let Value::Object(m) = &mut record {
        for k in [
            "c1",
            "c2",
            "beta",
            "beta_lo",
            "beta_hi",
            "alpha",
            "implied_unpublished",
            "p",
        ] {
            m.remove(k);
        }
    }
    write_json(&a.output.out.join("reitsma.json"), &record)?;
    let curve = sroc_rows(&fit.biv, a.points)?;
    let rows: Vec<Vec<String>> = curve
        .iter()
        .map(|&(x, y)| vec![prec.fmt(x), prec.fmt(y)])
        .collect();
    write_text(
        &a.output.out.join("sroc.csv"),
        &csv_text(&["fpr", "tpr"], &rows),
    )?;
    if a.svg {
        let mut plot = svg::Plot::new(
            "SROC",
            "1 - specificity",
            "sensitivity",
            (0.0, 1.0),
            (0.0, 1.0),
        );
        plot.points(&study_points(&data), svg::color(7), 3.0);
        plot.line(
            &curve,
            svg::color(0),
            false,
            Some(format!("SAUC {}", prec.fmt(fit.sauc))),
        );
        let (fpr, tpr) = fit.summary_point();
        plot.points(&[(fpr, tpr)], svg::color(0), 5.0);
        write_text(&a.output.out.join("sroc.svg"), &plot.render())?;
    }

    let mut opts = BTreeMap::new();
    opts.insert("level", json!(a.level));
    opts.insert("points", json!(a.points));
    opts.insert("svg", json!(a.svg));
    opts.insert("full_precision", json!(a.output.full_precision));
    write_manifest(&a.output.out, "fit", Some(&a.input), opts, None)?;

    print_fit_line(&fit, prec);
    Ok(())
}

fn print_fit_line(fit: &SaFit, prec: Precision) {
    let ci = fit
        .sauc_ci
        .map(|c| format!(" ({}, {})", prec.fmt(c.lo), prec.fmt(c.hi)))
        .unwrap_or_default();
    println!(
        "p = {}: SAUC = {}{ci}, converged = {}",
        prec.fmt(fit.p),
        prec.fmt(fit.sauc),
        fit.converged
    );
}

/// Parse `estimate`, `dor`, `se`, `sp` or `c1=<value>`.
pub fn parse_contrast(s: &str) -> CliResult<ContrastMode> {
    let key = s.trim().to_ascii_lowercase();
    let mode = match key.as_str() {
        "estimate" => ContrastMode::Estimate,
        "dor" => ContrastMode::Fixed(ContrastVector::dor()),
        "se" => ContrastMode::Fixed(ContrastVector::sensitivity()),
        "sp" => ContrastMode::Fixed(ContrastVector::specificity()),
        other => {
            let v = other
                .strip_prefix("c1=")
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::input(format!(
                        "unknown contrast {s:?}; use estimate, dor, se, sp or c1=<value>"
                    ))
                })?;
            ContrastMode::Fixed(ContrastVector::from_c1(v)?)
        }
    };
    Ok(mode)
}

/// Parse a comma-separated list of probabilities in (0, 1].
pub fn parse_p_grid(s: &str) -> CliResult<Vec<f64>> {
    let grid: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|p| *p > 0.0 && *p <= 1.0)
                .ok_or_else(|| {
                    CliError::input(format!(
                        "invalid p value {t:?}; expected a number in (0, 1]"
                    ))
                })
        })
        .collect::<CliResult<_>>()?;
    if grid.is_empty() {
        return Err(CliError::input("empty --p-grid"));
    }
    Ok(grid)
}

fn cmd_sa(a: &SaArgs) -> CliResult<()> {
    check_level(a.level)?;
    check_points(a.points)?;
    let grid = parse_p_grid(&a.p_grid)?;
    let mode = parse_contrast(&a.contrast)?;
    if !(a.beta_max > 0.0 && a.beta_max.is_finite()) {
        return Err(CliError::input(format!(
            "--beta-max must be positive, got {}",
            a.beta_max
        )));
    }
    let data = load_data(&a.input)?;
    let prec = Precision::new(a.output.full_precision);
    let config = SaConfig {
        contrast_mode: mode,
        beta_bounds: (0.0, a.beta_max),
        level: a.level,
        ..SaConfig::default()
    };
    config.with_p(grid[0]).validate()?;
    let entries = sa_grid_with(&data, &grid, &config, !a.cold_start);
    prepare_out(&a.output.out)?;

    let records: Vec<Value> = entries.iter().map(|e| grid_record(e, prec)).collect();
    write_json(&a.output.out.join("sa.json"), &Value::Array(records))?;

    let fpr = fpr_grid(a.points, FPR_RANGE.0, FPR_RANGE.1);
    let mut sroc_rows_out = Vec::new();
    let mut curves = Vec::new();
    for fit in entries.iter().filter_map(|e| e.fit.as_ref()) {
        let curve = sroc_curve(&fit.biv, &fpr)?;
        for &(x, y) in &curve {
            sroc_rows_out.push(vec![prec.fmt(fit.p), prec.fmt(x), prec.fmt(y)]);
        }
        curves.push((fit.p, fit.sauc, curve));
    }
    write_text(
        &a.output.out.join("sroc_by_p.csv"),
        &csv_text(&["p", "fpr", "tpr"], &sroc_rows_out),
    )?;

    let traj = trajectory(&entries);
    let traj_rows: Vec<Vec<String>> = entries
        .iter()
        .filter_map(|e| e.fit.as_ref())
        .map(|f| {
            let (fpr, tpr) = f.summary_point();
            vec![
                prec.fmt(f.p),
                prec.fmt(fpr),
                prec.fmt(tpr),
                prec.fmt(f.sauc),
                f.converged.to_string(),
            ]
        })
        .collect();
    write_text(
        &a.output.out.join("trajectory.csv"),
        &csv_text(&["p", "fpr", "tpr", "sauc", "converged"], &traj_rows),
    )?;

    if a.svg {
        let mut plot = svg::Plot::new(
            "SROC by p",
            "1 - specificity",
            "sensitivity",
            (0.0, 1.0),
            (0.0, 1.0),
        );
        plot.points(&study_points(&data), svg::color(7), 3.0);
        for (i, (p, auc, curve)) in curves.iter().enumerate() {
            plot.line(
                curve,
                svg::color(i),
                i > 0,
                Some(format!("p={} SAUC={}", prec.fmt(*p), prec.fmt(*auc))),
            );
        }
        let path: Vec<(f64, f64)> = traj.iter().map(|&(_, x, y)| (x, y)).collect();
        plot.line(&path, "black", false, None);
        plot.points(&path, "black", 3.5);
        write_text(&a.output.out.join("sa_sroc.svg"), &plot.render())?;
        write_text(
            &a.output.out.join("selection.svg"),
            &selection_plot(&data, &entries_fits(&entries), prec),
        )?;
    }

    let mut opts = BTreeMap::new();
    opts.insert("p_grid", json!(grid));
    opts.insert("contrast", json!(a.contrast));
    opts.insert("beta_max", json!(a.beta_max));
    opts.insert("level", json!(a.level));
    opts.insert("points", json!(a.points));
    opts.insert("cold_start", json!(a.cold_start));
    opts.insert("svg", json!(a.svg));
    opts.insert("full_precision", json!(a.output.full_precision));
    write_manifest(&a.output.out, "sa", Some(&a.input), opts, None)?;

    for e in &entries {
        match (&e.fit, &e.error) {
            (Some(f), _) => print_fit_line(f, prec),
            (None, err) => println!(
                "p = {}: failed ({})",
                prec.fmt(e.p),
                err.as_deref().unwrap_or("")
            ),
        }
    }
    if entries
        .iter()
        .any(|e| e.fit.as_ref().is_some_and(|f| f.converged))
    {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_FIT,
            message: "no p in the grid converged".into(),
        })
    }
}

fn entries_fits(entries: &[crate::likelihood::GridEntry]) -> Vec<&SaFit> {
    entries.iter().filter_map(|e| e.fit.as_ref()).collect()
}

/// Fitted a(t) = Φ(βt + α) per p, with the studies' t-scores as a rug.
fn selection_plot(data: &[StudySummary], fits: &[&SaFit], prec: Precision) -> String {
    let with_sel: Vec<_> = fits
        .iter()
        .filter_map(|f| f.sel.map(|s| (f.p, s)))
        .collect();
    let ts: Vec<f64> = match with_sel.first() {
        Some((_, s)) => data.iter().map(|d| t_statistic(d, &s.contrast)).collect(),
        None => Vec::new(),
    };
    let (mut lo, mut hi) = (-2.0f64, 6.0f64);
    for &t in &ts {
        lo = lo.min(t.floor());
        hi = hi.max(t.ceil());
    }
    let mut plot = svg::Plot::new(
        "Selection function",
        "t",
        "publication probability",
        (lo, hi),
        (0.0, 1.0),
    );
    let grid: Vec<f64> = (0..=200)
        .map(|i| lo + (hi - lo) * i as f64 / 200.0)
        .collect();
    for (i, (p, s)) in with_sel.iter().enumerate() {
        let curve: Vec<(f64, f64)> = grid
            .iter()
            .map(|&t| (t, cdf(s.beta * t + s.alpha)))
            .collect();
        plot.line(
            &curve,
            svg::color(i + 1),
            false,
            Some(format!("p={}", prec.fmt(*p))),
        );
    }
    plot.rug(&ts, "black");
    plot.render()
}

fn parse_methods(s: &str) -> CliResult<Vec<Method>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(Method::ALL.to_vec());
    }
    let mut out = Vec::new();
    for t in s.split(',') {
        let m = Method::parse(t).ok_or_else(|| {
            CliError::input(format!(
                "unknown method {t:?}; use reitsma_p, reitsma_o, proposed_estimated, proposed_correct, proposed_misspecified or all"
            ))
        })?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<()> {
    let methods = parse_methods(&a.methods)?;
    if a.reps == 0 {
        return Err(CliError::input("--reps must be at least 1"));
    }
    let scenario = match (&a.scenario_file, a.scenario) {
        (Some(path), _) => simulation::load_scenario(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        (None, Some(id)) => {
            let variant = SelectionVariant::parse(&a.selection).ok_or_else(|| {
                CliError::input(format!(
                    "unknown selection {:?}; use equal, se or sp",
                    a.selection
                ))
            })?;
            if a.s == 0 {
                return Err(CliError::input("--S must be positive"));
            }
            Scenario::builtin(id, variant, a.s).map_err(|_| {
                CliError::input(format!(
                    "unknown scenario {id}; built-in scenarios are {}",
                    simulation::catalog_listing()
                ))
            })?
        }
        (None, None) => return Err(CliError::input("give --scenario or --scenario-file")),
    };
    let summaries = simulation::run_study(&scenario, a.reps, &methods, a.seed)?;
    prepare_out(&a.output.out)?;
    let prec = Precision::new(a.output.full_precision);
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| {
            vec![
                s.scenario_id.to_string(),
                s.method.label().to_string(),
                s.s.to_string(),
                prec.fmt(s.median),
                prec.fmt(s.q1),
                prec.fmt(s.q3),
                prec.fmt(s.convergence_rate),
            ]
        })
        .collect();
    write_text(
        &a.output.out.join("simulation.csv"),
        &csv_text(
            &["scenario", "method", "S", "median", "q1", "q3", "cr"],
            &rows,
        ),
    )?;

    let mut opts = BTreeMap::new();
    opts.insert("scenario", json!(scenario));
    opts.insert("reps", json!(a.reps));
    opts.insert(
        "methods",
        json!(methods.iter().map(|m| m.label()).collect::<Vec<_>>()),
    );
    opts.insert("full_precision", json!(a.output.full_precision));
    write_manifest(
        &a.output.out,
        "simulate",
        a.scenario_file.as_deref(),
        opts,
        Some(a.seed),
    )?;

    for s in &summaries {
        println!(
            "{:<22} median {} ({}, {})  CR {}%",
            s.method.label(),
            prec.fmt(s.median),
            prec.fmt(s.q1),
            prec.fmt(s.q3),
            prec.fmt(s.convergence_rate)
        );
    }
    if summaries.iter().all(|s| s.convergence_rate == 0.0) {
        return Err(CliError {
            code: EXIT_NO_CONVERGENCE,
            message: "no replication converged".into(),
        });
    }
    Ok(())
}

fn parse_params(s: &str) -> CliResult<BivariateParams> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| {
            CliError::input(format!(
                "--params expects five numbers mu1,mu2,tau1,tau2,rho; got {s:?}"
            ))
        })?;
    if v.len() != 5 {
        return Err(CliError::input(format!(
            "--params expects five numbers, got {}",
            v.len()
        )));
    }
    Ok(BivariateParams::new(v[0], v[1], v[2], v[3], v[4])?)
}

fn cmd_sroc(a: &SrocArgs) -> CliResult<()> {
    check_points(a.points)?;
    let (biv, data) = match (&a.params, &a.input) {
        (Some(p), _) => (parse_params(p)?, Vec::new()),
        (None, Some(path)) => {
            let data = load_data(path)?;
            (crate::reitsma::fit_reitsma(&data)?.params, data)
        }
        (None, None) => return Err(CliError::input("give an input CSV or --params")),
    };
    let prec = Precision::new(a.output.full_precision);
    prepare_out(&a.output.out)?;
    let curve = sroc_rows(&biv, a.points)?;
    let rows: Vec<Vec<String>> = curve
        .iter()
        .map(|&(x, y)| vec![prec.fmt(x), prec.fmt(y)])
        .collect();
    write_text(
        &a.output.out.join("sroc.csv"),
        &csv_text(&["fpr", "tpr"], &rows),
    )?;
    let area = sauc(&biv);
    write_json(
        &a.output.out.join("sroc.json"),
        &json!({
            "mu1": prec.json(biv.mu1),
            "mu2": prec.json(biv.mu2),
            "tau1": prec.json(biv.tau1),
            "tau2": prec.json(biv.tau2),
            "rho": prec.json(biv.rho),
            "sauc": prec.json(area),
        }),
    )?;
    if a.svg {
        let mut plot = svg::Plot::new(
            "SROC",
            "1 - specificity",
            "sensitivity",
            (0.0, 1.0),
            (0.0, 1.0),
        );
        plot.points(&study_points(&data), svg::color(7), 3.0);
        plot.line(
            &curve,
            svg::color(0),
            false,
            Some(format!("SAUC {}", prec.fmt(area))),
        );
        write_text(&a.output.out.join("sroc.svg"), &plot.render())?;
    }
    let mut opts = BTreeMap::new();
    opts.insert("params", json!(a.params));
    opts.insert("points", json!(a.points));
    opts.insert("svg", json!(a.svg));
    opts.insert("full_precision", json!(a.output.full_precision));
    write_manifest(&a.output.out, "sroc", a.input.as_deref(), opts, None)?;
    println!("SAUC = {}", prec.fmt(area));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contrast_options() {
        assert_eq!(parse_contrast("estimate").unwrap(), ContrastMode::Estimate);
        assert_eq!(
            parse_contrast("DOR").unwrap(),
            ContrastMode::Fixed(ContrastVector::dor())
        );
        assert_eq!(
            parse_contrast("se").unwrap(),
            ContrastMode::Fixed(ContrastVector::sensitivity())
        );
        match parse_contrast("c1=0.746").unwrap() {
            ContrastMode::Fixed(c) => assert!((c.c2() - 0.665_945_943_752_193_7).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_contrast("c1=1.5").unwrap_err().code, EXIT_INPUT);
        assert_eq!(parse_contrast("dos").unwrap_err().code, EXIT_INPUT);
    }

    #[test]
    fn p_grid_parsing() {
        assert_eq!(parse_p_grid("1, 0.8,0.6").unwrap(), vec![1.0, 0.8, 0.6]);
        assert!(parse_p_grid("0.5,0").is_err());
        assert!(parse_p_grid("1.2").is_err());
        assert!(parse_p_grid("a").is_err());
    }

    #[test]
    fn method_lists() {
        assert_eq!(parse_methods("all").unwrap().len(), 5);
        assert_eq!(
            parse_methods("reitsma_o,proposed_correct").unwrap(),
            vec![Method::ReitsmaO, Method::ProposedCorrect]
        );
        assert!(parse_methods("x").is_err());
    }

    #[test]
    fn params_option() {
        let b = parse_params("0,1.735,1,2,-0.3").unwrap();
        assert_eq!(b.tau2, 2.0);
        assert!(parse_params("0,1").is_err());
        assert!(parse_params("0,1,-1,2,0").is_err());
    }
}
