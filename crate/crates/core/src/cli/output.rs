//! Number formatting and result records.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::Result;
use crate::likelihood::{GridEntry, SaFit};

/// Significant digits used for every emitted number.
#[derive(Debug, Clone, Copy)]
pub struct Precision(pub usize);

impl Precision {
    pub fn new(full: bool) -> Self {
        Precision(if full { 17 } else { 6 })
    }

    /// Round to the configured significant digits; non-finite values stay as they are.
    pub fn round(self, v: f64) -> f64 {
        if !v.is_finite() || v == 0.0 {
            return v;
        }
        format!("{:.*e}", self.0 - 1, v).parse().unwrap_or(v)
    }

    /// Text form for CSV cells. Non-finite values become `NA`.
    pub fn fmt(self, v: f64) -> String {
        if v.is_finite() {
            format!("{}", self.round(v))
        } else {
            "NA".to_string()
        }
    }

    /// JSON number, or `null` when non-finite.
    pub fn json(self, v: f64) -> Value {
        if v.is_finite() {
            json!(self.round(v))
        } else {
            Value::Null
        }
    }

    pub fn json_opt(self, v: Option<f64>) -> Value {
        v.map_or(Value::Null, |x| self.json(x))
    }
}

/// One SA record: flat fields for a fitted `p`, or `converged = false` with the error.
pub fn fit_record(fit: &SaFit, prec: Precision) -> Value {
    let b = &fit.biv;
    let (se, sp) = b.summary_point();
    let mut m = Map::new();
    m.insert("p".into(), prec.json(fit.p));
    m.insert("n_studies".into(), json!(fit.n_studies));
    m.insert(
        "implied_unpublished".into(),
        json!(fit.implied_unpublished().round() as i64),
    );
    m.insert("mu1".into(), prec.json(b.mu1));
    m.insert("mu2".into(), prec.json(b.mu2));
    m.insert("tau1".into(), prec.json(b.tau1));
    m.insert("tau2".into(), prec.json(b.tau2));
    m.insert("tau12".into(), prec.json(b.tau12()));
    m.insert("rho".into(), prec.json(b.rho));
    m.insert("c1".into(), prec.json_opt(fit.sel.map(|s| s.contrast.c1())));
    m.insert("c2".into(), prec.json_opt(fit.sel.map(|s| s.contrast.c2())));
    m.insert("beta".into(), prec.json_opt(fit.sel.map(|s| s.beta)));
    m.insert("beta_lo".into(), prec.json_opt(fit.beta_ci.map(|c| c.0)));
    m.insert("beta_hi".into(), prec.json_opt(fit.beta_ci.map(|c| c.1)));
    m.insert("alpha".into(), prec.json_opt(fit.sel.map(|s| s.alpha)));
    m.insert("loglik".into(), prec.json(fit.loglik));
    m.insert("sauc".into(), prec.json(fit.sauc));
    m.insert("sauc_lo".into(), prec.json_opt(fit.sauc_ci.map(|c| c.lo)));
    m.insert("sauc_hi".into(), prec.json_opt(fit.sauc_ci.map(|c| c.hi)));
    m.insert(
        "se_sauc".into(),
        prec.json_opt(fit.sauc_ci.map(|c| c.se_sauc)),
    );
    m.insert("level".into(), prec.json_opt(fit.sauc_ci.map(|c| c.level)));
    m.insert("se_hat".into(), prec.json(se));
    m.insert("sp_hat".into(), prec.json(sp));
    m.insert("converged".into(), json!(fit.converged));
    m.insert("boundary".into(), json!(fit.boundary));
    m.insert("warnings".into(), json!(fit.warnings));
    Value::Object(m)
}

pub fn grid_record(entry: &GridEntry, prec: Precision) -> Value {
    match (&entry.fit, &entry.error) {
        (Some(fit), _) => fit_record(fit, prec),
        (None, err) => json!({
            "p": prec.json(entry.p),
            "converged": false,
            "error": err.clone().unwrap_or_default(),
        }),
    }
}

/// CSV text from a header and rows of already formatted cells.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.join(","));
    }
    out
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        let p = Precision::new(false);
        assert_eq!(p.fmt(0.872_098_120_954_202), "0.872098");
        assert_eq!(p.fmt(-1_234.567_89), "-1234.57");
        assert_eq!(p.fmt(f64::NAN), "NA");
        assert_eq!(p.json(f64::INFINITY), Value::Null);
    }

    #[test]
    fn full_precision_round_trips() {
        let p = Precision::new(true);
        let v = 0.1 + 0.2;
        assert_eq!(p.fmt(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn csv_layout() {
        let t = csv_text(&["a", "b"], &[vec!["1".into(), "2".into()]]);
        assert_eq!(t, "a,b\n1,2\n");
    }
}
