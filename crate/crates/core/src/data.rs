//! Primary studies: 2×2 tables, continuity correction and logit summaries.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::logit;

/// One primary study's 2×2 table.
///
/// Cells are stored as `f64` so the 0.5 continuity correction stays exact
/// (half-integers are representable). Input files carry integers only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticStudy {
    pub id: String,
    /// Diseased, test positive (n₁₁).
    pub tp: f64,
    /// Diseased, test negative (n₀₁).
    pub fn_: f64,
    /// Non-diseased, test negative (n₀₀).
    pub tn: f64,
    /// Non-diseased, test positive (n₁₀).
    pub fp: f64,
}

impl DiagnosticStudy {
    /// Build a study from integer counts, checking that both arms are non-empty.
    pub fn new(id: impl Into<String>, tp: u64, fn_: u64, tn: u64, fp: u64) -> Result<Self> {
        let id = id.into();
        if tp + fn_ == 0 {
            return Err(Error::InvalidStudy {
                id,
                reason: "no diseased subjects (tp + fn = 0)".into(),
            });
        }
        if tn + fp == 0 {
            return Err(Error::InvalidStudy {
                id,
                reason: "no non-diseased subjects (tn + fp = 0)".into(),
            });
        }
        Ok(DiagnosticStudy {
            id,
            tp: tp as f64,
            fn_: fn_ as f64,
            tn: tn as f64,
            fp: fp as f64,
        })
    }

    fn cells(&self) -> [f64; 4] {
        [self.tp, self.fn_, self.tn, self.fp]
    }

    pub fn has_zero_cell(&self) -> bool {
        self.cells().contains(&0.0)
    }

    /// Log diagnostic odds ratio of the (possibly corrected) table.
    pub fn ln_dor(&self) -> f64 {
        (self.tp * self.tn / (self.fn_ * self.fp)).ln()
    }
}

/// Add 0.5 to every cell when any cell is zero; otherwise return the study unchanged.
pub fn continuity_correct(study: &DiagnosticStudy) -> DiagnosticStudy {
    if !study.has_zero_cell() {
        return study.clone();
    }
    DiagnosticStudy {
        id: study.id.clone(),
        tp: study.tp + 0.5,
        fn_: study.fn_ + 0.5,
        tn: study.tn + 0.5,
        fp: study.fp + 0.5,
    }
}

/// Logit sensitivity/specificity with within-study variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub y1: f64,
    pub y2: f64,
    pub s1_sq: f64,
    pub s2_sq: f64,
}

impl StudySummary {
    pub fn new(y1: f64, y2: f64, s1_sq: f64, s2_sq: f64) -> Self {
        debug_assert!(s1_sq > 0.0 && s2_sq > 0.0);
        StudySummary {
            y1,
            y2,
            s1_sq,
            s2_sq,
        }
    }

    /// lnDOR = y1 + y2.
    pub fn ln_dor(&self) -> f64 {
        self.y1 + self.y2
    }
}

/// Summarize a study that has no zero cells.
pub fn summarize(study: &DiagnosticStudy) -> Result<StudySummary> {
    if study.has_zero_cell() || study.cells().iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::DegenerateStudy {
            id: study.id.clone(),
        });
    }
    let se = study.tp / (study.tp + study.fn_);
    let sp = study.tn / (study.tn + study.fp);
    Ok(StudySummary {
        y1: logit(se),
        y2: logit(sp),
        s1_sq: 1.0 / study.tp + 1.0 / study.fn_,
        s2_sq: 1.0 / study.tn + 1.0 / study.fp,
    })
}

/// Continuity-correct and summarize every study.
pub fn summarize_all(studies: &[DiagnosticStudy]) -> Result<Vec<StudySummary>> {
    studies
        .iter()
        .map(|s| summarize(&continuity_correct(s)))
        .collect()
}

/// Read `id,tp,fn,tn,fp` records. Lines starting with `#` are ignored.
pub fn read_studies<R: Read>(reader: R) -> Result<Vec<DiagnosticStudy>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let idx = [col("id")?, col("tp")?, col("fn")?, col("tn")?, col("fp")?];

    let mut studies = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            row: e.position().map(|p| p.line() as usize).unwrap_or(i + 2),
            message: e.to_string(),
        })?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(i + 2);
        let field = |k: usize| rec.get(idx[k]).unwrap_or("");
        let count = |k: usize, name: &str| -> Result<u64> {
            field(k).parse::<u64>().map_err(|_| Error::Parse {
                row,
                message: format!("{name} must be a non-negative integer, got {:?}", field(k)),
            })
        };
        let study = DiagnosticStudy::new(
            field(0),
            count(1, "tp")?,
            count(2, "fn")?,
            count(3, "tn")?,
            count(4, "fp")?,
        )
        .map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        studies.push(study);
    }
    Ok(studies)
}

pub fn read_studies_path(path: &Path) -> Result<Vec<DiagnosticStudy>> {
    let file = std::fs::File::open(path)?;
    read_studies(std::io::BufReader::new(file))
}
