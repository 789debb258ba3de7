//! Canonical JSON reports, per-word CSV and the four trajectory panels.
//!
//! Reports are built as `serde_json::Value` trees, whose maps keep keys in
//! sorted order, and floats are printed as the shortest decimal that round
//! trips. An undefined statistic is written as `null` next to a
//! `<name>_reason` string.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::AnalysisConfig;
use crate::error::{Error, FormatError, Result};
use crate::metrics::{CheckpointSummary, WordMetrics};
use crate::pipeline::{CheckpointAnalysis, SweepResult};
use crate::stats::CorrelationResult;
use crate::trajectory::{PhaseThresholds, TrajectoryReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Wire form of a checkpoint summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub checkpoint_step: u64,
    pub n_words: usize,
    pub mean_polysemy: f64,
    pub polysemous_word_count: usize,
    pub martin_rho: Option<f64>,
    pub martin_rho_reason: Option<String>,
    pub martin_n: usize,
    pub specificity_rho: Option<f64>,
    pub specificity_rho_reason: Option<String>,
    pub specificity_n: usize,
    pub beta_fit: Option<f64>,
    pub beta_fit_reason: Option<String>,
    pub beta_log_intercept: Option<f64>,
    pub beta_r_squared: Option<f64>,
    pub beta_n_points: Option<usize>,
    pub config: AnalysisConfig,
}

fn split(c: &CorrelationResult) -> (Option<f64>, Option<String>) {
    match c.rho {
        Ok(r) => (Some(r), None),
        Err(u) => (None, Some(u.as_str().to_owned())),
    }
}

impl From<&CheckpointSummary> for SummaryRecord {
    fn from(s: &CheckpointSummary) -> Self {
        let (martin_rho, martin_rho_reason) = split(&s.martin);
        let (specificity_rho, specificity_rho_reason) = split(&s.specificity);
        let fit = s.beta_fit.as_ref().ok();
        Self {
            checkpoint_step: s.checkpoint_step,
            n_words: s.n_words,
            mean_polysemy: s.mean_polysemy,
            polysemous_word_count: s.polysemous_word_count,
            martin_rho,
            martin_rho_reason,
            martin_n: s.martin.n,
            specificity_rho,
            specificity_rho_reason,
            specificity_n: s.specificity.n,
            beta_fit: fit.map(|f| f.beta),
            beta_fit_reason: s.beta_fit.as_ref().err().map(|u| u.as_str().to_owned()),
            beta_log_intercept: fit.map(|f| f.log_intercept),
            beta_r_squared: fit.map(|f| f.r_squared),
            beta_n_points: fit.map(|f| f.n_points),
            config: s.config.clone(),
        }
    }
}

#[derive(Serialize)]
struct CheckpointReport {
    schema_version: u32,
    kind: &'static str,
    summary: SummaryRecord,
    noise_points: usize,
}

#[derive(Serialize, Deserialize)]
struct PhasesRecord {
    emergence_step: Option<u64>,
    peak_step: u64,
    peak_rho: f64,
    final_rho: Option<f64>,
    final_rho_reason: Option<String>,
    degradation_mode: String,
    retains_peak_fraction: bool,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryRecord {
    schema_version: u32,
    kind: String,
    summaries: Vec<SummaryRecord>,
    phases: PhasesRecord,
    collapse_step: Option<u64>,
    thresholds: PhaseThresholds,
}

#[derive(Serialize)]
struct SweepPointRecord {
    eps: f64,
    noise_points: usize,
    summary: SummaryRecord,
}

#[derive(Serialize)]
struct SweepRecord {
    schema_version: u32,
    kind: &'static str,
    eps_values: Vec<f64>,
    per_eps: Vec<SweepPointRecord>,
}

pub const WORD_CSV_COLUMNS: [&str; 5] = ["word", "frequency", "polysemy", "variance", "specificity"];

/// Serializes through a `Value` so object keys come out sorted.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let tree: Value = serde_json::to_value(value).expect("report types serialize");
    let mut text = serde_json::to_string_pretty(&tree).expect("value serializes");
    text.push('\n');
    text
}

pub fn checkpoint_report_json(analysis: &CheckpointAnalysis) -> String {
    to_canonical_json(&CheckpointReport {
        schema_version: SCHEMA_VERSION,
        kind: "checkpoint_summary",
        summary: (&analysis.summary).into(),
        noise_points: analysis.noise_points,
    })
}

pub fn trajectory_report_json(report: &TrajectoryReport) -> String {
    let p = &report.phases;
    to_canonical_json(&TrajectoryRecord {
        schema_version: SCHEMA_VERSION,
        kind: "trajectory".into(),
        summaries: report.summaries.iter().map(SummaryRecord::from).collect(),
        phases: PhasesRecord {
            emergence_step: p.emergence_step,
            peak_step: p.peak_step,
            peak_rho: p.peak_rho,
            final_rho: p.final_rho,
            final_rho_reason: report
                .summaries
                .last()
                .and_then(|s| s.martin.rho.err())
                .map(|u| u.as_str().to_owned()),
            degradation_mode: p.degradation_mode.as_str().into(),
            retains_peak_fraction: p.retains_peak_fraction,
        },
        collapse_step: report.collapse_step,
        thresholds: report.thresholds.clone(),
    })
}

pub fn sweep_report_json(sweep: &SweepResult) -> String {
    to_canonical_json(&SweepRecord {
        schema_version: SCHEMA_VERSION,
        kind: "epsilon_sweep",
        eps_values: sweep.eps_values.clone(),
        per_eps: sweep
            .per_eps
            .iter()
            .map(|p| SweepPointRecord {
                eps: p.eps,
                noise_points: p.noise_points,
                summary: (&p.summary).into(),
            })
            .collect(),
    })
}

/// `word,frequency,polysemy,variance,specificity`, one row per selected word.
pub fn per_word_csv(words: &[WordMetrics]) -> String {
    let mut out = WORD_CSV_COLUMNS.join(",");
    out.push('\n');
    for w in words {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            w.word, w.frequency, w.polysemy, w.embedding_variance, w.specificity
        );
    }
    out
}

/// One point of the four per-step panels.
#[derive(Clone, Debug, PartialEq)]
pub struct PanelRow {
    pub step: u64,
    pub martin_rho: Option<f64>,
    pub mean_polysemy: f64,
    pub specificity_rho: Option<f64>,
    pub polysemous_word_count: usize,
}

impl From<&SummaryRecord> for PanelRow {
    fn from(s: &SummaryRecord) -> Self {
        Self {
            step: s.checkpoint_step,
            martin_rho: s.martin_rho,
            mean_polysemy: s.mean_polysemy,
            specificity_rho: s.specificity_rho,
            polysemous_word_count: s.polysemous_word_count,
        }
    }
}

impl From<&CheckpointSummary> for PanelRow {
    fn from(s: &CheckpointSummary) -> Self {
        (&SummaryRecord::from(s)).into()
    }
}

pub const PANEL_NAMES: [&str; 4] = ["martin_rho", "mean_polysemy", "specificity_rho", "polysemous_word_count"];

/// CSV text for each panel, keyed by panel name. Undefined values are left
/// empty.
pub fn panel_csvs(rows: &[PanelRow]) -> Vec<(&'static str, String)> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    PANEL_NAMES
        .iter()
        .map(|&name| {
            let mut csv = format!("step,{name}\n");
            for r in rows {
                let value = match name {
                    "martin_rho" => opt(r.martin_rho),
                    "mean_polysemy" => r.mean_polysemy.to_string(),
                    "specificity_rho" => opt(r.specificity_rho),
                    _ => r.polysemous_word_count.to_string(),
                };
                let _ = writeln!(csv, "{},{}", r.step, value);
            }
            (name, csv)
        })
        .collect()
}

/// Reads the panel series back out of a trajectory report.
pub fn panels_from_trajectory_json(text: &str) -> Result<Vec<PanelRow>> {
    let record: TrajectoryRecord = serde_json::from_str(text).map_err(|e| {
        Error::Format(FormatError::Jsonl {
            line: e.line(),
            message: format!("not a trajectory report: {e}"),
        })
    })?;
    if record.kind != "trajectory" || record.schema_version != SCHEMA_VERSION {
        return Err(Error::Format(FormatError::Jsonl {
            line: 1,
            message: format!(
                "expected a schema {SCHEMA_VERSION} trajectory report, found kind {:?} version {}",
                record.kind, record.schema_version
            ),
        }));
    }
    Ok(record.summaries.iter().map(PanelRow::from).collect())
}
