//! Multi-checkpoint analysis: emergence, peak and post-peak degradation of
//! the frequency-polysemy correlation, plus collapse detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::CheckpointSummary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegradationMode {
    None,
    Graceful,
    Catastrophic,
}

impl DegradationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DegradationMode::None => "none",
            DegradationMode::Graceful => "graceful",
            DegradationMode::Catastrophic => "catastrophic",
        }
    }
}

/// Decision thresholds for phase classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseThresholds {
    pub emergence: f64,
    pub collapse_rho: f64,
    pub graceful_fraction: f64,
}

impl Default for PhaseThresholds {
    fn default() -> Self {
        Self {
            emergence: 0.2,
            collapse_rho: 0.2,
            graceful_fraction: 0.5,
        }
    }
}

impl PhaseThresholds {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("emergence threshold", self.emergence),
            ("collapse threshold", self.collapse_rho),
        ] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [-1, 1], got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.graceful_fraction) {
            return Err(Error::InvalidConfig(format!(
                "graceful fraction must lie in [0, 1], got {}",
                self.graceful_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseClassification {
    pub emergence_step: Option<u64>,
    pub peak_step: u64,
    pub peak_rho: f64,
    pub final_rho: Option<f64>,
    pub degradation_mode: DegradationMode,
    /// Final correlation keeps at least `graceful_fraction` of the peak.
    pub retains_peak_fraction: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryReport {
    pub summaries: Vec<CheckpointSummary>,
    pub phases: PhaseClassification,
    pub collapse_step: Option<u64>,
    pub thresholds: PhaseThresholds,
}

fn sorted_by_step(summaries: &[CheckpointSummary]) -> Result<Vec<&CheckpointSummary>> {
    let mut sorted: Vec<&CheckpointSummary> = summaries.iter().collect();
    sorted.sort_by_key(|s| s.checkpoint_step);
    if let Some(w) = sorted.windows(2).find(|w| w[0].checkpoint_step == w[1].checkpoint_step) {
        return Err(Error::DuplicateStep(w[0].checkpoint_step));
    }
    Ok(sorted)
}

/// Locates emergence and peak and labels what happens after the peak.
///
/// Emergence is the first checkpoint at or before the peak whose correlation
/// reaches the threshold with its successor (if any) also above it. The
/// final checkpoint is catastrophic when it has no polysemous words, or when
/// the correlation declined below `collapse_rho`; otherwise the decline is
/// graceful. A flat series (final equals peak) counts as graceful.
pub fn classify_phases(
    summaries: &[CheckpointSummary],
    thresholds: &PhaseThresholds,
) -> Result<PhaseClassification> {
    let sorted = sorted_by_step(summaries)?;
    let rhos: Vec<Option<f64>> = sorted.iter().map(|s| s.martin_rho()).collect();
    let defined = rhos.iter().flatten().count();
    if defined < 2 {
        return Err(Error::InsufficientCheckpoints(defined));
    }

    let mut peak_idx = 0;
    let mut peak_rho = f64::NEG_INFINITY;
    for (i, r) in rhos.iter().enumerate() {
        if let Some(r) = *r {
            if r > peak_rho {
                peak_idx = i;
                peak_rho = r;
            }
        }
    }

    let above = |i: usize| rhos[i].is_some_and(|r| r >= thresholds.emergence);
    let emergence_step = (0..=peak_idx)
        .find(|&i| above(i) && (i + 1 == rhos.len() || above(i + 1)))
        .map(|i| sorted[i].checkpoint_step);

    let last = sorted.len() - 1;
    let final_rho = rhos[last];
    let retains_peak_fraction =
        final_rho.is_some_and(|r| r >= thresholds.graceful_fraction * peak_rho);
    let degradation_mode = if sorted[last].polysemous_word_count == 0 {
        DegradationMode::Catastrophic
    } else if peak_idx == last {
        DegradationMode::None
    } else {
        match final_rho {
            None => DegradationMode::Catastrophic,
            Some(r) if r >= peak_rho => DegradationMode::Graceful,
            Some(r) if r < thresholds.collapse_rho => DegradationMode::Catastrophic,
            Some(_) => DegradationMode::Graceful,
        }
    };

    Ok(PhaseClassification {
        emergence_step,
        peak_step: sorted[peak_idx].checkpoint_step,
        peak_rho,
        final_rho,
        degradation_mode,
        retains_peak_fraction,
    })
}

/// Earliest step with no polysemous words after some step that had them.
pub fn detect_collapse(summaries: &[CheckpointSummary]) -> Option<u64> {
    let mut sorted: Vec<&CheckpointSummary> = summaries.iter().collect();
    sorted.sort_by_key(|s| s.checkpoint_step);
    let mut had_structure = false;
    for s in sorted {
        if s.polysemous_word_count > 0 {
            had_structure = true;
        } else if had_structure {
            return Some(s.checkpoint_step);
        }
    }
    None
}

/// Orders the summaries by step and classifies the trajectory.
pub fn build_trajectory(
    summaries: Vec<CheckpointSummary>,
    thresholds: &PhaseThresholds,
) -> Result<TrajectoryReport> {
    thresholds.validate()?;
    let phases = classify_phases(&summaries, thresholds)?;
    let collapse_step = detect_collapse(&summaries);
    let mut summaries = summaries;
    summaries.sort_by_key(|s| s.checkpoint_step);
    Ok(TrajectoryReport {
        summaries,
        phases,
        collapse_step,
        thresholds: thresholds.clone(),
    })
}
