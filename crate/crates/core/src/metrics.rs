//! Per-word specificity and checkpoint-level aggregates.

use crate::corpus::AnalysisConfig;
use crate::error::{Error, Result};
use crate::stats::{CorrelationResult, PowerLawFit, Undefined};

#[derive(Clone, Debug, PartialEq)]
pub struct WordMetrics {
    pub word: String,
    pub frequency: usize,
    /// Non-noise cluster count; zero when every occurrence was noise.
    pub polysemy: usize,
    pub specificity: f64,
    pub embedding_variance: f64,
}

/// The three law statistics computed over one checkpoint's selected words.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LawTests {
    pub martin: CorrelationResult,
    pub specificity: CorrelationResult,
    pub beta: Result<PowerLawFit, Undefined>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointSummary {
    pub checkpoint_step: u64,
    pub n_words: usize,
    pub mean_polysemy: f64,
    /// Words with more than one cluster.
    pub polysemous_word_count: usize,
    pub martin: CorrelationResult,
    pub specificity: CorrelationResult,
    pub beta_fit: Result<PowerLawFit, Undefined>,
    pub config: AnalysisConfig,
}

impl CheckpointSummary {
    pub fn martin_rho(&self) -> Option<f64> {
        self.martin.value()
    }

    pub fn specificity_rho(&self) -> Option<f64> {
        self.specificity.value()
    }
}

/// Mean squared distance to the centroid divided by the dimension, i.e. the
/// trace of the population covariance over `D`.
pub fn embedding_variance<P, T>(occurrences: &[P]) -> Result<f64>
where
    P: AsRef<[T]>,
    T: Copy + Into<f64>,
{
    let first = occurrences
        .first()
        .ok_or(Error::EmptyInput("variance of an empty occurrence set"))?;
    let dim = first.as_ref().len();
    if dim == 0 {
        return Err(Error::EmptyInput("zero-dimensional embeddings"));
    }
    let mut centroid = vec![0.0f64; dim];
    for (index, e) in occurrences.iter().enumerate() {
        let e = e.as_ref();
        if e.len() != dim {
            return Err(Error::DimensionMismatch {
                index,
                expected: dim,
                found: e.len(),
            });
        }
        for (c, &x) in centroid.iter_mut().zip(e) {
            *c += x.into();
        }
    }
    let n = occurrences.len() as f64;
    centroid.iter_mut().for_each(|c| *c /= n);
    let total: f64 = occurrences
        .iter()
        .map(|e| {
            e.as_ref()
                .iter()
                .zip(&centroid)
                .map(|(&x, c)| {
                    let d = x.into() - c;
                    d * d
                })
                .sum::<f64>()
        })
        .sum();
    Ok(total / (n * dim as f64))
}

/// `1 / (variance + specificity_floor)`.
pub fn specificity<P, T>(occurrences: &[P], config: &AnalysisConfig) -> Result<f64>
where
    P: AsRef<[T]>,
    T: Copy + Into<f64>,
{
    Ok(specificity_from_variance(
        embedding_variance(occurrences)?,
        config.specificity_floor,
    ))
}

pub fn specificity_from_variance(variance: f64, floor: f64) -> f64 {
    1.0 / (variance + floor)
}

/// Aggregates per-word metrics. An empty word list yields zero means and
/// counts; the law statistics are carried through as given.
pub fn summarize(
    metrics: &[WordMetrics],
    tests: &LawTests,
    checkpoint_step: u64,
    config: &AnalysisConfig,
) -> CheckpointSummary {
    let n_words = metrics.len();
    let total: usize = metrics.iter().map(|m| m.polysemy).sum();
    let mean_polysemy = if n_words == 0 {
        0.0
    } else {
        total as f64 / n_words as f64
    };
    CheckpointSummary {
        checkpoint_step,
        n_words,
        mean_polysemy,
        polysemous_word_count: metrics.iter().filter(|m| m.polysemy > 1).count(),
        martin: tests.martin,
        specificity: tests.specificity,
        beta_fit: tests.beta,
        config: config.clone(),
    }
}
