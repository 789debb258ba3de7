//! End-to-end checkpoint analysis and the eps sensitivity sweep.
//!
//! Per-word work runs on the ambient rayon pool. Results are collected in
//! selection order and reduced sequentially, so output does not depend on
//! the number of workers.

use rayon::prelude::*;

use crate::clustering::dbscan;
use crate::corpus::{filter_tokens, group_by_word, select_words, validate_eps, AnalysisConfig, EmbeddingCorpus, WordGroup};
use crate::error::{Error, Result};
use crate::metrics::{embedding_variance, specificity_from_variance, summarize, CheckpointSummary, LawTests, WordMetrics};
use crate::stats::{fit_martin_exponent, martins_law_test, specificity_tradeoff_test};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointAnalysis {
    pub summary: CheckpointSummary,
    /// Selected words in (frequency desc, word asc) order.
    pub words: Vec<WordMetrics>,
    /// Occurrences labelled noise, summed over selected words.
    pub noise_points: usize,
}

/// Filter, group and select the words that enter the law tests.
pub fn selected_words(corpus: &EmbeddingCorpus, config: &AnalysisConfig) -> Vec<WordGroup> {
    select_words(group_by_word(&filter_tokens(corpus, config)), config)
}

fn law_tests(metrics: &[WordMetrics]) -> LawTests {
    LawTests {
        martin: martins_law_test(metrics),
        specificity: specificity_tradeoff_test(metrics),
        beta: fit_martin_exponent(metrics),
    }
}

struct WordOutcome {
    polysemy: usize,
    noise: usize,
}

fn cluster_words(groups: &[WordGroup], eps: f64, min_samples: usize) -> Result<Vec<WordOutcome>> {
    groups
        .par_iter()
        .map(|g| {
            let labels = dbscan(&g.occurrences, eps, min_samples)?;
            Ok(WordOutcome {
                polysemy: labels.n_clusters,
                noise: labels.noise_count(),
            })
        })
        .collect()
}

fn variances(groups: &[WordGroup]) -> Result<Vec<f64>> {
    groups.par_iter().map(|g| embedding_variance(&g.occurrences)).collect()
}

fn assemble(
    groups: &[WordGroup],
    outcomes: &[WordOutcome],
    variances: &[f64],
    step: u64,
    config: &AnalysisConfig,
) -> CheckpointAnalysis {
    let words: Vec<WordMetrics> = groups
        .iter()
        .zip(outcomes)
        .zip(variances)
        .map(|((g, o), &v)| WordMetrics {
            word: g.word.clone(),
            frequency: g.frequency(),
            polysemy: o.polysemy,
            specificity: specificity_from_variance(v, config.specificity_floor),
            embedding_variance: v,
        })
        .collect();
    let summary = summarize(&words, &law_tests(&words), step, config);
    CheckpointAnalysis {
        summary,
        words,
        noise_points: outcomes.iter().map(|o| o.noise).sum(),
    }
}

/// Runs filtering, selection, clustering, specificity and the law tests on
/// one checkpoint's corpus.
pub fn analyze(corpus: &EmbeddingCorpus, config: &AnalysisConfig) -> Result<CheckpointAnalysis> {
    config.validate()?;
    let groups = selected_words(corpus, config);
    let outcomes = cluster_words(&groups, config.eps, config.min_samples)?;
    let variances = variances(&groups)?;
    Ok(assemble(&groups, &outcomes, &variances, corpus.checkpoint_step(), config))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub eps: f64,
    pub summary: CheckpointSummary,
    pub noise_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub eps_values: Vec<f64>,
    pub per_eps: Vec<SweepPoint>,
}

/// Re-clusters the selected words at each eps, holding every other setting
/// fixed.
pub fn epsilon_sweep(
    groups: &[WordGroup],
    eps_values: &[f64],
    step: u64,
    config: &AnalysisConfig,
) -> Result<SweepResult> {
    config.validate()?;
    if eps_values.is_empty() {
        return Err(Error::InvalidConfig("eps sweep needs at least one value".into()));
    }
    for &eps in eps_values {
        validate_eps(eps)?;
    }
    if eps_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("eps values must be strictly ascending".into()));
    }
    let variances = variances(groups)?;
    let per_eps = eps_values
        .iter()
        .map(|&eps| {
            let cfg = config.with_eps(eps);
            let outcomes = cluster_words(groups, eps, cfg.min_samples)?;
            let a = assemble(groups, &outcomes, &variances, step, &cfg);
            Ok(SweepPoint {
                eps,
                summary: a.summary,
                noise_points: a.noise_points,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        eps_values: eps_values.to_vec(),
        per_eps,
    })
}

/// Sweep over a corpus, selecting words with `config` first.
pub fn epsilon_sweep_corpus(
    corpus: &EmbeddingCorpus,
    eps_values: &[f64],
    config: &AnalysisConfig,
) -> Result<SweepResult> {
    config.validate()?;
    let groups = selected_words(corpus, config);
    epsilon_sweep(&groups, eps_values, corpus.checkpoint_step(), config)
}

/// Parses `start:stop:step` (stop included when within 1e-9) or a single
/// value.
pub fn parse_eps_range(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("malformed eps range {spec:?}; expected start:stop:step"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if parts.iter().any(|p| !p.is_finite()) {
        return Err(bad());
    }
    let values = match parts[..] {
        [single] => vec![single],
        [start, stop, step] => {
            if step <= 0.0 || stop < start {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| start + i as f64 * step).collect()
        }
        _ => return Err(bad()),
    };
    for &eps in &values {
        validate_eps(eps)?;
    }
    Ok(values)
}
