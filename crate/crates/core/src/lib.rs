//! Sense induction over contextualized embeddings and the lexical-law
//! statistics built on it: the frequency-polysemy correlation (Martin's
//! law), the frequency-specificity tradeoff, and their trajectories across
//! training checkpoints.
//!
//! The usual entry point is [`analyze`], which filters a corpus to
//! alphabetic words, clusters each frequent word's occurrence embeddings
//! with cosine DBSCAN, and returns per-word metrics plus a
//! [`CheckpointSummary`]. [`build_trajectory`] classifies a series of
//! summaries, and [`synth::generate_corpus`] produces corpora with known
//! sense structure for validation.

pub mod clustering;
pub mod corpus;
pub mod error;
pub mod format;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod synth;
pub mod trajectory;

pub use clustering::{cosine_distance, dbscan, polysemy, ClusterLabeling, NOISE};
pub use corpus::{
    filter_tokens, group_by_word, normalize_token, select_words, AnalysisConfig, EmbeddingCorpus, TokenRecord,
    WordGroup,
};
pub use error::{Error, FormatError, Result};
pub use format::{read_corpus, read_corpus_jsonl, write_corpus};
pub use metrics::{embedding_variance, specificity, summarize, CheckpointSummary, LawTests, WordMetrics};
pub use pipeline::{analyze, epsilon_sweep, epsilon_sweep_corpus, parse_eps_range, CheckpointAnalysis, SweepPoint, SweepResult};
pub use stats::{
    fit_martin_exponent, martins_law_test, rank_transform, spearman_rho, specificity_tradeoff_test, CorrelationResult,
    PowerLawFit, Undefined,
};
pub use synth::{generate_corpus, GroundTruth, SynthSpec};
pub use trajectory::{
    build_trajectory, classify_phases, detect_collapse, DegradationMode, PhaseClassification, PhaseThresholds,
    TrajectoryReport,
};
