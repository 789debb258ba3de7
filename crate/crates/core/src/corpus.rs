//! Embedding corpus model: token records, normalization, grouping by word and
//! selection of the words that enter the law tests.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One generated token with its final-layer hidden state.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenRecord {
    pub token: String,
    pub doc_id: u32,
    pub pos: u32,
    pub embedding: Vec<f32>,
}

impl TokenRecord {
    pub fn new(token: impl Into<String>, doc_id: u32, pos: u32, embedding: Vec<f32>) -> Self {
        Self {
            token: token.into(),
            doc_id,
            pos,
            embedding,
        }
    }
}

/// All token records generated at one checkpoint.
///
/// Records share one dimension and are strictly ordered by `(doc_id, pos)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingCorpus {
    dim: usize,
    checkpoint_step: u64,
    records: Vec<TokenRecord>,
}

impl EmbeddingCorpus {
    pub fn new(dim: usize, checkpoint_step: u64, records: Vec<TokenRecord>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("corpus dimension must be positive".into()));
        }
        for (index, record) in records.iter().enumerate() {
            if record.embedding.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    found: record.embedding.len(),
                });
            }
            if record.token.is_empty() {
                return Err(Error::InvalidConfig(format!("record {index} has an empty token")));
            }
        }
        if let Some(index) = records
            .windows(2)
            .position(|w| (w[0].doc_id, w[0].pos) >= (w[1].doc_id, w[1].pos))
        {
            return Err(Error::InvalidConfig(format!(
                "record {} is out of (doc_id, pos) order or duplicated",
                index + 1
            )));
        }
        Ok(Self {
            dim,
            checkpoint_step,
            records,
        })
    }

    pub fn empty(dim: usize, checkpoint_step: u64) -> Self {
        Self {
            dim: dim.max(1),
            checkpoint_step,
            records: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn checkpoint_step(&self) -> u64 {
        self.checkpoint_step
    }

    pub fn records(&self) -> &[TokenRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<TokenRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Every occurrence embedding of one word type.
#[derive(Clone, Debug, PartialEq)]
pub struct WordGroup {
    pub word: String,
    pub occurrences: Vec<Vec<f32>>,
}

impl WordGroup {
    pub fn frequency(&self) -> usize {
        self.occurrences.len()
    }
}

/// Parameters of a single-checkpoint analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// DBSCAN radius in cosine-distance units.
    pub eps: f64,
    /// Neighborhood size (including the point itself) that makes a core point.
    pub min_samples: usize,
    pub min_frequency: usize,
    pub top_k: usize,
    pub min_token_len: usize,
    /// Additive floor in the specificity denominator. Unrelated to `eps`.
    pub specificity_floor: f64,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            eps: 0.3,
            min_samples: 2,
            min_frequency: 5,
            top_k: 500,
            min_token_len: 3,
            specificity_floor: 1e-6,
            seed: 0,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        validate_eps(self.eps)?;
        let positive = [
            ("min_samples", self.min_samples),
            ("min_frequency", self.min_frequency),
            ("top_k", self.top_k),
            ("min_token_len", self.min_token_len),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        if !(self.specificity_floor.is_finite() && self.specificity_floor > 0.0) {
            return Err(Error::InvalidConfig(
                "specificity_floor must be a positive finite number".into(),
            ));
        }
        Ok(())
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        Self {
            eps,
            ..self.clone()
        }
    }
}

pub(crate) fn validate_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 && eps < 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("eps must lie in (0, 2), got {eps}")))
    }
}

// GPT-2 byte-level BPE space/newline markers, SentencePiece word boundary.
const PREFIX_MARKERS: &[char] = &['\u{0120}', '\u{010A}', '\u{2581}'];

/// Canonical word identity for a raw tokenizer token.
///
/// Strips surrounding whitespace, tokenizer boundary markers (`Ġ`, `Ċ`, `▁`,
/// WordPiece `##`, BPE `</w>`) and lowercases the rest.
pub fn normalize_token(raw: &str) -> String {
    let mut s = raw.trim();
    loop {
        let before = s.len();
        s = s.trim_start_matches(PREFIX_MARKERS);
        s = s.strip_prefix("##").unwrap_or(s);
        s = s.strip_suffix("</w>").unwrap_or(s);
        s = s.trim();
        if s.len() == before {
            break;
        }
    }
    s.to_lowercase()
}

/// True when a normalized token counts as a word for the law tests.
pub fn is_word(normalized: &str, min_token_len: usize) -> bool {
    !normalized.is_empty()
        && normalized.chars().all(char::is_alphabetic)
        && normalized.chars().count() >= min_token_len
}

/// Keeps only the alphabetic records of sufficient length, with tokens
/// replaced by their normalized form.
pub fn filter_tokens(corpus: &EmbeddingCorpus, config: &AnalysisConfig) -> EmbeddingCorpus {
    let records = corpus
        .records
        .iter()
        .filter_map(|r| {
            let word = normalize_token(&r.token);
            is_word(&word, config.min_token_len).then(|| TokenRecord {
                token: word,
                doc_id: r.doc_id,
                pos: r.pos,
                embedding: r.embedding.clone(),
            })
        })
        .collect();
    EmbeddingCorpus {
        dim: corpus.dim,
        checkpoint_step: corpus.checkpoint_step,
        records,
    }
}

/// Groups records by token, returning groups in ascending word order.
pub fn group_by_word(corpus: &EmbeddingCorpus) -> Vec<WordGroup> {
    let mut groups: BTreeMap<&str, Vec<Vec<f32>>> = BTreeMap::new();
    for record in &corpus.records {
        groups
            .entry(record.token.as_str())
            .or_default()
            .push(record.embedding.clone());
    }
    groups
        .into_iter()
        .map(|(word, occurrences)| WordGroup {
            word: word.to_owned(),
            occurrences,
        })
        .collect()
}

/// Drops rare words, orders by (frequency desc, word asc) and keeps `top_k`.
pub fn select_words(mut groups: Vec<WordGroup>, config: &AnalysisConfig) -> Vec<WordGroup> {
    groups.retain(|g| g.frequency() >= config.min_frequency);
    groups.sort_by(frequency_order);
    groups.truncate(config.top_k);
    groups
}

fn frequency_order(a: &WordGroup, b: &WordGroup) -> Ordering {
    b.frequency()
        .cmp(&a.frequency())
        .then_with(|| a.word.cmp(&b.word))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn corpus_of(tokens: &[&str]) -> EmbeddingCorpus {
        let records = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| TokenRecord::new(*t, 0, i as u32, vec![1.0, i as f32]))
            .collect();
        EmbeddingCorpus::new(2, 0, records).unwrap()
    }

    fn tokens(c: &EmbeddingCorpus) -> Vec<&str> {
        c.records().iter().map(|r| r.token.as_str()).collect()
    }

    #[test]
    fn filter_keeps_alphabetic_words_of_min_length() {
        let c = corpus_of(&["The", "cat", "!", "of", "running"]);
        let f = filter_tokens(&c, &AnalysisConfig::default());
        assert_eq!(tokens(&f), ["the", "cat", "running"]);
        assert_eq!(f.records()[2].pos, 4);
    }

    #[test]
    fn filter_empty_corpus() {
        let c = EmbeddingCorpus::empty(3, 7);
        let f = filter_tokens(&c, &AnalysisConfig::default());
        assert!(f.is_empty());
        assert_eq!(f.checkpoint_step(), 7);
    }

    #[test]
    fn prefix_markers_are_stripped() {
        assert_eq!(normalize_token("Ġhouse"), "house");
        assert_eq!(normalize_token("▁House"), "house");
        assert_eq!(normalize_token("##ing"), "ing");
        assert_eq!(normalize_token("  word</w> "), "word");
        assert_eq!(normalize_token("ĠĠ"), "");
    }

    // Hand-labelled expectations, checked against a direct oracle.
    #[test]
    fn normalization_against_hand_built_list() {
        let cases: &[(&str, bool)] = &[
            ("Ġhouse", true), ("house", true), ("HOUSE", true), ("Ġthe", true),
            ("the", true), ("of", false), ("Ġof", false), ("a", false),
            ("!", false), ("Ġ!", false), ("...", false), ("123", false),
            ("abc123", false), ("Ġ2020", false), ("▁river", true), ("▁bank", true),
            ("##ing", true), ("##s", false), ("Ċ", false), ("ĊĊ", false),
            (" cat ", true), ("dog\n", true), ("naïve", true), ("Über", true),
            ("straße", true), ("日本語", true), ("猫", false), ("мир", true),
            ("co-op", false), ("don't", false), ("e.g.", false), ("Ġrunning", true),
            ("jumped", true), ("Ġx", false), ("xyz", true), ("Ġ", false),
            ("", false), ("  ", false), ("word</w>", true), ("ab</w>", false),
            ("Ġ\tabc", true), ("αβγ", true), ("Ġαβ", false), ("ΣΟΦΙΑ", true),
            ("tab\t", true), ("a_b_c", false), ("ÅNGSTRÖM", true), ("Ġé", false),
            ("ĠEmoji😀", false), ("ok", false),
        ];
        assert_eq!(cases.len(), 50);
        let records: Vec<TokenRecord> = cases
            .iter()
            .enumerate()
            .map(|(i, (t, _))| TokenRecord::new(if t.is_empty() { "Ġ" } else { *t }, 0, i as u32, vec![1.0]))
            .collect();
        let corpus = EmbeddingCorpus::new(1, 0, records).unwrap();
        let kept: Vec<u32> = filter_tokens(&corpus, &AnalysisConfig::default())
            .records()
            .iter()
            .map(|r| r.pos)
            .collect();
        let expected: Vec<u32> = cases
            .iter()
            .enumerate()
            .filter(|(_, (_, keep))| *keep)
            .map(|(i, _)| i as u32)
            .collect();
        assert_eq!(kept, expected);
    }

    #[test]
    fn group_counts() {
        let c = corpus_of(&["cat", "dog", "cat", "cat", "dog"]);
        let groups = group_by_word(&c);
        let counts: Vec<(&str, usize)> =
            groups.iter().map(|g| (g.word.as_str(), g.frequency())).collect();
        assert_eq!(counts, [("cat", 3), ("dog", 2)]);
        assert_eq!(groups[0].occurrences[1], vec![1.0, 2.0]);
    }

    #[test]
    fn group_all_distinct() {
        let c = corpus_of(&["aaa", "bbb", "ccc"]);
        assert!(group_by_word(&c).iter().all(|g| g.frequency() == 1));
    }

    fn group(word: &str, freq: usize) -> WordGroup {
        WordGroup {
            word: word.into(),
            occurrences: vec![vec![1.0]; freq],
        }
    }

    #[test]
    fn select_top_500_of_600() {
        let groups: Vec<WordGroup> = (0..600).map(|i| group(&format!("w{i:03}"), 5 + i % 37)).collect();
        let selected = select_words(groups.clone(), &AnalysisConfig::default());
        assert_eq!(selected.len(), 500);
        let kept: std::collections::HashSet<&str> = selected.iter().map(|g| g.word.as_str()).collect();
        let min_kept = selected.iter().map(WordGroup::frequency).min().unwrap();
        let max_dropped = groups
            .iter()
            .filter(|g| !kept.contains(g.word.as_str()))
            .map(WordGroup::frequency)
            .max()
            .unwrap();
        assert!(min_kept >= max_dropped);
    }

    #[test]
    fn select_below_threshold_is_empty() {
        let groups = vec![group("aaa", 4), group("bbb", 4)];
        assert!(select_words(groups, &AnalysisConfig::default()).is_empty());
    }

    #[test]
    fn select_breaks_ties_lexicographically() {
        let groups = vec![group("zeta", 7), group("alpha", 7), group("beta", 9)];
        let config = AnalysisConfig {
            top_k: 2,
            ..AnalysisConfig::default()
        };
        let words: Vec<String> = select_words(groups, &config).into_iter().map(|g| g.word).collect();
        assert_eq!(words, ["beta", "alpha"]);
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = AnalysisConfig::default();
        assert!(base.validate().is_ok());
        assert!(base.with_eps(0.0).validate().is_err());
        assert!(base.with_eps(2.0).validate().is_err());
        assert!(AnalysisConfig { min_samples: 0, ..base.clone() }.validate().is_err());
        assert!(AnalysisConfig { specificity_floor: 0.0, ..base }.validate().is_err());
    }

    #[test]
    fn corpus_rejects_unordered_and_ragged() {
        let r = |pos, dim| TokenRecord::new("cat", 0, pos, vec![1.0; dim]);
        assert!(EmbeddingCorpus::new(2, 0, vec![r(1, 2), r(0, 2)]).is_err());
        assert!(EmbeddingCorpus::new(2, 0, vec![r(0, 2), r(0, 2)]).is_err());
        assert!(matches!(
            EmbeddingCorpus::new(2, 0, vec![r(0, 2), r(1, 3)]),
            Err(Error::DimensionMismatch { index: 1, .. })
        ));
    }

    const WORDS: &[&str] = &["Ġthe", "cat", "CAT", "!", "of", "▁bank", "river", "##s", "Ġrun", "x1"];

    proptest! {
        #[test]
        fn filter_is_idempotent(idx in prop::collection::vec(0..WORDS.len(), 0..40)) {
            let toks: Vec<&str> = idx.iter().map(|&i| WORDS[i]).collect();
            let c = corpus_of(&toks);
            let config = AnalysisConfig::default();
            let once = filter_tokens(&c, &config);
            prop_assert_eq!(filter_tokens(&once, &config), once);
        }

        // Sort oracle: the full ordering by (-freq, word) restricted to freq >= min.
        #[test]
        fn selection_matches_sort_oracle(
            freqs in prop::collection::vec(1usize..12, 1..60),
            top_k in 1usize..40,
        ) {
            let groups: Vec<WordGroup> = freqs.iter().enumerate()
                .map(|(i, &f)| group(&format!("w{}", (i * 7919) % 1000), f))
                .collect();
            let config = AnalysisConfig { top_k, ..AnalysisConfig::default() };
            let mut oracle: Vec<(i64, String)> = groups.iter()
                .filter(|g| g.frequency() >= 5)
                .map(|g| (-(g.frequency() as i64), g.word.clone()))
                .collect();
            oracle.sort();
            oracle.truncate(top_k);
            let got: Vec<(i64, String)> = select_words(groups, &config).into_iter()
                .map(|g| (-(g.frequency() as i64), g.word))
                .collect();
            prop_assert_eq!(got, oracle);
        }

        #[test]
        fn selection_is_permutation_invariant(
            idx in prop::collection::vec(0..WORDS.len(), 0..80),
            seed in any::<u64>(),
        ) {
            use rand::{seq::SliceRandom, SeedableRng};
            let toks: Vec<&str> = idx.iter().map(|&i| WORDS[i]).collect();
            let mut shuffled = toks.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let config = AnalysisConfig { min_frequency: 2, top_k: 4, ..AnalysisConfig::default() };
            let pick = |t: &[&str]| -> Vec<(String, usize)> {
                let f = filter_tokens(&corpus_of(t), &config);
                select_words(group_by_word(&f), &config).into_iter()
                    .map(|g| { let n = g.frequency(); (g.word, n) })
                    .collect()
            };
            prop_assert_eq!(pick(&toks), pick(&shuffled));
        }
    }

    #[test]
    fn grouping_matches_hashmap_oracle_after_shuffle() {
        use rand::{seq::SliceRandom, SeedableRng};
        use std::collections::HashMap;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut toks: Vec<&str> = (0..300).map(|i| ["alpha", "beta", "gamma", "delta"][i % 4]).collect();
        toks.shuffle(&mut rng);
        let mut oracle: HashMap<&str, usize> = HashMap::new();
        for t in &toks {
            *oracle.entry(t).or_default() += 1;
        }
        let groups = group_by_word(&corpus_of(&toks));
        assert_eq!(groups.len(), oracle.len());
        for g in &groups {
            assert_eq!(oracle[g.word.as_str()], g.frequency());
        }
        assert_eq!(groups.iter().map(WordGroup::frequency).sum::<usize>(), toks.len());
    }
}
