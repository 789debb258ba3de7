//! Synthetic embedding corpora with known sense structure.
//!
//! Word frequencies follow a Zipf law over ranks. Each word gets
//! `K = max(1, round(c * f^beta))` sense centroids on the unit sphere, kept at
//! least `min_centroid_distance` apart in cosine distance. Every occurrence
//! picks a sense uniformly and is embedded as the centroid plus isotropic
//! Gaussian noise of scale `noise_sigma * f^gamma`, re-normalized to unit
//! length. Occurrences are then shuffled into documents of `doc_len` tokens.
//!
//! Randomness comes from ChaCha8 seeded with `seed`, split into streams:
//! stream 0 draws the frequencies, stream 1 the decoupling permutation,
//! stream 2 the token order, and stream `16 + rank` everything drawn for the
//! word at that rank. Per-word generation therefore runs in parallel without
//! changing the output.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{EmbeddingCorpus, TokenRecord};
use crate::error::{Error, Result};

const STREAM_FREQUENCIES: u64 = 0;
const STREAM_DECOUPLING: u64 = 1;
const STREAM_ORDER: u64 = 2;
const STREAM_WORD_BASE: u64 = 16;

const MAX_CENTROID_ATTEMPTS: usize = 500_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub vocab_size: usize,
    pub zipf_s: f64,
    /// Target frequency-polysemy exponent.
    pub beta: f64,
    /// `c` in `K = max(1, round(c * f^beta))`.
    pub poly_coeff: f64,
    pub dim: usize,
    pub noise_sigma: f64,
    /// Per-word noise is `noise_sigma * f^sigma_freq_exponent`.
    pub sigma_freq_exponent: f64,
    pub total_tokens: usize,
    pub seed: u64,
    pub min_centroid_distance: f64,
    /// Probability that a word's sense count is computed from the frequency
    /// of a randomly permuted partner word instead of its own.
    pub polysemy_decoupling: f64,
    pub checkpoint_step: u64,
    pub doc_len: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            vocab_size: 2000,
            zipf_s: 1.0,
            beta: 0.6,
            poly_coeff: 0.2,
            dim: 16,
            noise_sigma: 0.05,
            sigma_freq_exponent: 0.0,
            total_tokens: 60_000,
            seed: 42,
            min_centroid_distance: 0.7,
            polysemy_decoupling: 0.0,
            checkpoint_step: 0,
            doc_len: 512,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSpec(msg));
        if self.vocab_size == 0 {
            return fail("vocab_size must be positive".into());
        }
        if self.total_tokens < self.vocab_size {
            return fail(format!(
                "total_tokens ({}) must be at least vocab_size ({})",
                self.total_tokens, self.vocab_size
            ));
        }
        if self.dim < 2 {
            return fail("dim must be at least 2".into());
        }
        if self.doc_len == 0 {
            return fail("doc_len must be positive".into());
        }
        if !(self.zipf_s.is_finite() && self.zipf_s >= 0.0) {
            return fail("zipf_s must be a non-negative number".into());
        }
        if !(self.poly_coeff.is_finite() && self.poly_coeff > 0.0) {
            return fail("poly_coeff must be positive".into());
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma > 0.0) {
            return fail("noise_sigma must be positive".into());
        }
        if !self.beta.is_finite() || !self.sigma_freq_exponent.is_finite() {
            return fail("beta and sigma_freq_exponent must be finite".into());
        }
        if !(self.min_centroid_distance > 0.0 && self.min_centroid_distance <= 2.0) {
            return fail("min_centroid_distance must lie in (0, 2]".into());
        }
        if !(0.0..=1.0).contains(&self.polysemy_decoupling) {
            return fail("polysemy_decoupling must lie in [0, 1]".into());
        }
        if u32::try_from(self.total_tokens / self.doc_len).is_err() {
            return fail("too many documents for 32-bit document ids".into());
        }
        Ok(())
    }

    /// Ground-truth sense count for a word of the given frequency.
    pub fn sense_count(&self, frequency: usize) -> usize {
        let k = (self.poly_coeff * (frequency as f64).powf(self.beta)).round();
        if k.is_finite() && k >= 1.0 {
            k as usize
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordTruth {
    pub word: String,
    /// 1-based Zipf rank.
    pub rank: usize,
    pub frequency: usize,
    /// Frequency the sense count was derived from; differs from `frequency`
    /// only for decoupled words.
    pub source_frequency: usize,
    pub sense_count: usize,
    pub noise_scale: f64,
    pub centroids: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: SynthSpec,
    pub words: Vec<WordTruth>,
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-rank token counts: one guaranteed token per word plus a multinomial
/// draw of the remainder with `p(r) ∝ r^-s`. Sums to `total_tokens`.
pub fn zipf_frequencies(
    vocab_size: usize,
    zipf_s: f64,
    total_tokens: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if vocab_size == 0 || vocab_size > total_tokens {
        return Err(Error::InvalidSpec(format!(
            "cannot give each of {vocab_size} words a token out of {total_tokens}"
        )));
    }
    let weights: Vec<f64> = (1..=vocab_size).map(|r| (r as f64).powf(-zipf_s)).collect();
    let mut tail = vec![0.0; vocab_size + 1];
    for i in (0..vocab_size).rev() {
        tail[i] = tail[i + 1] + weights[i];
    }
    let mut rng = stream(seed, STREAM_FREQUENCIES);
    let mut remaining = (total_tokens - vocab_size) as u64;
    let mut counts = Vec::with_capacity(vocab_size);
    for i in 0..vocab_size {
        let extra = if i + 1 == vocab_size || remaining == 0 {
            remaining
        } else {
            let p = (weights[i] / tail[i]).clamp(0.0, 1.0);
            Binomial::new(remaining, p)
                .expect("probability within [0, 1]")
                .sample(&mut rng)
        };
        remaining -= extra;
        counts.push(1 + extra as usize);
    }
    Ok(counts)
}

/// Lowercase alphabetic name for a 0-based rank: "aaa", "aab", ...
pub fn word_for_rank(index: usize) -> String {
    let mut letters = Vec::new();
    let mut n = index;
    loop {
        letters.push(b'a' + (n % 26) as u8);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    while letters.len() < 3 {
        letters.push(b'a');
    }
    letters.reverse();
    String::from_utf8(letters).expect("ascii")
}

fn unit_gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Rejection-samples `k` unit vectors with pairwise cosine distance of at
/// least `separation`.
pub fn sample_centroids(
    k: usize,
    dim: usize,
    separation: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<f64>>> {
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    while centroids.len() < k {
        let accepted = (0..MAX_CENTROID_ATTEMPTS).find_map(|_| {
            let candidate = unit_gaussian(rng, dim);
            centroids
                .iter()
                .all(|c| {
                    let cos: f64 = c.iter().zip(&candidate).map(|(a, b)| a * b).sum();
                    1.0 - cos >= separation
                })
                .then_some(candidate)
        });
        match accepted {
            Some(c) => centroids.push(c),
            None => {
                return Err(Error::SeparationInfeasible {
                    wanted: k,
                    placed: centroids.len(),
                    separation,
                    dim,
                })
            }
        }
    }
    Ok(centroids)
}

struct GeneratedWord {
    truth: WordTruth,
    occurrences: Vec<Vec<f32>>,
}

fn generate_word(
    spec: &SynthSpec,
    rank_index: usize,
    frequency: usize,
    partner_frequency: usize,
) -> Result<GeneratedWord> {
    let mut rng = stream(spec.seed, STREAM_WORD_BASE + rank_index as u64);
    let decoupled = spec.polysemy_decoupling > 0.0 && rng.random::<f64>() < spec.polysemy_decoupling;
    let source_frequency = if decoupled { partner_frequency } else { frequency };
    let k = spec.sense_count(source_frequency);
    let centroids = sample_centroids(k, spec.dim, spec.min_centroid_distance, &mut rng)?;
    let noise_scale = spec.noise_sigma * (frequency as f64).powf(spec.sigma_freq_exponent);
    let occurrences = (0..frequency)
        .map(|_| {
            let sense = &centroids[rng.random_range(0..k)];
            loop {
                let v: Vec<f64> = sense
                    .iter()
                    .map(|c| c + noise_scale * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 1e-12 && n.is_finite() {
                    break v.iter().map(|x| (x / n) as f32).collect::<Vec<f32>>();
                }
            }
        })
        .collect();
    Ok(GeneratedWord {
        truth: WordTruth {
            word: word_for_rank(rank_index),
            rank: rank_index + 1,
            frequency,
            source_frequency,
            sense_count: k,
            noise_scale,
            centroids,
        },
        occurrences,
    })
}

/// Builds a corpus and its ground truth from `spec`.
pub fn generate_corpus(spec: &SynthSpec) -> Result<(EmbeddingCorpus, GroundTruth)> {
    spec.validate()?;
    let frequencies = zipf_frequencies(spec.vocab_size, spec.zipf_s, spec.total_tokens, spec.seed)?;
    let mut partners: Vec<usize> = (0..spec.vocab_size).collect();
    partners.shuffle(&mut stream(spec.seed, STREAM_DECOUPLING));

    let words: Vec<GeneratedWord> = (0..spec.vocab_size)
        .into_par_iter()
        .map(|i| generate_word(spec, i, frequencies[i], frequencies[partners[i]]))
        .collect::<Result<_>>()?;

    let mut slots: Vec<(u32, u32)> = words
        .iter()
        .enumerate()
        .flat_map(|(w, g)| (0..g.occurrences.len() as u32).map(move |o| (w as u32, o)))
        .collect();
    slots.shuffle(&mut stream(spec.seed, STREAM_ORDER));

    let records = slots
        .iter()
        .enumerate()
        .map(|(i, &(w, o))| {
            let g = &words[w as usize];
            TokenRecord {
                token: g.truth.word.clone(),
                doc_id: (i / spec.doc_len) as u32,
                pos: (i % spec.doc_len) as u32,
                embedding: g.occurrences[o as usize].clone(),
            }
        })
        .collect();
    let corpus = EmbeddingCorpus::new(spec.dim, spec.checkpoint_step, records)?;
    let truth = GroundTruth {
        spec: spec.clone(),
        words: words.into_iter().map(|g| g.truth).collect(),
    };
    Ok((corpus, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn small_spec() -> SynthSpec {
        SynthSpec {
            vocab_size: 120,
            total_tokens: 4000,
            ..SynthSpec::default()
        }
    }

    #[test]
    fn zipf_counts_sum_and_floor() {
        let c = zipf_frequencies(1000, 1.0, 60_000, 7).unwrap();
        assert_eq!(c.iter().sum::<usize>(), 60_000);
        assert!(c.iter().all(|&x| x >= 1));
        assert!(c[0] > c[99]);
    }

    #[test]
    fn zipf_exact_budget_gives_ones() {
        assert_eq!(zipf_frequencies(50, 1.2, 50, 1).unwrap(), vec![1; 50]);
    }

    #[test]
    fn zipf_infeasible_budget() {
        assert!(zipf_frequencies(10, 1.0, 9, 1).is_err());
        let spec = SynthSpec { total_tokens: 10, vocab_size: 11, ..SynthSpec::default() };
        assert!(matches!(generate_corpus(&spec), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn zipf_flat_exponent_is_uniform() {
        // chi-square of the extra tokens against the uniform expectation
        let v = 50;
        let n = 20_000;
        let c = zipf_frequencies(v, 0.0, n, 99).unwrap();
        let expected = (n - v) as f64 / v as f64;
        let chi2: f64 = c.iter().map(|&x| ((x - 1) as f64 - expected).powi(2) / expected).sum();
        // 99.9th percentile of chi-square with 49 degrees of freedom
        assert!(chi2 < 85.35, "chi2 = {chi2}");
    }

    #[test]
    fn word_names_are_distinct_and_alphabetic() {
        assert_eq!(word_for_rank(0), "aaa");
        assert_eq!(word_for_rank(27), "abb");
        assert_eq!(word_for_rank(17_576), "baaa");
        let names: std::collections::HashSet<String> = (0..20_000).map(word_for_rank).collect();
        assert_eq!(names.len(), 20_000);
        assert!(names.iter().all(|w| w.chars().all(|c| c.is_ascii_lowercase())));
    }

    #[test]
    fn centroid_separation_holds() {
        let mut rng = stream(5, 99);
        let cs = sample_centroids(30, 16, 0.7, &mut rng).unwrap();
        for i in 0..cs.len() {
            let n: f64 = cs[i].iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
            for j in 0..i {
                let cos: f64 = cs[i].iter().zip(&cs[j]).map(|(a, b)| a * b).sum();
                assert!(1.0 - cos >= 0.7);
            }
        }
    }

    #[test]
    fn infeasible_separation_errors() {
        let mut rng = stream(1, 1);
        // no four unit vectors in the plane are pairwise 120 degrees apart
        let e = sample_centroids(4, 2, 1.5, &mut rng).unwrap_err();
        assert!(matches!(e, Error::SeparationInfeasible { wanted: 4, placed, .. } if placed < 4));
    }

    #[test]
    fn generation_is_deterministic() {
        let (a, ta) = generate_corpus(&small_spec()).unwrap();
        let (b, tb) = generate_corpus(&small_spec()).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        let (c, _) = generate_corpus(&SynthSpec { seed: 43, ..small_spec() }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn realized_counts_match_truth() {
        let (corpus, truth) = generate_corpus(&small_spec()).unwrap();
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for r in corpus.records() {
            *counts.entry(r.token.as_str()).or_default() += 1;
            let n: f64 = r.embedding.iter().map(|&x| (x as f64).powi(2)).sum();
            assert!((n - 1.0).abs() < 1e-5);
        }
        for w in &truth.words {
            assert_eq!(counts[w.word.as_str()], w.frequency);
            assert_eq!(w.sense_count, small_spec().sense_count(w.frequency));
            assert_eq!(w.centroids.len(), w.sense_count);
        }
        assert_eq!(corpus.len(), 4000);
        assert_eq!(corpus.records()[513].doc_id, 1);
        assert_eq!(corpus.records()[513].pos, 1);
    }

    #[test]
    fn beta_zero_gives_single_senses() {
        let spec = SynthSpec { beta: 0.0, poly_coeff: 1.0, ..small_spec() };
        let (_, truth) = generate_corpus(&spec).unwrap();
        assert!(truth.words.iter().all(|w| w.sense_count == 1));
    }

    #[test]
    fn full_decoupling_reassigns_sense_sources() {
        let spec = SynthSpec { polysemy_decoupling: 1.0, ..small_spec() };
        let (_, truth) = generate_corpus(&spec).unwrap();
        let moved = truth.words.iter().filter(|w| w.source_frequency != w.frequency).count();
        assert!(moved > truth.words.len() / 2);
    }

    #[test]
    fn noise_scale_follows_frequency_exponent() {
        let spec = SynthSpec { sigma_freq_exponent: 0.25, ..small_spec() };
        let (_, truth) = generate_corpus(&spec).unwrap();
        for w in &truth.words {
            let want = 0.05 * (w.frequency as f64).powf(0.25);
            assert!((w.noise_scale - want).abs() < 1e-15);
        }
    }

    #[test]
    fn sense_count_formula() {
        let spec = SynthSpec::default();
        assert_eq!(spec.sense_count(1), 1);
        assert_eq!(spec.sense_count(7335), (0.2 * 7335f64.powf(0.6)).round() as usize);
    }
}
