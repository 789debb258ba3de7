use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use senselaw::{analyze, dbscan, polysemy, AnalysisConfig, EmbeddingCorpus, TokenRecord, WordGroup, NOISE};

/// Points within a small angle of each axis-aligned pole.
fn caps(poles: &[usize], per_cap: usize, dim: usize, jitter: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &pole in poles {
        for _ in 0..per_cap {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-jitter..jitter)).collect();
            v[pole] += 1.0;
            out.push(v);
        }
    }
    out
}

#[test]
fn three_caps_give_three_clusters() {
    let pts = caps(&[0, 3, 7], 20, 8, 0.05, 1);
    let l = dbscan(&pts, 0.1, 3).unwrap();
    assert_eq!(l.n_clusters, 3);
    assert_eq!(l.noise_count(), 0);
    for cap in 0..3 {
        let labels = &l.labels[cap * 20..(cap + 1) * 20];
        assert!(labels.iter().all(|&x| x == cap as i32), "{labels:?}");
    }
}

#[test]
fn antipodal_outlier_is_noise() {
    let mut pts = caps(&[0, 1], 10, 4, 0.02, 2);
    pts.push(vec![-1.0, -1.0, 0.0, 0.0]);
    let l = dbscan(&pts, 0.2, 2).unwrap();
    assert_eq!(l.n_clusters, 2);
    assert_eq!(l.labels[20], NOISE);
}

#[test]
fn two_senses_in_a_corpus() {
    let occurrences = caps(&[0, 5], 15, 6, 0.03, 3);
    let records = occurrences
        .iter()
        .enumerate()
        .map(|(i, e)| TokenRecord::new("Ġbank", 0, i as u32, e.iter().map(|&x| x as f32).collect()))
        .collect();
    let corpus = EmbeddingCorpus::new(6, 50, records).unwrap();
    let a = analyze(&corpus, &AnalysisConfig::default()).unwrap();
    assert_eq!(a.words.len(), 1);
    assert_eq!(a.words[0].word, "bank");
    assert_eq!(a.words[0].polysemy, 2);
    assert_eq!(a.summary.polysemous_word_count, 1);

    let group = WordGroup {
        word: "bank".into(),
        occurrences: occurrences.iter().map(|e| e.iter().map(|&x| x as f32).collect()).collect(),
    };
    assert_eq!(polysemy(&group, &AnalysisConfig::default()).unwrap(), 2);
    assert_eq!(polysemy(&group, &AnalysisConfig::default().with_eps(1.5)).unwrap(), 1);
}
