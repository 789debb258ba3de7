//! Cosine-metric DBSCAN and the cluster-count polysemy estimate.
//!
//! A point is core when at least `min_samples` points (itself included) lie
//! within cosine distance `eps`. Core points that are neighbors share a
//! cluster. A non-core point within `eps` of a core point is a border point
//! and joins the cluster of its lowest-index core neighbor; everything else
//! is noise. Clusters are numbered by their lowest-index core point, so the
//! labeling is a pure function of the input order.
//!
//! Neighborhoods are exact: every pair is evaluated, without an index. The
//! pairwise pass runs twice (core counts, then linking) so memory stays
//! linear in the number of points.

use crate::corpus::{AnalysisConfig, WordGroup};
use crate::error::{Error, Result};

/// Label for points that belong to no cluster.
pub const NOISE: i32 = -1;

/// DBSCAN output aligned with the input points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterLabeling {
    /// `NOISE` or a cluster id in `0..n_clusters`.
    pub labels: Vec<i32>,
    pub n_clusters: usize,
    /// Core flag per point.
    pub core: Vec<bool>,
}

impl ClusterLabeling {
    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == NOISE).count()
    }
}

fn dot_and_norms<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> (f64, f64, f64) {
    let mut dot = 0.0;
    let mut aa = 0.0;
    let mut bb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let (x, y): (f64, f64) = (x.into(), y.into());
        dot += x * y;
        aa += x * x;
        bb += y * y;
    }
    (dot, aa, bb)
}

fn squared_norm<T: Copy + Into<f64>>(a: &[T]) -> f64 {
    a.iter().map(|&x| { let x: f64 = x.into(); x * x }).sum()
}

fn dot<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x.into() * y.into()).sum()
}

// sqrt(‖a‖²‖b‖²) keeps identical vectors at exactly zero distance.
#[inline]
fn distance_from_parts(dot: f64, sq_norm_a: f64, sq_norm_b: f64) -> f64 {
    (1.0 - dot / (sq_norm_a * sq_norm_b).sqrt()).clamp(0.0, 2.0)
}

/// `1 - a·b / (‖a‖‖b‖)`, clamped to `[0, 2]`.
pub fn cosine_distance<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            index: 1,
            expected: a.len(),
            found: b.len(),
        });
    }
    let (dot, na, nb) = dot_and_norms(a, b);
    if na == 0.0 {
        return Err(Error::ZeroNorm { index: 0 });
    }
    if nb == 0.0 {
        return Err(Error::ZeroNorm { index: 1 });
    }
    Ok(distance_from_parts(dot, na, nb))
}

fn check_points<P: AsRef<[T]>, T: Copy + Into<f64>>(points: &[P]) -> Result<Vec<f64>> {
    let dim = points
        .first()
        .ok_or(Error::EmptyInput("dbscan needs at least one point"))?
        .as_ref()
        .len();
    points
        .iter()
        .enumerate()
        .map(|(index, p)| {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
            let n = squared_norm(p);
            if n == 0.0 || !n.is_finite() {
                return Err(Error::ZeroNorm { index });
            }
            Ok(n)
        })
        .collect()
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Density-based clustering under cosine distance.
pub fn dbscan<P, T>(points: &[P], eps: f64, min_samples: usize) -> Result<ClusterLabeling>
where
    P: AsRef<[T]>,
    T: Copy + Into<f64>,
{
    crate::corpus::validate_eps(eps)?;
    if min_samples == 0 {
        return Err(Error::InvalidConfig("min_samples must be at least 1".into()));
    }
    let norms = check_points(points)?;
    let n = points.len();
    let within = |i: usize, j: usize| {
        let d = distance_from_parts(dot(points[i].as_ref(), points[j].as_ref()), norms[i], norms[j]);
        d <= eps
    };

    // counts include the point itself
    let mut counts = vec![1usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if within(i, j) {
                counts[i] += 1;
                counts[j] += 1;
            }
        }
    }
    let core: Vec<bool> = counts.iter().map(|&c| c >= min_samples).collect();

    let mut components = DisjointSet::new(n);
    let mut border_anchor: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        for j in i + 1..n {
            if !(core[i] || core[j]) || !within(i, j) {
                continue;
            }
            match (core[i], core[j]) {
                (true, true) => components.union(i, j),
                // i < j, so the first core neighbor found is the lowest-index one
                (true, false) => {
                    border_anchor[j].get_or_insert(i);
                }
                (false, true) => {
                    let anchor = border_anchor[i].get_or_insert(j);
                    *anchor = (*anchor).min(j);
                }
                (false, false) => unreachable!(),
            }
        }
    }

    let mut cluster_of_root: Vec<Option<i32>> = vec![None; n];
    let mut labels = vec![NOISE; n];
    let mut n_clusters = 0usize;
    for i in 0..n {
        if core[i] {
            let root = components.find(i);
            let id = *cluster_of_root[root].get_or_insert_with(|| {
                n_clusters += 1;
                (n_clusters - 1) as i32
            });
            labels[i] = id;
        }
    }
    for i in 0..n {
        if let Some(anchor) = border_anchor[i] {
            labels[i] = labels[anchor];
        }
    }
    Ok(ClusterLabeling {
        labels,
        n_clusters,
        core,
    })
}

/// Number of non-noise clusters among a word's occurrences. Zero when every
/// occurrence is noise.
pub fn polysemy(group: &WordGroup, config: &AnalysisConfig) -> Result<usize> {
    Ok(dbscan(&group.occurrences, config.eps, config.min_samples)?.n_clusters)
}
