//! Rank correlation and power-law fitting for the frequency-polysemy and
//! frequency-specificity tests.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::metrics::WordMetrics;

/// Why a statistic could not be computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Undefined {
    TooFewPoints,
    ConstantRanks,
    DegenerateDesign,
}

impl Undefined {
    pub fn as_str(self) -> &'static str {
        match self {
            Undefined::TooFewPoints => "too_few_points",
            Undefined::ConstantRanks => "constant_ranks",
            Undefined::DegenerateDesign => "degenerate_design",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::TooFewPoints, Self::ConstantRanks, Self::DegenerateDesign]
            .into_iter()
            .find(|u| u.as_str() == s)
    }
}

impl fmt::Display for Undefined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A Spearman coefficient over `n` pairs, or the reason it is undefined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationResult {
    pub rho: Result<f64, Undefined>,
    pub n: usize,
}

impl CorrelationResult {
    pub fn defined(&self) -> bool {
        self.rho.is_ok()
    }

    pub fn value(&self) -> Option<f64> {
        self.rho.ok()
    }
}

/// Least-squares fit of `ln P = log_intercept + beta * ln f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub beta: f64,
    pub log_intercept: f64,
    pub n_points: usize,
    pub r_squared: f64,
}

/// 1-based average ranks; tied values share the mean of their rank span.
pub fn rank_transform(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]].total_cmp(&values[order[start]]) == Ordering::Equal {
            end += 1;
        }
        // ranks start+1 ..= end
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of the average ranks of `x` and `y`.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Ok(CorrelationResult {
            rho: Err(Undefined::TooFewPoints),
            n,
        });
    }
    let rx = rank_transform(x);
    let ry = rank_transform(y);
    // average ranks always sum to n(n+1)/2
    let mean = (n + 1) as f64 / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (dx, dy) = (a - mean, b - mean);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let rho = if sxx == 0.0 || syy == 0.0 {
        Err(Undefined::ConstantRanks)
    } else {
        Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
    };
    Ok(CorrelationResult { rho, n })
}

fn frequencies(metrics: &[WordMetrics]) -> Vec<f64> {
    metrics.iter().map(|m| m.frequency as f64).collect()
}

/// Spearman correlation between frequency and polysemy.
pub fn martins_law_test(metrics: &[WordMetrics]) -> CorrelationResult {
    let p: Vec<f64> = metrics.iter().map(|m| m.polysemy as f64).collect();
    spearman_rho(&frequencies(metrics), &p).expect("equal lengths")
}

/// Spearman correlation between frequency and specificity.
pub fn specificity_tradeoff_test(metrics: &[WordMetrics]) -> CorrelationResult {
    let s: Vec<f64> = metrics.iter().map(|m| m.specificity).collect();
    spearman_rho(&frequencies(metrics), &s).expect("equal lengths")
}

/// Log-log least squares of polysemy on frequency. Words with zero polysemy
/// are left out since their logarithm is undefined.
pub fn fit_martin_exponent(metrics: &[WordMetrics]) -> Result<PowerLawFit, Undefined> {
    let pairs: Vec<(usize, usize)> = metrics
        .iter()
        .filter(|m| m.polysemy >= 1 && m.frequency >= 1)
        .map(|m| (m.frequency, m.polysemy))
        .collect();
    fit_power_law(&pairs)
}

/// Ordinary least squares of `ln y` on `ln x` over positive integer pairs.
/// Pairs are sorted first, so the result does not depend on input order.
pub fn fit_power_law(pairs: &[(usize, usize)]) -> Result<PowerLawFit, Undefined> {
    let mut pairs = pairs.to_vec();
    pairs.sort_unstable();
    let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
    fit_log_log(&x, &y)
}

/// Ordinary least squares of `ln y` on `ln x`. Inputs must be positive.
pub fn fit_log_log(x: &[f64], y: &[f64]) -> Result<PowerLawFit, Undefined> {
    let n = x.len().min(y.len());
    if n < 2 {
        return Err(Undefined::TooFewPoints);
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Undefined::DegenerateDesign);
    }
    let xs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let constant_y = y.iter().all(|&v| v == y[0]);
    let beta = if constant_y { 0.0 } else { sxy / sxx };
    let log_intercept = my - beta * mx;
    let r_squared = if constant_y {
        1.0
    } else {
        let ss_res: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| {
                let r = y - (log_intercept + beta * x);
                r * r
            })
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(PowerLawFit {
        beta,
        log_intercept,
        n_points: n,
        r_squared,
    })
}
