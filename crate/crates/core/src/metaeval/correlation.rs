//! Product-moment, rank and tau-b correlation.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("length mismatch: {x} vs {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 2 observations, got {0}")]
    TooShort(usize),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("undefined: {0}")]
    Undefined(String),
}

/// A correlation measure usable at sample and dataset level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Spearman,
    Pearson,
    Kendall,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Spearman, Measure::Pearson, Measure::Kendall];

    pub fn apply(self, x: &[f64], y: &[f64]) -> Result<f64, CorrelationError> {
        match self {
            Measure::Spearman => spearman(x, y),
            Measure::Pearson => pearson(x, y),
            Measure::Kendall => kendall(x, y),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Measure::Spearman => "rho",
            Measure::Pearson => "r",
            Measure::Kendall => "tau",
        }
    }
}

fn check(x: &[f64], y: &[f64]) -> Result<(), CorrelationError> {
    if x.len() != y.len() {
        return Err(CorrelationError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < 2 {
        return Err(CorrelationError::TooShort(x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(CorrelationError::NonFinite);
    }
    Ok(())
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, CorrelationError> {
    check(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(CorrelationError::Undefined("constant input vector".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties sharing the average of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let values: Vec<f64> = values.iter().map(|&v| v + 0.0).collect();
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, CorrelationError> {
    check(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

fn tie_pairs(sorted: &[f64]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Merge sort that returns the number of inversions (pairs with `v[i] > v[j]`, `i < j`).
fn sort_counting_swaps(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_counting_swaps(&mut v[..mid], buf) + sort_counting_swaps(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf.push(v[j]);
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Kendall tau-b in `O(n log n)` (Knight's algorithm).
pub fn kendall(x: &[f64], y: &[f64]) -> Result<f64, CorrelationError> {
    check(x, y)?;
    // `+ 0.0` folds -0.0 into 0.0 so total_cmp agrees with ==
    let x: Vec<f64> = x.iter().map(|&v| v + 0.0).collect();
    let y: Vec<f64> = y.iter().map(|&v| v + 0.0).collect();
    let n = x.len() as u64;
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| match x[a].total_cmp(&x[b]) {
        Ordering::Equal => y[a].total_cmp(&y[b]),
        o => o,
    });
    let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();

    let n0 = n * (n - 1) / 2;
    let x_ties = tie_pairs(&xs);
    let mut joint_ties = 0u64;
    let mut run = 1u64;
    for k in 1..xs.len() {
        if xs[k] == xs[k - 1] && ys[k] == ys[k - 1] {
            run += 1;
        } else {
            joint_ties += run * (run - 1) / 2;
            run = 1;
        }
    }
    joint_ties += run * (run - 1) / 2;

    let swaps = sort_counting_swaps(&mut ys, &mut Vec::with_capacity(x.len()));
    let y_ties = tie_pairs(&ys);

    let denom_x = n0 - x_ties;
    let denom_y = n0 - y_ties;
    if denom_x == 0 || denom_y == 0 {
        return Err(CorrelationError::Undefined("every pair is tied in one input".into()));
    }
    let numer = n0 as i128 - x_ties as i128 - y_ties as i128 + joint_ties as i128 - 2 * swaps as i128;
    let tau = numer as f64 / ((denom_x as f64) * (denom_y as f64)).sqrt();
    Ok(tau.clamp(-1.0, 1.0))
}
