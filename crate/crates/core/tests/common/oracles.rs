//! Brute-force reference implementations. These deliberately share no code with the
//! library routes they check.
#![allow(dead_code)]

/// Pearson via raw sums: (n Σxy − Σx Σy) / sqrt((n Σx² − (Σx)²)(n Σy² − (Σy)²)).
pub fn pearson_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    let vx = n * sxx - sx * sx;
    let vy = n * syy - sy * sy;
    let constant = |v: &[f64]| v.iter().all(|a| *a == v[0]);
    if constant(x) || constant(y) {
        return None;
    }
    Some((n * sxy - sx * sy) / (vx * vy).sqrt())
}

/// Rank of each element: 1 + #smaller + (#equal − 1) / 2, by counting.
pub fn rank_oracle(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|a| {
            let smaller = v.iter().filter(|b| *b < a).count() as f64;
            let equal = v.iter().filter(|b| *b == a).count() as f64;
            1.0 + smaller + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn spearman_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson_oracle(&rank_oracle(x), &rank_oracle(y))
}

/// Tau-b by enumerating all pairs: (P − Q) / sqrt((P + Q + T)(P + Q + U)), T ties only
/// in x, U ties only in y.
pub fn kendall_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mut p, mut q, mut t, mut u) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 && dy == 0.0 {
                continue;
            } else if dx == 0.0 {
                t += 1;
            } else if dy == 0.0 {
                u += 1;
            } else if (dx > 0.0) == (dy > 0.0) {
                p += 1;
            } else {
                q += 1;
            }
        }
    }
    let denom = (((p + q + t) * (p + q + u)) as f64).sqrt();
    if denom == 0.0 {
        return None;
    }
    Some((p - q) as f64 / denom)
}

/// Lowercase, drop non-alphanumerics, split on whitespace.
pub fn tokens_oracle(s: &str) -> Vec<String> {
    s.to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect::<String>()
        .split_whitespace()
        .map(String::from)
        .collect()
}

/// Clipped n-gram overlap by greedy matching with used-flags.
pub fn overlap_oracle(a: &str, b: &str, n: usize) -> usize {
    let (ta, tb) = (tokens_oracle(a), tokens_oracle(b));
    if ta.len() < n || tb.len() < n {
        return 0;
    }
    let ga: Vec<&[String]> = ta.windows(n).collect();
    let gb: Vec<&[String]> = tb.windows(n).collect();
    let mut used = vec![false; gb.len()];
    let mut count = 0;
    for g in ga {
        if let Some(j) = (0..gb.len()).find(|&j| !used[j] && gb[j] == g) {
            used[j] = true;
            count += 1;
        }
    }
    count
}
