//! Small statistics helpers used to compare sampled and exact distributions.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// `½ Σ |p_i - q_i|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidArgument(format!(
            "distributions have {} and {} entries",
            p.len(),
            q.len()
        )));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Counts divided by their total.
pub fn empirical(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&k| k as f64 / total.max(1) as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `counts` against outcome `probabilities`.
/// Cells with zero expected count are dropped; a hit in one of them makes
/// the statistic infinite.
pub fn chi_square_gof(counts: &[u64], probabilities: &[f64]) -> Result<ChiSquare> {
    if counts.len() != probabilities.len() {
        return Err(Error::InvalidArgument(format!(
            "{} counts against {} probabilities",
            counts.len(),
            probabilities.len()
        )));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::InvalidArgument("no observations".into()));
    }
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&k, &p) in counts.iter().zip(probabilities) {
        let expected = p * n as f64;
        if expected <= 0.0 {
            if k > 0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        cells += 1;
        statistic += (k as f64 - expected).powi(2) / expected;
    }
    let dof = cells.saturating_sub(1);
    let p_value = if statistic.is_infinite() {
        0.0
    } else if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        dist.sf(statistic)
    };
    Ok(ChiSquare { statistic, dof, p_value })
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("wilson interval needs n > 0".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("{k} successes out of {n} trials")));
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Ok(((centre - half).max(0.0), (centre + half).min(1.0)))
}
