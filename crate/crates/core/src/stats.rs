//! Frequency and chi-square checks at a 4σ threshold.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::hash::Hash;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub threshold: f64,
}

impl ChiSquare {
    fn new(statistic: f64, df: usize) -> Self {
        ChiSquare { statistic, df, threshold: four_sigma_threshold(df) }
    }

    pub fn pass(&self) -> bool {
        self.statistic <= self.threshold
    }
}

/// Mean plus four standard deviations of a chi-square variable with `df` degrees of freedom.
pub fn four_sigma_threshold(df: usize) -> f64 {
    let df = df as f64;
    df + 4.0 * (2.0 * df).sqrt()
}

/// Goodness of fit against `probs`. Observations in a zero-probability bin
/// make the statistic infinite.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> ChiSquare {
    assert_eq!(counts.len(), probs.len());
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&c, &p) in counts.iter().zip(probs) {
        if p <= 0.0 {
            if c > 0 {
                stat = f64::INFINITY;
            }
            continue;
        }
        bins += 1;
        let e = p * total as f64;
        let d = c as f64 - e;
        stat += d * d / e;
    }
    ChiSquare::new(stat, bins.saturating_sub(1))
}

pub fn chi_square_uniform(counts: &[u64]) -> ChiSquare {
    let p = 1.0 / counts.len() as f64;
    chi_square_gof(counts, &vec![p; counts.len()])
}

/// Two-sample chi-square over aligned cells; empty cells are skipped.
pub fn two_sample(a: &[u64], b: &[u64]) -> ChiSquare {
    assert_eq!(a.len(), b.len());
    two_sample_iter(a.iter().copied().zip(b.iter().copied()))
}

pub fn two_sample_maps<K: Eq + Hash>(a: &HashMap<K, u64>, b: &HashMap<K, u64>) -> ChiSquare {
    let cells = a
        .iter()
        .map(|(k, &x)| (x, b.get(k).copied().unwrap_or(0)))
        .chain(b.iter().filter(|(k, _)| !a.contains_key(*k)).map(|(_, &y)| (0, y)));
    two_sample_iter(cells)
}

fn two_sample_iter(cells: impl Iterator<Item = (u64, u64)> + Clone) -> ChiSquare {
    let (n1, n2) = cells.clone().fold((0u64, 0u64), |(s, t), (x, y)| (s + x, t + y));
    if n1 == 0 || n2 == 0 {
        return ChiSquare::new(0.0, 0);
    }
    let k1 = (n2 as f64 / n1 as f64).sqrt();
    let k2 = (n1 as f64 / n2 as f64).sqrt();
    let mut stat = 0.0;
    let mut used = 0usize;
    for (x, y) in cells {
        if x + y == 0 {
            continue;
        }
        used += 1;
        let d = k1 * x as f64 - k2 * y as f64;
        stat += d * d / (x + y) as f64;
    }
    ChiSquare::new(stat, used.saturating_sub(1))
}

/// `hits` out of `trials` is within 4σ of the rate `p`.
pub fn proportion_within(hits: u64, trials: u64, p: f64) -> bool {
    let n = trials as f64;
    let sd = (n * p * (1.0 - p)).sqrt();
    (hits as f64 - n * p).abs() <= 4.0 * sd + 1e-9
}

/// Upper 4σ bound on an empirical rate whose true value is at most `p`.
pub fn four_sigma_upper(p: f64, trials: u64) -> f64 {
    p + 4.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gof_is_zero_on_exact_counts() {
        let c = chi_square_gof(&[25, 25, 50], &[0.25, 0.25, 0.5]);
        assert!(c.statistic.abs() < 1e-12);
        assert_eq!(c.df, 2);
        assert!(c.pass());
    }

    #[test]
    fn zero_probability_bin_with_mass_fails() {
        let c = chi_square_gof(&[10, 1], &[1.0, 0.0]);
        assert!(!c.pass());
    }

    #[test]
    fn two_sample_identical_is_zero() {
        let c = two_sample(&[3, 4, 0, 9], &[3, 4, 0, 9]);
        assert!(c.statistic.abs() < 1e-12);
        assert_eq!(c.df, 2);
    }

    #[test]
    fn threshold_formula() {
        assert!((four_sigma_threshold(8) - 24.0).abs() < 1e-12);
    }
}
