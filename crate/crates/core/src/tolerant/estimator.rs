use super::tester::{StubTester, ToleranceWindow};
use crate::boolfn::{ceil_count, MembershipOracle};
use crate::error::{check_unit, Result};
use rand::RngCore;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Constant c in R = ceil(c·(ln ln(1/ε) + ln(1/δ)) + c).
    pub majority_constant: f64,
    /// Overrides R.
    pub repetitions: Option<usize>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { majority_constant: 18.0, repetitions: None }
    }
}

impl EstimatorConfig {
    /// Tester runs per search step; ln ln(1/ε) is taken as 0 for ε ≥ 1/e.
    pub fn repetitions(&self, eps: f64, delta: f64) -> usize {
        self.repetitions.unwrap_or_else(|| {
            let c = self.majority_constant;
            ceil_count(c * ((1.0 / eps).ln().ln().max(0.0) + (1.0 / delta).ln()) + c) as usize
        })
    }
}

/// Binary search steps: ceil(log₂(1/ε)).
pub fn search_steps(eps: f64) -> usize {
    ceil_count((1.0 / eps).log2()) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStep {
    pub lo: f64,
    pub hi: f64,
    pub window: ToleranceWindow,
    pub accepts: usize,
    pub repetitions: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub estimate: f64,
    pub trace: Vec<SearchStep>,
    pub tests: u64,
}

/// Binary search on [0, 1] for dist(f, C): step j tests the window
/// (d_m + ε/2, d_m − ε/2) around the midpoint `repetitions` times and moves
/// down on a strict majority of accepts. Returns the final midpoint.
pub fn binary_search(
    eps: f64,
    repetitions: usize,
    mut test: impl FnMut(ToleranceWindow) -> Result<bool>,
) -> Result<DistanceEstimate> {
    check_unit("eps", eps)?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut trace = Vec::new();
    let mut tests = 0;
    for _ in 0..search_steps(eps) {
        let mid = (lo + hi) / 2.0;
        let window = ToleranceWindow::around(mid, eps / 2.0)?;
        let mut accepts = 0;
        for _ in 0..repetitions {
            accepts += test(window)? as usize;
        }
        tests += repetitions as u64;
        let accepted = 2 * accepts > repetitions;
        trace.push(SearchStep { lo, hi, window, accepts, repetitions, accepted });
        if accepted {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(DistanceEstimate { estimate: (lo + hi) / 2.0, trace, tests })
}

/// Estimate of dist(f, C) within ε with probability 1 − δ.
pub fn distance_estimate(
    oracle: &mut MembershipOracle,
    tester: &StubTester,
    eps: f64,
    delta: f64,
    config: &EstimatorConfig,
    rng: &mut dyn RngCore,
) -> Result<DistanceEstimate> {
    check_unit("delta", delta)?;
    binary_search(eps, config.repetitions(eps, delta), |w| tester.test(oracle, w, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_count() {
        // 18·(ln ln 20 + ln 10) + 18 = 79.2
        assert_eq!(EstimatorConfig::default().repetitions(0.05, 0.1), 80);
        assert_eq!(search_steps(0.05), 5);
        assert_eq!(search_steps(0.5), 1);
        assert_eq!(search_steps(0.25), 2);
    }
}
