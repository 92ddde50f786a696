//! ERM-based verification: the verifier checks that the prover's hypothesis
//! is almost empirically optimal on a sample it controls, optionally with
//! prover-supplied labels spot-checked against a few known ones.

use crate::boolfn::{ceil_count, EnumerableClass, RandomExampleOracle, TruthTable, UnlabeledSource};
use crate::error::{Error, Result};
use crate::prover::Prover;
use crate::rng::seeded;
use crate::verdict::{Counters, Verdict};
use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Verifier,
    Prover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub x: u64,
    pub y: i8,
    pub origin: Origin,
}

/// A finite class with its members materialized and a VC-dimension bound.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteHypothesisClass {
    n: usize,
    members: Vec<TruthTable>,
    pub vc_bound: f64,
}

impl FiniteHypothesisClass {
    /// `vc_bound` defaults to log₂|H|.
    pub fn new(n: usize, members: Vec<TruthTable>, vc_bound: Option<f64>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("empty hypothesis class".into()));
        }
        if let Some(m) = members.iter().find(|m| m.n() != n) {
            return Err(Error::ArityMismatch { expected: n, got: m.n() });
        }
        let vc_bound = vc_bound.unwrap_or((members.len() as f64).log2());
        Ok(FiniteHypothesisClass { n, members, vc_bound })
    }

    /// Materializes an enumerable class of at most `budget` members.
    pub fn from_class<C: EnumerableClass + ?Sized>(class: &C, budget: usize, vc_bound: Option<f64>) -> Result<Self> {
        if class.size() > budget {
            return Err(Error::ClassTooLarge { members: class.size() as u128, budget: budget as u128 });
        }
        Self::new(class.arity(), (0..class.size()).map(|i| class.member(i)).collect(), vc_bound)
    }

    pub fn members(&self) -> &[TruthTable] {
        &self.members
    }
}

impl EnumerableClass for FiniteHypothesisClass {
    fn arity(&self) -> usize {
        self.n
    }
    fn size(&self) -> usize {
        self.members.len()
    }
    fn member(&self, index: usize) -> TruthTable {
        self.members[index].clone()
    }
}

fn mistakes(h: &TruthTable, sample: &[LabeledSample]) -> usize {
    sample.iter().filter(|s| h.get(s.x) != s.y).count()
}

/// err_S(h), the fraction of samples h mislabels.
pub fn empirical_error(h: &TruthTable, sample: &[LabeledSample]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(mistakes(h, sample) as f64 / sample.len() as f64)
}

/// First member with least empirical error.
pub fn erm_argmin<C: EnumerableClass + ?Sized>(class: &C, sample: &[LabeledSample]) -> Result<(usize, f64)> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if class.size() == 0 {
        return Err(Error::InvalidParameter("empty hypothesis class".into()));
    }
    let mut best = (0, usize::MAX);
    for i in 0..class.size() {
        let k = mistakes(&class.member(i), sample);
        if k < best.1 {
            best = (i, k);
        }
    }
    Ok((best.0, best.1 as f64 / sample.len() as f64))
}

/// m = ceil(C/ε² · (vc + ln(1/δ))).
pub fn sample_size(vc_bound: f64, eps: f64, delta: f64, c: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps}, delta = {delta}")));
    }
    if !(c > 0.0) || vc_bound < 0.0 {
        return Err(Error::InvalidParameter("negative constant or VC bound".into()));
    }
    Ok(ceil_count(c / (eps * eps) * (vc_bound + (1.0 / delta).ln())))
}

/// Decides h ∈ L_S^ε, i.e. err_S(h) ≤ opt_S(H) + ε.
pub trait DelegationCheck {
    fn almost_optimal(&self, class: &dyn EnumerableClass, h: usize, sample: &[LabeledSample], eps: f64) -> bool;
}

/// Evaluates the predicate directly by an ERM scan.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactPredicate;

impl DelegationCheck for ExactPredicate {
    fn almost_optimal(&self, class: &dyn EnumerableClass, h: usize, sample: &[LabeledSample], eps: f64) -> bool {
        check_almost_optimal(class, h, sample, eps)
    }
}

pub fn check_almost_optimal<C: EnumerableClass + ?Sized>(class: &C, h: usize, sample: &[LabeledSample], eps: f64) -> bool {
    if h >= class.size() || sample.is_empty() {
        return false;
    }
    let Ok((_, opt)) = erm_argmin(class, sample) else { return false };
    let err = mistakes(&class.member(h), sample) as f64 / sample.len() as f64;
    err <= opt + eps + 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErmConfig {
    /// Constant C of the uniform-convergence sample size.
    pub c: f64,
}

impl Default for ErmConfig {
    fn default() -> Self {
        ErmConfig { c: 4.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErmTranscript {
    pub m: u64,
    /// Labels the verifier knows itself.
    pub q: u64,
    pub hypothesis: usize,
    pub empirical_error: Option<f64>,
    pub empirical_opt: Option<f64>,
    pub label_mismatches: u64,
    /// Seed of the point permutation; verifier-private.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation_seed: Option<u64>,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErmOutcome {
    pub verdict: Verdict<usize>,
    pub transcript: ErmTranscript,
    pub counters: Counters,
}

fn summary(class: &FiniteHypothesisClass, h: usize, sample: &[LabeledSample]) -> (Option<f64>, Option<f64>) {
    let err = (h < class.size()).then(|| empirical_error(&class.members[h], sample).ok()).flatten();
    (err, erm_argmin(class, sample).ok().map(|(_, e)| e))
}

/// Supervised protocol: m = sample_size(ε/2, δ) labeled examples, accept
/// iff the prover's hypothesis is ε/2-almost empirically optimal.
pub fn protocol_supervised(
    oracle: &mut RandomExampleOracle,
    prover: &mut Prover,
    class: &FiniteHypothesisClass,
    eps: f64,
    delta: f64,
    config: &ErmConfig,
    check: &dyn DelegationCheck,
) -> Result<ErmOutcome> {
    if oracle.n() != class.n {
        return Err(Error::ArityMismatch { expected: class.n, got: oracle.n() });
    }
    let m = sample_size(class.vc_bound, eps / 2.0, delta, config.c)?;
    let s0 = oracle.sample_count();
    let sample: Vec<LabeledSample> = (0..m)
        .map(|_| {
            let (x, y) = oracle.draw();
            LabeledSample { x, y, origin: Origin::Verifier }
        })
        .collect();
    let h = prover.erm_hypothesis(class, &sample);
    let accept = check.almost_optimal(class, h, &sample, eps / 2.0);
    let (empirical_error, empirical_opt) = summary(class, h, &sample);
    let verdict = if accept {
        Verdict::Accept(h)
    } else if h >= class.size() {
        Verdict::reject("hypothesis index outside the class")
    } else {
        Verdict::reject("hypothesis is not almost empirically optimal")
    };
    Ok(ErmOutcome {
        verdict,
        transcript: ErmTranscript {
            m,
            q: m,
            hypothesis: h,
            empirical_error,
            empirical_opt,
            label_mismatches: 0,
            permutation_seed: None,
            c: config.c,
        },
        counters: Counters { membership_queries: 0, random_examples: oracle.sample_count() - s0 },
    })
}

/// Labeled examples the semi-supervised verifier draws: ceil((8/ε)·ln(2/δ)).
pub fn labeled_count(eps: f64, delta: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps}, delta = {delta}")));
    }
    Ok(ceil_count(8.0 / eps * (2.0 / delta).ln()))
}

/// The verifier's first message of the semi-supervised protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiSupervisedRound {
    /// Permuted points, as shown to the prover.
    pub points: Vec<u64>,
    /// Known labels by position; verifier-private.
    pub known: Vec<Option<i8>>,
    pub permutation_seed: u64,
}

/// Draws q labeled and m−q unlabeled points and shuffles them together.
pub fn prepare_semi_supervised(
    oracle: &mut RandomExampleOracle,
    unlabeled: &mut UnlabeledSource,
    m: u64,
    q: u64,
    rng: &mut dyn RngCore,
) -> Result<SemiSupervisedRound> {
    if q > m {
        return Err(Error::Config(format!("q = {q} labeled points exceed m = {m}")));
    }
    let mut items: Vec<(u64, Option<i8>)> = (0..q).map(|_| oracle.draw()).map(|(x, y)| (x, Some(y))).collect();
    items.extend((q..m).map(|_| (unlabeled.draw(), None)));
    let permutation_seed = rng.next_u64();
    items.shuffle(&mut seeded(permutation_seed));
    let (points, known) = items.into_iter().unzip();
    Ok(SemiSupervisedRound { points, known, permutation_seed })
}

/// Semi-supervised protocol: the prover labels m permuted points, q of
/// which the verifier knows; any mismatch rejects, otherwise accept iff the
/// hypothesis is ε/4-almost optimal on the prover-labeled sample.
#[allow(clippy::too_many_arguments)]
pub fn protocol_semi_supervised(
    oracle: &mut RandomExampleOracle,
    unlabeled: &mut UnlabeledSource,
    prover: &mut Prover,
    class: &FiniteHypothesisClass,
    eps: f64,
    delta: f64,
    config: &ErmConfig,
    check: &dyn DelegationCheck,
    rng: &mut dyn RngCore,
) -> Result<ErmOutcome> {
    if !(delta > 0.0 && delta < 1.0 / 3.0) {
        return Err(Error::Config(format!("delta = {delta} must lie in (0, 1/3)")));
    }
    if oracle.n() != class.n {
        return Err(Error::ArityMismatch { expected: class.n, got: oracle.n() });
    }
    let m = sample_size(class.vc_bound, eps / 2.0, delta / 2.0, config.c)?;
    let q = labeled_count(eps, delta)?;
    let s0 = oracle.sample_count();
    let round = prepare_semi_supervised(oracle, unlabeled, m, q, rng)?;
    let labels = prover.label_points(&round.points);
    let mut transcript = ErmTranscript {
        m,
        q,
        hypothesis: class.size(),
        empirical_error: None,
        empirical_opt: None,
        label_mismatches: 0,
        permutation_seed: Some(round.permutation_seed),
        c: config.c,
    };
    let counters = Counters { membership_queries: 0, random_examples: oracle.sample_count() - s0 };
    if labels.len() != round.points.len() {
        return Ok(ErmOutcome { verdict: Verdict::reject("label count mismatch"), transcript, counters });
    }
    let sample: Vec<LabeledSample> = round
        .points
        .iter()
        .zip(&labels)
        .zip(&round.known)
        .map(|((&x, &y), k)| LabeledSample { x, y, origin: if k.is_some() { Origin::Verifier } else { Origin::Prover } })
        .collect();
    let h = prover.erm_hypothesis(class, &sample);
    transcript.hypothesis = h;
    (transcript.empirical_error, transcript.empirical_opt) = summary(class, h, &sample);
    transcript.label_mismatches =
        round.known.iter().zip(&labels).filter(|(k, &y)| k.is_some_and(|v| v != y)).count() as u64;
    let verdict = if transcript.label_mismatches > 0 {
        Verdict::reject(format!("{} known labels contradicted", transcript.label_mismatches))
    } else if check.almost_optimal(class, h, &sample, eps / 4.0) {
        Verdict::Accept(h)
    } else {
        Verdict::reject("hypothesis is not almost empirically optimal")
    };
    Ok(ErmOutcome { verdict, transcript, counters })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_size_reference_values() {
        assert_eq!(sample_size(0.0, 1.0, (-1f64).exp(), 1.0).unwrap(), 1);
        assert_eq!(sample_size(10.0, 0.1, 0.05, 4.0).unwrap(), 5199);
    }

    #[test]
    fn labeled_count_reference() {
        // 16·ln 20 = 47.93
        assert_eq!(labeled_count(0.5, 0.1).unwrap(), 48);
    }
}
