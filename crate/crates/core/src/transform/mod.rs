//! Compiling a proof-only membership-query verifier into one that only sees
//! random labeled examples: the prover answers every query, and a fresh
//! example hidden in each query set spot-checks the answers.

use crate::boolfn::{ceil_count, RandomExampleOracle};
use crate::error::{Error, Result};
use crate::f2::{QueryGenerator, QuerySet};
use crate::prover::Prover;
use crate::rng::stream;
use crate::verdict::{Counters, Verdict};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;

/// A verifier whose only interaction is one prover message followed by
/// non-adaptive membership queries from an embeddable distribution.
pub trait MembershipProtocol {
    type Proof: Serialize + Clone;
    type Output: Clone;

    fn name(&self) -> &'static str;
    fn n(&self) -> usize;

    fn is_proof_only(&self) -> bool {
        true
    }

    /// Number of membership queries q of one run.
    fn query_count(&self) -> Result<u64>;

    /// The query distribution of one run. Verifier-private choices that
    /// parametrize it (such as a random basis) are drawn here.
    fn generator(&self, rng: &mut dyn RngCore) -> Result<Box<dyn QueryGenerator>>;

    fn request_proof(&self, prover: &mut Prover) -> Self::Proof;

    /// The base verifier's decision given the labeled queries.
    fn decide(&self, proof: &Self::Proof, queries: &QuerySet, answers: &[i8], rng: &mut dyn RngCore) -> Verdict<Self::Output>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformOptions {
    /// Iterations per query and per ln(1/δ).
    pub iteration_constant: f64,
    /// Stop once the verdict is settled.
    pub early_exit: bool,
    pub record_iterations: bool,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions { iteration_constant: 200.0, early_exit: true, record_iterations: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord<O> {
    pub index: u64,
    pub query_set: QuerySet,
    pub answers: Vec<i8>,
    pub check_passed: bool,
    /// Base verifier's decision; absent when the spot check failed.
    pub simulated: Option<Verdict<O>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformOutcome<O> {
    pub verdict: Verdict<O>,
    pub iterations_planned: u64,
    pub iterations_run: u64,
    pub failed_checks: u64,
    pub rejecting_iterations: u64,
    pub accepted_iteration: Option<u64>,
    pub proof_digest: String,
    pub counters: Counters,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<IterationRecord<O>>,
}

/// t = ceil(c·q·ln(1/δ)).
pub fn iteration_count(q: u64, delta: f64, constant: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0 / 3.0) {
        return Err(Error::Config(format!("delta = {delta} must lie in (0, 1/3)")));
    }
    if !(constant > 0.0) {
        return Err(Error::Config("iteration constant must be positive".into()));
    }
    Ok(ceil_count(constant * q as f64 * (1.0 / delta).ln()))
}

fn digest<T: Serialize>(proof: &T) -> Result<String> {
    let bytes = serde_json::to_vec(proof).map_err(|e| Error::Encoding(e.to_string()))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Runs `base` using only random examples from `oracle`.
pub fn run_transformed<P: MembershipProtocol>(
    base: &P,
    prover: &mut Prover,
    oracle: &mut RandomExampleOracle,
    delta: f64,
    options: &TransformOptions,
    rng: &mut dyn RngCore,
) -> Result<TransformOutcome<P::Output>> {
    if !base.is_proof_only() {
        return Err(Error::Config(format!("{} is not a proof-only protocol", base.name())));
    }
    if oracle.n() != base.n() {
        return Err(Error::ArityMismatch { expected: base.n(), got: oracle.n() });
    }
    let q = base.query_count()?;
    if q == 0 {
        return Err(Error::Config("base protocol makes no queries".into()));
    }
    let t = iteration_count(q, delta, options.iteration_constant)?;
    let samples0 = oracle.sample_count();
    let examples: Vec<(u64, i8)> = (0..t).map(|_| oracle.draw()).collect();

    let proof = base.request_proof(prover);
    let proof_digest = digest(&proof)?;
    let master = rng.next_u64();

    let mut out = TransformOutcome {
        verdict: Verdict::reject("no iterations"),
        iterations_planned: t,
        iterations_run: 0,
        failed_checks: 0,
        rejecting_iterations: 0,
        accepted_iteration: None,
        proof_digest: proof_digest.clone(),
        counters: Counters::default(),
        records: Vec::new(),
    };
    let mut first_output = None;
    for (i, &(x, y)) in examples.iter().enumerate() {
        let i = i as u64;
        let mut r = stream(master, i);
        let generator = base.generator(&mut r)?;
        let qs = generator.embed(x, &mut r);
        let j = qs.embedded_index.ok_or_else(|| Error::Config("generator did not embed the example".into()))?;
        let answers = prover.label_queries(i, &qs.prover_view());
        let check_passed = answers.len() == qs.len() && answers[j] == y;
        out.iterations_run += 1;
        let simulated = if check_passed {
            let v = base.decide(&proof, &qs, &answers, &mut r);
            match &v {
                Verdict::Accept(o) => {
                    if first_output.is_none() {
                        first_output = Some(o.clone());
                        out.accepted_iteration = Some(i);
                    }
                }
                Verdict::Reject { .. } => out.rejecting_iterations += 1,
            }
            Some(v)
        } else {
            out.failed_checks += 1;
            None
        };
        if options.record_iterations {
            out.records.push(IterationRecord { index: i, query_set: qs, answers, check_passed, simulated });
        }
        if options.early_exit && (out.failed_checks > 0 || 2 * out.rejecting_iterations > t) {
            break;
        }
    }
    debug_assert_eq!(digest(&proof)?, proof_digest);

    out.counters = Counters { membership_queries: 0, random_examples: oracle.sample_count() - samples0 };
    out.verdict = if out.failed_checks > 0 {
        Verdict::reject(format!("{} spot checks failed", out.failed_checks))
    } else if 2 * out.rejecting_iterations > t {
        Verdict::reject(format!("{} of {t} simulated runs rejected", out.rejecting_iterations))
    } else {
        match first_output {
            Some(o) => Verdict::Accept(o),
            None => Verdict::reject("no simulated run accepted"),
        }
    };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub query_count: usize,
    pub trials: u64,
    pub hits: u64,
    pub hit_rate: f64,
    /// 1/Q plus four standard deviations.
    pub bound: f64,
}

impl AdvantageReport {
    pub fn pass(&self) -> bool {
        self.hit_rate <= self.bound
    }
}

/// Trains a maximum-likelihood guesser of the embedded position on `trials`
/// embedded query sets, then measures its hit rate on `trials` fresh ones.
/// Unseen sets fall back to the most frequent training position.
pub fn adversary_index_advantage(generator: &dyn QueryGenerator, trials: u64, rng: &mut dyn RngCore) -> AdvantageReport {
    let q = generator.query_count();
    let mask = crate::boolfn::mask(generator.n());
    let mut by_set: HashMap<Vec<u64>, Vec<u64>> = HashMap::new();
    let mut overall = vec![0u64; q];
    for _ in 0..trials {
        let w = rng.next_u64() & mask;
        let qs = generator.embed(w, rng);
        let j = qs.embedded_index.expect("embedded");
        overall[j] += 1;
        by_set.entry(qs.points).or_insert_with(|| vec![0; q])[j] += 1;
    }
    let argmax = |c: &[u64]| c.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))).map_or(0, |(i, _)| i);
    let fallback = argmax(&overall);
    let mut hits = 0;
    for _ in 0..trials {
        let w = rng.next_u64() & mask;
        let qs = generator.embed(w, rng);
        let guess = by_set.get(&qs.points).map_or(fallback, |c| argmax(c));
        if Some(guess) == qs.embedded_index {
            hits += 1;
        }
    }
    let p = 1.0 / q as f64;
    AdvantageReport {
        query_count: q,
        trials,
        hits,
        hit_rate: if trials == 0 { 0.0 } else { hits as f64 / trials as f64 },
        bound: crate::stats::four_sigma_upper(p, trials),
    }
}
