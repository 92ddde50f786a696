use super::estimator::{binary_search, search_steps, DistanceEstimate, EstimatorConfig};
use super::tester::StubTester;
use crate::boolfn::{q_cb, EnumerableClass, MembershipOracle, RandomExampleOracle, TruthTable};
use crate::error::{check_unit, Error, Result};
use crate::f2::{PlainGenerator, QueryGenerator, QueryPattern, QuerySet, RepeatGenerator, UnionGenerator};
use crate::prover::Prover;
use crate::transform::{run_transformed, MembershipProtocol, TransformOptions, TransformOutcome};
use crate::verdict::{Counters, Verdict};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Overrides of the sample count for dist(f, h) and of the estimator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimatorVerifierBudget {
    pub hypothesis_samples: Option<u64>,
    pub estimator: Option<EstimatorConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorTranscript {
    pub hypothesis: usize,
    pub hypothesis_distance: Option<f64>,
    pub class_distance: Option<DistanceEstimate>,
    pub hypothesis_samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOutcome {
    pub verdict: Verdict<usize>,
    pub transcript: EstimatorTranscript,
    pub counters: Counters,
}

/// PAC-verification through a distance estimator: accept the prover's h iff
/// the estimates of dist(f, h) and dist(f, C) are within 2ε/3.
pub struct EstimatorVerifier {
    class: Arc<dyn EnumerableClass + Send + Sync>,
    tester: StubTester,
    pub eps: f64,
    pub delta: f64,
    pub budget: EstimatorVerifierBudget,
}

impl EstimatorVerifier {
    /// `target` only feeds the exact-distance tester.
    pub fn new(class: Arc<dyn EnumerableClass + Send + Sync>, target: &TruthTable, eps: f64, delta: f64) -> Result<Self> {
        check_unit("eps", eps)?;
        check_unit("delta", delta)?;
        let tester = StubTester::new(target, class.as_ref())?;
        Ok(EstimatorVerifier { class, tester, eps, delta, budget: EstimatorVerifierBudget::default() })
    }

    pub fn with_budget(mut self, budget: EstimatorVerifierBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_tester(mut self, tester: StubTester) -> Self {
        self.tester = tester;
        self
    }

    pub fn tester(&self) -> &StubTester {
        &self.tester
    }

    /// q_cb(ε/6, δ/2).
    pub fn hypothesis_samples(&self) -> Result<u64> {
        match self.budget.hypothesis_samples {
            Some(m) => Ok(m),
            None => q_cb(self.eps / 6.0, self.delta / 2.0),
        }
    }

    fn estimator(&self) -> EstimatorConfig {
        self.budget.estimator.unwrap_or_default()
    }

    pub fn tests_per_run(&self) -> usize {
        search_steps(self.eps / 6.0) * self.estimator().repetitions(self.eps / 6.0, self.delta / 2.0)
    }

    fn member(&self, h: usize) -> Option<TruthTable> {
        self.class.contains_index(h).then(|| self.class.member(h))
    }

    fn compare(&self, d_h: f64, d_class: f64) -> bool {
        (d_h - d_class).abs() <= 2.0 * self.eps / 3.0 + 1e-12
    }

    pub fn run(
        &self,
        mq: &mut MembershipOracle,
        re: &mut RandomExampleOracle,
        prover: &mut Prover,
        rng: &mut dyn RngCore,
    ) -> Result<EstimatorOutcome> {
        let (mq0, re0) = (mq.query_count(), re.sample_count());
        let h = prover.hypothesis(self.class.as_ref());
        let m = self.hypothesis_samples()?;
        let mut transcript =
            EstimatorTranscript { hypothesis: h, hypothesis_distance: None, class_distance: None, hypothesis_samples: m };
        let Some(table) = self.member(h) else {
            return Ok(EstimatorOutcome {
                verdict: Verdict::reject("hypothesis index outside the class"),
                transcript,
                counters: Counters::default(),
            });
        };
        let wrong = (0..m)
            .filter(|_| {
                let (x, y) = re.draw();
                table.get(x) != y
            })
            .count();
        let d_h = wrong as f64 / m.max(1) as f64;
        let config = self.estimator();
        let (e, d) = (self.eps / 6.0, self.delta / 2.0);
        let est = binary_search(e, config.repetitions(e, d), |w| self.tester.test(mq, w, rng))?;
        let accept = self.compare(d_h, est.estimate);
        let verdict = if accept {
            Verdict::Accept(h)
        } else {
            Verdict::reject(format!("|{d_h:.4} − {:.4}| exceeds 2ε/3", est.estimate))
        };
        transcript.hypothesis_distance = Some(d_h);
        transcript.class_distance = Some(est);
        let counters =
            Counters { membership_queries: mq.query_count() - mq0, random_examples: re.sample_count() - re0 };
        Ok(EstimatorOutcome { verdict, transcript, counters })
    }
}

/// Transform 1 with the exact-distance tester over `class`.
pub fn verify_via_estimator(
    mq: &mut MembershipOracle,
    re: &mut RandomExampleOracle,
    prover: &mut Prover,
    class: Arc<dyn EnumerableClass + Send + Sync>,
    eps: f64,
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<EstimatorOutcome> {
    let target = Arc::clone(mq.table());
    EstimatorVerifier::new(class, &target, eps, delta)?.run(mq, re, prover, rng)
}

impl MembershipProtocol for EstimatorVerifier {
    type Proof = usize;
    type Output = usize;

    fn name(&self) -> &'static str {
        "distance-estimator"
    }

    fn n(&self) -> usize {
        self.class.arity()
    }

    fn query_count(&self) -> Result<u64> {
        Ok(self.hypothesis_samples()? + (self.tests_per_run() * self.tester.queries.count()) as u64)
    }

    /// Uniform points for dist(f, h), then every tester run's queries.
    fn generator(&self, _rng: &mut dyn RngCore) -> Result<Box<dyn QueryGenerator>> {
        let n = self.n();
        let mut parts: Vec<Box<dyn QueryGenerator>> = Vec::new();
        let m = self.hypothesis_samples()? as usize;
        if m > 0 {
            parts.push(Box::new(PlainGenerator { n, count: m }));
        }
        let tests = self.tests_per_run();
        if tests > 0 && self.tester.queries.count() > 0 {
            parts.push(Box::new(RepeatGenerator::new(self.tester.queries.generator(n)?, tests)));
        }
        if parts.is_empty() {
            return Err(Error::Config("verifier makes no queries".into()));
        }
        Ok(Box::new(UnionGenerator::new(parts)?))
    }

    fn request_proof(&self, prover: &mut Prover) -> usize {
        prover.hypothesis(self.class.as_ref())
    }

    fn decide(&self, proof: &usize, queries: &QuerySet, answers: &[i8], rng: &mut dyn RngCore) -> Verdict<usize> {
        let Some(table) = self.member(*proof) else {
            return Verdict::reject("hypothesis index outside the class");
        };
        let Ok(m) = self.hypothesis_samples() else { return Verdict::reject("invalid parameters") };
        let m = m as usize;
        let QueryPattern::Union { segments } = &queries.pattern else {
            return Verdict::reject("query set does not have the expected layout");
        };
        if m > 0 && (segments.first().map(|s| (s.start, s.len)) != Some((0, m)) || answers.len() < m) {
            return Verdict::reject("query set does not have the expected layout");
        }
        let wrong = queries.points[..m].iter().zip(&answers[..m]).filter(|(&x, &y)| table.get(x) != y).count();
        let d_h = wrong as f64 / m.max(1) as f64;
        let config = self.estimator();
        let (e, d) = (self.eps / 6.0, self.delta / 2.0);
        let Ok(est) = binary_search(e, config.repetitions(e, d), |w| Ok(self.tester.decide(w, rng))) else {
            return Verdict::reject("invalid parameters");
        };
        if self.compare(d_h, est.estimate) {
            Verdict::Accept(*proof)
        } else {
            Verdict::reject("estimates disagree")
        }
    }
}

/// The estimator verifier for k-juntas compiled to random examples only.
#[allow(clippy::too_many_arguments)]
pub fn verify_junta_random_examples(
    re: &mut RandomExampleOracle,
    prover: &mut Prover,
    class: Arc<dyn EnumerableClass + Send + Sync>,
    eps: f64,
    delta: f64,
    budget: EstimatorVerifierBudget,
    options: &TransformOptions,
    rng: &mut dyn RngCore,
) -> Result<TransformOutcome<usize>> {
    let target = Arc::clone(re.table());
    let base = EstimatorVerifier::new(class, &target, eps, delta)?.with_budget(budget);
    run_transformed(&base, prover, re, delta, options, rng)
}
