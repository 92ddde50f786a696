use super::glstar::{gl_star_with, pool_size, CosetEstimates, GlStarBudget};
use crate::boolfn::{chi, q_cb, MembershipOracle, RandomExampleOracle};
use crate::error::{Error, Result};
use crate::f2::{
    sample_basis, FourthMomentGenerator, PlainGenerator, QueryGenerator, QueryPattern, QuerySet, RepeatGenerator,
    SubspaceBasis, UnionGenerator,
};
use crate::prover::Prover;
use crate::transform::MembershipProtocol;
use crate::verdict::{Counters, Verdict};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Accepted characters with |c̃| estimates, sorted by estimate descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopSet {
    #[serde(with = "crate::f2::hex_points")]
    pub characters: Vec<u64>,
    pub estimated_coeffs: Vec<f64>,
}

/// Optional overrides of the per-character sample count and the GL★ budget.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Protocol2Budget {
    pub coefficient_samples: Option<u64>,
    pub gl: GlStarBudget,
}

/// The interactive protocol for the top t Fourier characters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol2 {
    pub n: usize,
    pub t: usize,
    pub eps: f64,
    pub delta: f64,
    pub budget: Protocol2Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol2Transcript {
    #[serde(with = "crate::f2::hex_points")]
    pub proof: Vec<u64>,
    pub coefficient_estimates: Vec<f64>,
    /// Least |c̃| among the claimed characters.
    pub min_estimate: Option<f64>,
    pub threshold: Option<f64>,
    pub cosets: Option<CosetEstimates>,
    /// Coset disjoint from the claim whose ω̂ exceeded the threshold.
    pub violating_coset: Option<u64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol2Outcome {
    pub verdict: Verdict<TopSet>,
    pub transcript: Protocol2Transcript,
    pub counters: Counters,
}

impl Protocol2 {
    pub fn new(n: usize, t: usize, eps: f64, delta: f64) -> Result<Self> {
        crate::error::check_unit("eps", eps)?;
        crate::error::check_unit("delta", delta)?;
        if n == 0 || n > crate::boolfn::MAX_ARITY {
            return Err(Error::ArityTooLarge(n));
        }
        if t == 0 || t as u64 > 1u64 << n {
            return Err(Error::InvalidParameter(format!("t = {t} characters in F2^{n}")));
        }
        Ok(Protocol2 { n, t, eps, delta, budget: Protocol2Budget::default() })
    }

    pub fn with_budget(mut self, budget: Protocol2Budget) -> Self {
        self.budget = budget;
        self
    }

    /// Samples per claimed character: q_cb(ε/6, δ/2t).
    pub fn coefficient_samples(&self) -> Result<u64> {
        match self.budget.coefficient_samples {
            Some(m) => Ok(m),
            None => q_cb(self.eps / 6.0, self.delta / (2.0 * self.t as f64)),
        }
    }

    pub fn gl_eps(&self) -> f64 {
        self.eps / 6.0
    }

    pub fn gl_delta(&self) -> f64 {
        self.delta / 2.0
    }

    pub fn gl_samples(&self) -> Result<u64> {
        match self.budget.gl.samples {
            Some(m) => Ok(m),
            None => pool_size(self.t, self.gl_eps(), self.gl_delta()),
        }
    }

    pub fn gl_basis_size(&self) -> usize {
        self.budget
            .gl
            .basis_size
            .unwrap_or_else(|| super::basis_size(self.t, self.gl_eps(), self.gl_delta()))
            .min(self.n)
    }

    /// Runs the protocol with both oracles.
    pub fn run(
        &self,
        mq: &mut MembershipOracle,
        re: &mut RandomExampleOracle,
        prover: &mut Prover,
        rng: &mut dyn RngCore,
    ) -> Result<Protocol2Outcome> {
        if mq.n() != self.n || re.n() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: mq.n() });
        }
        let (mq0, re0) = (mq.query_count(), re.sample_count());
        let proof = prover.top_characters(self.t);
        let mut transcript = Protocol2Transcript {
            proof: proof.clone(),
            coefficient_estimates: vec![],
            min_estimate: None,
            threshold: None,
            cosets: None,
            violating_coset: None,
            notes: vec![],
        };
        let counters = |mq: &MembershipOracle, re: &RandomExampleOracle| Counters {
            membership_queries: mq.query_count() - mq0,
            random_examples: re.sample_count() - re0,
        };
        if let Err(reason) = self.check_proof(&proof) {
            return Ok(Protocol2Outcome { verdict: Verdict::reject(reason), transcript, counters: counters(mq, re) });
        }
        let m = self.coefficient_samples()?;
        let estimates: Vec<f64> = proof
            .iter()
            .map(|&g| {
                let sum: i64 = (0..m)
                    .map(|_| {
                        let (x, y) = re.draw();
                        (chi(g, x) * y) as i64
                    })
                    .sum();
                sum as f64 / m as f64
            })
            .collect();
        let gl = gl_star_with(mq, self.t, self.gl_eps(), self.gl_delta(), self.budget.gl, rng)?;
        transcript.notes.extend(gl.notes);
        let verdict = self.decide_from(&proof, &estimates, &gl.cosets, &mut transcript);
        transcript.coefficient_estimates = estimates;
        transcript.cosets = Some(gl.cosets);
        Ok(Protocol2Outcome { verdict, transcript, counters: counters(mq, re) })
    }

    fn check_proof(&self, proof: &[u64]) -> std::result::Result<(), String> {
        if proof.len() != self.t {
            return Err(format!("expected {} characters, received {}", self.t, proof.len()));
        }
        if proof.iter().any(|&g| g >> self.n != 0) {
            return Err("character outside F2^n".into());
        }
        if proof.iter().collect::<HashSet<_>>().len() != proof.len() {
            return Err("duplicate characters".into());
        }
        Ok(())
    }

    fn decide_from(
        &self,
        proof: &[u64],
        estimates: &[f64],
        cosets: &CosetEstimates,
        transcript: &mut Protocol2Transcript,
    ) -> Verdict<TopSet> {
        let min = estimates.iter().map(|c| c.abs()).fold(f64::INFINITY, f64::min);
        let threshold = min + 2.0 * self.eps / 3.0;
        transcript.min_estimate = Some(min);
        transcript.threshold = Some(threshold);
        let occupied: HashSet<u64> = proof.iter().map(|&g| cosets.basis.coset_of(g).bits).collect();
        let violating = cosets
            .ranked()
            .into_iter()
            .find(|a| !occupied.contains(a) && cosets.per_coset[*a as usize] > threshold);
        if let Some(a) = violating {
            transcript.violating_coset = Some(a);
            return Verdict::reject(format!(
                "coset {a} outside the claim has estimate {:.4} above {threshold:.4}",
                cosets.per_coset[a as usize]
            ));
        }
        let mut order: Vec<usize> = (0..proof.len()).collect();
        order.sort_by(|&i, &j| estimates[j].abs().partial_cmp(&estimates[i].abs()).unwrap().then(proof[i].cmp(&proof[j])));
        Verdict::Accept(TopSet {
            characters: order.iter().map(|&i| proof[i]).collect(),
            estimated_coeffs: order.iter().map(|&i| estimates[i].abs()).collect(),
        })
    }
}

/// Runs the top-characters protocol with the formula parameters.
pub fn verify_top_characters(
    mq: &mut MembershipOracle,
    re: &mut RandomExampleOracle,
    prover: &mut Prover,
    t: usize,
    eps: f64,
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<Protocol2Outcome> {
    Protocol2::new(mq.n(), t, eps, delta)?.run(mq, re, prover, rng)
}

impl MembershipProtocol for Protocol2 {
    type Proof = Vec<u64>;
    type Output = TopSet;

    fn name(&self) -> &'static str {
        "top-characters"
    }

    fn n(&self) -> usize {
        self.n
    }

    fn query_count(&self) -> Result<u64> {
        Ok(self.t as u64 * self.coefficient_samples()? + 4 * self.gl_samples()?)
    }

    /// t blocks of uniform points for the coefficients, then the GL★ pool
    /// as linear four-query patterns over a fresh basis.
    fn generator(&self, rng: &mut dyn RngCore) -> Result<Box<dyn QueryGenerator>> {
        let m = self.coefficient_samples()? as usize;
        let pool = self.gl_samples()? as usize;
        let basis = sample_basis(self.n, self.gl_basis_size(), rng)?;
        let mut parts: Vec<Box<dyn QueryGenerator>> = Vec::new();
        for _ in 0..self.t {
            if m > 0 {
                parts.push(Box::new(PlainGenerator { n: self.n, count: m }));
            }
        }
        if pool > 0 {
            parts.push(Box::new(RepeatGenerator::new(Box::new(FourthMomentGenerator::new(basis)), pool)));
        }
        Ok(Box::new(UnionGenerator::new(parts)?))
    }

    fn request_proof(&self, prover: &mut Prover) -> Vec<u64> {
        prover.top_characters(self.t)
    }

    fn decide(&self, proof: &Vec<u64>, queries: &QuerySet, answers: &[i8], _rng: &mut dyn RngCore) -> Verdict<TopSet> {
        if let Err(reason) = self.check_proof(proof) {
            return Verdict::reject(reason);
        }
        if answers.len() != queries.len() {
            return Verdict::reject("answer count does not match the query set");
        }
        let Some((estimates, cosets)) = self.read_answers(proof, queries, answers) else {
            return Verdict::reject("query set does not have the expected layout");
        };
        let mut transcript = Protocol2Transcript {
            proof: proof.clone(),
            coefficient_estimates: vec![],
            min_estimate: None,
            threshold: None,
            cosets: None,
            violating_coset: None,
            notes: vec![],
        };
        self.decide_from(proof, &estimates, &cosets, &mut transcript)
    }
}

impl Protocol2 {
    /// Recovers the coefficient estimates and coset estimates from labeled
    /// queries laid out by [`MembershipProtocol::generator`].
    fn read_answers(&self, proof: &[u64], queries: &QuerySet, answers: &[i8]) -> Option<(Vec<f64>, CosetEstimates)> {
        let QueryPattern::Union { segments } = &queries.pattern else { return None };
        let m = self.coefficient_samples().ok()? as usize;
        let blocks = if m > 0 { self.t } else { 0 };
        let mut estimates = vec![0.0; self.t];
        for (j, seg) in segments.iter().take(blocks).enumerate() {
            if seg.len != m || !matches!(seg.pattern, QueryPattern::Plain) {
                return None;
            }
            let range = seg.start..seg.start + seg.len;
            let sum: i64 =
                queries.points[range.clone()].iter().zip(&answers[range]).map(|(&x, &y)| (chi(proof[j], x) * y) as i64).sum();
            estimates[j] = sum as f64 / m as f64;
        }
        let s = self.gl_basis_size();
        let mut basis = None;
        let mut buckets = vec![0i64; 1 << s];
        let mut pool = 0u64;
        if let Some(seg) = segments.get(blocks) {
            let QueryPattern::Union { segments: inner } = &seg.pattern else { return None };
            for part in inner {
                let QueryPattern::Linear { pattern, .. } = &part.pattern else { return None };
                if part.len != 4 || pattern.coeffs.len() != 4 {
                    return None;
                }
                basis.get_or_insert_with(|| pattern.b_columns.clone());
                let at = seg.start + part.start;
                let p: i8 = answers[at..at + 4].iter().product();
                buckets[pattern.coeffs[3].beta as usize] += p as i64;
                pool += 1;
            }
        }
        let basis = match basis {
            Some(v) => SubspaceBasis::new(self.n, v).ok()?,
            None => SubspaceBasis::standard(self.n, s).ok()?,
        };
        let mut sums: Vec<f64> = buckets.into_iter().map(|c| c as f64).collect();
        crate::boolfn::walsh_hadamard(&mut sums);
        let scale = if pool == 0 { 0.0 } else { 1.0 / pool as f64 };
        let per_coset = sums.iter().map(|v| (v * scale).max(0.0).powf(0.25)).collect();
        Some((estimates, CosetEstimates { basis, per_coset }))
    }
}

/// Exact check that `set` is ε-top for a spectrum (brute force).
pub fn is_eps_top(f: &crate::boolfn::TruthTable, set: &[u64], eps: f64) -> bool {
    crate::boolfn::fwht(f).is_eps_top(set, eps)
}
