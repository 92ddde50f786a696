use super::design::SetDesign;
use super::generator::{restrict, Distinguisher};
use crate::boolfn::{q_cb, MembershipOracle, TruthTable, MAX_ARITY};
use crate::error::{Error, Result};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Repetition count and agreement-estimation budget; `None` means the
/// defaults 16·L² and q_cb(1/(8L), 1/(4·repetitions)).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WeakLearnerConfig {
    pub repetitions: Option<usize>,
    pub agreement_samples: Option<u64>,
}

impl WeakLearnerConfig {
    pub fn repetitions(&self, l: usize) -> usize {
        self.repetitions.unwrap_or(16 * l * l)
    }

    pub fn agreement_samples(&self, l: usize) -> Result<u64> {
        match self.agreement_samples {
            Some(s) => Ok(s),
            None => q_cb(1.0 / (8.0 * l as f64), 1.0 / (4.0 * self.repetitions(l) as f64)),
        }
    }
}

/// One hybrid predictor: pivot i, the prefix tables of g on every string
/// consistent with z outside S_i, and the random suffix y_i..y_L.
#[derive(Debug, Clone)]
pub struct HybridCandidate {
    pub pivot: usize,
    z: Vec<bool>,
    tables: Vec<HashMap<u64, bool>>,
    suffix: Vec<bool>,
}

impl HybridCandidate {
    pub fn draw(oracle: &mut MembershipOracle, design: &SetDesign, rng: &mut dyn RngCore) -> Self {
        let i = rng.gen_range(0..design.l);
        let z: Vec<bool> = (0..design.m).map(|_| rng.gen()).collect();
        let si = &design.sets[i];
        let mut tables = Vec::with_capacity(i);
        for sk in &design.sets[..i] {
            let free: Vec<usize> = sk.iter().filter(|e| si.binary_search(e).is_ok()).copied().collect();
            let mut zz = z.clone();
            let mut table = HashMap::with_capacity(1 << free.len());
            for a in 0..1u64 << free.len() {
                for (j, &e) in free.iter().enumerate() {
                    zz[e] = (a >> j) & 1 == 1;
                }
                let x = restrict(&zz, sk);
                table.insert(x, oracle.query(x) < 0);
            }
            tables.push(table);
        }
        let suffix = (i..design.l).map(|_| rng.gen()).collect();
        HybridCandidate { pivot: i, z, tables, suffix }
    }

    /// Predicted bit g(x): y_i if D accepts the hybrid string, else its complement.
    pub fn predict(&self, design: &SetDesign, d: &dyn Distinguisher, x: u64) -> Result<bool> {
        let si = &design.sets[self.pivot];
        let mut z = self.z.clone();
        for (j, &e) in si.iter().enumerate() {
            z[e] = (x >> j) & 1 == 1;
        }
        let mut y = Vec::with_capacity(design.l);
        for (k, sk) in design.sets[..self.pivot].iter().enumerate() {
            y.push(self.tables[k][&restrict(&z, sk)]);
        }
        y.extend_from_slice(&self.suffix);
        let yi = self.suffix[0];
        Ok(if d.distinguish(&y)? { yi } else { !yi })
    }

    pub fn materialize(&self, design: &SetDesign, d: &dyn Distinguisher) -> Result<TruthTable> {
        let n = design.n_block;
        let mut bits = Vec::with_capacity(1 << n);
        for x in 0..1u64 << n {
            bits.push(self.predict(design, d, x)?);
        }
        TruthTable::from_bits(n, |x| bits[x as usize])
    }
}

#[derive(Debug, Clone)]
pub struct WeakLearnerOutput {
    pub hypothesis: TruthTable,
    pub pivot: usize,
    pub candidate: usize,
    pub estimated_agreement: f64,
    pub repetitions: usize,
    pub samples_per_candidate: u64,
    pub estimates: Vec<f64>,
}

/// Draws the configured number of hybrid predictors, scores each on fresh
/// uniform membership queries and returns the best (first on ties).
pub fn reconstruct_weak_learner(
    oracle: &mut MembershipOracle,
    d: &dyn Distinguisher,
    design: &SetDesign,
    config: WeakLearnerConfig,
    rng: &mut dyn RngCore,
) -> Result<WeakLearnerOutput> {
    let n = design.n_block;
    if oracle.n() != n {
        return Err(Error::ArityMismatch { expected: n, got: oracle.n() });
    }
    if n > MAX_ARITY.min(16) {
        return Err(Error::InvalidParameter(format!("block size {n} too large to materialize hypotheses")));
    }
    let reps = config.repetitions(design.l);
    if reps == 0 {
        return Err(Error::Config("at least one repetition is required".into()));
    }
    let samples = config.agreement_samples(design.l)?;
    let mask = crate::boolfn::mask(n);
    let mut best: Option<(f64, usize, usize, TruthTable)> = None;
    let mut estimates = Vec::with_capacity(reps);
    for r in 0..reps {
        let cand = HybridCandidate::draw(oracle, design, rng);
        let h = cand.materialize(design, d)?;
        let mut agree = 0u64;
        for _ in 0..samples {
            let x = rng.next_u64() & mask;
            agree += (oracle.query(x) == h.get(x)) as u64;
        }
        let est = agree as f64 / samples.max(1) as f64;
        estimates.push(est);
        if best.as_ref().map_or(true, |b| est > b.0) {
            best = Some((est, r, cand.pivot, h));
        }
    }
    let (estimated_agreement, candidate, pivot, hypothesis) = best.expect("reps > 0");
    Ok(WeakLearnerOutput { hypothesis, pivot, candidate, estimated_agreement, repetitions: reps, samples_per_candidate: samples, estimates })
}

/// Exact fraction of inputs on which h and g agree.
pub fn exact_agreement(h: &TruthTable, g: &TruthTable) -> Result<f64> {
    Ok(1.0 - crate::boolfn::dist(h, g)?)
}
