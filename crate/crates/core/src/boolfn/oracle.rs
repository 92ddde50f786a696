use super::{mask, TruthTable};
use crate::error::{Error, Result};
use crate::rng::{derive_child, SimRng};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Point-evaluation access to f; every evaluation is counted.
#[derive(Debug, Clone)]
pub struct MembershipOracle {
    table: Arc<TruthTable>,
    queries: u64,
}

impl MembershipOracle {
    pub fn new(table: Arc<TruthTable>) -> Self {
        MembershipOracle { table, queries: 0 }
    }

    #[inline]
    pub fn query(&mut self, x: u64) -> i8 {
        self.queries += 1;
        self.table.get(x)
    }

    pub fn query_count(&self) -> u64 {
        self.queries
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    /// Uncounted access for ground-truth computations and exact stubs.
    pub fn table(&self) -> &Arc<TruthTable> {
        &self.table
    }

    /// Raw values for hot loops that charge the counter themselves via [`Self::charge`].
    #[inline]
    pub(crate) fn values(&self) -> &[i8] {
        self.table.values()
    }

    #[inline]
    pub(crate) fn charge(&mut self, k: u64) {
        self.queries += k;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistributionSpec {
    Uniform,
    Weighted { weights: Vec<f64> },
}

/// Marginal distribution over {0,1}^n of the examples.
#[derive(Debug, Clone)]
pub struct ExampleDistribution {
    spec: DistributionSpec,
    sampler: Option<Arc<WeightedIndex<f64>>>,
}

impl ExampleDistribution {
    pub fn uniform() -> Self {
        ExampleDistribution { spec: DistributionSpec::Uniform, sampler: None }
    }

    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        if !weights.len().is_power_of_two() {
            return Err(Error::InvalidParameter("weight vector length must be 2^n".into()));
        }
        let sampler = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(ExampleDistribution {
            spec: DistributionSpec::Weighted { weights },
            sampler: Some(Arc::new(sampler)),
        })
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match &self.spec {
            DistributionSpec::Uniform => None,
            DistributionSpec::Weighted { weights } => Some(weights),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> u64 {
        match &self.sampler {
            None => rng.gen::<u64>() & mask(n),
            Some(w) => w.sample(rng) as u64,
        }
    }
}


/// Ex(D, f): i.i.d. labeled examples. Cloning forks the counter and derives a
/// child randomness stream.
#[derive(Debug)]
pub struct RandomExampleOracle {
    table: Arc<TruthTable>,
    dist: ExampleDistribution,
    samples: u64,
    rng: SimRng,
}

impl RandomExampleOracle {
    pub fn new(table: Arc<TruthTable>, dist: ExampleDistribution, rng: SimRng) -> Result<Self> {
        if let Some(w) = dist.weights() {
            if w.len() != table.len() {
                return Err(Error::ArityMismatch { expected: table.n(), got: w.len().trailing_zeros() as usize });
            }
        }
        Ok(RandomExampleOracle { table, dist, samples: 0, rng })
    }

    pub fn uniform(table: Arc<TruthTable>, rng: SimRng) -> Self {
        RandomExampleOracle { table, dist: ExampleDistribution::uniform(), samples: 0, rng }
    }

    pub fn draw(&mut self) -> (u64, i8) {
        self.samples += 1;
        let x = self.dist.sample(self.table.n(), &mut self.rng);
        (x, self.table.get(x))
    }

    pub fn sample_count(&self) -> u64 {
        self.samples
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn distribution(&self) -> &ExampleDistribution {
        &self.dist
    }

    pub fn table(&self) -> &Arc<TruthTable> {
        &self.table
    }

    /// Unlabeled draws from the same marginal on an independent stream.
    pub fn unlabeled_source(&self) -> UnlabeledSource {
        UnlabeledSource { n: self.table.n(), dist: self.dist.clone(), draws: 0, rng: derive_child(&self.rng) }
    }
}

impl Clone for RandomExampleOracle {
    fn clone(&self) -> Self {
        RandomExampleOracle {
            table: Arc::clone(&self.table),
            dist: self.dist.clone(),
            samples: self.samples,
            rng: derive_child(&self.rng),
        }
    }
}

/// Points drawn from D without labels.
#[derive(Debug, Clone)]
pub struct UnlabeledSource {
    n: usize,
    dist: ExampleDistribution,
    draws: u64,
    rng: SimRng,
}

impl UnlabeledSource {
    pub fn new(n: usize, dist: ExampleDistribution, rng: SimRng) -> Self {
        UnlabeledSource { n, dist, draws: 0, rng }
    }

    pub fn draw(&mut self) -> u64 {
        self.draws += 1;
        self.dist.sample(self.n, &mut self.rng)
    }

    pub fn draw_count(&self) -> u64 {
        self.draws
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn counters_track_calls() {
        let t = Arc::new(TruthTable::constant(4, 1).unwrap());
        let mut mq = MembershipOracle::new(Arc::clone(&t));
        for x in 0..10 {
            mq.query(x % 16);
        }
        assert_eq!(mq.query_count(), 10);
        let mut re = RandomExampleOracle::uniform(t, seeded(1));
        for _ in 0..7 {
            re.draw();
        }
        assert_eq!(re.sample_count(), 7);
    }

    #[test]
    fn clone_forks_counter_and_stream() {
        let t = Arc::new(TruthTable::from_bits(8, |x| x % 5 == 0).unwrap());
        let mut re = RandomExampleOracle::uniform(t, seeded(3));
        re.draw();
        let mut child = re.clone();
        assert_eq!(child.sample_count(), 1);
        let a: Vec<u64> = (0..8).map(|_| re.draw().0).collect();
        let b: Vec<u64> = (0..8).map(|_| child.draw().0).collect();
        assert_ne!(a, b);
        assert_eq!(re.sample_count(), 9);
    }

    #[test]
    fn weighted_distribution_respects_support() {
        let t = Arc::new(TruthTable::constant(2, 1).unwrap());
        let d = ExampleDistribution::weighted(vec![0.0, 1.0, 0.0, 3.0]).unwrap();
        let mut re = RandomExampleOracle::new(t, d, seeded(5)).unwrap();
        for _ in 0..200 {
            let (x, _) = re.draw();
            assert!(x == 1 || x == 3);
        }
    }
}
