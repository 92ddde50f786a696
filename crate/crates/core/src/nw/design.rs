use crate::error::{Error, Result};
use crate::rng::seeded;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// Sets S_1..S_L ⊆ [m] of equal size with pairwise intersections ≤ d.
/// Elements are 0-based and each set is sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDesign {
    pub m: usize,
    pub l: usize,
    pub n_block: usize,
    pub d: usize,
    pub sets: Vec<Vec<usize>>,
}

impl SetDesign {
    /// Checks sizes, ranges and every pairwise intersection.
    pub fn validate(&self) -> Result<()> {
        if self.sets.len() != self.l {
            return Err(Error::DesignInfeasible(format!("{} sets, expected {}", self.sets.len(), self.l)));
        }
        for s in &self.sets {
            if s.len() != self.n_block || s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&e| e >= self.m) {
                return Err(Error::DesignInfeasible("set of wrong size, unsorted or out of range".into()));
            }
        }
        for a in 0..self.l {
            for b in a + 1..self.l {
                let o = self.overlap(a, b);
                if o > self.d {
                    return Err(Error::DesignInfeasible(format!("|S_{a} ∩ S_{b}| = {o} > {}", self.d)));
                }
            }
        }
        Ok(())
    }

    pub fn overlap(&self, a: usize, b: usize) -> usize {
        intersection(&self.sets[a], &self.sets[b])
    }

    pub fn max_overlap(&self) -> usize {
        let mut best = 0;
        for a in 0..self.l {
            for b in a + 1..self.l {
                best = best.max(self.overlap(a, b));
            }
        }
        best
    }
}

pub(crate) fn intersection(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

const ATTEMPTS_PER_SET: usize = 64;
const TOTAL_ATTEMPTS: usize = 1 << 16;

/// Greedy construction with backtracking: each set scans a shuffled order
/// of [m] and keeps elements that respect the overlap bound; a set that
/// cannot be completed is retried, and after repeated failures the previous
/// set is redrawn. The shuffles are seeded from the parameters, so the
/// result is deterministic.
pub fn build_design(m: usize, n_block: usize, l: usize, d: usize) -> Result<SetDesign> {
    if n_block > m || l == 0 {
        return Err(Error::DesignInfeasible(format!("{l} sets of size {n_block} in [{m}]")));
    }
    if d == 0 && l * n_block > m {
        return Err(Error::DesignInfeasible(format!("{l} disjoint sets of size {n_block} need m ≥ {}", l * n_block)));
    }
    let seed = (m as u64) << 48 ^ (n_block as u64) << 32 ^ (l as u64) << 16 ^ d as u64;
    let mut rng = seeded(seed);
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(l);
    let mut failures = vec![0usize; l];
    let mut total = 0;
    let mut order: Vec<usize> = (0..m).collect();
    while sets.len() < l {
        total += 1;
        if total > TOTAL_ATTEMPTS {
            return Err(Error::DesignInfeasible(format!("no ({n_block}, {l}, {d}) design found in [{m}]")));
        }
        let j = sets.len();
        order.shuffle(&mut rng);
        let mut cur: Vec<usize> = Vec::with_capacity(n_block);
        let mut counts = vec![0usize; j];
        for &e in &order {
            if cur.len() == n_block {
                break;
            }
            let ok = sets.iter().zip(&counts).all(|(s, &c)| c + s.binary_search(&e).is_ok() as usize <= d);
            if ok {
                for (s, c) in sets.iter().zip(counts.iter_mut()) {
                    *c += s.binary_search(&e).is_ok() as usize;
                }
                cur.push(e);
            }
        }
        if cur.len() == n_block {
            cur.sort_unstable();
            sets.push(cur);
            continue;
        }
        failures[j] += 1;
        if failures[j] >= ATTEMPTS_PER_SET && j > 0 {
            failures[j] = 0;
            sets.pop();
        }
    }
    let design = SetDesign { m, l, n_block, d, sets };
    design.validate()?;
    Ok(design)
}
