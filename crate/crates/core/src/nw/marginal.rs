use super::query::AmpDesign;
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::stats::{chi_square_gof, two_sample, ChiSquare};
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// A query position: the `rank`-th point of block (u, v) in rounds with pivot i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginalTarget {
    pub pivot: usize,
    pub u: usize,
    pub v: usize,
    pub rank: usize,
}

impl MarginalTarget {
    /// First (pivot, u, v) in design order whose block meets S_pivot in
    /// exactly `overlap` elements.
    pub fn with_overlap(design: &AmpDesign, overlap: usize) -> Option<Self> {
        for i in 0..design.l() {
            for s in design.layout(i) {
                if s.overlap == overlap {
                    return Some(MarginalTarget { pivot: i, u: s.u, v: s.v, rank: 0 });
                }
            }
        }
        None
    }

    fn free_positions(&self, design: &AmpDesign) -> Vec<usize> {
        let si = &design.design.sets[self.pivot];
        design.block(self.u, self.v).iter().enumerate().filter(|(_, e)| si.binary_search(e).is_ok()).map(|(p, _)| p).collect()
    }

    /// Whether x can appear at this position: its bits on the overlap
    /// coordinates must spell out the rank.
    pub fn consistent(&self, design: &AmpDesign, x: u64) -> bool {
        let free = self.free_positions(design);
        let f = free.len();
        free.iter().enumerate().all(|(j, &p)| (x >> p) & 1 == ((self.rank >> (f - 1 - j)) & 1) as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalMode {
    Unembedded,
    /// Rounds with a uniformly random w planted.
    Embedded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalReport {
    pub target: MarginalTarget,
    pub mode: MarginalMode,
    pub overlap: usize,
    pub trials: u64,
    pub counts: Vec<u64>,
    pub consistent_bins: usize,
    pub inconsistent_hits: u64,
    pub chi: ChiSquare,
    pub pass: bool,
}

fn histogram(design: &AmpDesign, target: MarginalTarget, trials: u64, mode: MarginalMode, master: u64) -> Result<Vec<u64>> {
    let layout = design.layout(target.pivot);
    let slot = layout
        .iter()
        .find(|s| s.u == target.u && s.v == target.v)
        .ok_or_else(|| Error::InvalidParameter(format!("block ({}, {}) not queried under pivot {}", target.u, target.v, target.pivot)))?;
    if target.rank >= 1 << slot.overlap {
        return Err(Error::InvalidParameter(format!("rank {} outside a block of {} points", target.rank, 1 << slot.overlap)));
    }
    let pos = slot.offset + target.rank;
    let mut counts = vec![0u64; 1 << design.n];
    for t in 0..trials {
        let mut rng = stream(master, t);
        let w = match mode {
            MarginalMode::Unembedded => None,
            MarginalMode::Embedded => Some(rng.next_u64() & crate::boolfn::mask(design.n)),
        };
        let round = design.round(target.pivot, w, &mut rng)?;
        let (b, r) = locate(&round.blocks, pos);
        counts[b.point(r) as usize] += 1;
    }
    Ok(counts)
}

fn locate(blocks: &[crate::f2::SubcubeDescriptor], mut pos: usize) -> (&crate::f2::SubcubeDescriptor, usize) {
    for b in blocks {
        if pos < b.size() {
            return (b, pos);
        }
        pos -= b.size();
    }
    unreachable!("position inside the round")
}

/// Empirical marginal of one query position against 1/2^{n−b} on the
/// consistent points and 0 elsewhere, b = |S_uv ∩ S_i|.
pub fn marginal_test(
    design: &AmpDesign,
    target: MarginalTarget,
    trials: u64,
    mode: MarginalMode,
    rng: &mut dyn RngCore,
) -> Result<MarginalReport> {
    if design.n > 16 {
        return Err(Error::InvalidParameter(format!("2^{} bins are too many", design.n)));
    }
    let counts = histogram(design, target, trials, mode, rng.next_u64())?;
    let overlap = design.block_overlap(target.u, target.v, target.pivot);
    let consistent: Vec<bool> = (0..counts.len() as u64).map(|x| target.consistent(design, x)).collect();
    let consistent_bins = consistent.iter().filter(|&&c| c).count();
    let p = 1.0 / consistent_bins as f64;
    let probs: Vec<f64> = consistent.iter().map(|&c| if c { p } else { 0.0 }).collect();
    let inconsistent_hits = counts.iter().zip(&consistent).filter(|(_, &c)| !c).map(|(&n, _)| n).sum();
    let chi = chi_square_gof(&counts, &probs);
    let pass = inconsistent_hits == 0 && chi.pass();
    Ok(MarginalReport { target, mode, overlap, trials, counts, consistent_bins, inconsistent_hits, chi, pass })
}

/// Two-sample test between embedded and unembedded histograms of one position.
pub fn marginal_two_sample(design: &AmpDesign, target: MarginalTarget, trials: u64, rng: &mut dyn RngCore) -> Result<ChiSquare> {
    let a = histogram(design, target, trials, MarginalMode::Unembedded, rng.next_u64())?;
    let b = histogram(design, target, trials, MarginalMode::Embedded, rng.next_u64())?;
    Ok(two_sample(&a, &b))
}
