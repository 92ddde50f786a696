use super::design::SetDesign;
use crate::error::{Error, Result};
use crate::f2::{QueryGenerator, QueryPattern, QuerySet, SubcubeDescriptor};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

/// A design for Amp^f_k: each sorted set S_u of size nk + k splits by
/// position into blocks S_u1..S_uk of n elements and the k-element b(S_u).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmpDesign {
    pub design: SetDesign,
    pub n: usize,
    pub k: usize,
}

/// Placement of block (u, v) in the f-query list of a round with pivot i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSlot {
    pub u: usize,
    pub v: usize,
    pub overlap: usize,
    pub offset: usize,
}

impl AmpDesign {
    pub fn new(design: SetDesign, n: usize, k: usize) -> Result<Self> {
        if k == 0 || design.n_block != n * k + k || n > 64 {
            return Err(Error::InvalidParameter(format!("set size {} is not nk + k for n = {n}, k = {k}", design.n_block)));
        }
        Ok(AmpDesign { design, n, k })
    }

    pub fn l(&self) -> usize {
        self.design.l
    }

    pub fn block(&self, u: usize, v: usize) -> &[usize] {
        &self.design.sets[u][v * self.n..(v + 1) * self.n]
    }

    pub fn b_block(&self, u: usize) -> &[usize] {
        &self.design.sets[u][self.n * self.k..]
    }

    pub fn block_overlap(&self, u: usize, v: usize, i: usize) -> usize {
        let si = &self.design.sets[i];
        self.block(u, v).iter().filter(|e| si.binary_search(e).is_ok()).count()
    }

    /// Blocks (u < i, v) in query order with their offsets.
    pub fn layout(&self, i: usize) -> Vec<BlockSlot> {
        let mut offset = 0;
        let mut slots = Vec::new();
        for u in 0..i {
            for v in 0..self.k {
                let overlap = self.block_overlap(u, v, i);
                slots.push(BlockSlot { u, v, overlap, offset });
                offset += 1 << overlap;
            }
        }
        slots
    }

    /// Q_i = Σ_{u<i, v} 2^{|S_uv ∩ S_i|}, the number of f-queries of a round.
    pub fn weight(&self, i: usize) -> usize {
        self.layout(i).iter().map(|s| 1usize << s.overlap).sum()
    }

    /// Pivots with at least one query; every i ≥ 1 (0-based) qualifies.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.l()).filter(|&i| self.weight(i) > 0).collect()
    }

    fn subcube(&self, elems: &[usize], i: usize, z: &[bool], source: (usize, usize)) -> SubcubeDescriptor {
        let si = &self.design.sets[i];
        let (mut fixed_mask, mut fixed_values, mut free) = (0u64, 0u64, Vec::new());
        for (p, &e) in elems.iter().enumerate() {
            if si.binary_search(&e).is_ok() {
                free.push(p);
            } else {
                fixed_mask |= 1 << p;
                fixed_values |= (z[e] as u64) << p;
            }
        }
        SubcubeDescriptor { n: elems.len(), fixed_mask, fixed_values, free, source }
    }

    /// One round of the reconstruction queries for pivot i. With `w`, the
    /// block (u★, v★) is drawn with probability 2^{|S_u★v★ ∩ S_i|}/Q_i and z
    /// takes w's values on S_u★v★ ∖ S_i; all other seed bits are uniform.
    pub fn round(&self, i: usize, w: Option<u64>, rng: &mut dyn RngCore) -> Result<NwRound> {
        if i >= self.l() {
            return Err(Error::InvalidParameter(format!("pivot {i} out of range")));
        }
        let layout = self.layout(i);
        let total: usize = layout.iter().map(|s| 1usize << s.overlap).sum();
        let mut z: Vec<bool> = (0..self.design.m).map(|_| rng.gen()).collect();
        let target = match w {
            None => None,
            Some(w) => {
                if total == 0 {
                    return Err(Error::InvalidParameter(format!("pivot {i} issues no queries")));
                }
                let pos = rng.gen_range(0..total);
                let slot = *layout.iter().rev().find(|s| s.offset <= pos).expect("offsets start at 0");
                for (p, &e) in self.block(slot.u, slot.v).iter().enumerate() {
                    z[e] = (w >> p) & 1 == 1;
                }
                Some((slot, w & crate::boolfn::mask(self.n)))
            }
        };
        let blocks: Vec<SubcubeDescriptor> =
            layout.iter().map(|s| self.subcube(self.block(s.u, s.v), i, &z, (s.u, s.v))).collect();
        let amp_blocks: Vec<SubcubeDescriptor> =
            (0..i).map(|u| self.subcube(&self.design.sets[u], i, &z, (u, self.k))).collect();
        let embedded_index = target.map(|(slot, w)| {
            let b = &blocks[layout.iter().position(|s| *s == slot).expect("slot from layout")];
            slot.offset + b.rank_of(w).expect("w agrees with the block outside S_i")
        });
        Ok(NwRound { pivot: i, blocks, amp_blocks, embedded_index })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NwRound {
    pub pivot: usize,
    /// Subcubes of f-queries, (u ascending, v ascending).
    pub blocks: Vec<SubcubeDescriptor>,
    /// Subcubes of Amp-queries over all of S_u, u ascending; each equals the
    /// product Q̂_u1 × … × Q̂_uk × Q̂_b(S_u) in lexicographic order.
    pub amp_blocks: Vec<SubcubeDescriptor>,
    pub embedded_index: Option<usize>,
}

impl NwRound {
    pub fn points(&self) -> Vec<u64> {
        self.blocks.iter().flat_map(|b| b.points()).collect()
    }

    pub fn amp_points(&self) -> Vec<u64> {
        self.amp_blocks.iter().flat_map(|b| b.points()).collect()
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.size()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Queries of several rounds: f-queries Q with their subcube pattern, the
/// Amp-queries P, and where each round starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NwQueries {
    pub query_set: QuerySet,
    #[serde(with = "crate::f2::hex_points")]
    pub amp_points: Vec<u64>,
    pub rounds: Vec<NwRoundMeta>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NwRoundMeta {
    pub pivot: usize,
    pub offset: usize,
    pub len: usize,
}

fn assemble(design: &AmpDesign, rounds: Vec<NwRound>) -> NwQueries {
    let mut points = Vec::new();
    let mut amp_points = Vec::new();
    let mut blocks = Vec::new();
    let mut metas = Vec::new();
    let mut embedded_index = None;
    for r in rounds {
        let offset = points.len();
        if let Some(j) = r.embedded_index {
            embedded_index = Some(offset + j);
        }
        points.extend(r.points());
        amp_points.extend(r.amp_points());
        metas.push(NwRoundMeta { pivot: r.pivot, offset, len: points.len() - offset });
        blocks.extend(r.blocks);
    }
    let query_set =
        QuerySet { n: design.n, points, pattern: QueryPattern::NwSubcubes { blocks }, embedded_index, labels: None };
    NwQueries { query_set, amp_points, rounds: metas }
}

fn draw_pivots(design: &AmpDesign, repetitions: usize, rng: &mut dyn RngCore) -> Result<Vec<usize>> {
    let pivots = design.pivots();
    if pivots.is_empty() || repetitions == 0 {
        return Err(Error::InvalidParameter("design admits no query rounds".into()));
    }
    Ok((0..repetitions).map(|_| pivots[rng.gen_range(0..pivots.len())]).collect())
}

/// `repetitions` independent rounds, pivots uniform among those with queries.
pub fn nw_queries(design: &AmpDesign, repetitions: usize, rng: &mut dyn RngCore) -> Result<NwQueries> {
    let pivots = draw_pivots(design, repetitions, rng)?;
    let rounds = pivots.into_iter().map(|i| design.round(i, None, rng)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(design, rounds))
}

/// As [`nw_queries`], with w planted in one round chosen with probability
/// proportional to its size, so that the planted index is uniform over Q.
pub fn embedded_nw_queries(w: u64, design: &AmpDesign, repetitions: usize, rng: &mut dyn RngCore) -> Result<NwQueries> {
    let pivots = draw_pivots(design, repetitions, rng)?;
    let weights: Vec<usize> = pivots.iter().map(|&i| design.weight(i)).collect();
    let total: usize = weights.iter().sum();
    let mut pos = rng.gen_range(0..total);
    let mut target = 0;
    for (r, &wt) in weights.iter().enumerate() {
        if pos < wt {
            target = r;
            break;
        }
        pos -= wt;
    }
    let rounds = pivots
        .into_iter()
        .enumerate()
        .map(|(r, i)| design.round(i, (r == target).then_some(w), rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(design, rounds))
}

/// The f-query distribution as a [`QueryGenerator`]. Round sizes depend on
/// the pivots, so `query_count` reports the largest possible size.
#[derive(Debug, Clone)]
pub struct NwQueryGenerator {
    pub design: AmpDesign,
    pub repetitions: usize,
}

impl QueryGenerator for NwQueryGenerator {
    fn n(&self) -> usize {
        self.design.n
    }
    fn query_count(&self) -> usize {
        self.repetitions * (0..self.design.l()).map(|i| self.design.weight(i)).max().unwrap_or(0)
    }
    fn generate(&self, rng: &mut dyn RngCore) -> QuerySet {
        nw_queries(&self.design, self.repetitions, rng).expect("validated design").query_set
    }
    fn embed(&self, w: u64, rng: &mut dyn RngCore) -> QuerySet {
        embedded_nw_queries(w, &self.design, self.repetitions, rng).expect("validated design").query_set
    }
}
