use super::query::{LinearCoeff, LinearPattern, QueryPattern, QuerySet, Segment};
use super::SubspaceBasis;
use crate::boolfn::mask;
use crate::error::{Error, Result};
use rand::{Rng, RngCore};

/// A non-adaptive query distribution that can also plant a given point at a
/// uniformly random position without changing the joint distribution.
pub trait QueryGenerator: Send + Sync {
    fn n(&self) -> usize;
    fn query_count(&self) -> usize;
    fn generate(&self, rng: &mut dyn RngCore) -> QuerySet;
    fn embed(&self, w: u64, rng: &mut dyn RngCore) -> QuerySet;
}

fn validate_linear(p: &LinearPattern) -> Result<()> {
    if let Some(i) = p.coeffs.iter().position(|c| c.alpha == 0) {
        return Err(Error::ZeroAlpha(i));
    }
    if p.k > 64 || p.coeffs.iter().any(|c| c.alpha & !mask(p.k) != 0 || c.beta & !mask(p.b_columns.len()) != 0) {
        return Err(Error::InvalidParameter("linear coefficient outside the column range".into()));
    }
    Ok(())
}

fn realize(pattern: &LinearPattern, a_columns: Vec<u64>, embedded_index: Option<usize>) -> QuerySet {
    let points = pattern.coeffs.iter().map(|&c| pattern.point(&a_columns, c)).collect();
    QuerySet {
        n: pattern.n,
        points,
        pattern: QueryPattern::Linear { pattern: pattern.clone(), a_columns },
        embedded_index,
        labels: None,
    }
}

/// Unembedded linear query set: A uniform.
pub fn generate_linear<R: Rng + ?Sized>(pattern: &LinearPattern, rng: &mut R) -> Result<QuerySet> {
    validate_linear(pattern)?;
    let m = mask(pattern.n);
    let a = (0..pattern.k).map(|_| rng.gen::<u64>() & m).collect();
    Ok(realize(pattern, a, None))
}

/// Plants w at a uniformly random index j: all columns of A but a_ℓ
/// (ℓ the lowest element of supp(α_j)) are uniform, and a_ℓ is solved for
/// so that q_j = w.
pub fn embed_linear<R: Rng + ?Sized>(w: u64, pattern: &LinearPattern, rng: &mut R) -> Result<QuerySet> {
    validate_linear(pattern)?;
    if pattern.coeffs.is_empty() {
        return Err(Error::InvalidParameter("empty linear pattern".into()));
    }
    let m = mask(pattern.n);
    let j = rng.gen_range(0..pattern.coeffs.len());
    let LinearCoeff { alpha, beta } = pattern.coeffs[j];
    let ell = alpha.trailing_zeros() as usize;
    let mut a: Vec<u64> = (0..pattern.k).map(|_| rng.gen::<u64>() & m).collect();
    a[ell] = 0;
    a[ell] = (w & m) ^ LinearPattern::combine(&pattern.b_columns, beta) ^ LinearPattern::combine(&a, alpha);
    Ok(realize(pattern, a, Some(j)))
}

const NAE_TRIPLES: [(u64, u64, u64); 6] = [(0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 0, 0), (1, 0, 1), (1, 1, 0)];

/// Three points whose coordinate triples are i.i.d. uniform over {0,1}³∖{000,111}.
pub fn generate_nae<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QuerySet {
    let mut p = [0u64; 3];
    for i in 0..n {
        let (a, b, c) = NAE_TRIPLES[rng.gen_range(0..6)];
        p[0] |= a << i;
        p[1] |= b << i;
        p[2] |= c << i;
    }
    QuerySet { n, points: p.to_vec(), pattern: QueryPattern::Nae, embedded_index: None, labels: None }
}

/// w goes to a uniform slot; on each coordinate the other two slots take one
/// of the three bit pairs that avoid an all-equal triple, uniformly. This is
/// the conditional law of a uniform NAE triple given one slot, so the joint
/// distribution matches [`generate_nae`].
pub fn embed_nae<R: Rng + ?Sized>(w: u64, n: usize, rng: &mut R) -> QuerySet {
    let slot = rng.gen_range(0..3);
    let (o1, o2) = ((slot + 1) % 3, (slot + 2) % 3);
    let mut p = [0u64; 3];
    p[slot] = w & mask(n);
    for i in 0..n {
        let b = (w >> i) & 1;
        let mut r = rng.gen_range(0..3u64);
        if r >= b * 3 {
            r += 1;
        }
        p[o1] |= (r >> 1) << i;
        p[o2] |= (r & 1) << i;
    }
    QuerySet { n, points: p.to_vec(), pattern: QueryPattern::Nae, embedded_index: Some(slot), labels: None }
}

/// Embeds into generator i with probability Q_i/ΣQ and concatenates.
pub fn embed_union(w: u64, generators: &[&dyn QueryGenerator], rng: &mut dyn RngCore) -> Result<QuerySet> {
    if generators.is_empty() {
        return Err(Error::EmptyUnion);
    }
    let total: usize = generators.iter().map(|g| g.query_count()).sum();
    if total == 0 {
        return Err(Error::InvalidParameter("union without queries".into()));
    }
    let mut pick = rng.gen_range(0..total);
    let target = generators
        .iter()
        .position(|g| {
            let q = g.query_count();
            if pick < q {
                true
            } else {
                pick -= q;
                false
            }
        })
        .expect("pick below total");
    Ok(concat(generators.iter().enumerate().map(|(i, g)| if i == target { g.embed(w, rng) } else { g.generate(rng) }), generators[0].n()))
}

fn concat(parts: impl Iterator<Item = QuerySet>, n: usize) -> QuerySet {
    let mut points = Vec::new();
    let mut segments = Vec::new();
    let mut embedded_index = None;
    for part in parts {
        let start = points.len();
        if let Some(j) = part.embedded_index {
            embedded_index = Some(start + j);
        }
        segments.push(Segment { start, len: part.points.len(), pattern: part.pattern });
        points.extend(part.points);
    }
    QuerySet { n, points, pattern: QueryPattern::Union { segments }, embedded_index, labels: None }
}

/// `count` independent uniform points.
#[derive(Debug, Clone)]
pub struct PlainGenerator {
    pub n: usize,
    pub count: usize,
}

impl QueryGenerator for PlainGenerator {
    fn n(&self) -> usize {
        self.n
    }
    fn query_count(&self) -> usize {
        self.count
    }
    fn generate(&self, rng: &mut dyn RngCore) -> QuerySet {
        let m = mask(self.n);
        let points = (0..self.count).map(|_| rng.next_u64() & m).collect();
        QuerySet { n: self.n, points, pattern: QueryPattern::Plain, embedded_index: None, labels: None }
    }
    fn embed(&self, w: u64, rng: &mut dyn RngCore) -> QuerySet {
        let mut q = self.generate(rng);
        let j = rng.gen_range(0..self.count);
        q.points[j] = w & mask(self.n);
        q.embedded_index = Some(j);
        q
    }
}

#[derive(Debug, Clone)]
pub struct LinearGenerator {
    pattern: LinearPattern,
}

impl LinearGenerator {
    pub fn new(pattern: LinearPattern) -> Result<Self> {
        validate_linear(&pattern)?;
        Ok(LinearGenerator { pattern })
    }

    pub fn pattern(&self) -> &LinearPattern {
        &self.pattern
    }
}

impl QueryGenerator for LinearGenerator {
    fn n(&self) -> usize {
        self.pattern.n
    }
    fn query_count(&self) -> usize {
        self.pattern.coeffs.len()
    }
    fn generate(&self, rng: &mut dyn RngCore) -> QuerySet {
        generate_linear(&self.pattern, rng).expect("validated pattern")
    }
    fn embed(&self, w: u64, rng: &mut dyn RngCore) -> QuerySet {
        embed_linear(w, &self.pattern, rng).expect("validated pattern")
    }
}

#[derive(Debug, Clone)]
pub struct NaeGenerator {
    pub n: usize,
}

impl QueryGenerator for NaeGenerator {
    fn n(&self) -> usize {
        self.n
    }
    fn query_count(&self) -> usize {
        3
    }
    fn generate(&self, rng: &mut dyn RngCore) -> QuerySet {
        generate_nae(self.n, rng)
    }
    fn embed(&self, w: u64, rng: &mut dyn RngCore) -> QuerySet {
        embed_nae(w, self.n, rng)
    }
}

/// The four queries x, y, z, x+y+z+w behind one fourth-moment sample, with
/// w = Σ_{i∈T} r_i. As a linear pattern: α = e1, e2, e3, e1+e2+e3 and
/// β = 0, 0, 0, T with T drawn uniformly before the points.
#[derive(Debug, Clone)]
pub struct FourthMomentGenerator {
    basis: SubspaceBasis,
}

impl FourthMomentGenerator {
    pub fn new(basis: SubspaceBasis) -> Self {
        FourthMomentGenerator { basis }
    }

    pub fn pattern_for(&self, subset: u64) -> LinearPattern {
        LinearPattern {
            n: self.basis.n,
            k: 3,
            b_columns: self.basis.vectors.clone(),
            coeffs: vec![
                LinearCoeff { alpha: 0b001, beta: 0 },
                LinearCoeff { alpha: 0b010, beta: 0 },
                LinearCoeff { alpha: 0b100, beta: 0 },
                LinearCoeff { alpha: 0b111, beta: subset },
            ],
        }
    }

    fn subset(&self, rng: &mut dyn RngCore) -> u64 {
        rng.next_u64() & mask(self.basis.s())
    }
}

impl QueryGenerator for FourthMomentGenerator {
    fn n(&self) -> usize {
        self.basis.n
    }
    fn query_count(&self) -> usize {
        4
    }
    fn generate(&self, rng: &mut dyn RngCore) -> QuerySet {
        let t = self.subset(rng);
        generate_linear(&self.pattern_for(t), rng).expect("fixed pattern")
    }
    fn embed(&self, w: u64, rng: &mut dyn RngCore) -> QuerySet {
        let t = self.subset(rng);
        embed_linear(w, &self.pattern_for(t), rng).expect("fixed pattern")
    }
}

/// Independent union of heterogeneous generators.
pub struct UnionGenerator {
    parts: Vec<Box<dyn QueryGenerator>>,
}

impl UnionGenerator {
    pub fn new(parts: Vec<Box<dyn QueryGenerator>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyUnion);
        }
        let n = parts[0].n();
        if parts.iter().any(|p| p.n() != n) {
            return Err(Error::InvalidParameter("union parts disagree on n".into()));
        }
        Ok(UnionGenerator { parts })
    }

    pub fn parts(&self) -> &[Box<dyn QueryGenerator>] {
        &self.parts
    }
}

impl QueryGenerator for UnionGenerator {
    fn n(&self) -> usize {
        self.parts[0].n()
    }
    fn query_count(&self) -> usize {
        self.parts.iter().map(|p| p.query_count()).sum()
    }
    fn generate(&self, rng: &mut dyn RngCore) -> QuerySet {
        concat(self.parts.iter().map(|p| p.generate(rng)).collect::<Vec<_>>().into_iter(), self.n())
    }
    fn embed(&self, w: u64, rng: &mut dyn RngCore) -> QuerySet {
        let refs: Vec<&dyn QueryGenerator> = self.parts.iter().map(|p| p.as_ref()).collect();
        embed_union(w, &refs, rng).expect("nonempty union")
    }
}

/// `times` independent copies of one generator; equal part sizes make the
/// embedding choice uniform over copies.
pub struct RepeatGenerator {
    inner: Box<dyn QueryGenerator>,
    times: usize,
}

impl RepeatGenerator {
    pub fn new(inner: Box<dyn QueryGenerator>, times: usize) -> Self {
        RepeatGenerator { inner, times }
    }
}

impl QueryGenerator for RepeatGenerator {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn query_count(&self) -> usize {
        self.inner.query_count() * self.times
    }
    fn generate(&self, rng: &mut dyn RngCore) -> QuerySet {
        concat((0..self.times).map(|_| self.inner.generate(rng)).collect::<Vec<_>>().into_iter(), self.n())
    }
    fn embed(&self, w: u64, rng: &mut dyn RngCore) -> QuerySet {
        let target = rng.gen_range(0..self.times);
        let parts: Vec<QuerySet> =
            (0..self.times).map(|i| if i == target { self.inner.embed(w, rng) } else { self.inner.generate(rng) }).collect();
        concat(parts.into_iter(), self.n())
    }
}
