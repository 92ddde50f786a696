use crate::boolfn::{opt_dist, EnumerableClass, MembershipOracle, TruthTable};
use crate::error::{Error, Result};
use crate::f2::{LinearCoeff, LinearGenerator, LinearPattern, NaeGenerator, PlainGenerator, QueryGenerator, UnionGenerator};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

/// Distances c_ℓ < c_u: accept when dist(f, C) ≤ c_ℓ, reject when ≥ c_u.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceWindow {
    pub c_u: f64,
    pub c_l: f64,
}

impl ToleranceWindow {
    pub fn new(c_u: f64, c_l: f64) -> Result<Self> {
        if !(c_u < 1.0 && c_u > c_l && c_l >= 0.0) {
            return Err(Error::InvalidParameter(format!("window requires 1 > c_u > c_l >= 0, got ({c_u}, {c_l})")));
        }
        Ok(ToleranceWindow { c_u, c_l })
    }

    /// (d + w, d − w) clipped into [0, 1).
    pub fn around(d: f64, half_width: f64) -> Result<Self> {
        let c_l = (d - half_width).max(0.0);
        let c_u = (d + half_width).min(1.0 - 1e-12);
        Self::new(c_u, c_l)
    }
}

/// Queries one test issues: `linear` triples (a1, a2, a1+a2), `nae` NAE
/// triples and `plain` uniform points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TesterQueries {
    pub linear: usize,
    pub nae: usize,
    pub plain: usize,
}

impl Default for TesterQueries {
    fn default() -> Self {
        TesterQueries { linear: 1, nae: 1, plain: 1 }
    }
}

impl TesterQueries {
    pub fn count(&self) -> usize {
        3 * self.linear + 3 * self.nae + self.plain
    }

    pub fn generator(&self, n: usize) -> Result<Box<dyn QueryGenerator>> {
        let mut parts: Vec<Box<dyn QueryGenerator>> = Vec::new();
        let triple = LinearPattern {
            n,
            k: 2,
            b_columns: vec![],
            coeffs: vec![
                LinearCoeff { alpha: 0b01, beta: 0 },
                LinearCoeff { alpha: 0b10, beta: 0 },
                LinearCoeff { alpha: 0b11, beta: 0 },
            ],
        };
        for _ in 0..self.linear {
            parts.push(Box::new(LinearGenerator::new(triple.clone())?));
        }
        for _ in 0..self.nae {
            parts.push(Box::new(NaeGenerator { n }));
        }
        if self.plain > 0 {
            parts.push(Box::new(PlainGenerator { n, count: self.plain }));
        }
        Ok(Box::new(UnionGenerator::new(parts)?))
    }
}

/// Tolerant tester backed by the exact distance dist(f, C). It issues its
/// declared queries but decides by a biased coin: accept with probability
/// `correctness` below c_ℓ, 1 − `correctness` above c_u, and by linear
/// interpolation inside the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StubTester {
    pub n: usize,
    pub opt: f64,
    pub correctness: f64,
    pub queries: TesterQueries,
}

impl StubTester {
    pub fn new<C: EnumerableClass + ?Sized>(f: &TruthTable, class: &C) -> Result<Self> {
        Ok(StubTester { n: f.n(), opt: opt_dist(f, class)?.0, correctness: 2.0 / 3.0, queries: TesterQueries::default() })
    }

    pub fn with_correctness(mut self, c: f64) -> Self {
        self.correctness = c;
        self
    }

    pub fn with_queries(mut self, q: TesterQueries) -> Self {
        self.queries = q;
        self
    }

    pub fn accept_probability(&self, w: ToleranceWindow) -> f64 {
        let p = self.correctness;
        if self.opt <= w.c_l {
            p
        } else if self.opt >= w.c_u {
            1.0 - p
        } else {
            let s = (self.opt - w.c_l) / (w.c_u - w.c_l);
            p + s * (1.0 - 2.0 * p)
        }
    }

    /// The decision alone, without issuing queries.
    pub fn decide(&self, w: ToleranceWindow, rng: &mut dyn RngCore) -> bool {
        rng.gen_bool(self.accept_probability(w).clamp(0.0, 1.0))
    }

    /// One test run: queries the oracle on a fresh query set, then decides.
    pub fn test(&self, oracle: &mut MembershipOracle, w: ToleranceWindow, rng: &mut dyn RngCore) -> Result<bool> {
        if oracle.n() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: oracle.n() });
        }
        let qs = self.queries.generator(self.n)?.generate(rng);
        for &x in &qs.points {
            oracle.query(x);
        }
        Ok(self.decide(w, rng))
    }
}

/// One run of the exact-distance tester on `class`.
pub fn tolerant_test<C: EnumerableClass + ?Sized>(
    oracle: &mut MembershipOracle,
    class: &C,
    window: ToleranceWindow,
    rng: &mut dyn RngCore,
) -> Result<bool> {
    let tester = StubTester::new(oracle.table(), class)?;
    tester.test(oracle, window, rng)
}
