use super::{dist_under, ExampleDistribution, TruthTable};
use crate::error::{Error, Result};

/// A finite hypothesis class whose members are addressed by index; the
/// index order is the enumeration order used for tie-breaking.
pub trait EnumerableClass {
    fn arity(&self) -> usize;
    fn size(&self) -> usize;
    fn member(&self, index: usize) -> TruthTable;

    fn contains_index(&self, index: usize) -> bool {
        index < self.size()
    }

    /// Exact minimum uniform distance and the first minimizer.
    fn best_member(&self, f: &TruthTable) -> Result<(f64, usize)> {
        opt_generic(self, f, &ExampleDistribution::uniform())
    }
}

fn opt_generic<C: EnumerableClass + ?Sized>(
    class: &C,
    f: &TruthTable,
    d: &ExampleDistribution,
) -> Result<(f64, usize)> {
    if f.n() != class.arity() {
        return Err(Error::ArityMismatch { expected: class.arity(), got: f.n() });
    }
    if class.size() == 0 {
        return Err(Error::InvalidParameter("empty class".into()));
    }
    let mut best = (f64::INFINITY, 0);
    for i in 0..class.size() {
        let e = dist_under(f, &class.member(i), d)?;
        if e < best.0 {
            best = (e, i);
        }
    }
    Ok(best)
}

/// opt(f, H) = min_{h∈H} dist(f, h) under the uniform distribution.
pub fn opt_dist<C: EnumerableClass + ?Sized>(f: &TruthTable, class: &C) -> Result<(f64, usize)> {
    class.best_member(f)
}

pub fn opt_dist_under<C: EnumerableClass + ?Sized>(
    f: &TruthTable,
    class: &C,
    d: &ExampleDistribution,
) -> Result<(f64, usize)> {
    if d.weights().is_none() {
        return class.best_member(f);
    }
    opt_generic(class, f, d)
}

/// A class given by an explicit list of truth tables.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitClass {
    n: usize,
    members: Vec<TruthTable>,
}

impl ExplicitClass {
    pub fn new(n: usize, members: Vec<TruthTable>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("empty class".into()));
        }
        if let Some(bad) = members.iter().find(|m| m.n() != n) {
            return Err(Error::ArityMismatch { expected: n, got: bad.n() });
        }
        Ok(ExplicitClass { n, members })
    }

    pub fn members(&self) -> &[TruthTable] {
        &self.members
    }
}

impl EnumerableClass for ExplicitClass {
    fn arity(&self) -> usize {
        self.n
    }

    fn size(&self) -> usize {
        self.members.len()
    }

    fn member(&self, index: usize) -> TruthTable {
        self.members[index].clone()
    }
}
