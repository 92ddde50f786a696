use crate::boolfn::{EnumerableClass, TruthTable, MAX_ARITY};
use crate::error::{Error, Result};

/// Members addressable by [`JuntaClass`] unless a larger budget is given.
pub const DEFAULT_CLASS_BUDGET: u128 = 1 << 22;

/// All functions of n bits that depend on at most k of them. Member
/// i·2^{2^k} + τ is the junta on the i-th k-subset (lexicographic order)
/// with local table τ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JuntaClass {
    n: usize,
    k: usize,
    subsets: Vec<Vec<usize>>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else { break };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

impl JuntaClass {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        Self::with_budget(n, k, DEFAULT_CLASS_BUDGET)
    }

    pub fn with_budget(n: usize, k: usize, budget: u128) -> Result<Self> {
        if n == 0 || n > MAX_ARITY {
            return Err(Error::ArityTooLarge(n));
        }
        if k > n {
            return Err(Error::InvalidParameter(format!("junta size {k} exceeds arity {n}")));
        }
        let members = if k >= 7 { u128::MAX } else { binomial(n, k).saturating_mul(1u128 << (1u32 << k)) };
        if members > budget {
            return Err(Error::ClassTooLarge { members, budget });
        }
        Ok(JuntaClass { n, k, subsets: combinations(n, k) })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tables_per_subset(&self) -> usize {
        1 << (1 << self.k)
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// (subset, table) of a member index.
    pub fn decode(&self, index: usize) -> (&[usize], u64) {
        let per = self.tables_per_subset();
        (&self.subsets[index / per], (index % per) as u64)
    }

    fn cell(vars: &[usize], x: u64) -> usize {
        vars.iter().enumerate().fold(0, |c, (j, &v)| c | (((x >> v) & 1) as usize) << j)
    }
}

impl EnumerableClass for JuntaClass {
    fn arity(&self) -> usize {
        self.n
    }

    fn size(&self) -> usize {
        self.subsets.len() * self.tables_per_subset()
    }

    fn member(&self, index: usize) -> TruthTable {
        let (vars, table) = self.decode(index);
        TruthTable::from_bits(self.n, |x| (table >> Self::cell(vars, x)) & 1 == 1).expect("valid arity")
    }

    /// Per subset, the best table takes the majority value of f on each
    /// cell (+1 on ties), which is also the least table index among the
    /// minimizers of that subset.
    fn best_member(&self, f: &TruthTable) -> Result<(f64, usize)> {
        if f.n() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: f.n() });
        }
        let cells = 1usize << self.k;
        let mut best = (usize::MAX, 0usize);
        for (i, vars) in self.subsets.iter().enumerate() {
            let mut minus = vec![0usize; cells];
            let mut total = vec![0usize; cells];
            for x in 0..f.len() as u64 {
                let c = Self::cell(vars, x);
                total[c] += 1;
                minus[c] += (f.get(x) < 0) as usize;
            }
            let mut table = 0u64;
            let mut errors = 0;
            for c in 0..cells {
                let plus = total[c] - minus[c];
                if minus[c] > plus {
                    table |= 1 << c;
                    errors += plus;
                } else {
                    errors += minus[c];
                }
            }
            if errors < best.0 {
                best = (errors, i * self.tables_per_subset() + table as usize);
            }
        }
        Ok((best.0 as f64 / f.len() as f64, best.1))
    }
}
