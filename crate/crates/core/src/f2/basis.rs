use super::dot;
use crate::boolfn::chi;
use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const MAX_BASIS_ATTEMPTS: usize = 64;

/// Rank over F2 of a list of bit-packed vectors.
pub fn rank(vectors: &[u64]) -> usize {
    let mut rows: Vec<u64> = vectors.to_vec();
    let mut r = 0;
    for col in 0..64 {
        let bit = 1u64 << col;
        let Some(p) = (r..rows.len()).find(|&i| rows[i] & bit != 0) else { continue };
        rows.swap(r, p);
        let pivot = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && *row & bit != 0 {
                *row ^= pivot;
            }
        }
        r += 1;
    }
    r
}

/// Linearly independent r_1..r_s in F2^n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceBasis {
    pub n: usize,
    pub vectors: Vec<u64>,
}

/// a ∈ F2^s naming the coset V_a = {γ : ⟨γ, r_i⟩ = a_i}; bit i−1 of `bits` is a_i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CosetId {
    pub bits: u64,
    pub s: usize,
}

impl SubspaceBasis {
    pub fn new(n: usize, vectors: Vec<u64>) -> Result<Self> {
        if vectors.len() > n || n > 64 {
            return Err(Error::InvalidParameter(format!("{} vectors in F2^{n}", vectors.len())));
        }
        let m = crate::boolfn::mask(n);
        if vectors.iter().any(|v| v & !m != 0) {
            return Err(Error::InvalidParameter("vector exceeds the ambient dimension".into()));
        }
        if rank(&vectors) != vectors.len() {
            return Err(Error::InvalidParameter("vectors are linearly dependent".into()));
        }
        Ok(SubspaceBasis { n, vectors })
    }

    pub fn standard(n: usize, s: usize) -> Result<Self> {
        Self::new(n, (0..s).map(|i| 1u64 << i).collect())
    }

    pub fn s(&self) -> usize {
        self.vectors.len()
    }

    /// Σ_{i∈T} r_i where bit i−1 of `subset` selects r_i.
    #[inline]
    pub fn span_element(&self, subset: u64) -> u64 {
        let mut w = 0;
        let mut t = subset;
        while t != 0 {
            let i = t.trailing_zeros() as usize;
            w ^= self.vectors[i];
            t &= t - 1;
        }
        w
    }

    /// All 2^s span elements indexed by subset.
    pub fn span_table(&self) -> Vec<u64> {
        let mut table = vec![0u64; 1 << self.s()];
        for (i, &r) in self.vectors.iter().enumerate() {
            let half = 1usize << i;
            for t in 0..half {
                table[half + t] = table[t] ^ r;
            }
        }
        table
    }

    pub fn coset_of(&self, gamma: u64) -> CosetId {
        let bits = self.vectors.iter().enumerate().fold(0u64, |acc, (i, &r)| acc | (dot(gamma, r) as u64) << i);
        CosetId { bits, s: self.s() }
    }

    /// Canonical h with ⟨h, r_i⟩ = a_i: Gauss-Jordan elimination choosing the
    /// lowest-index column and the first available row as pivot, free variables zero.
    pub fn representative(&self, a: CosetId) -> u64 {
        assert_eq!(a.s, self.s(), "coset id length must equal the basis size");
        let mut rows: Vec<(u64, u8)> =
            self.vectors.iter().enumerate().map(|(i, &r)| (r, ((a.bits >> i) & 1) as u8)).collect();
        let mut pivots = Vec::with_capacity(rows.len());
        let mut r = 0;
        for col in 0..self.n {
            let bit = 1u64 << col;
            let Some(p) = (r..rows.len()).find(|&i| rows[i].0 & bit != 0) else { continue };
            rows.swap(r, p);
            let pivot = rows[r];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.0 & bit != 0 {
                    row.0 ^= pivot.0;
                    row.1 ^= pivot.1;
                }
            }
            pivots.push(col);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        pivots.iter().zip(&rows).fold(0u64, |h, (&col, row)| h | (row.1 as u64) << col)
    }

    /// χ_h(w) for w = Σ_{i∈T} r_i and h in coset a equals (−1)^{|a ∧ T|}.
    #[inline]
    pub fn coset_character(a: CosetId, subset: u64) -> i8 {
        chi(a.bits, subset)
    }
}

pub fn coset_of(gamma: u64, basis: &SubspaceBasis) -> CosetId {
    basis.coset_of(gamma)
}

pub fn coset_representative(basis: &SubspaceBasis, a: CosetId) -> u64 {
    basis.representative(a)
}

pub fn sample_basis<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> Result<SubspaceBasis> {
    if s > n || n > 64 {
        return Err(Error::InvalidParameter(format!("basis of size {s} in F2^{n}")));
    }
    let m = crate::boolfn::mask(n);
    for _ in 0..MAX_BASIS_ATTEMPTS {
        let vectors: Vec<u64> = (0..s).map(|_| rng.gen::<u64>() & m).collect();
        if rank(&vectors) == s {
            return Ok(SubspaceBasis { n, vectors });
        }
    }
    Err(Error::BasisExhausted { n, s, attempts: MAX_BASIS_ATTEMPTS })
}

/// Uniform T ⊆ [s] together with w = Σ_{i∈T} r_i.
pub fn sample_orthogonal_subset<R: Rng + ?Sized>(basis: &SubspaceBasis, rng: &mut R) -> (u64, u64) {
    let t = rng.gen::<u64>() & crate::boolfn::mask(basis.s());
    (t, basis.span_element(t))
}

/// Uniform element of span(r_1..r_s), the annihilator of V_0.
pub fn sample_orthogonal<R: Rng + ?Sized>(basis: &SubspaceBasis, rng: &mut R) -> u64 {
    sample_orthogonal_subset(basis, rng).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[0b01, 0b10, 0b11]), 2);
        assert_eq!(rank(&[0]), 0);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn single_vector_basis_is_nonzero() {
        let mut rng = seeded(4);
        for _ in 0..200 {
            assert_ne!(sample_basis(8, 1, &mut rng).unwrap().vectors[0], 0);
        }
    }

    #[test]
    fn seeded_basis_has_full_rank() {
        let b = sample_basis(16, 4, &mut seeded(1)).unwrap();
        assert_eq!(rank(&b.vectors), 4);
    }

    #[test]
    fn square_basis_is_invertible_or_errors() {
        let mut rng = seeded(2);
        for _ in 0..20 {
            match sample_basis(4, 4, &mut rng) {
                Ok(b) => assert_eq!(rank(&b.vectors), 4),
                Err(e) => assert!(matches!(e, Error::BasisExhausted { .. })),
            }
        }
    }

    #[test]
    fn standard_basis_cosets() {
        let b = SubspaceBasis::standard(10, 3).unwrap();
        for g in [0u64, 0b101, 0b1111010, 0x3ff] {
            let a = b.coset_of(g);
            assert_eq!(a.bits, g & 0b111);
            assert_eq!(b.representative(a), a.bits);
        }
        assert_eq!(b.representative(CosetId { bits: 0, s: 3 }), 0);
    }

    #[test]
    fn span_table_matches_span_element() {
        let b = sample_basis(12, 5, &mut seeded(9)).unwrap();
        let table = b.span_table();
        for t in 0..32 {
            assert_eq!(table[t as usize], b.span_element(t));
        }
    }
}
