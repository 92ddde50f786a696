use super::l4::coset_fourth_sums;
use crate::boolfn::{q_cb, MembershipOracle};
use crate::error::{Error, Result};
use crate::f2::{sample_basis, CosetId, SubspaceBasis};
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// Per-coset estimates ω̂_a, indexed by the numeric value of a.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosetEstimates {
    pub basis: SubspaceBasis,
    pub per_coset: Vec<f64>,
}

impl CosetEstimates {
    pub fn get(&self, a: CosetId) -> f64 {
        self.per_coset[a.bits as usize]
    }

    /// Cosets ordered by ω̂ descending, ties by coset id.
    pub fn ranked(&self) -> Vec<u64> {
        let mut idx: Vec<u64> = (0..self.per_coset.len() as u64).collect();
        idx.sort_by(|&a, &b| {
            self.per_coset[b as usize].partial_cmp(&self.per_coset[a as usize]).unwrap().then(a.cmp(&b))
        });
        idx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlStarOutput {
    pub sigmas: Vec<f64>,
    pub cosets: CosetEstimates,
    /// Basis size from the formula, before capping at n.
    pub s_formula: usize,
    pub samples: u64,
    pub notes: Vec<String>,
}

/// Explicit overrides of the sample pool and basis size; `None` keeps the formula.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GlStarBudget {
    pub samples: Option<u64>,
    pub basis_size: Option<usize>,
}

/// s = ceil(2·log₂(16/ε⁴ + t) + log₂(2/δ)).
pub fn basis_size(t: usize, eps: f64, delta: f64) -> usize {
    crate::boolfn::ceil_count(2.0 * (16.0 / eps.powi(4) + t as f64).log2() + (2.0 / delta).log2()) as usize
}

/// Pool size q_cb(ε²/2, δ/2^{s+1}) with s from the formula. Using the
/// uncapped s keeps the query count independent of n.
pub fn pool_size(t: usize, eps: f64, delta: f64) -> Result<u64> {
    let s = basis_size(t, eps, delta);
    q_cb(eps * eps / 2.0, delta / 2f64.powi(s as i32 + 1))
}

/// Estimates of the t largest |f̂(γ)|, descending.
pub fn gl_star(
    oracle: &mut MembershipOracle,
    t: usize,
    eps: f64,
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<GlStarOutput> {
    gl_star_with(oracle, t, eps, delta, GlStarBudget::default(), rng)
}

pub fn gl_star_with(
    oracle: &mut MembershipOracle,
    t: usize,
    eps: f64,
    delta: f64,
    budget: GlStarBudget,
    rng: &mut dyn RngCore,
) -> Result<GlStarOutput> {
    crate::error::check_unit("eps", eps)?;
    crate::error::check_unit("delta", delta)?;
    let n = oracle.n();
    if t == 0 || (n < 64 && t as u128 > 1u128 << n) {
        return Err(Error::InvalidParameter(format!("t = {t} characters in F2^{n}")));
    }
    let s_formula = budget.basis_size.unwrap_or_else(|| basis_size(t, eps, delta));
    let mut notes = Vec::new();
    let s = if s_formula > n {
        notes.push(format!("basis size {s_formula} capped at n = {n}; every coset is a single character"));
        n
    } else {
        s_formula
    };
    let samples = match budget.samples {
        Some(m) => m,
        None => pool_size(t, eps, delta)?,
    };
    let basis = sample_basis(n, s, rng)?;
    let sums = coset_fourth_sums(oracle, &basis, samples, rng);
    let per_coset: Vec<f64> = sums.iter().map(|v| v.max(0.0).powf(0.25)).collect();
    let cosets = CosetEstimates { basis, per_coset };
    let sigmas = cosets.ranked().iter().take(t).map(|&a| cosets.per_coset[a as usize]).collect();
    Ok(GlStarOutput { sigmas, cosets, s_formula, samples, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_size_formula() {
        // 2·log2(16e4 + 4) + log2(20) = 34.58 + 4.32
        assert_eq!(basis_size(4, 0.1, 0.1), 39);
        // 2·log2(257) + log2(4) = 18.01
        assert_eq!(basis_size(1, 0.5, 0.5), 19);
    }

    #[test]
    fn ranking_breaks_ties_by_coset_id() {
        let c = CosetEstimates { basis: SubspaceBasis::standard(2, 2).unwrap(), per_coset: vec![0.5, 0.7, 0.5, 0.1] };
        assert_eq!(c.ranked(), vec![1, 0, 2, 3]);
    }
}
