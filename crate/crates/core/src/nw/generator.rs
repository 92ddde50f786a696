use super::design::SetDesign;
use crate::boolfn::TruthTable;
use crate::error::{Error, Result};
use std::collections::HashSet;

/// z restricted to `set`, packed with the j-th listed coordinate at bit j.
pub fn restrict(z: &[bool], set: &[usize]) -> u64 {
    set.iter().enumerate().fold(0u64, |acc, (j, &e)| acc | (z[e] as u64) << j)
}

pub fn pack_bits(bits: &[bool]) -> u64 {
    debug_assert!(bits.len() <= 64);
    bits.iter().enumerate().fold(0u64, |acc, (j, &b)| acc | (b as u64) << j)
}

pub fn unpack_bits(x: u64, len: usize) -> Vec<bool> {
    (0..len).map(|j| (x >> j) & 1 == 1).collect()
}

/// G^g(z) = g(z|S_1), ..., g(z|S_L) with g read as a bit.
pub fn nw_generate(g: &TruthTable, design: &SetDesign, z: &[bool]) -> Result<Vec<bool>> {
    if g.n() != design.n_block {
        return Err(Error::ArityMismatch { expected: design.n_block, got: g.n() });
    }
    if z.len() != design.m {
        return Err(Error::ArityMismatch { expected: design.m, got: z.len() });
    }
    Ok(design.sets.iter().map(|s| g.bit(restrict(z, s))).collect())
}

/// A test that is supposed to tell G^g(z) apart from uniform L-bit strings.
pub trait Distinguisher {
    fn distinguish(&self, y: &[bool]) -> Result<bool>;
}

impl<F: Fn(&[bool]) -> Result<bool>> Distinguisher for F {
    fn distinguish(&self, y: &[bool]) -> Result<bool> {
        self(y)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantDistinguisher(pub bool);

impl Distinguisher for ConstantDistinguisher {
    fn distinguish(&self, _: &[bool]) -> Result<bool> {
        Ok(self.0)
    }
}

/// Accepts exactly the strings in the image of G^g, found by running the
/// generator on all 2^m seeds.
#[derive(Debug, Clone)]
pub struct ExactImageDistinguisher {
    l: usize,
    image: HashSet<u64>,
}

pub const MAX_IMAGE_SEED_BITS: usize = 24;

impl ExactImageDistinguisher {
    pub fn new(g: &TruthTable, design: &SetDesign) -> Result<Self> {
        if design.m > MAX_IMAGE_SEED_BITS || design.l > 64 {
            return Err(Error::InvalidParameter(format!("seed length {} too large to enumerate", design.m)));
        }
        let mut image = HashSet::new();
        for seed in 0..1u64 << design.m {
            let z = unpack_bits(seed, design.m);
            image.insert(pack_bits(&nw_generate(g, design, &z)?));
        }
        Ok(ExactImageDistinguisher { l: design.l, image })
    }

    pub fn image_size(&self) -> usize {
        self.image.len()
    }

    /// Pr[D(G(z)) = 1] − Pr[D(U_L) = 1], exactly.
    pub fn advantage(&self) -> f64 {
        1.0 - self.image.len() as f64 / 2f64.powi(self.l as i32)
    }
}

impl Distinguisher for ExactImageDistinguisher {
    fn distinguish(&self, y: &[bool]) -> Result<bool> {
        if y.len() != self.l {
            return Err(Error::Distinguisher(format!("expected {} bits, got {}", self.l, y.len())));
        }
        Ok(self.image.contains(&pack_bits(y)))
    }
}
