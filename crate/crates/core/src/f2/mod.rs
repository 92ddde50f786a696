//! Linear algebra over F2 on bit-packed vectors (bit i ↔ coordinate i+1),
//! the coset partition induced by a random basis, and embeddable query sets.

mod basis;
mod embed;
mod query;
pub use query::hex_points;

pub use basis::{coset_of, coset_representative, rank, sample_basis, sample_orthogonal, sample_orthogonal_subset, CosetId, SubspaceBasis, MAX_BASIS_ATTEMPTS};
pub use embed::{
    embed_linear, embed_nae, embed_union, generate_linear, generate_nae, FourthMomentGenerator, LinearGenerator,
    NaeGenerator, PlainGenerator, QueryGenerator, RepeatGenerator, UnionGenerator,
};
pub use query::{
    LinearCoeff, LinearPattern, ProverView, QueryPattern, QuerySet, Segment, SubcubeDescriptor,
};

#[inline]
pub fn dot(a: u64, b: u64) -> u8 {
    ((a & b).count_ones() & 1) as u8
}
