//! Set designs, the NW generator, the Amp^f_k amplifier, the reconstruction
//! weak learner and its query distribution.

mod amp;
mod design;
mod generator;
mod learner;
mod marginal;
mod query;

pub use amp::{amp_eval, AmpFunction};
pub use design::{build_design, SetDesign};
pub use generator::{
    nw_generate, pack_bits, restrict, unpack_bits, ConstantDistinguisher, Distinguisher, ExactImageDistinguisher,
    MAX_IMAGE_SEED_BITS,
};
pub use learner::{exact_agreement, reconstruct_weak_learner, HybridCandidate, WeakLearnerConfig, WeakLearnerOutput};
pub use marginal::{marginal_test, marginal_two_sample, MarginalMode, MarginalReport, MarginalTarget};
pub use query::{embedded_nw_queries, nw_queries, AmpDesign, BlockSlot, NwQueries, NwQueryGenerator, NwRound, NwRoundMeta};
