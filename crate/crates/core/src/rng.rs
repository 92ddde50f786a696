//! Seeded randomness. Every stochastic routine takes an explicit RNG handle;
//! trial-level streams are derived by counter-mode splitting of a master seed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` of the master seed. Streams never overlap, so
/// trial `i` sees the same randomness regardless of scheduling.
pub fn stream(master: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Child generator seeded from the parent's output.
pub fn fork<R: RngCore + ?Sized>(parent: &mut R) -> SimRng {
    let mut seed = [0u8; 32];
    parent.fill_bytes(&mut seed);
    ChaCha8Rng::from_seed(seed)
}

/// Deterministic child of a generator without advancing it.
pub(crate) fn derive_child(rng: &SimRng) -> SimRng {
    let mut child = rng.clone();
    let tag = rng.get_stream() ^ (rng.get_word_pos() as u64).rotate_left(17) ^ 0x9e37_79b9_7f4a_7c15;
    child.set_stream(splitmix(tag));
    child.set_word_pos(0);
    child
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
