//! Deterministic splittable random streams.
//!
//! Every replication of a study owns an independent stream derived from the
//! master seed and the replication's coordinates (sample size, replication
//! index) by hashing the tuple through SplitMix64 into a ChaCha key. ChaCha
//! is itself a counter-based generator, so streams never share state and a
//! study is reproducible byte for byte no matter how replications are
//! scheduled across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

const TAG_REPLICATION: u64 = 0x5245_504c;
const TAG_PILOT: u64 = 0x5049_4c4f;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a 32-byte ChaCha seed from the master seed and a word tuple.
pub fn derive_seed(master_seed: u64, words: &[u64]) -> [u8; 32] {
    let mut state = master_seed;
    let _ = splitmix64(&mut state);
    state ^= (words.len() as u64).wrapping_mul(0x8bb8_4b93_962e_acc9);
    let _ = splitmix64(&mut state);
    for &w in words {
        state ^= w.wrapping_mul(0xd6e8_feb8_6659_fd93).rotate_left(17);
        let _ = splitmix64(&mut state);
    }
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    seed
}

/// Stream for replication `rep` of the experiment with sample size `n`.
pub fn replication_rng(master_seed: u64, n: u64, rep: u64) -> ChaCha12Rng {
    ChaCha12Rng::from_seed(derive_seed(master_seed, &[TAG_REPLICATION, n, rep]))
}

/// Stream for the pilot sample that locates the marginal quantiles.
pub fn pilot_rng(master_seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::from_seed(derive_seed(master_seed, &[TAG_PILOT]))
}
