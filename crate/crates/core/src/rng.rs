//! Deterministic seed derivation.
//!
//! Every stochastic routine takes an explicit 64-bit seed and derives
//! per-task streams with a SplitMix64 chain, so results are independent of
//! thread count and execution order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a base seed and a salt path.
pub fn derive_seed(base: u64, salts: &[u64]) -> u64 {
    let mut state = base;
    let mut out = splitmix64(&mut state);
    for &s in salts {
        state ^= s.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        out = splitmix64(&mut state) ^ out.rotate_left(17);
    }
    out
}

/// Seeded stream cipher RNG used throughout the crate.
pub fn make_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
