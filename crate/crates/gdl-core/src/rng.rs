//! Deterministic random number streams.
//!
//! Every stochastic component draws from a ChaCha8 generator seeded through a
//! SplitMix64 avalanche of `master_seed + stream * GOLDEN_GAMMA`, so distinct
//! logical streams (one per learner, one for start-point perturbations, ...)
//! are decorrelated while the whole run stays reproducible from one `u64`.

use rand_chacha::ChaCha8Rng;

/// Weyl increment used by SplitMix64 (2^64 / phi, rounded to odd).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream id reserved for initial-condition perturbations.
pub const STREAM_X0: u64 = 0x5851_F42D_4C95_7F2D;

/// Stream id reserved for monotonicity-probe sampling.
pub const STREAM_SAMPLES: u64 = 0xDA94_2042_E4DD_58B5;

/// SplitMix64 finalizer: a fast, well-mixed bijection on u64.
pub fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for logical stream `stream` under `master_seed`.
///
/// Learners use their player index as the stream id; auxiliary consumers use
/// the reserved `STREAM_*` constants, far from small player indices.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(splitmix64(master_seed.wrapping_add(stream.wrapping_mul(GOLDEN_GAMMA))))
}
