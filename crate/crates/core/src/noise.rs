//! Seeded rational noise. ChaCha keeps streams reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{ratio, Rat};

/// Offsets are multiples of `delta / 2^20`.
const RESOLUTION: i64 = 1 << 20;

pub type NoiseRng = ChaCha8Rng;

/// Independent stream `stream` under `seed`.
pub fn rng_for(seed: u64, stream: u64) -> NoiseRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform rational in `[-delta, delta]`.
pub fn offset(rng: &mut NoiseRng, delta: &Rat) -> Rat {
    let s = rng.random_range(-RESOLUTION..=RESOLUTION);
    delta * ratio(s, RESOLUTION)
}
