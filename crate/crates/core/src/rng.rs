//! Deterministic random streams.
//!
//! Every stochastic task derives its generator from a master seed and a
//! task counter, so parallel and serial execution orders draw identical
//! numbers and reruns are bit-reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Generator for stream `stream` of master seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
