//! Counter-based randomness: every draw site gets its own ChaCha stream keyed by
//! `(seed, domain, index)`, so results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const DOMAIN_GAME: u64 = 1;
pub(crate) const DOMAIN_MONTE_CARLO: u64 = 2;

pub(crate) fn stream_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    debug_assert!(index < 1 << 56);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 56) | index);
    rng
}
