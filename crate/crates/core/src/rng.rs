use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for one sampling step; distinct `stream`s of the same seed are independent.
pub(crate) fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
