//! Seeded random streams.
//!
//! Every generator is ChaCha8 keyed by the 64-bit user seed. Streams are
//! split by the ChaCha stream id, never by drawing from a shared parent:
//!
//! | stream | use |
//! |--------|-----|
//! | 0 | problem instance (matrices) |
//! | 1 | starting point |
//! | 2 | sampling in tests and certification probes |
//!
//! Regenerating an instance therefore never perturbs the start, and vice
//! versa.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Rng64 = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Instance = 0,
    Init = 1,
    Sampling = 2,
}

pub fn stream(seed: u64, which: Stream) -> Rng64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng)).collect()
}
