//! Reproducible random streams for parallel fan-out.
//!
//! Every parallel unit of work (a bootstrap replicate, a simulation
//! replicate) gets its own generator derived from the master seed and its
//! index, so results never depend on scheduling.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;

/// SplitMix64 finalizer applied to `seed` mixed with `index`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for stream `stream` of the master `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A uniform draw strictly inside `(0, 1)`, also after narrowing to `T`.
#[inline]
pub fn open_uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let u: f64 = rng.sample(Open01);
    let t = T::lit(u);
    if t >= T::one() {
        T::one() - T::epsilon() * T::lit(0.5)
    } else if t <= T::zero() {
        T::min_positive_value()
    } else {
        t
    }
}
