//! Seed derivation and complex Gaussian draws.
//!
//! Every random quantity in the crate is drawn from a ChaCha stream seeded
//! through [`derive_seed`], so a (master seed, stream id) pair fixes the
//! realization regardless of execution order or parallelism.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// SplitMix64 finalizer; good avalanche for cheap seed splitting.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from a master seed and a stream index.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream.wrapping_add(0xA5A5_A5A5_0000_0001)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One draw of a circularly-symmetric complex Gaussian with unit variance
/// (E|x|^2 = 1).
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_gaussian_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}
