//! Shared inputs for the benchmarks.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use torsionlab_core::IntegerMatrix;

/// Square matrices with entries in `-9..=9`, fixed seed.
pub fn random_matrix(n: usize, seed: u64) -> IntegerMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    IntegerMatrix::random(n, n, -9, 9, &mut rng)
}
