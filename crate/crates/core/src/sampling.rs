//! Seeded randomness shared by verifiers and generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 20_130_101;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `exp(U(ln lo, ln hi))`.
pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    rng.random_range(lo.ln()..hi.ln()).exp()
}

pub fn log_uniform_vec(rng: &mut impl Rng, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..m).map(|_| log_uniform(rng, lo, hi)).collect()
}
