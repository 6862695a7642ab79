//! Deterministic random streams derived from a single master seed.
//!
//! Every consumer of randomness asks for a stream by `(purpose, index)`, so
//! results never depend on thread scheduling or evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purposes get disjoint stream ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    CellSampling = 1,
    Lyapunov = 2,
    Bifurcation = 3,
    Test = 15,
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 59) ^ index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream(7, Purpose::CellSampling, 3).random();
        let b: u64 = stream(7, Purpose::CellSampling, 3).random();
        let c: u64 = stream(7, Purpose::CellSampling, 4).random();
        let d: u64 = stream(7, Purpose::Lyapunov, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
