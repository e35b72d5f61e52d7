//! Seeded, reproducible random source.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded generator that also counts the draws it has handed out.
///
/// Identical seeds and identical call sequences give identical outputs.
/// Not meant to be shared between concurrent callers; derive one per task
/// with [`RandomSource::substream`].
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    draws: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            draws: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `index` of the generator seeded with `seed`.
    /// Stream 0 is the same as [`RandomSource::new`].
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        RandomSource {
            seed,
            draws: 0,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of uniform draws consumed so far.
    pub fn position(&self) -> u64 {
        self.draws
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.draws += 1;
        self.rng.gen::<f64>()
    }

    /// Samples an index from `weights` (which sum to one) with one draw.
    /// Zero weights are never selected.
    pub fn choose_index(&mut self, weights: &[f64]) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &p) in weights.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last_positive = i;
                if u < acc {
                    return i;
                }
            }
        }
        // Rounding left the cumulative sum just below one.
        last_positive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::new(7);
        let mut b = RandomSource::new(7);
        for _ in 0..100 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
        assert_eq!(a.position(), 100);
    }

    #[test]
    fn substreams_differ() {
        let mut a = RandomSource::substream(7, 1);
        let mut b = RandomSource::substream(7, 2);
        assert_ne!(a.uniform(), b.uniform());
        let mut c = RandomSource::substream(7, 0);
        let mut d = RandomSource::new(7);
        assert_eq!(c.uniform(), d.uniform());
    }

    #[test]
    fn zero_weights_never_chosen() {
        let mut r = RandomSource::new(1);
        for _ in 0..10_000 {
            assert_eq!(r.choose_index(&[0.0, 1.0]), 1);
            assert_eq!(r.choose_index(&[1.0, 0.0]), 0);
            assert_ne!(r.choose_index(&[0.5, 0.0, 0.5]), 1);
        }
    }
}
