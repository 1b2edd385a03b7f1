//! Seeded random source shared by every stochastic component of a run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Deterministic random source. The same seed always yields the same draw
/// sequence.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream derived from this source's seed and a label.
    pub fn fork(&self, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        Self {
            seed: self.seed,
            inner: rng,
        }
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        loop {
            let u: f64 = self.inner.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Uniform draw on [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.inner.random::<f64>()
    }

    /// Uniform integer in `0..n`. Panics when `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.inner);
        mean + sd * z
    }

    pub fn cauchy(&mut self, location: f64, scale: f64) -> f64 {
        let u = self.uniform();
        location + scale * (std::f64::consts::PI * (u - 0.5)).tan()
    }

    pub fn coin(&mut self) -> bool {
        self.uniform() < 0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        for _ in 0..1000 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
            assert_eq!(a.below(17), b.below(17));
            assert_eq!(a.cauchy(0.5, 0.1).to_bits(), b.cauchy(0.5, 0.1).to_bits());
        }
    }

    #[test]
    fn uniform_open_interval() {
        let mut rng = RandomSource::new(7);
        for _ in 0..100_000 {
            let u = rng.uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn forks_are_distinct_streams() {
        let base = RandomSource::new(3);
        let mut a = base.fork(1);
        let mut b = base.fork(2);
        let xs: Vec<f64> = (0..8).map(|_| a.uniform()).collect();
        let ys: Vec<f64> = (0..8).map(|_| b.uniform()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn cauchy_median_at_location() {
        let mut rng = RandomSource::new(11);
        let mut draws: Vec<f64> = (0..20_001).map(|_| rng.cauchy(0.7, 0.1)).collect();
        draws.sort_by(f64::total_cmp);
        assert!((draws[10_000] - 0.7).abs() < 0.01);
    }
}
