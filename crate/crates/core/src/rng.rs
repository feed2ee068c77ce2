//! Seeding and discrete sampling shared by every sampler.
//!
//! All runs use ChaCha8 seeded from a `u64`. Batches derive one seed per run
//! with [`derive_seed`], so results do not depend on scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{to_f64, Rational};
use num_traits::{Signed, Zero};

pub type SamplerRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SamplerRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th run of a batch started from `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix64(base ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// Inverse-CDF sampler over `0..len` built from exact weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Categorical {
    cdf: Vec<f64>,
}

impl Categorical {
    /// Weights must be non-negative with a positive sum; they are normalised.
    pub fn from_weights(weights: &[Rational]) -> Self {
        assert!(!weights.is_empty(), "empty categorical");
        let total: Rational = weights.iter().sum();
        assert!(total.is_positive(), "categorical weights sum to zero");
        let last_positive = weights
            .iter()
            .rposition(|w| !w.is_zero())
            .expect("positive total");
        let mut acc = Rational::zero();
        let cdf = weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                assert!(!w.is_negative(), "negative categorical weight");
                acc += w;
                if i >= last_positive {
                    1.0
                } else {
                    to_f64(&(&acc / &total))
                }
            })
            .collect();
        Categorical { cdf }
    }

    pub fn uniform(len: usize) -> Self {
        let w = Rational::new(1.into(), (len as i64).into());
        Self::from_weights(&vec![w; len])
    }

    /// Two-point distribution on `{0, 1}` with `Pr(1) = p`.
    pub fn bernoulli(p: &Rational) -> Self {
        let one = Rational::from_integer(1.into());
        Self::from_weights(&[&one - p, p.clone()])
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.gen();
        self.cdf
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cdf.len() - 1) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn deterministic_weight_always_wins() {
        let c = Categorical::from_weights(&[ratio(0, 1), ratio(1, 1), ratio(0, 1)]);
        let mut rng = rng_from_seed(3);
        assert!((0..1000).all(|_| c.sample(&mut rng) == 1));
    }

    #[test]
    fn uniform_matches_explicit_weights() {
        assert_eq!(
            Categorical::uniform(3),
            Categorical::from_weights(&[ratio(1, 3), ratio(1, 3), ratio(1, 3)])
        );
    }

    #[test]
    fn derived_seeds_differ_per_index() {
        let a: Vec<u64> = (0..100).map(|i| derive_seed(7, i)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(a.len(), b.len());
        assert_eq!(derive_seed(7, 5), derive_seed(7, 5));
    }

    #[test]
    fn bernoulli_frequency() {
        let c = Categorical::bernoulli(&ratio(1, 2));
        let mut rng = rng_from_seed(11);
        let ones = (0..100_000).filter(|_| c.sample(&mut rng) == 1).count();
        assert!((ones as f64 / 1e5 - 0.5).abs() < 0.01);
    }
}
