//! Seeded, splittable random streams and exact dyadic probabilities.
//!
//! Each experiment owns a master seed; every trial, cell, or round derives
//! its own [`RngStream`] by stream id. Streams with distinct ids are
//! independent ChaCha streams, so trials can run concurrently (or be
//! reordered) without changing any draw.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A named position in the seeded randomness: `(master_seed, stream_id)`.
///
/// Identical pairs yield identical draw sequences; distinct stream ids yield
/// streams that are usable concurrently without coordination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Same master seed, different stream.
    pub fn with_stream(self, stream_id: u64) -> Self {
        Self {
            master_seed: self.master_seed,
            ..self
        }
        .set(stream_id)
    }

    fn set(mut self, stream_id: u64) -> Self {
        self.stream_id = stream_id;
        self
    }

    /// Instantiate the generator at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Stream-id packing for experiments indexed by `(kind, cell, trial)`.
///
/// The packing is injective for `kind < 16`, `cell < 2^16`, `trial < 2^44`,
/// which covers every sweep in this crate; out-of-range values are rejected.
pub fn pack_stream(kind: u64, cell: u64, trial: u64) -> u64 {
    assert!(kind < 1 << 4 && cell < 1 << 16 && trial < 1 << 44);
    (kind << 60) | (cell << 44) | trial
}

/// An exactly represented sampling probability `threshold / 2^64`.
///
/// The Bernoulli draw compares one `u64` against the threshold, so the
/// probability actually sampled is this dyadic rational, not the `f64` it was
/// built from. Exact-expectation computations use [`Prob::as_rational`] and
/// therefore agree with the sampler to infinite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Prob {
    threshold: u128,
}

impl Prob {
    pub const ZERO: Prob = Prob { threshold: 0 };
    pub const ONE: Prob = Prob { threshold: 1 << 64 };

    /// Nearest dyadic probability at 64-bit resolution.
    pub fn from_f64(p: f64) -> crate::error::Result<Self> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(crate::error::Error::InvalidProbability { p });
        }
        if p >= 1.0 {
            return Ok(Self::ONE);
        }
        // p < 1 here, so p * 2^64 < 2^64 and the rounding stays in range.
        let threshold = (p * 2f64.powi(64)).round() as u128;
        Ok(Self {
            threshold: threshold.min((1 << 64) - 1),
        })
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> bool {
        (rng.next_u64() as u128) < self.threshold
    }

    /// The raw comparison threshold out of `2^64`.
    pub fn threshold(&self) -> u128 {
        self.threshold
    }

    /// The exact probability: `threshold / 2^64`.
    pub fn as_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.threshold),
            BigInt::from(1u128 << 64),
        )
    }

    pub fn as_f64(&self) -> f64 {
        self.threshold as f64 / 2f64.powi(64)
    }

    pub fn is_zero(&self) -> bool {
        self.threshold == 0
    }

    pub fn is_one(&self) -> bool {
        self.threshold == 1 << 64
    }

    /// `p + q - pq`, the union of two independent rounds, exactly.
    pub fn union(&self, other: &Prob) -> BigRational {
        let p = self.as_rational();
        let q = other.as_rational();
        &p + &q - &p * &q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: Vec<u64> = {
            let mut r = RngStream::new(7, 3).rng();
            (0..8).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::new(7, 3).rng();
            (0..8).map(|_| r.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut r = RngStream::new(7, 4).rng();
            (0..8).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn prob_endpoints() {
        let mut rng = RngStream::new(1, 0).rng();
        assert!((0..100).all(|_| !Prob::ZERO.sample(&mut rng)));
        assert!((0..100).all(|_| Prob::ONE.sample(&mut rng)));
        assert!(Prob::from_f64(1.5).is_err());
        assert!(Prob::from_f64(-0.1).is_err());
    }

    #[test]
    fn prob_half_is_exact() {
        let half = Prob::from_f64(0.5).unwrap();
        assert_eq!(half.as_rational(), BigRational::new(1.into(), 2.into()));
        assert_eq!(half.as_f64(), 0.5);
    }

    #[test]
    fn union_matches_formula() {
        let p = Prob::from_f64(0.25).unwrap();
        let q = Prob::from_f64(0.5).unwrap();
        let u = p.union(&q).to_f64().unwrap();
        assert!((u - 0.625).abs() < 1e-15);
    }

    #[test]
    fn pack_is_injective_on_components() {
        let a = pack_stream(1, 2, 3);
        let b = pack_stream(1, 3, 2);
        let c = pack_stream(2, 1, 3);
        assert!(a != b && a != c && b != c);
    }
}
