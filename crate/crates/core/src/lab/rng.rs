//! Seeded sampling of initial states.
//!
//! Every random draw comes from SplitMix64. Stream `i` of base seed `s` is
//! seeded with `s + (i + 1) * 0x9E3779B97F4A7C15` (wrapping), so trial `i`
//! sees the same numbers regardless of how trials are scheduled.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::dynamics::State3;
use crate::error::{Error, Result};
use crate::numerics::PrecisionConfig;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Exact-mode samples are rounded to this grid: `round(x * DEN) / DEN`.
pub const EXACT_SAMPLE_DENOMINATOR: i64 = 1000;

pub fn stream_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_add(1).wrapping_mul(GOLDEN))
}

pub fn stream(seed: u64, index: usize) -> SplitMix64 {
    SplitMix64::seed_from_u64(stream_seed(seed, index))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Log-uniform on `(low, high)`; needs `low > 0`.
    LogUniform,
    /// Uniform on `(low, high]`.
    Uniform,
}

/// Coordinate box for random initial states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleBox {
    pub low: f64,
    pub high: f64,
    pub distribution: Distribution,
}

impl Default for SampleBox {
    fn default() -> Self {
        Self {
            low: 0.01,
            high: 100.0,
            distribution: Distribution::LogUniform,
        }
    }
}

impl SampleBox {
    pub fn log_uniform(low: f64, high: f64) -> Result<Self> {
        let b = Self {
            low,
            high,
            distribution: Distribution::LogUniform,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        let b = Self {
            low,
            high,
            distribution: Distribution::Uniform,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.distribution {
            Distribution::LogUniform => self.low > 0.0 && self.low < self.high,
            Distribution::Uniform => self.low >= 0.0 && self.low < self.high,
        };
        if ok && self.high.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "invalid sample box ({}, {})",
                self.low, self.high
            )))
        }
    }

    fn draw(&self, rng: &mut SplitMix64) -> f64 {
        let u: f64 = rng.gen();
        match self.distribution {
            Distribution::LogUniform => {
                (self.low.ln() + u * (self.high.ln() - self.low.ln())).exp()
            }
            // 1 - u lies in (0, 1], so the draw is never `low`.
            Distribution::Uniform => self.low + (1.0 - u) * (self.high - self.low),
        }
    }

    /// One random state from `rng`. Exact mode rounds each coordinate to a
    /// multiple of `1/EXACT_SAMPLE_DENOMINATOR` (at least one grid step).
    pub fn sample(&self, cfg: &PrecisionConfig, rng: &mut SplitMix64) -> Result<State3> {
        let x = [self.draw(rng), self.draw(rng), self.draw(rng)];
        if cfg.is_exact() {
            let d = EXACT_SAMPLE_DENOMINATOR;
            let q = |v: f64| cfg.ratio(((v * d as f64).round() as i64).max(1), d);
            State3::new(q(x[0]), q(x[1]), q(x[2]))
        } else {
            State3::from_f64(cfg, x)
        }
    }
}

/// `count` states, state `i` drawn from stream `i`.
pub fn random_states(
    cfg: &PrecisionConfig,
    seed: u64,
    count: usize,
    bx: &SampleBox,
) -> Result<Vec<State3>> {
    bx.validate()?;
    (0..count)
        .map(|i| bx.sample(cfg, &mut stream(seed, i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let cfg = PrecisionConfig::float();
        let bx = SampleBox::default();
        let a = random_states(&cfg, 7, 20, &bx).unwrap();
        let b = random_states(&cfg, 7, 20, &bx).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
        assert_ne!(random_states(&cfg, 8, 1, &bx).unwrap()[0], a[0]);
        // Stream i does not depend on how many states were requested.
        assert_eq!(random_states(&cfg, 7, 5, &bx).unwrap()[..], a[..5]);
    }

    #[test]
    fn samples_stay_in_box() {
        let cfg = PrecisionConfig::float();
        for bx in [
            SampleBox::log_uniform(0.01, 100.0).unwrap(),
            SampleBox::uniform(0.0, 10.0).unwrap(),
        ] {
            for s in random_states(&cfg, 1, 500, &bx).unwrap() {
                for x in s.to_f64() {
                    assert!(x > 0.0 && x >= bx.low && x <= bx.high, "{x}");
                }
            }
        }
    }

    #[test]
    fn exact_samples_are_small_rationals() {
        let cfg = PrecisionConfig::exact();
        for s in random_states(&cfg, 3, 100, &SampleBox::default()).unwrap() {
            for x in s.coords() {
                let r = x.as_rational().unwrap();
                assert!(r.denom() <= &num_bigint::BigInt::from(EXACT_SAMPLE_DENOMINATOR));
                assert!(x.is_positive());
            }
        }
    }

    #[test]
    fn bad_boxes() {
        assert!(SampleBox::log_uniform(0.0, 1.0).is_err());
        assert!(SampleBox::log_uniform(2.0, 1.0).is_err());
        assert!(SampleBox::uniform(-1.0, 1.0).is_err());
    }
}
