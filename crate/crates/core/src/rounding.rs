//! Conversion of real-valued flows (new infections, admissions, deaths) into
//! whole persons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingPolicy {
    /// Round half to even. Fully deterministic, no RNG involved.
    #[default]
    HalfEven,
    /// Round up with probability equal to the fractional part, drawing from a
    /// seeded stream so runs stay reproducible.
    Stochastic,
}

/// Rounds flows for one county on one day.
///
/// Stochastic mode derives an independent ChaCha stream from
/// `(seed, day, county)`, so the draws a county sees on a given day do not
/// depend on how many draws other counties or earlier days consumed.
pub struct Rounder {
    rng: Option<ChaCha8Rng>,
}

impl Rounder {
    pub fn half_even() -> Self {
        Self { rng: None }
    }

    pub fn new(policy: RoundingPolicy, seed: u64, day: u32, county: usize) -> Self {
        match policy {
            RoundingPolicy::HalfEven => Self::half_even(),
            RoundingPolicy::Stochastic => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((day as u64) << 32) | county as u64);
                Self { rng: Some(rng) }
            }
        }
    }

    /// Rounds a non-negative flow to whole persons.
    pub fn round(&mut self, x: f64) -> u64 {
        debug_assert!(
            x.is_finite() && x >= 0.0,
            "flow {x} must be finite and >= 0"
        );
        let x = x.max(0.0);
        match &mut self.rng {
            None => x.round_ties_even() as u64,
            Some(rng) => {
                let base = x.floor();
                let frac = x - base;
                let up = frac > 0.0 && rng.random::<f64>() < frac;
                base as u64 + up as u64
            }
        }
    }
}
