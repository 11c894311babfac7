//! Per-path random streams.
//!
//! Every path owns independent ChaCha8 streams addressed by
//! `(seed, path, substream)`, so a path's draws do not depend on which
//! worker evaluates it or in what order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Substream {
    /// Shock to the underlying.
    Price = 0,
    /// Shocks to the vol process, one per substep.
    Vol = 1,
}

/// The two shocks of one path over a single step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDraw {
    pub z1: f64,
    pub z2: f64,
}

#[derive(Debug, Clone)]
pub struct PathRng {
    base: ChaCha8Rng,
}

impl PathRng {
    pub fn new(seed: u64) -> Self {
        PathRng {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn stream(&self, path: u64, substream: Substream) -> ChaCha8Rng {
        debug_assert!(path < 1 << 62);
        let mut rng = self.base.clone();
        rng.set_stream((path << 2) | substream as u64);
        rng
    }

    pub fn draw(&self, path: u64) -> PathDraw {
        PathDraw {
            z1: normal(&mut self.stream(path, Substream::Price)),
            z2: normal(&mut self.stream(path, Substream::Vol)),
        }
    }
}

#[inline]
pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
