use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::rng::{normal, PathRng, Substream};
use super::stats::Welford;
use super::{gbm_step, SigmaMode, SimConfig};
use crate::error::Result;
use crate::greeks::{self, OptionSpec};
use crate::hedge::Strategy;

/// Paths per work unit. Chunks are reduced in index order, so results do
/// not depend on how many workers evaluate them.
pub const CHUNK_PATHS: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyStats {
    pub strategy: Strategy,
    pub n_shares: f64,
    /// Mean absolute hedging error.
    pub mahe: f64,
    pub mahe_stderr: f64,
    /// Mean squared hedging error.
    pub mshe: f64,
    pub mshe_stderr: f64,
    pub mean_dh: f64,
}

/// Per-path differences between strategies `a` and `b` (indices into the
/// configured list), `a` minus `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedDiff {
    pub a: usize,
    pub b: usize,
    pub mahe_diff: f64,
    pub mahe_diff_stderr: f64,
    pub mshe_diff: f64,
    pub mshe_diff_stderr: f64,
}

impl PairedDiff {
    fn reversed(&self) -> PairedDiff {
        PairedDiff {
            a: self.b,
            b: self.a,
            mahe_diff: -self.mahe_diff,
            mshe_diff: -self.mshe_diff,
            ..self.clone()
        }
    }
}

/// Standard errors are NaN when `n_paths == 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub strategies: Vec<StrategyStats>,
    /// Every unordered pair `a < b`.
    pub pairs: Vec<PairedDiff>,
    pub wall_seconds: f64,
}

impl SimResult {
    pub fn stats(&self, strategy: Strategy) -> Option<&StrategyStats> {
        self.strategies.iter().find(|s| s.strategy == strategy)
    }

    /// Paired statistics of `a` minus `b`, matched by first occurrence.
    pub fn paired(&self, a: Strategy, b: Strategy) -> Option<PairedDiff> {
        let ia = self.strategies.iter().position(|s| s.strategy == a)?;
        let ib = self.strategies.iter().position(|s| s.strategy == b)?;
        if ia == ib {
            return Some(PairedDiff {
                a: ia,
                b: ib,
                mahe_diff: 0.0,
                mahe_diff_stderr: 0.0,
                mshe_diff: 0.0,
                mshe_diff_stderr: 0.0,
            });
        }
        let (lo, hi) = (ia.min(ib), ia.max(ib));
        let p = self.pairs.iter().find(|p| p.a == lo && p.b == hi)?;
        Some(if ia == lo { p.clone() } else { p.reversed() })
    }
}

#[derive(Clone)]
struct Accumulator {
    abs: Vec<Welford>,
    sq: Vec<Welford>,
    raw: Vec<Welford>,
    pair_abs: Vec<Welford>,
    pair_sq: Vec<Welford>,
}

impl Accumulator {
    fn new(k: usize) -> Self {
        let pairs = k * k.saturating_sub(1) / 2;
        Accumulator {
            abs: vec![Welford::default(); k],
            sq: vec![Welford::default(); k],
            raw: vec![Welford::default(); k],
            pair_abs: vec![Welford::default(); pairs],
            pair_sq: vec![Welford::default(); pairs],
        }
    }

    fn push(&mut self, dh: &[f64]) {
        for (i, &x) in dh.iter().enumerate() {
            self.abs[i].push(x.abs());
            self.sq[i].push(x * x);
            self.raw[i].push(x);
        }
        let mut p = 0;
        for i in 0..dh.len() {
            for j in i + 1..dh.len() {
                self.pair_abs[p].push(dh[i].abs() - dh[j].abs());
                self.pair_sq[p].push(dh[i] * dh[i] - dh[j] * dh[j]);
                p += 1;
            }
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        let groups = [
            (&mut self.abs, &other.abs),
            (&mut self.sq, &other.sq),
            (&mut self.raw, &other.raw),
            (&mut self.pair_abs, &other.pair_abs),
            (&mut self.pair_sq, &other.pair_sq),
        ];
        for (mine, theirs) in groups {
            for (a, b) in mine.iter_mut().zip(theirs) {
                a.merge(b);
            }
        }
    }
}

/// Everything about a configuration that is shared by all paths.
struct PathModel<'a> {
    config: &'a SimConfig,
    rng: PathRng,
    sqrt_dt: f64,
    v0: f64,
    end: OptionSpec,
    n_shares: Vec<f64>,
}

impl PathModel<'_> {
    fn sigma1(&self, path: u64) -> f64 {
        let vp = &self.config.view.vol_process;
        let dt = self.config.view.dt;
        match self.config.sigma_mode {
            SigmaMode::Deterministic => vp.step_unchecked(vp.sigma0, dt, self.sqrt_dt, 0.0),
            SigmaMode::Stochastic { n_substeps } => {
                let h = dt / n_substeps as f64;
                let sqrt_h = h.sqrt();
                let mut stream = self.rng.stream(path, Substream::Vol);
                let mut sigma = vp.sigma0;
                for _ in 0..n_substeps {
                    sigma = vp.step_unchecked(sigma, h, sqrt_h, normal(&mut stream));
                }
                sigma
            }
        }
    }

    /// Hedging errors of every strategy on one path.
    ///
    /// With `Pi = V - n S` the error is `(V1 - V0 - V0 r dt) - n (S1 - S0 - S0 r dt)`,
    /// so the option is repriced once per path.
    fn evaluate(&self, path: u64, out: &mut [f64]) {
        let spec = &self.config.option;
        let view = &self.config.view;
        let z1 = normal(&mut self.rng.stream(path, Substream::Price));
        let s1 = gbm_step(spec.spot, view.mu, spec.vol_hat, view.dt, self.sqrt_dt, z1);
        let sigma1 = self.sigma1(path);
        let end = OptionSpec {
            spot: s1,
            vol_hat: sigma1,
            ..self.end
        };
        let v1 = greeks::price_unchecked(&end);
        let carry = spec.rate * view.dt;
        let option_leg = v1 - self.v0 - self.v0 * carry;
        let stock_leg = s1 - spec.spot - spec.spot * carry;
        for (o, n) in out.iter_mut().zip(&self.n_shares) {
            *o = option_leg - n * stock_leg;
        }
    }
}

/// Estimates MAHE and MSHE of every configured strategy on common draws.
///
/// The result is a pure function of the configuration: path `i` always sees
/// the same shocks and chunks are combined in a fixed order.
pub fn estimate_errors(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let started = Instant::now();
    let spec = &config.option;
    let view = &config.view;
    let g = greeks::greeks(spec)?;
    let n_shares: Vec<f64> = config
        .strategies
        .iter()
        .map(|s| s.hedge(&g, view, spec.spot, spec.rate).n_shares)
        .collect();
    let model = PathModel {
        config,
        rng: PathRng::new(config.seed),
        sqrt_dt: view.dt.sqrt(),
        v0: g.price,
        end: spec.with_maturity(spec.maturity - view.dt),
        n_shares: n_shares.clone(),
    };

    let k = config.strategies.len();
    let n_chunks = config.n_paths.div_ceil(CHUNK_PATHS);
    let chunks: Vec<Accumulator> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Accumulator::new(k);
            let mut dh = vec![0.0; k];
            let end = ((c + 1) * CHUNK_PATHS).min(config.n_paths);
            for path in c * CHUNK_PATHS..end {
                model.evaluate(path, &mut dh);
                acc.push(&dh);
            }
            acc
        })
        .collect();
    let mut total = Accumulator::new(k);
    for c in &chunks {
        total.merge(c);
    }

    let strategies = config
        .strategies
        .iter()
        .enumerate()
        .map(|(i, &strategy)| StrategyStats {
            strategy,
            n_shares: n_shares[i],
            mahe: total.abs[i].mean(),
            mahe_stderr: total.abs[i].stderr(),
            mshe: total.sq[i].mean(),
            mshe_stderr: total.sq[i].stderr(),
            mean_dh: total.raw[i].mean(),
        })
        .collect();
    let mut pairs = Vec::new();
    let mut p = 0;
    for a in 0..k {
        for b in a + 1..k {
            pairs.push(PairedDiff {
                a,
                b,
                mahe_diff: total.pair_abs[p].mean(),
                mahe_diff_stderr: total.pair_abs[p].stderr(),
                mshe_diff: total.pair_sq[p].mean(),
                mshe_diff_stderr: total.pair_sq[p].stderr(),
            });
            p += 1;
        }
    }

    Ok(SimResult {
        config: config.clone(),
        strategies,
        pairs,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}
