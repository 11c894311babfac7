use rayon::prelude::*;
use serde::Serialize;

use super::estimate::{estimate_errors, SimResult};
use super::SimConfig;
use crate::error::{Error, Result};
use crate::hedge::Strategy;
use crate::vol::VolModel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub mu: f64,
    pub mu_sigma: f64,
    pub result: SimResult,
}

/// One cell of a difference matrix, `a` minus `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffCell {
    pub mu: f64,
    pub mu_sigma: f64,
    pub mahe_a: f64,
    pub mahe_b: f64,
    pub diff: f64,
    pub diff_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub mu_grid: Vec<f64>,
    pub mu_sigma_grid: Vec<f64>,
    /// Row-major in `mu`, then `mu_sigma`.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    /// MAHE difference `a - b` in every cell, in the order of `cells`.
    pub fn mahe_difference(&self, a: Strategy, b: Strategy) -> Option<Vec<DiffCell>> {
        self.cells
            .iter()
            .map(|c| {
                let p = c.result.paired(a, b)?;
                Some(DiffCell {
                    mu: c.mu,
                    mu_sigma: c.mu_sigma,
                    mahe_a: c.result.stats(a)?.mahe,
                    mahe_b: c.result.stats(b)?.mahe,
                    diff: p.mahe_diff,
                    diff_stderr: p.mahe_diff_stderr,
                })
            })
            .collect()
    }

    pub fn cell(&self, mu_index: usize, mu_sigma_index: usize) -> &SweepCell {
        &self.cells[mu_index * self.mu_sigma_grid.len() + mu_sigma_index]
    }
}

/// Runs `base` on every `(mu, mu_sigma)` pair with the same seed.
///
/// The vol model must be a linear drift; its drift is replaced by each
/// `mu_sigma`. BSM, Mastinsek and Star are added to the strategy list if
/// missing.
pub fn sweep(base: &SimConfig, mu_grid: &[f64], mu_sigma_grid: &[f64]) -> Result<SweepResult> {
    if mu_grid.is_empty() || mu_sigma_grid.is_empty() {
        return Err(Error::Config("sweep: grids must not be empty".into()));
    }
    if let Some(x) = mu_grid.iter().chain(mu_sigma_grid).find(|x| !x.is_finite()) {
        return Err(Error::Config(format!("sweep: grid value {x} is not finite")));
    }
    if !matches!(base.view.vol_process.model, VolModel::LinearDrift { .. }) {
        return Err(Error::Config(format!(
            "vol_model.kind: sweep requires linear_drift, got {}",
            base.view.vol_process.kind_name()
        )));
    }
    let mut template = base.clone();
    for s in [Strategy::Bsm, Strategy::Mastinsek, Strategy::Star] {
        if !template.strategies.contains(&s) {
            template.strategies.push(s);
        }
    }
    template.validate()?;

    let points: Vec<(f64, f64)> = mu_grid
        .iter()
        .flat_map(|&mu| mu_sigma_grid.iter().map(move |&ms| (mu, ms)))
        .collect();
    let cells = points
        .par_iter()
        .map(|&(mu, mu_sigma)| {
            let mut cfg = template.clone();
            cfg.view.mu = mu;
            cfg.view.vol_process.model = VolModel::LinearDrift { mu_sigma };
            estimate_errors(&cfg).map(|result| SweepCell { mu, mu_sigma, result })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult {
        mu_grid: mu_grid.to_vec(),
        mu_sigma_grid: mu_sigma_grid.to_vec(),
        cells,
    })
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
