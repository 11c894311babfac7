//! Monte Carlo estimates of the one-interval hedging error.
//!
//! The underlying takes one exact lognormal step over the holding interval
//! and the option is repriced at the end of it with the terminal implied vol.
//! Every strategy is evaluated on the same draws.

mod estimate;
pub mod rng;
mod stats;
mod sweep;

pub use estimate::{estimate_errors, PairedDiff, SimResult, StrategyStats, CHUNK_PATHS};
pub use rng::{PathDraw, PathRng};
pub use stats::Welford;
pub use sweep::{linspace, sweep, DiffCell, SweepCell, SweepResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greeks::{self, OptionSpec};
use crate::hedge::{MarketView, Strategy};

/// How the implied vol at the end of the interval is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SigmaMode {
    /// `sigma1 = sigma0 + f0 dt`, with no vol shock.
    Deterministic,
    /// Euler-Maruyama path of the vol process with `n_substeps` equal steps.
    Stochastic { n_substeps: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub option: OptionSpec,
    pub view: MarketView,
    pub n_paths: u64,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    pub sigma_mode: SigmaMode,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.option.validate()?;
        self.view.validate_for(&self.option)?;
        if self.n_paths == 0 {
            return Err(Error::Config("simulation.n_paths: must be >= 1".into()));
        }
        if self.n_paths >= 1 << 62 {
            return Err(Error::Config("simulation.n_paths: must be < 2^62".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("simulation.strategies: must not be empty".into()));
        }
        if let SigmaMode::Stochastic { n_substeps: 0 } = self.sigma_mode {
            return Err(Error::Config("simulation.n_substeps: must be >= 1".into()));
        }
        let sigma0 = self.view.vol_process.sigma0;
        if sigma0 != self.option.vol_hat {
            return Err(Error::Config(format!(
                "vol_model.sigma0: {sigma0} must equal option.vol_hat = {}",
                self.option.vol_hat
            )));
        }
        Ok(())
    }
}

/// `S0 exp((mu - vol^2 / 2) dt + vol sqrt(dt) z1)`
pub fn gbm_terminal(s0: f64, mu: f64, vol_hat: f64, dt: f64, z1: f64) -> Result<f64> {
    if !(s0.is_finite() && s0 > 0.0) {
        return Err(Error::domain("spot", s0, "must be finite and > 0"));
    }
    if !(vol_hat.is_finite() && vol_hat >= 0.0) {
        return Err(Error::domain("vol_hat", vol_hat, "must be finite and >= 0"));
    }
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(Error::domain("dt", dt, "must be finite and >= 0"));
    }
    Ok(gbm_step(s0, mu, vol_hat, dt, dt.sqrt(), z1))
}

#[inline]
pub(crate) fn gbm_step(s0: f64, mu: f64, vol_hat: f64, dt: f64, sqrt_dt: f64, z1: f64) -> f64 {
    s0 * ((mu - 0.5 * vol_hat * vol_hat) * dt + vol_hat * sqrt_dt * z1).exp()
}

/// `Pi1 - Pi0 - Pi0 r dt` for the portfolio `V - n S` held over `[0, dt]`.
///
/// `option` describes the position at the start, priced at `option.vol_hat`;
/// at the end it is repriced at spot `s1`, vol `sigma1` and maturity `T - dt`.
pub fn hedging_error(option: &OptionSpec, dt: f64, n_shares: f64, s1: f64, sigma1: f64) -> Result<f64> {
    option.validate()?;
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(Error::domain("dt", dt, "must be finite and >= 0"));
    }
    if dt >= option.maturity {
        return Err(Error::MaturityExhausted {
            dt,
            maturity: option.maturity,
        });
    }
    let end = OptionSpec {
        spot: s1,
        vol_hat: sigma1,
        maturity: option.maturity - dt,
        ..*option
    };
    end.validate()?;
    let pi0 = greeks::price_unchecked(option) - n_shares * option.spot;
    let pi1 = greeks::price_unchecked(&end) - n_shares * s1;
    Ok(pi1 - pi0 - pi0 * option.rate * dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greeks::{greeks, price};
    use crate::vol::VolProcessSpec;
    use approx::assert_relative_eq;

    fn atm() -> OptionSpec {
        OptionSpec::new(100.0, 100.0, 0.05, 0.2, 0.1).unwrap()
    }

    #[test]
    fn gbm_examples() {
        let s = gbm_terminal(100.0, 0.05, 0.2, 0.02, 0.0).unwrap();
        assert_relative_eq!(s, 100.0 * 0.0006_f64.exp(), max_relative = 1e-15);
        assert!((s - 100.0600).abs() < 1e-4);
        for z in [-3.0, 0.0, 2.5] {
            assert_eq!(gbm_terminal(80.0, 0.0, 0.0, 0.7, z).unwrap(), 80.0);
        }
        assert!(gbm_terminal(0.0, 0.05, 0.2, 0.02, 0.0).is_err());
        assert!(gbm_terminal(100.0, 0.05, -0.2, 0.02, 0.0).is_err());
        assert!(gbm_terminal(100.0, 0.05, 0.2, -0.02, 0.0).is_err());
    }

    #[test]
    fn gbm_mean_matches_lognormal_mean() {
        let rng = PathRng::new(9);
        let n = 1_000_000u64;
        let mut acc = Welford::default();
        for i in 0..n {
            acc.push(gbm_terminal(100.0, 0.3, 0.4, 0.25, rng.draw(i).z1).unwrap());
        }
        let want = 100.0 * (0.3_f64 * 0.25).exp();
        assert!((acc.mean() - want).abs() < 4.0 * acc.stderr(), "{} vs {want}", acc.mean());
    }

    #[test]
    fn hedging_error_examples() {
        let spec = atm();
        assert_eq!(hedging_error(&spec.with_maturity(0.1), 0.0, 0.54, 100.0, 0.2).unwrap(), 0.0);

        let zero_rate = OptionSpec { rate: 0.0, ..spec };
        let pnl = hedging_error(&zero_rate, 0.02, 0.0, 104.0, 0.25).unwrap();
        let want = price(&OptionSpec::new(104.0, 100.0, 0.0, 0.25, 0.08).unwrap()).unwrap() - price(&zero_rate).unwrap();
        assert_relative_eq!(pnl, want, max_relative = 1e-14);

        let delta = greeks(&spec).unwrap().delta;
        let dh = hedging_error(&spec, 0.02, delta, 100.0, 0.2).unwrap();
        let v0 = price(&spec).unwrap();
        let v1 = price(&spec.with_maturity(0.08)).unwrap();
        let pi0 = v0 - delta * 100.0;
        assert_relative_eq!(dh, v1 - v0 - pi0 * 0.001, max_relative = 1e-12);
        assert!(dh < 0.0 && dh > -0.5, "{dh}");
    }

    #[test]
    fn hedging_error_rejects_exhausted_maturity() {
        assert!(matches!(
            hedging_error(&atm(), 0.1, 0.5, 100.0, 0.2),
            Err(Error::MaturityExhausted { .. })
        ));
        assert!(hedging_error(&atm(), 0.02, 0.5, 100.0, 0.0).is_err());
    }

    #[test]
    fn config_validation_names_keys() {
        let base = SimConfig {
            option: atm(),
            view: MarketView { mu: 0.05, dt: 0.02, vol_process: VolProcessSpec::linear_drift(0.2, 0.1) },
            n_paths: 10,
            seed: 1,
            strategies: vec![Strategy::Bsm],
            sigma_mode: SigmaMode::Deterministic,
        };
        assert!(base.validate().is_ok());
        let msg = |c: SimConfig| c.validate().unwrap_err().to_string();
        assert!(msg(SimConfig { n_paths: 0, ..base.clone() }).contains("n_paths"));
        assert!(msg(SimConfig { strategies: vec![], ..base.clone() }).contains("strategies"));
        assert!(msg(SimConfig { sigma_mode: SigmaMode::Stochastic { n_substeps: 0 }, ..base.clone() }).contains("n_substeps"));
        let mut off = base.clone();
        off.view.vol_process.sigma0 = 0.25;
        assert!(msg(off).contains("sigma0"));
        let mut late = base.clone();
        late.view.dt = 0.2;
        assert!(matches!(late.validate(), Err(Error::MaturityExhausted { .. })));
    }
}
