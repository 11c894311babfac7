//! Share counts for a long call hedged once at `t0` and held until `t0 + dt`.
//!
//! All formulas are sums of named adjustment terms on top of the BSM delta:
//!
//! | term            | expression                    |
//! |-----------------|-------------------------------|
//! | drift           | `V_SS (mu - r) S dt`          |
//! | time decay      | `lambda1 V_St dt`             |
//! | vol drift       | `lambda2 V_S,sigma f0 dt`     |
//! | vol convexity   | `1/2 V_S,sigma,sigma g0^2 dt` |
//!
//! The view-adjusted count [`n_star`] uses drift, vol drift (with unit
//! multiplier) and vol convexity. It coincides with [`n_generic`] evaluated on
//! the line of variance minimisers `lambda2 = lambda2_star(lambda1)`, and in
//! particular at `lambda1 = lambda2 = lambda_star`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greeks::{GreeksBundle, OptionSpec};
use crate::vol::VolProcessSpec;

/// Relative size below which a multiplier's denominator counts as zero.
pub const DEGENERATE_TOLERANCE: f64 = 1e-14;

/// Views held over the holding interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketView {
    /// Growth rate of the underlying, per year.
    pub mu: f64,
    /// Holding interval `t1 - t0` in years.
    pub dt: f64,
    pub vol_process: VolProcessSpec,
}

impl MarketView {
    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::domain("mu", self.mu, "must be finite"));
        }
        if !(self.dt >= 0.0 && self.dt.is_finite()) {
            return Err(Error::domain("dt", self.dt, "must be finite and >= 0"));
        }
        self.vol_process
            .validate()
            .map_err(|v| Error::Config(format!("vol_model.{}: {v}", v.parameter)))
    }

    /// The holding interval must end before expiry.
    pub fn validate_for(&self, option: &OptionSpec) -> Result<()> {
        self.validate()?;
        if self.dt >= option.maturity {
            return Err(Error::MaturityExhausted {
                dt: self.dt,
                maturity: option.maturity,
            });
        }
        Ok(())
    }
}

/// A share count and the terms it is built from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct HedgeRatio {
    pub n_shares: f64,
    /// `V_S`
    pub base: f64,
    pub drift: f64,
    pub time_decay: f64,
    pub vol_drift: f64,
    pub vol_convexity: f64,
}

impl HedgeRatio {
    fn from_terms(base: f64, drift: f64, time_decay: f64, vol_drift: f64, vol_convexity: f64) -> Self {
        HedgeRatio {
            n_shares: base + drift + time_decay + vol_drift + vol_convexity,
            base,
            drift,
            time_decay,
            vol_drift,
            vol_convexity,
        }
    }

    /// `n_shares - base`, summed from the terms to avoid cancellation.
    pub fn adjustment(&self) -> f64 {
        self.drift + self.time_decay + self.vol_drift + self.vol_convexity
    }
}

fn drift_term(g: &GreeksBundle, view: &MarketView, spot: f64, rate: f64) -> f64 {
    g.gamma * (view.mu - rate) * spot * view.dt
}

fn vol_convexity_term(g: &GreeksBundle, view: &MarketView) -> f64 {
    let g0 = view.vol_process.g0();
    0.5 * g.vanna_vol * g0 * g0 * view.dt
}

pub fn n_bsm(g: &GreeksBundle) -> HedgeRatio {
    HedgeRatio::from_terms(g.delta, 0.0, 0.0, 0.0, 0.0)
}

/// Delta corrected for the growth-rate view only.
pub fn n_mastinsek(g: &GreeksBundle, view: &MarketView, spot: f64, rate: f64) -> HedgeRatio {
    HedgeRatio::from_terms(g.delta, drift_term(g, view, spot, rate), 0.0, 0.0, 0.0)
}

/// `V_S + lambda1 V_St dt + lambda2 V_S,sigma f0 dt`
pub fn n_generic(g: &GreeksBundle, view: &MarketView, lambda1: f64, lambda2: f64) -> HedgeRatio {
    HedgeRatio::from_terms(
        g.delta,
        0.0,
        lambda1 * g.charm * view.dt,
        lambda2 * g.vanna * view.vol_process.f0() * view.dt,
        0.0,
    )
}

pub fn n_star(g: &GreeksBundle, view: &MarketView, spot: f64, rate: f64) -> HedgeRatio {
    HedgeRatio::from_terms(
        g.delta,
        drift_term(g, view, spot, rate),
        0.0,
        g.vanna * view.vol_process.f0() * view.dt,
        vol_convexity_term(g, view),
    )
}

/// Numerator shared by both optimal multipliers:
/// `V_S,sigma f0 + 1/2 V_S,sigma,sigma g0^2 + V_SS (mu - r) S`, and the sum of
/// its absolute terms.
fn optimal_numerator(g: &GreeksBundle, view: &MarketView, spot: f64, rate: f64) -> (f64, f64) {
    let f0 = view.vol_process.f0();
    let g0 = view.vol_process.g0();
    let terms = [
        g.vanna * f0,
        0.5 * g.vanna_vol * g0 * g0,
        g.gamma * (view.mu - rate) * spot,
    ];
    (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
}

fn checked_ratio(quantity: &'static str, num: f64, den: f64, scale: f64) -> Result<f64> {
    if den.abs() <= DEGENERATE_TOLERANCE * scale || den == 0.0 {
        Err(Error::DegenerateDenominator {
            quantity,
            denominator: den,
        })
    } else {
        Ok(num / den)
    }
}

/// The `lambda2` minimising the hedging-error variance for a given `lambda1`.
pub fn lambda2_star(g: &GreeksBundle, view: &MarketView, spot: f64, rate: f64, lambda1: f64) -> Result<f64> {
    let (base, base_scale) = optimal_numerator(g, view, spot, rate);
    let num = base - lambda1 * g.charm;
    let den = g.vanna * view.vol_process.f0();
    let scale = base_scale + (lambda1 * g.charm).abs();
    checked_ratio("lambda2_star", num, den, scale)
}

/// The common multiplier `lambda1 = lambda2` minimising the hedging-error variance.
pub fn lambda_star(g: &GreeksBundle, view: &MarketView, spot: f64, rate: f64) -> Result<f64> {
    let (num, num_scale) = optimal_numerator(g, view, spot, rate);
    let vol_part = g.vanna * view.vol_process.f0();
    let den = vol_part + g.charm;
    let scale = num_scale + vol_part.abs() + g.charm.abs();
    checked_ratio("lambda_star", num, den, scale)
}

/// Charm multiplier reproducing the drift-only correction: `(mu - r) S V_SS / V_St`.
pub fn lambda_mastinsek(g: &GreeksBundle, view: &MarketView, spot: f64, rate: f64) -> Result<f64> {
    let num = (view.mu - rate) * spot * g.gamma;
    checked_ratio("lambda_mastinsek", num, g.charm, num.abs() + g.charm.abs())
}

/// A hedging rule evaluated by the simulation harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    Bsm,
    Mastinsek,
    Generic { lambda1: f64, lambda2: f64 },
    Star,
}

impl Strategy {
    pub fn hedge(&self, g: &GreeksBundle, view: &MarketView, spot: f64, rate: f64) -> HedgeRatio {
        match *self {
            Strategy::Bsm => n_bsm(g),
            Strategy::Mastinsek => n_mastinsek(g, view, spot, rate),
            Strategy::Generic { lambda1, lambda2 } => n_generic(g, view, lambda1, lambda2),
            Strategy::Star => n_star(g, view, spot, rate),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Bsm => f.write_str("bsm"),
            Strategy::Mastinsek => f.write_str("mastinsek"),
            Strategy::Generic { lambda1, lambda2 } => write!(f, "generic({lambda1},{lambda2})"),
            Strategy::Star => f.write_str("star"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "bsm" => return Ok(Strategy::Bsm),
            "mastinsek" => return Ok(Strategy::Mastinsek),
            "star" => return Ok(Strategy::Star),
            _ => {}
        }
        let bad = || Error::Config(format!("unknown strategy {s:?}; expected bsm, mastinsek, star or generic(l1,l2)"));
        let args = t
            .strip_prefix("generic(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = args.split_once(',').ok_or_else(bad)?;
        let lambda1: f64 = a.trim().parse().map_err(|_| bad())?;
        let lambda2: f64 = b.trim().parse().map_err(|_| bad())?;
        if !(lambda1.is_finite() && lambda2.is_finite()) {
            return Err(bad());
        }
        Ok(Strategy::Generic { lambda1, lambda2 })
    }
}

impl Serialize for Strategy {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
