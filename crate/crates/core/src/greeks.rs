//! Closed-form Black-Scholes-Merton call pricing and the partial derivatives
//! consumed by the hedge formulas and the hedging-error coefficients.
//!
//! Time derivatives are taken with respect to calendar time `t`, i.e. they
//! are `-d/dT` of the corresponding quantity. Vol derivatives are taken with
//! respect to the single vol argument `vol_hat`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;

/// A European call together with the market state it is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub spot: f64,
    pub strike: f64,
    /// Continuously compounded, per year. May be negative.
    pub rate: f64,
    /// Underlying volatility, also used as the implied vol at evaluation.
    pub vol_hat: f64,
    /// Years remaining to expiry.
    pub maturity: f64,
}

impl OptionSpec {
    pub fn new(spot: f64, strike: f64, rate: f64, vol_hat: f64, maturity: f64) -> Result<Self> {
        let spec = OptionSpec {
            spot,
            strike,
            rate,
            vol_hat,
            maturity,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        positive("spot", self.spot)?;
        positive("strike", self.strike)?;
        positive("vol_hat", self.vol_hat)?;
        positive("maturity", self.maturity)?;
        if !self.rate.is_finite() {
            return Err(Error::domain("rate", self.rate, "must be finite"));
        }
        Ok(())
    }

    pub fn with_spot(self, spot: f64) -> Self {
        OptionSpec { spot, ..self }
    }

    pub fn with_vol(self, vol_hat: f64) -> Self {
        OptionSpec { vol_hat, ..self }
    }

    pub fn with_maturity(self, maturity: f64) -> Self {
        OptionSpec { maturity, ..self }
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(field, value, "must be finite and > 0"))
    }
}

/// Price and partial derivatives of the call value `V(S, sigma, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreeksBundle {
    pub price: f64,
    /// V_S
    pub delta: f64,
    /// V_SS
    pub gamma: f64,
    /// V_SSS
    pub speed: f64,
    /// V_sigma
    pub vega: f64,
    /// V_sigma,sigma
    pub volga: f64,
    /// V_sigma,sigma,sigma
    pub ultima: f64,
    /// V_S,t: calendar-time decay of delta.
    pub charm: f64,
    /// V_sigma,t: calendar-time decay of vega.
    pub veta: f64,
    /// V_S,sigma
    pub vanna: f64,
    /// V_SS,sigma
    pub zomma: f64,
    /// V_S,sigma,sigma
    pub vanna_vol: f64,
}

impl GreeksBundle {
    /// `V_SSS` reconstructed from gamma and charm through the spot derivative
    /// of the pricing PDE.
    pub fn speed_from_pde(&self, spec: &OptionSpec) -> f64 {
        let s = spec.spot;
        let v2 = spec.vol_hat * spec.vol_hat;
        -2.0 / (v2 * s * s) * ((v2 * s + spec.rate * s) * self.gamma + self.charm)
    }

    /// The eleven partial derivatives by name, in a fixed order.
    pub fn named(&self) -> [(&'static str, f64); 11] {
        [
            ("delta", self.delta),
            ("gamma", self.gamma),
            ("speed", self.speed),
            ("vega", self.vega),
            ("volga", self.volga),
            ("ultima", self.ultima),
            ("charm", self.charm),
            ("veta", self.veta),
            ("vanna", self.vanna),
            ("zomma", self.zomma),
            ("vanna_vol", self.vanna_vol),
        ]
    }
}

pub fn d_terms(spec: &OptionSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    Ok(d_terms_unchecked(spec))
}

#[inline]
pub(crate) fn d_terms_unchecked(spec: &OptionSpec) -> (f64, f64) {
    let sd = spec.vol_hat * spec.maturity.sqrt();
    let d1 = ((spec.spot / spec.strike).ln()
        + (spec.rate + 0.5 * spec.vol_hat * spec.vol_hat) * spec.maturity)
        / sd;
    (d1, d1 - sd)
}

pub fn price(spec: &OptionSpec) -> Result<f64> {
    spec.validate()?;
    Ok(price_unchecked(spec))
}

/// Call price without input validation; callers guarantee the invariants.
#[inline]
pub(crate) fn price_unchecked(spec: &OptionSpec) -> f64 {
    let (d1, d2) = d_terms_unchecked(spec);
    let discounted_strike = spec.strike * (-spec.rate * spec.maturity).exp();
    spec.spot * normal::cdf(d1) - discounted_strike * normal::cdf(d2)
}

pub fn greeks(spec: &OptionSpec) -> Result<GreeksBundle> {
    spec.validate()?;
    let OptionSpec {
        spot: s,
        rate: r,
        vol_hat: vol,
        maturity: t,
        ..
    } = *spec;
    let (d1, d2) = d_terms_unchecked(spec);
    let sqrt_t = t.sqrt();
    let sd = vol * sqrt_t;
    let pdf1 = normal::pdf(d1);

    let delta = normal::cdf(d1);
    let gamma = pdf1 / (s * sd);
    let speed = -gamma / s * (1.0 + d1 / sd);
    let vega = s * pdf1 * sqrt_t;
    let volga = vega * d1 * d2 / vol;
    let d1d2 = d1 * d2;
    let ultima = vega / (vol * vol) * (d1d2 * d1d2 - d1d2 - d1 * d1 - d2 * d2);
    let vanna = -pdf1 * d2 / vol;
    let zomma = gamma * (d1d2 - 1.0) / vol;
    let vanna_vol = -pdf1 / (vol * vol) * (d1 * d2 * d2 - d1 - d2);

    // d(d1)/dT; calendar-time derivatives carry the opposite sign.
    let dd1_dt = (r + 0.5 * vol * vol) / sd - d1 / (2.0 * t);
    let charm = -pdf1 * dd1_dt;
    let veta = -vega * (0.5 / t - d1 * dd1_dt);

    Ok(GreeksBundle {
        price: price_unchecked(spec),
        delta,
        gamma,
        speed,
        vega,
        volga,
        ultima,
        charm,
        veta,
        vanna,
        zomma,
        vanna_vol,
    })
}
