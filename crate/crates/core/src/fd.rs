//! Finite-difference cross-check of the closed-form Greeks.
//!
//! Every derivative is re-derived from [`crate::greeks::price`] alone with
//! tensor-product central stencils in `(S, sigma, T)`, Richardson-extrapolated
//! over the step pair `(h, h/2)`. An n-th order difference uses the relative
//! step `rel_step^(1/n)` applied to the natural length scale of each
//! coordinate, so the caller's `rel_step` is the step of the first-order
//! differences and higher orders back off to keep roundoff bounded.
//!
//! When the call is in the money the differences are taken on the put leg
//! `P = K e^{-rT} Phi(-d2) - S Phi(-d1)` and the forward `S - K e^{-rT}` is
//! added back through its exact derivatives (only its delta is nonzero among
//! the targets). Differencing the out-of-the-money leg keeps the roundoff of
//! each evaluation proportional to a small number rather than to `S`.
//!
//! Each entry also reports the roundoff resolution of its stencil. Far in the
//! tails a Greek can be smaller than anything a difference of prices can
//! resolve; callers comparing against a tolerance should use
//! [`FdEntry::agrees`], which adds that resolution to the relative allowance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::greeks::{self, GreeksBundle, OptionSpec};
use crate::normal;

pub const MIN_REL_STEP: f64 = 1e-8;
pub const MAX_REL_STEP: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdEntry {
    pub name: &'static str,
    /// Total derivative order.
    pub order: u8,
    pub analytic: f64,
    pub finite_difference: f64,
    pub abs_error: f64,
    /// `abs_error / |analytic|`; infinite when the analytic value is exactly zero
    /// and the difference is not.
    pub rel_error: f64,
    /// Roundoff bound of the difference stencil in the Greek's own units.
    pub resolution: f64,
}

impl FdEntry {
    /// `|fd - analytic| <= rel_tol * |analytic| + resolution`
    pub fn agrees(&self, rel_tol: f64) -> bool {
        self.abs_error <= rel_tol * self.analytic.abs() + self.resolution
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdReport {
    pub rel_step: f64,
    pub entries: Vec<FdEntry>,
}

impl FdReport {
    pub fn max_rel_error(&self, order: u8) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.order == order)
            .map(|e| e.rel_error)
            .fold(0.0, f64::max)
    }

    pub fn entry(&self, name: &str) -> Option<&FdEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// First and second order entries must agree to `low_order_tol`, third
    /// order ones to `third_order_tol`.
    pub fn all_agree(&self, low_order_tol: f64, third_order_tol: f64) -> bool {
        self.entries.iter().all(|e| {
            let tol = if e.order >= 3 { third_order_tol } else { low_order_tol };
            e.agrees(tol)
        })
    }
}

/// Derivative orders in `(S, sigma, T)`.
struct Target {
    name: &'static str,
    orders: [u8; 3],
    pick: fn(&GreeksBundle) -> f64,
}

const TARGETS: [Target; 11] = [
    Target { name: "delta", orders: [1, 0, 0], pick: |g| g.delta },
    Target { name: "gamma", orders: [2, 0, 0], pick: |g| g.gamma },
    Target { name: "speed", orders: [3, 0, 0], pick: |g| g.speed },
    Target { name: "vega", orders: [0, 1, 0], pick: |g| g.vega },
    Target { name: "volga", orders: [0, 2, 0], pick: |g| g.volga },
    Target { name: "ultima", orders: [0, 3, 0], pick: |g| g.ultima },
    Target { name: "charm", orders: [1, 0, 1], pick: |g| g.charm },
    Target { name: "veta", orders: [0, 1, 1], pick: |g| g.veta },
    Target { name: "vanna", orders: [1, 1, 0], pick: |g| g.vanna },
    Target { name: "zomma", orders: [2, 1, 0], pick: |g| g.zomma },
    Target { name: "vanna_vol", orders: [1, 2, 0], pick: |g| g.vanna_vol },
];

/// Central stencil `(offset, weight)` for a derivative of the given order with unit step.
fn stencil(order: u8) -> &'static [(f64, f64)] {
    match order {
        0 => &[(0.0, 1.0)],
        1 => &[(-1.0, -0.5), (1.0, 0.5)],
        2 => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
        3 => &[(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)],
        _ => unreachable!("derivatives above third order are not used"),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Leg {
    Call,
    Put,
}

/// Value of the chosen leg and the magnitude of its two summands.
fn leg_value(spec: &OptionSpec, leg: Leg) -> (f64, f64) {
    let (d1, d2) = greeks::d_terms_unchecked(spec);
    let discounted_strike = spec.strike * (-spec.rate * spec.maturity).exp();
    let (a, b) = match leg {
        Leg::Call => (spec.spot * normal::cdf(d1), discounted_strike * normal::cdf(d2)),
        Leg::Put => (discounted_strike * normal::cdf(-d2), spec.spot * normal::cdf(-d1)),
    };
    (a - b, a.abs() + b.abs())
}

/// Stencil estimate and the largest summand magnitude met on the stencil.
fn tensor_difference(spec: &OptionSpec, leg: Leg, orders: [u8; 3], steps: [f64; 3]) -> (f64, f64) {
    let mut acc = 0.0;
    let mut magnitude: f64 = 0.0;
    for &(os, ws) in stencil(orders[0]) {
        for &(ov, wv) in stencil(orders[1]) {
            for &(ot, wt) in stencil(orders[2]) {
                let shifted = OptionSpec {
                    spot: spec.spot + os * steps[0],
                    vol_hat: spec.vol_hat + ov * steps[1],
                    maturity: spec.maturity + ot * steps[2],
                    ..*spec
                };
                let (value, size) = leg_value(&shifted, leg);
                acc += ws * wv * wt * value;
                magnitude = magnitude.max(size);
            }
        }
    }
    let denom: f64 = (0..3).map(|i| steps[i].powi(orders[i] as i32)).product();
    (acc / denom, magnitude)
}

fn stencil_weight_norm(orders: [u8; 3]) -> f64 {
    orders
        .iter()
        .map(|&o| stencil(o).iter().map(|(_, w)| w.abs()).sum::<f64>())
        .product()
}

/// Natural length scales of `(S, sigma, T)` for the spec: the distance over
/// which `d1` moves by about one unit.
fn natural_scales(spec: &OptionSpec) -> [f64; 3] {
    let (d1, d2) = greeks::d_terms(spec).expect("validated by caller");
    let sd = spec.vol_hat * spec.maturity.sqrt();
    let tail = 1.0_f64.max(d1.abs()).max(d2.abs());
    [
        spec.spot * sd / tail,
        spec.vol_hat / (tail * tail),
        spec.maturity / (tail * tail),
    ]
}

pub fn fd_validate(spec: &OptionSpec, rel_step: f64) -> Result<FdReport> {
    if !(MIN_REL_STEP..=MAX_REL_STEP).contains(&rel_step) {
        return Err(Error::domain(
            "rel_step",
            rel_step,
            "must lie in [1e-8, 1e-2]",
        ));
    }
    let bundle = greeks::greeks(spec)?;
    let scales = natural_scales(spec);
    let (d1, d2) = greeks::d_terms_unchecked(spec);
    // Rounding in d (about eps * |d|) is amplified by |d| through the Gaussian.
    let conditioning = 1.0_f64.max(d1 * d1).max(d2 * d2);
    let leg = if d1 > 0.0 {
        Leg::Put
    } else {
        Leg::Call
    };

    let entries = TARGETS
        .iter()
        .map(|t| {
            let order: u8 = t.orders.iter().sum();
            let rel = rel_step.powf(1.0 / order as f64);
            let steps = [0, 1, 2].map(|i| rel * scales[i]);
            let half = steps.map(|h| 0.5 * h);
            let (coarse, mag_coarse) = tensor_difference(spec, leg, t.orders, steps);
            let (fine, mag_fine) = tensor_difference(spec, leg, t.orders, half);
            let extrapolated = (4.0 * fine - coarse) / 3.0;
            let sign = if t.orders[2] % 2 == 1 { -1.0 } else { 1.0 };
            // The forward S - K e^{-rT} contributes only to delta.
            let forward = if leg == Leg::Put && t.orders == [1, 0, 0] {
                1.0
            } else {
                0.0
            };
            let fd = sign * extrapolated + forward;

            let denom_fine: f64 = (0..3).map(|i| half[i].powi(t.orders[i] as i32)).product();
            let resolution = 8.0 * f64::EPSILON * conditioning * mag_coarse.max(mag_fine)
                * stencil_weight_norm(t.orders)
                / denom_fine;

            let analytic = (t.pick)(&bundle);
            let abs_error = (fd - analytic).abs();
            let rel_error = if analytic != 0.0 {
                abs_error / analytic.abs()
            } else if abs_error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            FdEntry {
                name: t.name,
                order,
                analytic,
                finite_difference: fd,
                abs_error,
                rel_error,
                resolution,
            }
        })
        .collect();

    Ok(FdReport { rel_step, entries })
}
