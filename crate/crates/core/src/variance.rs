//! Analytic mean and variance of the one-step hedging error.
//!
//! To order `dt^(3/2)` the hedging error of the generic share count is a
//! polynomial in two independent standard normals, the price shock `Z1` and
//! the vol shock `Z2`:
//!
//! ```text
//! dH = gamma (Z1^2 - 1) + theta Z1 + psi Z1^3 + omega Z2 + tau Z1 Z2
//!    + iota Z2^2 + chi Z1^2 Z2 + xi Z1 Z2^2 + epsilon Z2^3 + V_sigma f0 dt
//! ```
//!
//! with `theta = gamma beta + (1 - lambda1) phi + (1 - lambda2) eta` and
//! `psi = gamma delta - phi / 3`. Only `theta` depends on the multipliers, so
//! the variance is a quadratic in `u = (1 - lambda1) phi + (1 - lambda2) eta`
//! and its minimisers form a line in the `(lambda1, lambda2)` plane.
//!
//! The mean is `iota + V_sigma f0 dt`: every other summand is an odd moment
//! or a centred square.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::greeks::GreeksBundle;
use crate::hedge::{MarketView, DEGENERATE_TOLERANCE};

/// How the last summand of `omega` is formed.
///
/// The vol shock picks up `1/2 V_sigma,t g0 dt^(3/2) Z2` from the cross term
/// `V_sigma,t dsigma dt`. `Literal` drops the `1/2 V_sigma,t` factor and
/// keeps a bare `g0 dt^(3/2)`, for comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OmegaTerm {
    #[default]
    Reconstructed,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorCoefficients {
    pub gamma: f64,
    pub beta: f64,
    pub delta: f64,
    pub phi: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub xi: f64,
    pub omega: f64,
    pub tau: f64,
    pub iota: f64,
    pub chi: f64,
    /// Deterministic summand `V_sigma f0 dt`.
    pub mean_term: f64,
    pub literal_omega: bool,
}

impl ErrorCoefficients {
    pub const ZERO: ErrorCoefficients = ErrorCoefficients {
        gamma: 0.0,
        beta: 0.0,
        delta: 0.0,
        phi: 0.0,
        eta: 0.0,
        epsilon: 0.0,
        xi: 0.0,
        omega: 0.0,
        tau: 0.0,
        iota: 0.0,
        chi: 0.0,
        mean_term: 0.0,
        literal_omega: false,
    };

    /// `E[dH]`, independent of the multipliers.
    pub fn mean(&self) -> f64 {
        self.iota + self.mean_term
    }

    pub fn is_finite(&self) -> bool {
        [
            self.gamma, self.beta, self.delta, self.phi, self.eta, self.epsilon, self.xi, self.omega,
            self.tau, self.iota, self.chi, self.mean_term,
        ]
        .iter()
        .all(|x| x.is_finite())
    }

    /// The hedging error for one draw of the two shocks.
    pub fn delta_h(&self, lambda1: f64, lambda2: f64, z1: f64, z2: f64) -> f64 {
        let (theta, psi) = theta_psi(self, lambda1, lambda2);
        let (z1s, z2s) = (z1 * z1, z2 * z2);
        self.gamma * (z1s - 1.0)
            + theta * z1
            + psi * z1s * z1
            + self.omega * z2
            + self.tau * z1 * z2
            + self.iota * z2s
            + self.chi * z1s * z2
            + self.xi * z1 * z2s
            + self.epsilon * z2s * z2
            + self.mean_term
    }
}

/// Coefficients with the default form of `omega`.
pub fn coefficients(g: &GreeksBundle, view: &MarketView, spot: f64, rate: f64, vol_hat: f64) -> ErrorCoefficients {
    coefficients_with(g, view, spot, rate, vol_hat, OmegaTerm::Reconstructed)
}

/// All Greeks, `spot` and the vol coefficients `f0`, `g0` are frozen at the
/// start of the holding interval.
pub fn coefficients_with(
    g: &GreeksBundle,
    view: &MarketView,
    spot: f64,
    rate: f64,
    vol_hat: f64,
    omega_term: OmegaTerm,
) -> ErrorCoefficients {
    let dt = view.dt;
    let sqrt_dt = dt.sqrt();
    let dt15 = dt * sqrt_dt;
    let f0 = view.vol_process.f0();
    let g0 = view.vol_process.g0();
    let (s, v) = (spot, vol_hat);
    let drift = view.mu - 0.5 * v * v;

    let last_omega = match omega_term {
        OmegaTerm::Reconstructed => 0.5 * g.veta * g0 * dt15,
        OmegaTerm::Literal => g0 * dt15,
    };

    ErrorCoefficients {
        gamma: 0.5 * g.gamma * v * v * s * s * dt,
        beta: 2.0 * drift / v * sqrt_dt,
        delta: (v * v - 2.0 * rate) / (3.0 * v) * sqrt_dt,
        phi: g.charm * v * s * dt15,
        eta: g.vanna * v * s * f0 * dt15,
        epsilon: g.ultima * g0 * g0 * g0 * dt15 / 6.0,
        xi: 0.5 * g.vanna_vol * g0 * g0 * s * v * dt15,
        omega: g.vega * g0 * sqrt_dt + g.volga * f0 * g0 * dt15 + g.vanna * s * g0 * drift * dt15 + last_omega,
        tau: g.vanna * g0 * s * v * dt,
        iota: 0.5 * g.volga * g0 * g0 * dt,
        chi: 0.5 * g.zomma * s * s * v * v * g0 * dt15 + 0.5 * g.vanna * s * v * v * g0 * dt15,
        mean_term: g.vega * f0 * dt,
        literal_omega: omega_term == OmegaTerm::Literal,
    }
}

/// `(theta, psi)` for the given multipliers.
pub fn theta_psi(c: &ErrorCoefficients, lambda1: f64, lambda2: f64) -> (f64, f64) {
    let theta = c.gamma * c.beta + (1.0 - lambda1) * c.phi + (1.0 - lambda2) * c.eta;
    let psi = c.gamma * c.delta - c.phi / 3.0;
    (theta, psi)
}

/// `E[Z^(2n)] = (2n - 1)!!` for a standard normal `Z`.
pub fn gaussian_even_moment(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "must be >= 1"));
    }
    let mut acc = 1.0_f64;
    for i in 1..=n {
        acc *= (2 * i - 1) as f64;
        if !acc.is_finite() {
            return Err(Error::Overflow(n));
        }
    }
    Ok(acc)
}

/// `E[Z^(2n-1)] = 0`.
pub fn gaussian_odd_moment(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "must be >= 1"));
    }
    Ok(0.0)
}

/// Variance with `theta` given; everything else is fixed by the coefficients.
fn variance_at_theta(c: &ErrorCoefficients, theta: f64, psi: f64) -> f64 {
    let ErrorCoefficients {
        gamma: ga,
        epsilon: ep,
        xi,
        omega: om,
        tau,
        iota,
        chi,
        ..
    } = *c;
    theta * theta + 15.0 * psi * psi + 6.0 * theta * psi + 2.0 * ga * ga + 2.0 * xi * theta + 2.0 * iota * iota
        + 3.0 * xi * xi
        + 6.0 * xi * psi
        + 3.0 * chi * chi
        + 2.0 * chi * om
        + om * om
        + tau * tau
        + 15.0 * ep * ep
        + 6.0 * ep * chi
        + 6.0 * ep * om
}

pub fn var_delta_h(c: &ErrorCoefficients, lambda1: f64, lambda2: f64) -> f64 {
    let (theta, psi) = theta_psi(c, lambda1, lambda2);
    variance_at_theta(c, theta, psi)
}

/// Mean squared hedging error `Var + E[dH]^2`.
pub fn mshe(c: &ErrorCoefficients, lambda1: f64, lambda2: f64) -> f64 {
    let m = c.mean();
    var_delta_h(c, lambda1, lambda2) + m * m
}

/// The minimisers `b = intercept + slope * a` of the variance in the shifted
/// multipliers `a = 1 - lambda1`, `b = 1 - lambda2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizerLine {
    pub intercept: f64,
    pub slope: f64,
    /// Variance along the line.
    pub min_value: f64,
}

impl MinimizerLine {
    pub fn b_at(&self, a: f64) -> f64 {
        self.intercept + self.slope * a
    }

    pub fn lambda2_at(&self, lambda1: f64) -> f64 {
        1.0 - self.b_at(1.0 - lambda1)
    }
}

/// Minimise the variance over `b` for every `a`.
pub fn minimize_f(c: &ErrorCoefficients) -> Result<MinimizerLine> {
    let (_, psi) = theta_psi(c, 1.0, 1.0);
    let gb = c.gamma * c.beta;
    let offset = gb + 3.0 * psi + c.xi;
    let scale = gb.abs() + 3.0 * psi.abs() + c.xi.abs() + c.phi.abs();
    if c.eta == 0.0 || c.eta.abs() <= DEGENERATE_TOLERANCE * scale {
        return Err(Error::DegenerateDenominator {
            quantity: "eta",
            denominator: c.eta,
        });
    }
    // On the line theta = -(3 psi + xi), which completes the square in theta.
    let min_value = variance_at_theta(c, -(3.0 * psi + c.xi), psi);
    Ok(MinimizerLine {
        intercept: -offset / c.eta,
        slope: -c.phi / c.eta,
        min_value,
    })
}
