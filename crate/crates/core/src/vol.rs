//! Implied-volatility dynamics `d sigma = f(sigma) dt + g(sigma) dW2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower bound applied to simulated vol values.
pub const VOL_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VolModel {
    /// `d sigma = mu_sigma dt`
    LinearDrift { mu_sigma: f64 },
    /// `d sigma = kappa (theta_bar - sigma) dt + alpha dW`
    OrnsteinUhlenbeck { kappa: f64, theta_bar: f64, alpha: f64 },
    /// `d sigma = kappa (theta_bar - sigma) dt + alpha sqrt(sigma) dW`
    Cir { kappa: f64, theta_bar: f64, alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolProcessSpec {
    /// Implied vol at the start of the holding interval.
    pub sigma0: f64,
    #[serde(flatten)]
    pub model: VolModel,
}

/// How `E[delta sigma]` over an interval is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Expectation {
    /// `f(sigma0) dt`, the truncation used by the hedge formulas.
    #[default]
    FirstOrder,
    /// Closed-form mean of the process (OU/CIR: `(theta_bar - sigma0)(1 - e^{-kappa dt})`).
    Exact,
}

/// A failed parameter constraint, e.g. the Feller inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub parameter: &'static str,
    /// Human-readable form of the required inequality.
    pub requirement: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violates {}: {} <= {}",
            self.parameter, self.requirement, self.lhs, self.rhs
        )
    }
}

impl std::error::Error for Violation {}

impl VolProcessSpec {
    pub fn linear_drift(sigma0: f64, mu_sigma: f64) -> Self {
        VolProcessSpec {
            sigma0,
            model: VolModel::LinearDrift { mu_sigma },
        }
    }

    pub fn ornstein_uhlenbeck(sigma0: f64, kappa: f64, theta_bar: f64, alpha: f64) -> Self {
        VolProcessSpec {
            sigma0,
            model: VolModel::OrnsteinUhlenbeck {
                kappa,
                theta_bar,
                alpha,
            },
        }
    }

    pub fn cir(sigma0: f64, kappa: f64, theta_bar: f64, alpha: f64) -> Self {
        VolProcessSpec {
            sigma0,
            model: VolModel::Cir {
                kappa,
                theta_bar,
                alpha,
            },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.model {
            VolModel::LinearDrift { .. } => "linear_drift",
            VolModel::OrnsteinUhlenbeck { .. } => "ornstein_uhlenbeck",
            VolModel::Cir { .. } => "cir",
        }
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let gt = |parameter, requirement, lhs: f64, rhs: f64| {
            if lhs > rhs {
                Ok(())
            } else {
                Err(Violation {
                    parameter,
                    requirement,
                    lhs,
                    rhs,
                })
            }
        };
        gt("sigma0", "sigma0 > 0", self.sigma0, 0.0)?;
        match self.model {
            VolModel::LinearDrift { mu_sigma } => {
                if !mu_sigma.is_finite() {
                    return Err(Violation {
                        parameter: "mu_sigma",
                        requirement: "mu_sigma finite",
                        lhs: mu_sigma,
                        rhs: f64::INFINITY,
                    });
                }
                Ok(())
            }
            VolModel::OrnsteinUhlenbeck {
                kappa,
                theta_bar,
                alpha,
            }
            | VolModel::Cir {
                kappa,
                theta_bar,
                alpha,
            } => {
                gt("kappa", "kappa > 0", kappa, 0.0)?;
                gt("theta_bar", "theta_bar > 0", theta_bar, 0.0)?;
                if !(alpha >= 0.0 && alpha.is_finite()) {
                    return Err(Violation {
                        parameter: "alpha",
                        requirement: "alpha >= 0",
                        lhs: alpha,
                        rhs: 0.0,
                    });
                }
                if matches!(self.model, VolModel::Cir { .. }) {
                    gt(
                        "alpha",
                        "Feller condition 2 kappa theta_bar > alpha^2",
                        2.0 * kappa * theta_bar,
                        alpha * alpha,
                    )?;
                }
                Ok(())
            }
        }
    }

    pub fn drift_at(&self, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        Ok(self.drift_unchecked(sigma))
    }

    pub fn diffusion_at(&self, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        Ok(self.diffusion_unchecked(sigma))
    }

    fn drift_unchecked(&self, sigma: f64) -> f64 {
        match self.model {
            VolModel::LinearDrift { mu_sigma } => mu_sigma,
            VolModel::OrnsteinUhlenbeck {
                kappa, theta_bar, ..
            }
            | VolModel::Cir {
                kappa, theta_bar, ..
            } => kappa * (theta_bar - sigma),
        }
    }

    fn diffusion_unchecked(&self, sigma: f64) -> f64 {
        match self.model {
            VolModel::LinearDrift { .. } => 0.0,
            VolModel::OrnsteinUhlenbeck { alpha, .. } => alpha,
            VolModel::Cir { alpha, .. } => alpha * sigma.sqrt(),
        }
    }

    /// `f_0 = f(sigma0)`
    pub fn f0(&self) -> f64 {
        self.drift_unchecked(self.sigma0)
    }

    /// `g_0 = g(sigma0)`
    pub fn g0(&self) -> f64 {
        self.diffusion_unchecked(self.sigma0.max(0.0))
    }

    pub fn expected_delta_sigma(&self, dt: f64, mode: Expectation) -> Result<f64> {
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(Error::domain("dt", dt, "must be finite and >= 0"));
        }
        Ok(match (mode, self.model) {
            (Expectation::FirstOrder, _) | (Expectation::Exact, VolModel::LinearDrift { .. }) => {
                self.f0() * dt
            }
            (
                Expectation::Exact,
                VolModel::OrnsteinUhlenbeck {
                    kappa, theta_bar, ..
                }
                | VolModel::Cir {
                    kappa, theta_bar, ..
                },
            ) => (theta_bar - self.sigma0) * -(-kappa * dt).exp_m1(),
        })
    }

    /// One Euler-Maruyama step from `sigma` over `dt` driven by the standard
    /// normal shock `z`, floored at [`VOL_FLOOR`].
    pub fn step(&self, sigma: f64, dt: f64, z: f64) -> Result<f64> {
        check_sigma(sigma)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::domain("dt", dt, "must be finite and > 0"));
        }
        Ok(self.step_unchecked(sigma, dt, dt.sqrt(), z))
    }

    #[inline]
    pub(crate) fn step_unchecked(&self, sigma: f64, dt: f64, sqrt_dt: f64, z: f64) -> f64 {
        let next = sigma + self.drift_unchecked(sigma) * dt + self.diffusion_unchecked(sigma) * sqrt_dt * z;
        next.max(VOL_FLOOR)
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("sigma", sigma, "must be finite and > 0"))
    }
}
