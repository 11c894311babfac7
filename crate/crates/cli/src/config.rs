//! Run configuration: a TOML document with one table per section, optionally
//! patched by `--section.key=value` flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::{Table, Value};
use viewhedge_core::mc::{linspace, SigmaMode, SimConfig};
use viewhedge_core::variance::OmegaTerm;
use viewhedge_core::vol::VolProcessSpec;
use viewhedge_core::{Error as CoreError, MarketView, OptionSpec, Strategy};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "VIEWHEDGE_OUT_DIR";

/// The holding-interval experiment on a short-dated at-the-money call.
pub const BUILTIN_DEFAULTS: &str = r#"
[option]
spot = 100.0
strike = 100.0
rate = 0.05
vol_hat = 0.2
maturity = 0.1

[view]
mu = 0.05
dt = 0.02

[vol_model]
kind = "linear_drift"
sigma0 = 0.2
mu_sigma = 0.2

[simulation]
n_paths = 100000
seed = 1
sigma_mode = "deterministic"
n_substeps = 1
strategies = ["bsm", "mastinsek", "star"]

[sweep]
mu_min = -0.5
mu_max = 0.5
mu_count = 51
mu_sigma_min = -0.5
mu_sigma_max = 0.5
mu_sigma_count = 51
"#;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    option: RawOption,
    view: RawView,
    vol_model: RawVol,
    #[serde(default)]
    simulation: RawSimulation,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    variance: RawVariance,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOption {
    spot: f64,
    strike: f64,
    rate: f64,
    vol_hat: f64,
    maturity: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawView {
    mu: f64,
    dt: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawVol {
    LinearDrift {
        sigma0: Option<f64>,
        mu_sigma: f64,
    },
    OrnsteinUhlenbeck {
        sigma0: Option<f64>,
        kappa: f64,
        theta_bar: f64,
        alpha: f64,
    },
    Cir {
        sigma0: Option<f64>,
        kappa: f64,
        theta_bar: f64,
        alpha: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawSigmaMode {
    Deterministic,
    Stochastic,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSimulation {
    n_paths: u64,
    seed: u64,
    sigma_mode: RawSigmaMode,
    n_substeps: u32,
    strategies: Vec<String>,
}

impl Default for RawSimulation {
    fn default() -> Self {
        RawSimulation {
            n_paths: 100_000,
            seed: 1,
            sigma_mode: RawSigmaMode::Deterministic,
            n_substeps: 1,
            strategies: vec!["bsm".into(), "mastinsek".into(), "star".into()],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSweep {
    mu_min: f64,
    mu_max: f64,
    mu_count: usize,
    mu_sigma_min: f64,
    mu_sigma_max: f64,
    mu_sigma_count: usize,
    /// Explicit grids take precedence over min/max/count.
    mu_grid: Option<Vec<f64>>,
    mu_sigma_grid: Option<Vec<f64>>,
}

impl Default for RawSweep {
    fn default() -> Self {
        RawSweep {
            mu_min: -0.5,
            mu_max: 0.5,
            mu_count: 51,
            mu_sigma_min: -0.5,
            mu_sigma_max: 0.5,
            mu_sigma_count: 51,
            mu_grid: None,
            mu_sigma_grid: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawOmega {
    Reconstructed,
    Literal,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawVariance {
    lambda1_min: f64,
    lambda1_max: f64,
    lambda1_count: usize,
    lambda2_min: f64,
    lambda2_max: f64,
    lambda2_count: usize,
    omega: RawOmega,
}

impl Default for RawVariance {
    fn default() -> Self {
        RawVariance {
            lambda1_min: -5.0,
            lambda1_max: 5.0,
            lambda1_count: 101,
            lambda2_min: -5.0,
            lambda2_max: 5.0,
            lambda2_count: 101,
            omega: RawOmega::Reconstructed,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawOutput {
    directory: Option<PathBuf>,
    svg: bool,
    timestamp: bool,
}

impl Default for RawOutput {
    fn default() -> Self {
        RawOutput {
            directory: None,
            svg: true,
            timestamp: true,
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub mu_grid: Vec<f64>,
    pub mu_sigma_grid: Vec<f64>,
    pub lambda1_grid: Vec<f64>,
    pub lambda2_grid: Vec<f64>,
    pub omega: OmegaTerm,
    pub out_dir: PathBuf,
    pub svg: bool,
    pub timestamp: bool,
}

impl RunConfig {
    pub fn option(&self) -> &OptionSpec {
        &self.sim.option
    }

    pub fn view(&self) -> &MarketView {
        &self.sim.view
    }
}

/// Where the base document comes from.
pub enum Source<'a> {
    File(&'a Path),
    Builtin,
}

pub fn load(source: Source<'_>, overrides: &[(String, String)]) -> Result<RunConfig, CliError> {
    let mut table = match source {
        Source::Builtin => BUILTIN_DEFAULTS.parse::<Table>().expect("built-in defaults parse"),
        Source::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
            text.parse::<Table>()
                .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?
        }
    };
    for (key, raw) in overrides {
        apply_override(&mut table, key, raw)?;
    }
    let raw: RawConfig = serde_path_to_error::deserialize(Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        CliError::Validation(format!("{path}: {}", e.into_inner()))
    })?;
    resolve(raw)
}

/// Parses `--a.b=value` style arguments; returns `(key path, raw value)`.
pub fn split_override(arg: &str) -> Option<(String, String)> {
    let body = arg.strip_prefix("--")?;
    let (key, value) = body.split_once('=')?;
    if !key.contains('.') || key.starts_with('.') || key.ends_with('.') {
        return None;
    }
    Some((key.to_string(), value.to_string()))
}

/// Sets `key` (dot separated) in the document. The value is read as a TOML
/// value when it parses as one and as a bare string otherwise.
pub fn apply_override(table: &mut Table, key: &str, raw: &str) -> Result<(), CliError> {
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let (last, sections) = parts.split_last().expect("key has a dot");
    let mut cursor = table;
    for (i, part) in sections.iter().enumerate() {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cursor = entry.as_table_mut().ok_or_else(|| {
            CliError::Validation(format!("{}: not a section", parts[..=i].join(".")))
        })?;
    }
    cursor.insert(last.to_string(), value);
    Ok(())
}

fn invalid(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{key}: {reason}"))
}

fn grid(key: &str, explicit: Option<Vec<f64>>, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    let g = match explicit {
        Some(g) => g,
        None => {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(invalid(key, "range bounds must be finite"));
            }
            linspace(lo, hi, n)
        }
    };
    if g.is_empty() {
        return Err(invalid(key, "grid must not be empty"));
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(invalid(key, "grid values must be finite"));
    }
    Ok(g)
}

/// Maps a core validation error to the config key it came from.
pub(crate) fn core_key(err: &CoreError) -> String {
    match err {
        CoreError::Domain { field, .. } => match *field {
            "mu" | "dt" => format!("view.{field}"),
            "spot" | "strike" | "rate" | "vol_hat" | "maturity" => format!("option.{field}"),
            other => other.to_string(),
        },
        CoreError::MaturityExhausted { .. } => "view.dt".into(),
        _ => String::new(),
    }
}

fn core_invalid(err: CoreError) -> CliError {
    let key = core_key(&err);
    if key.is_empty() {
        CliError::Validation(err.to_string())
    } else {
        CliError::Validation(format!("{key}: {err}"))
    }
}

fn resolve(raw: RawConfig) -> Result<RunConfig, CliError> {
    let o = raw.option;
    let option = OptionSpec {
        spot: o.spot,
        strike: o.strike,
        rate: o.rate,
        vol_hat: o.vol_hat,
        maturity: o.maturity,
    };
    option.validate().map_err(core_invalid)?;

    let vol_process = match raw.vol_model {
        RawVol::LinearDrift { sigma0, mu_sigma } => {
            VolProcessSpec::linear_drift(sigma0.unwrap_or(option.vol_hat), mu_sigma)
        }
        RawVol::OrnsteinUhlenbeck {
            sigma0,
            kappa,
            theta_bar,
            alpha,
        } => VolProcessSpec::ornstein_uhlenbeck(sigma0.unwrap_or(option.vol_hat), kappa, theta_bar, alpha),
        RawVol::Cir {
            sigma0,
            kappa,
            theta_bar,
            alpha,
        } => VolProcessSpec::cir(sigma0.unwrap_or(option.vol_hat), kappa, theta_bar, alpha),
    };
    vol_process
        .validate()
        .map_err(|v| invalid(&format!("vol_model.{}", v.parameter), v))?;
    if vol_process.sigma0 != option.vol_hat {
        return Err(invalid(
            "vol_model.sigma0",
            format!("{} must equal option.vol_hat = {}", vol_process.sigma0, option.vol_hat),
        ));
    }

    let view = MarketView {
        mu: raw.view.mu,
        dt: raw.view.dt,
        vol_process,
    };
    view.validate_for(&option).map_err(core_invalid)?;

    let s = raw.simulation;
    let strategies = s
        .strategies
        .iter()
        .enumerate()
        .map(|(i, label)| {
            label
                .parse::<Strategy>()
                .map_err(|e| invalid(&format!("simulation.strategies[{i}]"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sigma_mode = match s.sigma_mode {
        RawSigmaMode::Deterministic => SigmaMode::Deterministic,
        RawSigmaMode::Stochastic => SigmaMode::Stochastic {
            n_substeps: s.n_substeps,
        },
    };
    if s.n_substeps == 0 {
        return Err(invalid("simulation.n_substeps", "must be >= 1"));
    }
    let sim = SimConfig {
        option,
        view,
        n_paths: s.n_paths,
        seed: s.seed,
        strategies,
        sigma_mode,
    };
    sim.validate().map_err(|e| match e {
        CoreError::Config(msg) => CliError::Validation(msg),
        other => core_invalid(other),
    })?;

    let sw = raw.sweep;
    let mu_grid = grid("sweep.mu_grid", sw.mu_grid, sw.mu_min, sw.mu_max, sw.mu_count)?;
    let mu_sigma_grid = grid(
        "sweep.mu_sigma_grid",
        sw.mu_sigma_grid,
        sw.mu_sigma_min,
        sw.mu_sigma_max,
        sw.mu_sigma_count,
    )?;
    let v = raw.variance;
    let lambda1_grid = grid("variance.lambda1_count", None, v.lambda1_min, v.lambda1_max, v.lambda1_count)?;
    let lambda2_grid = grid("variance.lambda2_count", None, v.lambda2_min, v.lambda2_max, v.lambda2_count)?;

    let out_dir = raw
        .output
        .directory
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    Ok(RunConfig {
        sim,
        mu_grid,
        mu_sigma_grid,
        lambda1_grid,
        lambda2_grid,
        omega: match v.omega {
            RawOmega::Reconstructed => OmegaTerm::Reconstructed,
            RawOmega::Literal => OmegaTerm::Literal,
        },
        out_dir,
        svg: raw.output.svg,
        timestamp: raw.output.timestamp,
    })
}
