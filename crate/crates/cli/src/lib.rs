//! The `viewhedge` command-line tool.
//!
//! ```text
//! viewhedge [--config FILE | --paper-defaults] [options] <command> [--section.key=value ...]
//! ```
//!
//! Exit codes: 0 on success, 1 when the configuration or arguments are
//! invalid, 2 when a run fails.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{split_override, Source};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "viewhedge",
    version,
    about = "View-adjusted hedge ratios and hedging-error analysis for a European call",
    after_help = "Any config key can be overridden with --section.key=value, e.g. --view.mu=0.1.\n\
                  The default output directory is read from VIEWHEDGE_OUT_DIR, else ./out."
)]
pub struct Cli {
    /// TOML configuration file.
    #[arg(short, long, global = true, conflicts_with = "paper_defaults")]
    pub config: Option<PathBuf>,

    /// Use the built-in holding-interval experiment configuration.
    #[arg(long, global = true)]
    pub paper_defaults: bool,

    /// Omit the `# generated` line from output files.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// Skip SVG heatmaps.
    #[arg(long, global = true)]
    pub no_svg: bool,

    /// Output directory; overrides output.directory.
    #[arg(short, long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Worker threads for simulations (default: all cores).
    #[arg(short = 'j', long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Print the price and Greeks.
    Greeks {
        /// Also cross-check against finite differences with this relative step.
        #[arg(long)]
        fd_step: Option<f64>,
    },
    /// Print share counts for each strategy and the optimal multipliers.
    Hedge,
    /// Write the analytic hedging-error variance over a multiplier grid.
    AnalyzeVariance,
    /// Estimate hedging errors by Monte Carlo.
    Simulate,
    /// Run the simulation over a (mu, mu_sigma) grid.
    Sweep,
}

/// Runs the tool and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut overrides = Vec::new();
    let mut rest = Vec::new();
    for arg in args {
        let arg: OsString = arg.into();
        match arg.to_str().and_then(split_override) {
            Some(kv) => overrides.push(kv),
            None => rest.push(arg),
        }
    }
    let cli = match Cli::try_parse_from(rest) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli, &overrides) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            let kind = match e {
                CliError::Validation(_) => "invalid configuration",
                CliError::Runtime(_) => "error",
            };
            eprintln!("viewhedge: {kind}: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, overrides: &[(String, String)]) -> Result<Vec<PathBuf>, CliError> {
    let source = match (&cli.config, cli.paper_defaults) {
        (Some(path), _) => Source::File(path),
        (None, true) => Source::Builtin,
        (None, false) => {
            return Err(CliError::Validation(
                "no configuration: pass --config FILE or --paper-defaults".into(),
            ))
        }
    };
    let mut cfg = config::load(source, overrides)?;
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = dir.clone();
    }
    if cli.no_timestamp {
        cfg.timestamp = false;
    }
    if cli.no_svg {
        cfg.svg = false;
    }

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.threads {
            if n == 0 {
                return Err(CliError::Validation("--threads: must be >= 1".into()));
            }
            b = b.num_threads(n);
        }
        b.build().map_err(|e| CliError::Runtime(e.to_string()))?
    };
    pool.install(|| match cli.command {
        Command::Greeks { fd_step } => commands::greeks_cmd(&cfg, fd_step),
        Command::Hedge => commands::hedge_cmd(&cfg),
        Command::AnalyzeVariance => commands::analyze_variance_cmd(&cfg),
        Command::Simulate => commands::simulate_cmd(&cfg),
        Command::Sweep => commands::sweep_cmd(&cfg),
    })
}
