use std::path::PathBuf;

use viewhedge_core::fd::fd_validate;
use viewhedge_core::greeks::{d_terms, greeks};
use viewhedge_core::hedge::{lambda2_star, lambda_mastinsek, lambda_star};
use viewhedge_core::mc::{estimate_errors, sweep as run_sweep, DiffCell, SimResult};
use viewhedge_core::variance::{coefficients_with, minimize_f, mshe, var_delta_h};
use viewhedge_core::{Error as CoreError, GreeksBundle, Strategy};

use crate::config::{core_key, RunConfig};
use crate::output::{num, CsvSink};
use crate::svg;
use crate::CliError;

pub const SIMULATE_HEADER: [&str; 6] = ["strategy", "mahe", "mahe_stderr", "mshe", "mshe_stderr", "mean_dh"];
pub const PAIRED_HEADER: [&str; 6] = [
    "strategy_a",
    "strategy_b",
    "mahe_diff",
    "mahe_diff_stderr",
    "mshe_diff",
    "mshe_diff_stderr",
];
pub const SWEEP_HEADER: [&str; 6] = ["mu", "mu_sigma", "mahe_a", "mahe_b", "diff", "diff_stderr"];
pub const HEDGE_HEADER: [&str; 7] = [
    "strategy",
    "n_shares",
    "base",
    "drift",
    "time_decay",
    "vol_drift",
    "vol_convexity",
];
pub const VARIANCE_GRID_HEADER: [&str; 4] = ["lambda1", "lambda2", "var_dh", "mshe"];
pub const VARIANCE_LINE_HEADER: [&str; 4] = ["lambda1", "lambda2_star", "var_dh", "mshe"];

/// Validation failures map to exit code 1, everything else to 2.
fn core_error(err: CoreError) -> CliError {
    match err {
        CoreError::Domain { .. } | CoreError::Config(_) | CoreError::MaturityExhausted { .. } => {
            let key = core_key(&err);
            if key.is_empty() {
                CliError::Validation(err.to_string())
            } else {
                CliError::Validation(format!("{key}: {err}"))
            }
        }
        other => CliError::Runtime(other.to_string()),
    }
}

fn sink(cfg: &RunConfig) -> CsvSink<'_> {
    CsvSink {
        dir: &cfg.out_dir,
        timestamp: cfg.timestamp,
    }
}

fn bundle(cfg: &RunConfig) -> Result<GreeksBundle, CliError> {
    greeks(cfg.option()).map_err(core_error)
}

pub fn greeks_cmd(cfg: &RunConfig, fd_step: Option<f64>) -> Result<Vec<PathBuf>, CliError> {
    let spec = cfg.option();
    let g = bundle(cfg)?;
    let (d1, d2) = d_terms(spec).map_err(core_error)?;
    println!("{:<10} {}", "price", num(g.price));
    println!("{:<10} {}", "d1", num(d1));
    println!("{:<10} {}", "d2", num(d2));
    for (name, v) in g.named() {
        println!("{name:<10} {}", num(v));
    }
    if let Some(step) = fd_step {
        let report = fd_validate(spec, step).map_err(core_error)?;
        println!();
        println!("finite-difference check, rel_step = {step:e}");
        println!("{:<10} {:>24} {:>24} {:>10} {:>10}", "greek", "analytic", "fd", "rel_err", "resolution");
        for e in &report.entries {
            println!(
                "{:<10} {:>24e} {:>24e} {:>10.2e} {:>10.2e}",
                e.name, e.analytic, e.finite_difference, e.rel_error, e.resolution
            );
        }
        println!("all agree (1e-6 / 1e-4 third order): {}", report.all_agree(1e-6, 1e-4));
    }
    Ok(vec![])
}

pub fn hedge_cmd(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let spec = cfg.option();
    let view = cfg.view();
    let g = bundle(cfg)?;
    let mut strategies = vec![Strategy::Bsm, Strategy::Mastinsek, Strategy::Star];
    for s in &cfg.sim.strategies {
        if !strategies.contains(s) {
            strategies.push(*s);
        }
    }
    let mut rows = Vec::new();
    println!("{:<22} {:>24} {:>24} {:>24} {:>24} {:>24} {:>24}", HEDGE_HEADER[0], HEDGE_HEADER[1], HEDGE_HEADER[2], HEDGE_HEADER[3], HEDGE_HEADER[4], HEDGE_HEADER[5], HEDGE_HEADER[6]);
    for s in strategies {
        let h = s.hedge(&g, view, spec.spot, spec.rate);
        let row = vec![
            s.to_string(),
            num(h.n_shares),
            num(h.base),
            num(h.drift),
            num(h.time_decay),
            num(h.vol_drift),
            num(h.vol_convexity),
        ];
        println!("{:<22} {:>24} {:>24} {:>24} {:>24} {:>24} {:>24}", row[0], row[1], row[2], row[3], row[4], row[5], row[6]);
        rows.push(row);
    }
    let show = |name: &str, r: viewhedge_core::Result<f64>| match r {
        Ok(v) => println!("{name:<18} {}", num(v)),
        Err(e) => println!("{name:<18} undefined ({e})"),
    };
    println!();
    show("lambda_star", lambda_star(&g, view, spec.spot, spec.rate));
    show("lambda2_star(0)", lambda2_star(&g, view, spec.spot, spec.rate, 0.0));
    show("lambda_mastinsek", lambda_mastinsek(&g, view, spec.spot, spec.rate));
    let path = sink(cfg).write("hedge.csv", &HEDGE_HEADER, rows)?;
    Ok(vec![path])
}

pub fn analyze_variance_cmd(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let spec = cfg.option();
    let g = bundle(cfg)?;
    let c = coefficients_with(&g, cfg.view(), spec.spot, spec.rate, spec.vol_hat, cfg.omega);
    println!("coefficients ({})", if c.literal_omega { "literal omega" } else { "reconstructed omega" });
    for (name, v) in [
        ("gamma", c.gamma),
        ("beta", c.beta),
        ("delta", c.delta),
        ("phi", c.phi),
        ("eta", c.eta),
        ("epsilon", c.epsilon),
        ("xi", c.xi),
        ("omega", c.omega),
        ("tau", c.tau),
        ("iota", c.iota),
        ("chi", c.chi),
        ("mean_term", c.mean_term),
    ] {
        println!("  {name:<10} {}", num(v));
    }

    let mut grid_rows = Vec::with_capacity(cfg.lambda1_grid.len() * cfg.lambda2_grid.len());
    for &l1 in &cfg.lambda1_grid {
        for &l2 in &cfg.lambda2_grid {
            grid_rows.push(vec![num(l1), num(l2), num(var_delta_h(&c, l1, l2)), num(mshe(&c, l1, l2))]);
        }
    }
    let out = sink(cfg);
    let grid_path = out.write("variance_grid.csv", &VARIANCE_GRID_HEADER, grid_rows)?;

    let line = minimize_f(&c).map_err(|e| {
        CliError::Runtime(format!("{e}; wrote {} without a minimiser line", grid_path.display()))
    })?;
    println!("minimiser: lambda2 = 1 - ({} + {} (1 - lambda1))", num(line.intercept), num(line.slope));
    println!("minimum variance {}", num(line.min_value));
    let line_rows = cfg.lambda1_grid.iter().map(|&l1| {
        let l2 = line.lambda2_at(l1);
        vec![num(l1), num(l2), num(var_delta_h(&c, l1, l2)), num(mshe(&c, l1, l2))]
    });
    let line_path = out.write("variance_minimizer.csv", &VARIANCE_LINE_HEADER, line_rows)?;
    Ok(vec![grid_path, line_path])
}

fn print_result(r: &SimResult) {
    println!("{:<22} {:>24} {:>24} {:>24} {:>24}", "strategy", "n_shares", "mahe", "mahe_stderr", "mshe");
    for s in &r.strategies {
        println!(
            "{:<22} {:>24} {:>24} {:>24} {:>24}",
            s.strategy.to_string(),
            num(s.n_shares),
            num(s.mahe),
            num(s.mahe_stderr),
            num(s.mshe)
        );
    }
}

pub fn simulate_cmd(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let r = estimate_errors(&cfg.sim).map_err(core_error)?;
    print_result(&r);
    eprintln!("{} paths in {:.2} s", cfg.sim.n_paths, r.wall_seconds);
    let rows = r.strategies.iter().map(|s| {
        vec![
            s.strategy.to_string(),
            num(s.mahe),
            num(s.mahe_stderr),
            num(s.mshe),
            num(s.mshe_stderr),
            num(s.mean_dh),
        ]
    });
    let out = sink(cfg);
    let main = out.write("simulate.csv", &SIMULATE_HEADER, rows)?;
    let labels: Vec<String> = r.strategies.iter().map(|s| s.strategy.to_string()).collect();
    let pair_rows = r.pairs.iter().map(|p| {
        vec![
            labels[p.a].clone(),
            labels[p.b].clone(),
            num(p.mahe_diff),
            num(p.mahe_diff_stderr),
            num(p.mshe_diff),
            num(p.mshe_diff_stderr),
        ]
    });
    let paired = out.write("simulate_paired.csv", &PAIRED_HEADER, pair_rows)?;
    Ok(vec![main, paired])
}

fn diff_rows(cells: &[DiffCell]) -> Vec<Vec<String>> {
    cells
        .iter()
        .map(|c| vec![num(c.mu), num(c.mu_sigma), num(c.mahe_a), num(c.mahe_b), num(c.diff), num(c.diff_stderr)])
        .collect()
}

pub fn sweep_cmd(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let started = std::time::Instant::now();
    let r = run_sweep(&cfg.sim, &cfg.mu_grid, &cfg.mu_sigma_grid).map_err(core_error)?;
    eprintln!(
        "{}x{} cells of {} paths in {:.2} s",
        cfg.mu_grid.len(),
        cfg.mu_sigma_grid.len(),
        cfg.sim.n_paths,
        started.elapsed().as_secs_f64()
    );
    let out = sink(cfg);
    let mut written = Vec::new();
    for (name, a, title) in [
        ("sweep_bsm_minus_star", Strategy::Bsm, "MAHE difference, BSM minus view-adjusted"),
        ("sweep_mastinsek_minus_star", Strategy::Mastinsek, "MAHE difference, drift-adjusted minus view-adjusted"),
    ] {
        let cells = r
            .mahe_difference(a, Strategy::Star)
            .ok_or_else(|| CliError::Runtime(format!("{name}: strategy missing from sweep")))?;
        written.push(out.write(&format!("{name}.csv"), &SWEEP_HEADER, diff_rows(&cells))?);
        let (lo, hi) = cells
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.diff), hi.max(c.diff)));
        println!("{name}: min {} max {}", num(lo), num(hi));
        if cfg.svg {
            let n = cfg.mu_sigma_grid.len();
            let values: Vec<Vec<f64>> = cells.chunks(n).map(|row| row.iter().map(|c| c.diff).collect()).collect();
            let body = svg::heatmap(title, &cfg.mu_grid, &cfg.mu_sigma_grid, &values);
            written.push(out.write_text(&format!("{name}.svg"), &body)?);
        }
    }
    Ok(written)
}
