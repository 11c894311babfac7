//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and exits
//! nonzero if any fail.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use viewhedge_core::fd::fd_validate;
use viewhedge_core::greeks::greeks;
use viewhedge_core::hedge::{lambda2_star, n_bsm, n_generic, n_mastinsek, n_star};
use viewhedge_core::mc::{estimate_errors, linspace, sweep};
use viewhedge_core::variance::{coefficients, minimize_f, mshe, var_delta_h, ErrorCoefficients};
use viewhedge_core::{MarketView, OptionSpec, SigmaMode, SimConfig, Strategy, VolProcessSpec};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

fn random_spec(rng: &mut ChaCha8Rng) -> OptionSpec {
    OptionSpec::new(
        rng.random_range(50.0..200.0),
        rng.random_range(50.0..200.0),
        rng.random_range(-0.02..0.10),
        rng.random_range(0.05..0.6),
        rng.random_range(0.01..2.0),
    )
    .unwrap()
}

fn holding_interval_config(mu_sigma: f64) -> SimConfig {
    SimConfig {
        option: OptionSpec::new(100.0, 100.0, 0.05, 0.2, 0.1).unwrap(),
        view: MarketView { mu: 0.05, dt: 0.02, vol_process: VolProcessSpec::linear_drift(0.2, mu_sigma) },
        n_paths: 100_000,
        seed: 1,
        strategies: vec![Strategy::Bsm, Strategy::Star],
        sigma_mode: SigmaMode::Deterministic,
    }
}

// Reference MAHE differences (BSM minus view-adjusted), in units of 1e-4.
const REF_MU_SIGMA: [f64; 7] = [-0.05, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
const REF_DIFF: [f64; 7] = [-0.06, 0.0, 0.08, 0.15, 0.17, 0.16, 0.12];

fn reference_row() -> Outcome {
    let started = Instant::now();
    let r = sweep(&holding_interval_config(0.0), &[0.05], &REF_MU_SIGMA).map_err(|e| e.to_string())?;
    let secs = started.elapsed().as_secs_f64();
    let cells = r.mahe_difference(Strategy::Bsm, Strategy::Star).ok_or("missing strategies")?;
    let mut bad = Vec::new();
    for (c, want) in cells.iter().zip(REF_DIFF) {
        let (d, se) = (c.diff * 1e4, c.diff_stderr * 1e4);
        println!("    mu_sigma {:>5}: diff {d:+.4}e-4 (stderr {se:.4}e-4), reference {want:+.2}e-4", c.mu_sigma);
        if c.mu_sigma == 0.0 {
            if c.diff != 0.0 {
                bad.push(format!("mu_sigma 0 cell is {d:e}e-4, not exactly 0"));
            }
            continue;
        }
        if (d - want).abs() > 0.04 {
            bad.push(format!("mu_sigma {}: {d:+.4} vs {want:+.2}", c.mu_sigma));
        }
        if se >= 0.02 {
            bad.push(format!("mu_sigma {}: stderr {se:.4} >= 0.02", c.mu_sigma));
        }
    }
    if secs >= 60.0 {
        bad.push(format!("took {secs:.1} s"));
    }
    if bad.is_empty() {
        Ok(format!("7 cells within 0.04e-4 in {secs:.1} s"))
    } else {
        Err(bad.join("; "))
    }
}

fn sign_structure() -> Outcome {
    let started = Instant::now();
    let grid = linspace(-0.5, 0.5, 21);
    let r = sweep(&holding_interval_config(0.0), &grid, &grid).map_err(|e| e.to_string())?;
    let secs = started.elapsed().as_secs_f64();
    let cells = r.mahe_difference(Strategy::Bsm, Strategy::Star).ok_or("missing strategies")?;
    let tol = 1e-9;
    let mut not_positive = Vec::new();
    let mut negative_below = 0;
    for c in &cells {
        if c.mu_sigma >= 0.1 - tol && c.mu >= -tol && c.mu <= 0.3 + tol && c.diff <= 0.0 {
            not_positive.push(format!("({:.2},{:.2}) {:+.2e}+-{:.1e}", c.mu, c.mu_sigma, c.diff, c.diff_stderr));
        }
        if c.mu_sigma < -tol && c.diff < 0.0 {
            negative_below += 1;
        }
    }
    println!("    {} of 126 cells with mu in [0,0.3], mu_sigma >= 0.1 are not positive", not_positive.len());
    for s in &not_positive {
        println!("      {s}");
    }
    println!("    {negative_below} of 210 cells with mu_sigma < 0 are negative; {secs:.1} s");
    let mut bad = Vec::new();
    if !not_positive.is_empty() {
        bad.push(format!("{} cells in the positive region are <= 0", not_positive.len()));
    }
    if negative_below == 0 {
        bad.push("no negative cell for mu_sigma < 0".into());
    }
    if secs >= 600.0 {
        bad.push(format!("took {secs:.1} s"));
    }
    if bad.is_empty() {
        Ok(format!("sign structure holds, {negative_below} negative cells for mu_sigma < 0"))
    } else {
        Err(bad.join("; "))
    }
}

fn reductions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let spec = random_spec(&mut rng);
        let g = greeks(&spec).unwrap();
        let (s, r) = (spec.spot, spec.rate);
        let dt = rng.random_range(0.001f64..0.04).min(0.5 * spec.maturity);
        let flat = VolProcessSpec::linear_drift(spec.vol_hat, 0.0);

        let at_rate = MarketView { mu: r, dt, vol_process: flat };
        worst = worst.max(rel(n_star(&g, &at_rate, s, r).n_shares, n_bsm(&g).n_shares));

        let drifting = MarketView { mu: rng.random_range(-0.3..0.3), dt, vol_process: flat };
        worst = worst.max(rel(n_star(&g, &drifting, s, r).n_shares, n_mastinsek(&g, &drifting, s, r).n_shares));

        let ou = VolProcessSpec::ornstein_uhlenbeck(spec.vol_hat, 2.0, 0.3, 0.25);
        let view = |dt| MarketView { mu: drifting.mu, dt, vol_process: ou };
        worst = worst.max(rel(n_star(&g, &view(0.0), s, r).n_shares, g.delta));
        // the adjustment shrinks in proportion to dt
        let a = n_star(&g, &view(1e-5), s, r).adjustment();
        let b = n_star(&g, &view(1e-6), s, r).adjustment();
        if a != 0.0 && (a / b / 10.0 - 1.0).abs() > 1e-6 {
            return Err(format!("adjustment {a:e} at dt 1e-5, {b:e} at dt 1e-6 for {spec:?}"));
        }
    }
    if worst <= 1e-12 {
        Ok(format!("100 specs, worst relative gap {worst:.1e}"))
    } else {
        Err(format!("worst relative gap {worst:e}"))
    }
}

fn minimiser() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut done, mut outside) = (0, 0);
    let (mut worst_grid, mut worst_excess, mut worst_line, mut worst_n) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    while done < 20 {
        let spec = random_spec(&mut rng);
        let view = MarketView {
            mu: rng.random_range(-0.3..0.3),
            dt: rng.random_range(0.002f64..0.04).min(0.5 * spec.maturity),
            vol_process: VolProcessSpec::ornstein_uhlenbeck(
                spec.vol_hat,
                rng.random_range(0.5..5.0),
                rng.random_range(0.1..0.6),
                rng.random_range(0.05..0.5),
            ),
        };
        let g = greeks(&spec).unwrap();
        let c = coefficients(&g, &view, spec.spot, spec.rate, spec.vol_hat);
        let Ok(line) = minimize_f(&c) else { continue };
        // the grid can only find the line if the line runs through it
        if line.lambda2_at(0.0).abs() > 4.0 {
            outside += 1;
            continue;
        }
        done += 1;

        let step = 0.1;
        let (mut best, mut at) = (f64::INFINITY, (0.0, 0.0));
        for i in 0..=100 {
            for j in 0..=100 {
                let l1 = -5.0 + step * i as f64;
                let l2 = -5.0 + step * j as f64;
                let f = var_delta_h(&c, l1, l2);
                if f < best {
                    (best, at) = (f, (l1, l2));
                }
            }
        }
        let off = (at.1 - line.lambda2_at(at.0)).abs();
        if off > step {
            return Err(format!("grid minimum ({}, {}) is {off} from the line", at.0, at.1));
        }
        if best < line.min_value - 1e-9 {
            return Err(format!("grid {best:e} below line minimum {:e}", line.min_value));
        }
        // off the line F rises by eta^2 times the squared lambda2 offset
        let excess = best - line.min_value;
        worst_excess = worst_excess.max(excess);
        worst_grid = worst_grid.max((excess - c.eta * c.eta * off * off).abs());

        let s = spec.spot;
        let star = n_star(&g, &view, s, spec.rate).n_shares;
        for l1 in [-2.0, 0.0, 1.0, 3.0, -7.5, 11.0] {
            let l2 = line.lambda2_at(l1);
            worst_line = worst_line.max(rel(var_delta_h(&c, l1, l2), line.min_value));
        }
        for l1 in [-2.0, 0.0, 1.0, 3.0] {
            let l2 = lambda2_star(&g, &view, s, spec.rate, l1).map_err(|e| e.to_string())?;
            worst_n = worst_n.max(rel(n_generic(&g, &view, l1, l2).n_shares, star));
        }
    }
    println!("    {outside} instances skipped with the line outside the grid");
    println!("    grid excess {worst_excess:.1e}, unexplained by the offset {worst_grid:.1e}, variation along line {worst_line:.1e}, share-count gap {worst_n:.1e}");
    if worst_grid <= 1e-9 && worst_line <= 1e-12 && worst_n <= 1e-12 {
        Ok("20 instances".into())
    } else {
        Err(format!("grid {worst_grid:e}, line {worst_line:e}, shares {worst_n:e}"))
    }
}

fn greeks_fd() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fails = 0;
    let mut worst_pde = 0.0_f64;
    let mut on_floor = 0;
    for _ in 0..1000 {
        let spec = random_spec(&mut rng);
        let report = fd_validate(&spec, 1e-5).map_err(|e| e.to_string())?;
        if !report.all_agree(1e-6, 1e-4) {
            fails += 1;
            println!("    disagreement for {spec:?}");
        }
        on_floor += report
            .entries
            .iter()
            .filter(|e| e.rel_error > if e.order >= 3 { 1e-4 } else { 1e-6 })
            .count();
        let g = greeks(&spec).unwrap();
        let (s, v2) = (spec.spot, spec.vol_hat * spec.vol_hat);
        // size of the terms combined by the identity
        let scale = (2.0 / (v2 * s * s) * ((v2 * s + spec.rate * s).abs() * g.gamma + g.charm.abs())).max(g.speed.abs());
        worst_pde = worst_pde.max((g.speed - g.speed_from_pde(&spec)).abs() / scale);
    }
    println!("    {on_floor} entries within the roundoff floor only; worst speed identity gap {worst_pde:.1e}");
    if fails == 0 && worst_pde <= 1e-9 {
        Ok("1000 specs".into())
    } else {
        Err(format!("{fails} specs disagree, identity gap {worst_pde:e}"))
    }
}

fn analytic_vs_simulation() -> Outcome {
    let generic = Strategy::Generic { lambda1: 1.0, lambda2: 1.0 };
    let cfg = SimConfig {
        option: OptionSpec::new(100.0, 100.0, 0.05, 0.2, 0.1).unwrap(),
        view: MarketView { mu: 0.05, dt: 0.002, vol_process: VolProcessSpec::ornstein_uhlenbeck(0.2, 2.0, 0.3, 0.3) },
        n_paths: 1_000_000,
        seed: 606,
        strategies: vec![generic],
        sigma_mode: SigmaMode::Stochastic { n_substeps: 4 },
    };
    let r = estimate_errors(&cfg).map_err(|e| e.to_string())?;
    let st = r.stats(generic).ok_or("missing strategy")?;
    let g = greeks(&cfg.option).unwrap();
    let analytic = mshe(&coefficients(&g, &cfg.view, 100.0, 0.05, 0.2), 1.0, 1.0);
    let gate = (4.0 * st.mshe_stderr).max(0.05 * analytic);
    let msg = format!("MC {:.6e} +- {:.1e}, analytic {analytic:.6e}, gate {gate:.1e}", st.mshe, st.mshe_stderr);
    if (st.mshe - analytic).abs() <= gate {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// The collected hedging-error polynomial in two independent standard normals.
fn delta_h_oracle(c: &ErrorCoefficients, l1: f64, l2: f64, z1: f64, z2: f64) -> f64 {
    let theta = c.gamma * c.beta + (1.0 - l1) * c.phi + (1.0 - l2) * c.eta;
    let psi = c.gamma * c.delta - c.phi / 3.0;
    c.gamma * (z1.powi(2) - 1.0)
        + theta * z1
        + psi * z1.powi(3)
        + c.omega * z2
        + c.tau * z1 * z2
        + c.iota * z2.powi(2)
        + c.chi * z1.powi(2) * z2
        + c.xi * z1 * z2.powi(2)
        + c.epsilon * z2.powi(3)
        + c.mean_term
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn sampling_oracle() -> Outcome {
    const PAIRS: usize = 10_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = 0.0_f64;
    let mut xs = vec![0.0; PAIRS];
    for set in 0..20 {
        let mut u = || -> f64 { rng.random_range(-1.0..1.0) };
        let c = ErrorCoefficients {
            gamma: u().abs(),
            beta: u(),
            delta: u(),
            phi: u(),
            eta: u(),
            epsilon: 0.3 * u(),
            xi: u(),
            omega: u(),
            tau: u(),
            iota: u(),
            chi: u(),
            mean_term: u(),
            literal_omega: false,
        };
        let (l1, l2) = (3.0 * u(), 3.0 * u());
        for x in xs.iter_mut() {
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            *x = delta_h_oracle(&c, l1, l2, z1, z2);
        }
        let (mean, _) = mean_stderr(&xs);
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let (second, se_second) = mean_stderr(&sq);
        let centred: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
        let (var, se_var) = mean_stderr(&centred);
        let zv = (var - var_delta_h(&c, l1, l2)).abs() / se_var;
        let zm = (second - mshe(&c, l1, l2)).abs() / se_second;
        if zv > 4.0 || zm > 4.0 {
            return Err(format!("set {set}: variance off by {zv:.2} stderr, mshe by {zm:.2}"));
        }
        worst = worst.max(zv).max(zm);
    }
    Ok(format!("20 sets of 1e7 pairs, worst deviation {worst:.2} stderr"))
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: [&[&str]; 2] = [
        &["simulate", "--simulation.n_paths=200000", "--simulation.strategies=[\"bsm\",\"mastinsek\",\"star\",\"generic(1,1)\"]"],
        &["sweep", "--sweep.mu_count=5", "--sweep.mu_sigma_count=5", "--simulation.n_paths=20000"],
    ];
    let mut checked = 0;
    for (k, cmd) in commands.iter().enumerate() {
        let mut reference: Option<Vec<(String, Vec<u8>)>> = None;
        for threads in ["1", "4", "8"] {
            for repeat in 0..2 {
                let out = tmp.path().join(format!("{k}-{threads}-{repeat}"));
                let mut args = vec!["viewhedge", "--paper-defaults", "--no-timestamp", "-j", threads, "-o", out.to_str().unwrap()];
                args.extend_from_slice(cmd);
                let code = viewhedge_cli::run(&args);
                if code != 0 {
                    return Err(format!("{} exited {code}", cmd[0]));
                }
                let files = outputs(&out);
                match &reference {
                    None => reference = Some(files),
                    Some(r) if *r != files => {
                        return Err(format!("{} output differs with {threads} threads (run {repeat})", cmd[0]))
                    }
                    Some(_) => checked += 1,
                }
            }
        }
    }
    Ok(format!("{checked} reruns of simulate and sweep byte-identical across 1, 4, 8 threads"))
}

fn main() {
    let checks: [Check; 8] = [
        ("reference MAHE row", reference_row),
        ("sweep sign structure", sign_structure),
        ("reduction identities", reductions),
        ("variance minimiser", minimiser),
        ("Greeks vs finite differences", greeks_fd),
        ("analytic vs simulated MSHE", analytic_vs_simulation),
        ("sampling oracle", sampling_oracle),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        println!("criterion {} ({name})", i + 1);
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {}: {name}: {msg} [{secs:.1} s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {msg} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
