//! Command-line front end: coefficient tables, series evaluation, inversion,
//! randomized identity verification, radius reports, and asymptotic ratio
//! tables, with machine-readable output.
//!
//! Exit codes: 0 success, 1 validation error, 2 verification failure.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{hyper, invert, radius, series};
use crate::series::ParamSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Coeffs,
    Eval,
    Invert,
    Radius,
    Verify,
    Asymptotics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    /// Plot-ready CSV (radius command only).
    Plot,
}

/// A fully validated run request.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: ParamSet,
    pub n: usize,
    pub x: Option<Complex64>,
    pub w: Option<Complex64>,
    pub tol: f64,
    pub format: OutputFormat,
    pub seed: u64,
}

#[derive(Parser)]
#[command(name = "genw", version, about = "Generalized Lambert W: series, inversion, identities, radius analysis")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Taylor coefficient table of the inverse map
    Coeffs(CommonArgs),
    /// Evaluate the truncated series at x and report the round-trip residual
    Eval(CommonArgs),
    /// Invert the forward map at w (series seed + Newton polish)
    Invert(CommonArgs),
    /// Saddle candidates, conjectured radii, and the empirical estimate
    Radius(CommonArgs),
    /// Randomized identity suites (Chu–Vandermonde, reflection, coefficient
    /// brute force); exit 2 on any failure
    Verify(CommonArgs),
    /// Exact-vs-asymptotic ratio table for the coefficient asymptotics
    Asymptotics(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON parameter file: {"t": [[re,im],...], "p": [[re,im],...]}
    #[arg(long)]
    params: Option<PathBuf>,
    /// Root t_i as "re,im"; repeat once per factor
    #[arg(long = "t", value_name = "re,im", action = ArgAction::Append, allow_hyphen_values = true)]
    t: Vec<String>,
    /// Exponent p_i as "re,im"; repeat once per factor
    #[arg(long = "p", value_name = "re,im", action = ArgAction::Append, allow_hyphen_values = true)]
    p: Vec<String>,
    /// Table order / report order / verify trial count (per-command default)
    #[arg(long)]
    n: Option<usize>,
    /// Series argument as "re,im" (eval)
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Inversion target as "re,im" (invert)
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    /// Tolerance: inversion target residual, or verify comparison tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Output format: json or csv (radius also accepts plot)
    #[arg(long, default_value = "json")]
    format: String,
    /// Seed for the randomized verify suites
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_complex(s: &str, flag: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || format!("invalid {flag} value '{s}': expected re,im");
    match parts.as_slice() {
        [re] => Ok(Complex64::new(re.trim().parse().map_err(|_| bad())?, 0.0)),
        [re, im] => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn load_params(args: &CommonArgs) -> Result<ParamSet, String> {
    if let Some(path) = &args.params {
        if !args.t.is_empty() || !args.p.is_empty() {
            return Err("give either --params or inline --t/--p, not both".into());
        }
        let mut text = String::new();
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|e| format!("cannot read params file {}: {e}", path.display()))?;
        return serde_json::from_str(&text).map_err(|e| format!("invalid params JSON: {e}"));
    }
    if args.t.len() != args.p.len() {
        return Err(format!(
            "--t given {} times but --p {} times",
            args.t.len(),
            args.p.len()
        ));
    }
    let t = args
        .t
        .iter()
        .map(|s| parse_complex(s, "--t"))
        .collect::<Result<Vec<_>, _>>()?;
    let p = args
        .p
        .iter()
        .map(|s| parse_complex(s, "--p"))
        .collect::<Result<Vec<_>, _>>()?;
    ParamSet::new(t, p).map_err(|e| format!("invalid parameters: {e}"))
}

fn build_config(command: Command, args: &CommonArgs) -> Result<RunConfig, String> {
    let params = load_params(args)?;
    let format = match args.format.as_str() {
        "json" => OutputFormat::Json,
        "csv" => OutputFormat::Csv,
        "plot" if command == Command::Radius => OutputFormat::Plot,
        other => return Err(format!("invalid --format '{other}'")),
    };
    let n = args.n.unwrap_or(match command {
        Command::Radius => 300,
        Command::Verify => 200,
        Command::Asymptotics => 200,
        _ => 40,
    });
    if n < 1 {
        return Err("--n must be at least 1".into());
    }
    if command == Command::Radius && n < 50 {
        return Err("--n must be at least 50 for radius".into());
    }
    let tol = args.tol.unwrap_or(match command {
        Command::Verify => 1e-9,
        _ => 1e-12,
    });
    if tol <= 0.0 {
        return Err("--tol must be positive".into());
    }
    let x = args.x.as_deref().map(|s| parse_complex(s, "--x")).transpose()?;
    let w = args.w.as_deref().map(|s| parse_complex(s, "--w")).transpose()?;
    if command == Command::Eval && x.is_none() {
        return Err("eval requires --x re,im".into());
    }
    if command == Command::Invert && w.is_none() {
        return Err("invert requires --w re,im".into());
    }
    Ok(RunConfig { command, params, n, x, w, tol, format, seed: args.seed })
}

fn cx(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn run_coeffs(config: &RunConfig, out: &mut dyn Write) -> io::Result<i32> {
    let table = series::build_table(&config.params, config.n);
    match config.format {
        OutputFormat::Csv => table.write_csv(out)?,
        _ => {
            let rows: Vec<_> = (1..=table.n_max())
                .map(|n| {
                    json!({
                        "n": n,
                        "c": cx(table.coefficient_c64(n)),
                        "f": cx(table.f_value(n).to_c64()),
                        "ln_abs_c": table.coefficient(n).ln_abs(),
                    })
                })
                .collect();
            let doc = json!({"params": config.params, "n": config.n, "coefficients": rows});
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(0)
}

fn run_eval(config: &RunConfig, out: &mut dyn Write) -> io::Result<i32> {
    let x = config.x.expect("validated");
    let table = series::build_table(&config.params, config.n);
    let z = series::evaluate_series(x, &table, config.n);
    let residual = series::forward_map(z, &config.params)
        .map(|v| (v - x).norm())
        .unwrap_or(f64::INFINITY);
    match config.format {
        OutputFormat::Csv => {
            writeln!(out, "re_x,im_x,re_z,im_z,residual,n_terms")?;
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                x.re, x.im, z.re, z.im, residual, config.n
            )?;
        }
        _ => {
            let doc = json!({
                "x": cx(x), "z": cx(z), "residual": residual, "n_terms": config.n,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(0)
}

fn run_invert(config: &RunConfig, out: &mut dyn Write) -> io::Result<i32> {
    let w = config.w.expect("validated");
    let table = series::build_table(&config.params, config.n);
    let r = invert::generalized_w(w, &config.params, &table, config.tol);
    let method = match r.method {
        invert::Method::SeriesOnly => "series_only",
        invert::Method::NewtonPolished => "newton_polished",
    };
    match config.format {
        OutputFormat::Csv => {
            writeln!(out, "re_w,im_w,re_z,im_z,residual,iterations,method,converged,branch_cut_crossed")?;
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{}",
                w.re, w.im, r.z.re, r.z.im, r.residual, r.iterations, method, r.converged,
                r.branch_cut_crossed
            )?;
        }
        _ => {
            let doc = json!({
                "w": cx(w), "z": cx(r.z), "residual": r.residual,
                "iterations": r.iterations, "method": method,
                "converged": r.converged, "branch_cut_crossed": r.branch_cut_crossed,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(0)
}

fn run_radius(config: &RunConfig, out: &mut dyn Write) -> io::Result<i32> {
    let report = match radius::radius_report(&config.params, config.n) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("radius analysis failed: {e}");
            return Ok(1);
        }
    };
    match config.format {
        OutputFormat::Csv => report.write_csv(out)?,
        OutputFormat::Plot => report.write_plot_csv(out)?,
        OutputFormat::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(&report.to_json())?)?;
        }
    }
    if !report.matched {
        eprintln!(
            "finding: no (saddle, l) candidate within {:.0}% of the empirical radius (best gap {:.3e})",
            report.match_tolerance * 100.0,
            report.relative_gap
        );
    }
    Ok(0)
}

struct SuiteOutcome {
    name: &'static str,
    trials: usize,
    failures: usize,
    max_rel_err: f64,
}

fn rand_complex(rng: &mut ChaCha8Rng, re: std::ops::Range<f64>, im: std::ops::Range<f64>) -> Complex64 {
    Complex64::new(rng.gen_range(re), rng.gen_range(im))
}

fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-30)
}

/// |a/b − 1| with prescaling: naive complex division overflows through
/// norm_sqr once |b| passes ~1e154.
fn scaled_ratio_err(a: Complex64, b: Complex64) -> f64 {
    let s = b.norm();
    if s == 0.0 || !s.is_finite() {
        return f64::INFINITY;
    }
    ((a / s) / (b / s) - Complex64::new(1.0, 0.0)).norm()
}

/// Brute-force F_n: every Pochhammer recomputed from scratch per index.
fn fn_brute_force(n: usize, params: &ParamSet) -> Complex64 {
    let nf = n as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for idx in hyper::multi_indices(params.len(), n - 1) {
        let mut term = hyper::pochhammer(Complex64::new(1.0 - nf, 0.0), idx.weight());
        for (i, &ki) in idx.entries().iter().enumerate() {
            term *= hyper::pochhammer(nf * params.p()[i], ki);
            term /= (1..=ki).map(|j| j as f64).product::<f64>();
            term /= (nf * params.t()[i]).powu(ki as u32);
        }
        total += term;
    }
    total
}

fn verify_suites(trials: usize, tol: f64, seed: u64) -> Vec<SuiteOutcome> {
    let mut out = Vec::new();

    // generalized Chu–Vandermonde, complex parameters, every center valid
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut fails, mut worst) = (0usize, 0.0f64);
    for _ in 0..trials {
        let r = rng.gen_range(1..=4usize);
        let k = rng.gen_range(1..=8usize);
        let q: Vec<Complex64> = (0..r).map(|_| rand_complex(&mut rng, -1.5..1.5, 0.2..1.5)).collect();
        let w: Vec<Complex64> = (0..r).map(|_| rand_complex(&mut rng, -1.5..1.5, 0.2..1.5)).collect();
        let center = rng.gen_range(0..r);
        let lhs = hyper::chu_vandermonde_lhs(k, &q, &w);
        match hyper::chu_vandermonde_rhs(k, &q, &w, center) {
            Ok(rhs) => {
                let d = rel_diff(lhs, rhs);
                worst = worst.max(d);
                if d > tol {
                    fails += 1;
                }
            }
            Err(_) => fails += 1,
        }
    }
    out.push(SuiteOutcome { name: "chu_vandermonde", trials, failures: fails, max_rel_err: worst });

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let (mut fails, mut worst) = (0usize, 0.0f64);
    for _ in 0..trials {
        let m = rng.gen_range(1..=3usize);
        let k = rng.gen_range(0..=5usize);
        let b: Vec<Complex64> = (0..m).map(|_| rand_complex(&mut rng, -1.5..1.5, 0.1..1.2)).collect();
        let c = rand_complex(&mut rng, -1.5..1.5, 0.1..1.2);
        let x: Vec<Complex64> = (0..m).map(|_| rand_complex(&mut rng, -1.0..1.0, -1.0..1.0)).collect();
        match hyper::lauricella_reflection_check(k, &b, c, &x) {
            Ok((lhs, rhs)) => {
                let d = rel_diff(lhs, rhs);
                worst = worst.max(d);
                if d > tol {
                    fails += 1;
                }
            }
            Err(_) => fails += 1,
        }
    }
    out.push(SuiteOutcome { name: "lauricella_reflection", trials, failures: fails, max_rel_err: worst });

    // streaming F_n against per-index brute force
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let fn_trials = trials.min(60);
    let (mut fails, mut worst) = (0usize, 0.0f64);
    for _ in 0..fn_trials {
        let m = rng.gen_range(1..=3usize);
        let n = rng.gen_range(1..=10usize);
        let t: Vec<Complex64> = (0..m).map(|_| rand_complex(&mut rng, 0.5..2.0, 0.2..1.5)).collect();
        let p: Vec<Complex64> = (0..m).map(|_| rand_complex(&mut rng, -1.5..1.5, 0.2..1.5)).collect();
        let ps = ParamSet::new(t, p).expect("sampled away from zero");
        let d = rel_diff(hyper::fn_coefficient(n, &ps), fn_brute_force(n, &ps));
        worst = worst.max(d);
        if d > tol {
            fails += 1;
        }
    }
    out.push(SuiteOutcome { name: "fn_bruteforce", trials: fn_trials, failures: fails, max_rel_err: worst });

    out
}

fn run_verify(config: &RunConfig, out: &mut dyn Write) -> io::Result<i32> {
    let outcomes = verify_suites(config.n, config.tol, config.seed);
    let any_failed = outcomes.iter().any(|s| s.failures > 0);
    match config.format {
        OutputFormat::Csv => {
            writeln!(out, "suite,trials,failures,max_rel_err")?;
            for s in &outcomes {
                writeln!(out, "{},{},{},{:.16e}", s.name, s.trials, s.failures, s.max_rel_err)?;
            }
            writeln!(out, "status,,,{}", if any_failed { "fail" } else { "pass" })?;
        }
        _ => {
            let doc = json!({
                "seed": config.seed,
                "tolerance": config.tol,
                "suites": outcomes.iter().map(|s| json!({
                    "suite": s.name,
                    "trials": s.trials,
                    "failures": s.failures,
                    "max_rel_err": s.max_rel_err,
                })).collect::<Vec<_>>(),
                "status": if any_failed { "fail" } else { "pass" },
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(if any_failed { 2 } else { 0 })
}

fn run_asymptotics(config: &RunConfig, out: &mut dyn Write) -> io::Result<i32> {
    let ns = [50usize, 100, 200];
    let lambda = 0.5;
    let mut rows = Vec::new();
    for &n in &ns {
        if n > config.n {
            continue;
        }
        for (i, &p) in config.params.p().iter().enumerate() {
            let k = (n as f64 * lambda).round() as usize;
            let mut log_sum = Complex64::new(0.0, 0.0);
            for j in 0..k {
                log_sum += (n as f64 * p + j as f64).ln();
            }
            log_sum -= (1..=k).map(|j| (j as f64).ln()).sum::<f64>();
            let exact = log_sum.exp();
            if let Ok(asym) = radius::pochhammer_ratio_asymptotic(n, lambda, p) {
                rows.push((format!("pochhammer_ratio[p{i}]"), n, exact, asym));
            }
        }
        // (1−n)_{nλ} against its Stirling form
        let k = (n as f64 * lambda).round() as usize;
        let exact = hyper::pochhammer(Complex64::new(1.0 - n as f64, 0.0), k);
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let asym = sign
            * (1.0 - lambda).sqrt()
            * ((n as f64).powf(lambda) / ((1.0 - lambda).powf(1.0 - lambda) * lambda.exp()))
                .powi(n as i32);
        rows.push((
            "leading_pochhammer".to_string(),
            n,
            exact,
            Complex64::new(asym, 0.0),
        ));
    }
    match config.format {
        OutputFormat::Csv => {
            writeln!(out, "quantity,n,re_exact,im_exact,re_asym,im_asym,ratio_err")?;
            for (name, n, exact, asym) in &rows {
                let err = scaled_ratio_err(*exact, *asym);
                writeln!(
                    out,
                    "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    name, n, exact.re, exact.im, asym.re, asym.im, err
                )?;
            }
        }
        _ => {
            let doc = json!({
                "lambda": lambda,
                "rows": rows.iter().map(|(name, n, exact, asym)| json!({
                    "quantity": name,
                    "n": n,
                    "exact": cx(*exact),
                    "asymptotic": cx(*asym),
                    "ratio_err": scaled_ratio_err(*exact, *asym),
                })).collect::<Vec<_>>(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(0)
}

/// Execute a validated config, writing results to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> io::Result<i32> {
    match config.command {
        Command::Coeffs => run_coeffs(config, out),
        Command::Eval => run_eval(config, out),
        Command::Invert => run_invert(config, out),
        Command::Radius => run_radius(config, out),
        Command::Verify => run_verify(config, out),
        Command::Asymptotics => run_asymptotics(config, out),
    }
}

/// Entry point for the `genw` binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let (command, args) = match &cli.command {
        CliCommand::Coeffs(a) => (Command::Coeffs, a),
        CliCommand::Eval(a) => (Command::Eval, a),
        CliCommand::Invert(a) => (Command::Invert, a),
        CliCommand::Radius(a) => (Command::Radius, a),
        CliCommand::Verify(a) => (Command::Verify, a),
        CliCommand::Asymptotics(a) => (Command::Asymptotics, a),
    };
    let config = match build_config(command, args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let result = match &args.out {
        Some(path) => match File::create(path) {
            Ok(mut f) => run(&config, &mut f),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", path.display());
                return 1;
            }
        },
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            run(&config, &mut lock)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
