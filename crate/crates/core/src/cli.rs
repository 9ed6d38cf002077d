//! Command-line front end. Every command writes deterministic CSV and prints a
//! short `key=value` summary.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::audit::{audit_distribution, AuditReport, BEST_RESPONSE_TOLERANCE};
use crate::dist::{make_distribution, DistSpec, ValueDistribution};
use crate::error::{Error, Result};
use crate::format::sig9;
use crate::oracle::{build_game, solve_game, write_oracle_csv, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use crate::regret::{
    family_sweep, shading_regret_closed_form, worst_case_regret_with, write_sweep_csv, LineSearch,
    SweepFamily, SweepStrategy,
};
use crate::solver::{hstar, minimax_regret, solve_qstar};
use crate::strategy::{QuantileStrategy, ShadeStrategy, Strategy, StrategySpec, DEFAULT_GRID};

pub const EXIT_ORACLE: i32 = 4;
pub const EXIT_AUDIT: i32 = 5;
pub const MIN_GRID: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "minimax-bid", version, about = "Minimax-regret bidding for first-price auctions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the minimax quantile strategy and its highest-bid distribution.
    Solve(SolveArgs),
    /// Worst-case regret of a strategy by line search over the highest bid.
    Regret(RegretArgs),
    /// Worst-case regret across a parametric family of value distributions.
    Sweep(SweepArgs),
    /// Solve the discretized game by fictitious play.
    Oracle(OracleArgs),
    /// Check the saddle-point properties of the solved pair.
    Audit(AuditArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    /// Value distribution, e.g. "uniform 0 1", "beta 2 2", "point 1",
    /// "mix 0.3 point 0 + 0.7 uniform 0 1" or "cdf table.csv".
    #[arg(long, default_value = "uniform 0 1")]
    pub dist: String,
    /// Quantile grid size N.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: DistArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RegretArgs {
    #[command(flatten)]
    pub common: DistArgs,
    /// shade:<alpha>, qstar or file:<path> (CSV with header t,Q).
    #[arg(long)]
    pub strategy: String,
    /// Golden-section refinement width.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the scanned (h, regret) curve to --out.
    #[arg(long, requires = "out")]
    pub curve: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// beta-sym (Beta(rho, rho)) or uniform-a (Unif(a, 1)).
    #[arg(long)]
    pub family: String,
    /// Shape parameters for beta-sym.
    #[arg(long, value_delimiter = ',')]
    pub rhos: Vec<f64>,
    /// Lower ends for uniform-a.
    #[arg(long = "as", value_delimiter = ',')]
    pub a_values: Vec<f64>,
    /// Comma-separated list of shade:<alpha>, qstar and best-alpha.
    #[arg(long, value_delimiter = ',', default_value = "shade:0.5,qstar,best-alpha")]
    pub strategies: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, default_value = "uniform 0 1")]
    pub dist: String,
    /// Number of values and of bids in the discretized game.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    /// Duality gap at which fictitious play stops.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    /// Also solve the continuous problem and print the difference.
    #[arg(long)]
    pub compare: bool,
    /// Quantile grid for --compare.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub solve_grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub common: DistArgs,
    /// Best-response gap threshold.
    #[arg(long, default_value_t = BEST_RESPONSE_TOLERANCE)]
    pub tol: f64,
}

/// Runs one command, printing its summary to `stdout`. Returns the process
/// exit code for completed runs; errors map through [`Error::exit_code`].
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let mut summary = String::new();
    let code = match &cli.command {
        Command::Solve(args) => cmd_solve(args, &mut summary)?,
        Command::Regret(args) => cmd_regret(args, &mut summary)?,
        Command::Sweep(args) => cmd_sweep(args, &mut summary)?,
        Command::Oracle(args) => cmd_oracle(args, &mut summary)?,
        Command::Audit(args) => cmd_audit(args, &mut summary)?,
    };
    stdout
        .write_all(summary.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| Error::io("<stdout>", e))?;
    Ok(code)
}

fn parse_dist(spec: &str) -> Result<ValueDistribution> {
    make_distribution(&spec.parse::<DistSpec>()?)
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < MIN_GRID {
        return Err(Error::spec(
            format!("--grid {grid}"),
            format!("grid must be at least {MIN_GRID}"),
        ));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<f64> {
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(Error::spec(format!("--tol {tol}"), "tolerance must be positive"))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    writeln!(out, "{key}={value}").unwrap();
}

fn cmd_solve(args: &SolveArgs, out: &mut String) -> Result<i32> {
    let c = &args.common;
    check_grid(c.grid)?;
    let dist = parse_dist(&c.dist)?;
    let (a, cond) = dist.strip_zero_atom()?;
    let q = solve_qstar(&cond, c.grid)?;
    let h = hstar(&cond, &q)?;
    let conditional = minimax_regret(&q);
    if let Some(path) = &c.out {
        let mut csv = String::from("t,Q,G\n");
        for (i, (b, g)) in q.bids().iter().zip(h.g_grid()).enumerate() {
            writeln!(csv, "{},{},{}", sig9(q.t(i)), sig9(*b), sig9(*g)).unwrap();
        }
        write_file(path, &csv)?;
    }
    if a > 0.0 {
        kv(out, "zero_atom", sig9(a));
        kv(out, "conditional_regret", sig9(conditional));
    }
    kv(out, "minimax_regret", sig9((1.0 - a) * conditional));
    Ok(0)
}

fn cmd_regret(args: &RegretArgs, out: &mut String) -> Result<i32> {
    let c = &args.common;
    check_grid(c.grid)?;
    let dist = parse_dist(&c.dist)?;
    let mut search = LineSearch::default();
    if let Some(tol) = args.tol {
        search.refine_width = check_tol(tol)?;
    }
    let spec: StrategySpec = args.strategy.parse()?;
    // Q* lives on the conditional problem; its regret scales by 1 - a.
    let (strategy, eval_dist, scale) = match &spec {
        StrategySpec::Shade(alpha) => (Strategy::Shade(ShadeStrategy::new(*alpha)?), dist.clone(), 1.0),
        StrategySpec::File(path) => (Strategy::Quantile(QuantileStrategy::read_csv(path)?), dist.clone(), 1.0),
        StrategySpec::QStar => {
            let (a, cond) = dist.strip_zero_atom()?;
            (Strategy::Quantile(solve_qstar(&cond, c.grid)?), cond, 1.0 - a)
        }
    };
    let report = worst_case_regret_with(&strategy, &eval_dist, &search);
    if args.curve {
        if let Some(path) = &c.out {
            let mut csv = String::from("h,regret\n");
            for (h, r) in &report.curve {
                writeln!(csv, "{},{}", sig9(*h), sig9(scale * r)).unwrap();
            }
            write_file(path, &csv)?;
        }
    }
    kv(out, "strategy", &spec);
    kv(out, "worst_h", sig9(report.worst_h));
    kv(out, "worst_regret", sig9(scale * report.worst_regret));
    kv(out, "method", report.method);
    if report.lower_bound {
        kv(out, "lower_bound", true);
    }
    if let StrategySpec::Shade(alpha) = spec {
        if let Ok(closed) = shading_regret_closed_form(alpha, &dist) {
            kv(out, "closed_form_regret", sig9(closed));
        }
    }
    Ok(0)
}

fn cmd_sweep(args: &SweepArgs, out: &mut String) -> Result<i32> {
    check_grid(args.grid)?;
    let family: SweepFamily = args.family.parse()?;
    let (params, flag) = match family {
        SweepFamily::BetaSym => (&args.rhos, "--rhos"),
        SweepFamily::UniformA => (&args.a_values, "--as"),
    };
    if params.is_empty() {
        return Err(Error::spec(args.family.clone(), format!("{flag} is required for this family")));
    }
    let strategies = args
        .strategies
        .iter()
        .map(|s| s.parse::<SweepStrategy>())
        .collect::<Result<Vec<_>>>()?;
    let rows = family_sweep(family, params, &strategies, args.grid);
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv).expect("writing to memory");
    let csv = String::from_utf8(csv).expect("CSV is ASCII");
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            kv(out, "rows", rows.len());
            let failed = rows.iter().filter(|r| r.reason.is_some()).count();
            if failed > 0 {
                kv(out, "failed_rows", failed);
            }
        }
        None => out.push_str(&csv),
    }
    Ok(0)
}

fn cmd_oracle(args: &OracleArgs, out: &mut String) -> Result<i32> {
    if args.grid < 2 {
        return Err(Error::spec(format!("--grid {}", args.grid), "the oracle grid needs at least 2 points"));
    }
    let tol = check_tol(args.tol)?;
    let dist = parse_dist(&args.dist)?;
    let game = build_game(&dist, args.grid, args.grid)?;
    let solution = solve_game(&game, args.max_iters, tol)?;
    kv(out, "value", sig9(solution.value));
    kv(out, "lower", sig9(solution.lower));
    kv(out, "gap", sig9(solution.gap));
    kv(out, "iters", solution.iters);
    kv(out, "converged", solution.converged);
    if args.compare {
        check_grid(args.solve_grid)?;
        let (a, cond) = dist.strip_zero_atom()?;
        let regret = (1.0 - a) * minimax_regret(&solve_qstar(&cond, args.solve_grid)?);
        kv(out, "minimax_regret", sig9(regret));
        kv(out, "delta", sig9((solution.value - regret).abs()));
    }
    if let Some(path) = &args.out {
        let mut csv = Vec::new();
        write_oracle_csv(&[(args.grid, solution.clone())], &mut csv).expect("writing to memory");
        write_file(path, &String::from_utf8(csv).expect("CSV is ASCII"))?;
    }
    Ok(if solution.converged { 0 } else { EXIT_ORACLE })
}

fn cmd_audit(args: &AuditArgs, out: &mut String) -> Result<i32> {
    let c = &args.common;
    check_grid(c.grid)?;
    let tol = check_tol(args.tol)?;
    let dist = parse_dist(&c.dist)?;
    let mut report = audit_distribution(&dist, c.grid)?;
    report.best_response_tolerance = tol;
    let passed = report.passed();
    out.push_str(&report.render());
    if let Some(path) = &c.out {
        write_file(path, &format!("{}\n{}\n", AuditReport::CSV_HEADER, report.csv_row()))?;
    }
    Ok(if passed { 0 } else { EXIT_AUDIT })
}
