//! Worst-case regret of a bidding strategy.
//!
//! For strategies whose bid distribution has no atoms, nature's worst case is
//! a deterministic highest bid `h`, and the partial-information regret equals
//! the full-information regret
//!
//! ```text
//! r(h) = E[(v - h)^+] - U(s, h).
//! ```
//!
//! Its supremum over `h` is found by a dense scan followed by golden-section
//! refinement of every local maximum.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::dist::ValueDistribution;
use crate::error::{Error, Result};
use crate::format::sig9;
use crate::search::{golden_max, golden_min};
use crate::solver::{minimax_regret, solve_qstar};
use crate::strategy::{ShadeStrategy, Strategy};

/// Slack allowed when checking that `t f(t)` is nondecreasing.
pub const SHADING_PRECONDITION_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearch {
    /// Uniformly spaced candidates on `[0, 1]`.
    pub grid_points: usize,
    /// Golden-section refinement stops below this bracket width.
    pub refine_width: f64,
}

impl Default for LineSearch {
    fn default() -> Self {
        LineSearch {
            grid_points: 20_001,
            refine_width: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    LineSearch,
    ClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::LineSearch => "line-search",
            Method::ClosedForm => "closed-form",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    pub worst_h: f64,
    pub worst_regret: f64,
    /// `(h, r(h))` at every scanned candidate, ascending in `h`.
    pub curve: Vec<(f64, f64)>,
    pub method: Method,
    /// Set when the strategy's bids have atoms. The reduction to deterministic
    /// highest bids then only gives a lower bound on the worst-case regret.
    pub lower_bound: bool,
}

/// Full-information regret against a deterministic highest bid `h`.
pub fn regret_vs_h(strategy: &Strategy, dist: &ValueDistribution, h: f64) -> f64 {
    let h = h.clamp(0.0, 1.0);
    dist.survival_unchecked(h) - strategy.utility_vs_h(dist, h)
}

pub fn worst_case_regret(strategy: &Strategy, dist: &ValueDistribution) -> RegretReport {
    worst_case_regret_with(strategy, dist, &LineSearch::default())
}

pub fn worst_case_regret_with(
    strategy: &Strategy,
    dist: &ValueDistribution,
    search: &LineSearch,
) -> RegretReport {
    let m = search.grid_points.max(2);
    let mut hs: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
    hs.extend(dist.knots().iter().map(|k| k.x));
    hs.extend(strategy.bid_breakpoints(dist));
    hs.push(0.0);
    hs.retain(|h| (0.0..=1.0).contains(h));
    hs.sort_by(f64::total_cmp);
    hs.dedup();

    let regret = |h: f64| regret_vs_h(strategy, dist, h);
    let rs: Vec<f64> = hs.par_iter().map(|&h| regret(h)).collect();

    let better = |cand: (f64, f64), best: (f64, f64)| {
        cand.1 > best.1 || (cand.1 == best.1 && cand.0 < best.0)
    };
    let mut best = (hs[0], rs[0]);
    for (&h, &r) in hs.iter().zip(&rs).skip(1) {
        if better((h, r), best) {
            best = (h, r);
        }
    }

    let last = hs.len() - 1;
    let mut brackets: Vec<(f64, f64, f64)> = (0..=last)
        .filter(|&j| (j == 0 || rs[j] >= rs[j - 1]) && (j == last || rs[j] >= rs[j + 1]))
        .map(|j| {
            let lo = hs[j.saturating_sub(1)];
            let hi = hs[(j + 1).min(last)];
            let bound = dist.survival_unchecked(lo) - utility_floor(strategy, dist, lo, hi);
            (bound, lo, hi)
        })
        .filter(|&(bound, _, _)| bound > best.1)
        .collect();
    brackets.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));

    let refined: Vec<(f64, f64)> = brackets
        .par_iter()
        .map(|&(_, lo, hi)| golden_max(regret, lo, hi, search.refine_width))
        .collect();
    for cand in refined {
        if better(cand, best) {
            best = cand;
        }
    }

    RegretReport {
        worst_h: best.0,
        worst_regret: best.1.max(0.0),
        curve: hs.into_iter().zip(rs).collect(),
        method: Method::LineSearch,
        lower_bound: !strategy.has_atomless_bids(dist),
    }
}

/// Lower bound on `U(h)` over `h` in `[lo, hi]`. `U` is nonincreasing where
/// the strategy bids below value; overbidding on the quantiles won between
/// `lo` and `hi` can raise it by at most their measure times the overbid.
fn utility_floor(strategy: &Strategy, dist: &ValueDistribution, lo: f64, hi: f64) -> f64 {
    let u_hi = strategy.utility_vs_h(dist, hi);
    match strategy {
        Strategy::Shade(_) => u_hi,
        Strategy::Quantile(q) => {
            let y_lo = q.inverse(lo).unwrap_or(1.0);
            let y_hi = q.inverse(hi).unwrap_or(1.0);
            let overbid = (q.value_at(y_hi) - dist.quantile_unchecked(y_lo)).max(0.0);
            u_hi - (y_hi - y_lo) * overbid
        }
    }
}

/// Checks that `F` has a density `f` with `t f(t)` nondecreasing, reading the
/// piecewise-constant density off the knot grid.
pub fn check_shading_precondition(dist: &ValueDistribution) -> Result<()> {
    if let Some((x, m)) = dist.atoms().next() {
        return Err(Error::Precondition(format!(
            "F has an atom of mass {m} at {x}, so it admits no density"
        )));
    }
    let knots = dist.knots();
    // (left end, right end, density) for each cell of [0, 1].
    let mut cells = Vec::with_capacity(knots.len() + 1);
    if knots[0].x > 0.0 {
        cells.push((0.0, knots[0].x, 0.0));
    }
    for w in knots.windows(2) {
        cells.push((w[0].x, w[1].x, (w[1].f_left - w[0].f_right) / (w[1].x - w[0].x)));
    }
    let last = knots[knots.len() - 1].x;
    if last < 1.0 {
        cells.push((last, 1.0, 0.0));
    }
    for (i, pair) in cells.windows(2).enumerate() {
        let (_, x, left_density) = pair[0];
        let (_, right_end, right_density) = pair[1];
        if x * left_density > x * right_density + SHADING_PRECONDITION_SLACK {
            return Err(Error::Precondition(format!(
                "t f(t) decreases entering cell {} = [{x}, {right_end}] (from {} to {})",
                i + 1,
                x * left_density,
                x * right_density
            )));
        }
    }
    Ok(())
}

/// Closed-form worst-case regret of uniform shading,
/// `max { α E[v], E[(v - α F⁻(1))^+] }`, valid when `t f(t)` is nondecreasing.
pub fn shading_regret_closed_form(alpha: f64, dist: &ValueDistribution) -> Result<f64> {
    ShadeStrategy::new(alpha)?;
    check_shading_precondition(dist)?;
    Ok(shading_closed_form_point(alpha, dist).1)
}

/// `(worst h, regret)` of the closed form; no precondition check.
fn shading_closed_form_point(alpha: f64, dist: &ValueDistribution) -> (f64, f64) {
    let at_zero = alpha * dist.mean();
    let top = alpha * dist.quantile_unchecked(1.0);
    let at_top = dist.survival_unchecked(top);
    if at_zero >= at_top {
        (0.0, at_zero)
    } else {
        (top, at_top)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestAlpha {
    pub alpha: f64,
    pub regret: f64,
    pub worst_h: f64,
    pub method: Method,
}

/// Shading factor with the smallest worst-case regret: a scan at step
/// `resolution` followed by golden-section refinement around the best cell.
pub fn best_alpha(dist: &ValueDistribution, resolution: f64) -> BestAlpha {
    let closed = check_shading_precondition(dist).is_ok();
    let coarse = LineSearch {
        grid_points: 2_001,
        ..LineSearch::default()
    };
    let fine = LineSearch::default();
    let objective = |alpha: f64, search: &LineSearch| -> f64 {
        if closed {
            shading_closed_form_point(alpha, dist).1
        } else {
            let s = Strategy::Shade(ShadeStrategy::new(alpha).unwrap());
            worst_case_regret_with(&s, dist, search).worst_regret
        }
    };

    let resolution = resolution.clamp(1e-6, 0.5);
    let steps = (1.0 / resolution).round() as usize;
    let values: Vec<f64> = (0..=steps)
        .into_par_iter()
        .map(|i| objective(i as f64 / steps as f64, &coarse))
        .collect();
    let mut best_i = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best_i] {
            best_i = i;
        }
    }
    let center = best_i as f64 / steps as f64;
    let lo = (center - resolution).max(0.0);
    let hi = (center + resolution).min(1.0);
    let (alpha, regret) = golden_min(|a| objective(a, &fine), lo, hi, 1e-9);

    if closed {
        let (worst_h, regret) = shading_closed_form_point(alpha, dist);
        BestAlpha {
            alpha,
            regret,
            worst_h,
            method: Method::ClosedForm,
        }
    } else {
        let s = Strategy::Shade(ShadeStrategy::new(alpha).unwrap());
        let report = worst_case_regret_with(&s, dist, &fine);
        BestAlpha {
            alpha,
            regret: regret.min(report.worst_regret),
            worst_h: report.worst_h,
            method: Method::LineSearch,
        }
    }
}

/// Parametric families reproduced by sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFamily {
    /// `Beta(ρ, ρ)`.
    BetaSym,
    /// `Unif(a, 1)`; `a = 1` is the Dirac mass at 1.
    UniformA,
}

impl SweepFamily {
    pub fn member(&self, param: f64) -> Result<ValueDistribution> {
        match self {
            SweepFamily::BetaSym => ValueDistribution::beta(param, param),
            SweepFamily::UniformA => ValueDistribution::uniform(param, 1.0),
        }
    }
}

impl FromStr for SweepFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta-sym" => Ok(SweepFamily::BetaSym),
            "uniform-a" => Ok(SweepFamily::UniformA),
            other => Err(Error::spec(other, "expected beta-sym or uniform-a")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepStrategy {
    Shade(f64),
    QStar,
    BestAlpha,
}

impl FromStr for SweepStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "qstar" => Ok(SweepStrategy::QStar),
            "best-alpha" => Ok(SweepStrategy::BestAlpha),
            other => match other.parse::<crate::strategy::StrategySpec>()? {
                crate::strategy::StrategySpec::Shade(a) => Ok(SweepStrategy::Shade(a)),
                _ => Err(Error::spec(other, "sweeps accept shade:<alpha>, qstar or best-alpha")),
            },
        }
    }
}

impl fmt::Display for SweepStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepStrategy::Shade(a) => write!(f, "shade:{a}"),
            SweepStrategy::QStar => f.write_str("qstar"),
            SweepStrategy::BestAlpha => f.write_str("best-alpha"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub strategy: String,
    pub worst_h: f64,
    pub worst_regret: f64,
    pub reason: Option<String>,
}

/// Evaluates every strategy at every parameter; rows come out parameter-major
/// in input order. Failed cells carry NaN and a reason.
pub fn family_sweep(
    family: SweepFamily,
    params: &[f64],
    strategies: &[SweepStrategy],
    grid: usize,
) -> Vec<SweepRow> {
    let cells: Vec<(f64, SweepStrategy)> = params
        .iter()
        .flat_map(|&p| strategies.iter().map(move |&s| (p, s)))
        .collect();
    cells
        .par_iter()
        .map(|&(param, strategy)| {
            match sweep_cell(family, param, strategy, grid) {
                Ok((label, worst_h, worst_regret)) => SweepRow {
                    param,
                    strategy: label,
                    worst_h,
                    worst_regret,
                    reason: None,
                },
                Err(e) => SweepRow {
                    param,
                    strategy: strategy.to_string(),
                    worst_h: f64::NAN,
                    worst_regret: f64::NAN,
                    reason: Some(e.to_string()),
                },
            }
        })
        .collect()
}

fn sweep_cell(
    family: SweepFamily,
    param: f64,
    strategy: SweepStrategy,
    grid: usize,
) -> Result<(String, f64, f64)> {
    let dist = family.member(param)?;
    match strategy {
        SweepStrategy::Shade(alpha) => {
            let s = ShadeStrategy::new(alpha)?;
            let report = worst_case_regret(&Strategy::Shade(s), &dist);
            Ok((strategy.to_string(), report.worst_h, report.worst_regret))
        }
        SweepStrategy::QStar => {
            let (a, cond) = dist.strip_zero_atom()?;
            let q = solve_qstar(&cond, grid)?;
            // r(0) = ∫ Q* exactly, and the regret is flat in h.
            Ok((strategy.to_string(), 0.0, (1.0 - a) * minimax_regret(&q)))
        }
        SweepStrategy::BestAlpha => {
            let best = best_alpha(&dist, 1e-3);
            Ok((format!("best-alpha:{}", sig9(best.alpha)), best.worst_h, best.regret))
        }
    }
}

pub const SWEEP_HEADER: &str = "param,strategy,worst_h,worst_regret,reason";

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for row in rows {
        let reason = row
            .reason
            .as_deref()
            .map(|r| format!("\"{}\"", r.replace('"', "'")))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            sig9(row.param),
            row.strategy,
            sig9(row.worst_h),
            sig9(row.worst_regret),
            reason
        )?;
    }
    Ok(())
}
