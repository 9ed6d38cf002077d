//! Numerical checks of a solved pair `(Q*, H*)`.
//!
//! Each audit samples a property the exact saddle point satisfies: regret is
//! flat in the highest bid, every prescribed bid is a best response to `H*`,
//! the schedule stays strictly between zero and the value, and bids carry no
//! atoms so ties have probability zero.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::dist::ValueDistribution;
use crate::error::Result;
use crate::format::sig9;
use crate::solver::{hstar, minimax_regret, solve_qstar, HighestBidCdf};
use crate::strategy::QuantileStrategy;

/// Flatness spread allowed, relative to the minimax regret.
pub const FLATNESS_TOLERANCE: f64 = 1e-3;
/// Largest relative best-response gap allowed.
pub const BEST_RESPONSE_TOLERANCE: f64 = 1e-3;
/// Floor on the best utility when forming relative gaps.
pub const UTILITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flatness {
    pub spread: f64,
    pub min: f64,
    pub max: f64,
    pub argmin_y: f64,
    pub argmax_y: f64,
}

/// Regret against the highest bid `Q(y)`, evaluated at every grid quantile.
pub fn flatness_audit(q: &QuantileStrategy, dist: &ValueDistribution) -> Flatness {
    let mut out = Flatness {
        spread: 0.0,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        argmin_y: 0.0,
        argmax_y: 0.0,
    };
    for (i, &b) in q.bids().iter().enumerate() {
        let y = q.t(i);
        let r = dist.survival_unchecked(b) - q.utility_from(dist, y);
        if r < out.min {
            out.min = r;
            out.argmin_y = y;
        }
        if r > out.max {
            out.max = r;
            out.argmax_y = y;
        }
    }
    out.spread = out.max - out.min;
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub gap: f64,
    /// Value at which the largest gap occurs.
    pub worst_value: f64,
}

/// Largest relative suboptimality of `Q(y)` against `H*` for values
/// `F⁻(y)`, `y = i / (n_values - 1)`, over a uniform bid grid plus `Q(y)`.
pub fn best_response_audit(
    q: &QuantileStrategy,
    h: &HighestBidCdf,
    dist: &ValueDistribution,
    n_values: usize,
    n_bids: usize,
) -> BestResponse {
    let n_values = n_values.max(2);
    let n_bids = n_bids.max(2);
    let gaps: Vec<(f64, f64)> = (0..n_values)
        .into_par_iter()
        .map(|i| {
            let y = i as f64 / (n_values - 1) as f64;
            let v = dist.quantile_unchecked(y);
            let utility = |b: f64| (v - b) * h.eval(b);
            let prescribed = utility(q.value_at(y));
            let best = (0..n_bids)
                .map(|j| utility(j as f64 / (n_bids - 1) as f64))
                .fold(prescribed, f64::max);
            ((best - prescribed) / best.max(UTILITY_FLOOR), v)
        })
        .collect();
    gaps.into_iter().fold(
        BestResponse {
            gap: 0.0,
            worst_value: 0.0,
        },
        |acc, (gap, v)| if gap > acc.gap { BestResponse { gap, worst_value: v } } else { acc },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub ok: bool,
    /// First violation found, if any.
    pub violation: Option<String>,
}

/// `Q(0) = 0`, `Q` strictly increasing on the grid and `Q(t) < F⁻(t)` for
/// every grid point `t > 0`.
pub fn bounds_audit(q: &QuantileStrategy, dist: &ValueDistribution) -> Bounds {
    let bids = q.bids();
    let violation = if bids[0] != 0.0 {
        Some(format!("Q(0) = {} is not 0", bids[0]))
    } else if let Some(i) = (1..bids.len()).find(|&i| bids[i] <= bids[i - 1]) {
        Some(format!(
            "Q does not increase between t = {} and t = {}",
            q.t(i - 1),
            q.t(i)
        ))
    } else {
        (1..bids.len()).find_map(|i| {
            let t = q.t(i);
            let v = dist.quantile_unchecked(t);
            (bids[i] >= v).then(|| format!("Q({t}) = {} is not below F⁻({t}) = {v}", bids[i]))
        })
    };
    Bounds {
        ok: violation.is_none(),
        violation,
    }
}

/// Largest atom of the bid distribution; the audit passes when it is zero.
pub fn atomless_audit(q: &QuantileStrategy) -> (bool, f64) {
    let atom = q.bid_cdf().max_atom();
    (atom == 0.0, atom)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// Mass of the zero atom removed before solving.
    pub zero_atom: f64,
    pub grid: usize,
    /// Minimax regret of the conditional problem.
    pub conditional_regret: f64,
    pub minimax_regret: f64,
    pub flatness: Flatness,
    pub best_response: BestResponse,
    /// Largest best-response gap that still passes.
    pub best_response_tolerance: f64,
    pub bounds: Bounds,
    pub atomless_ok: bool,
    pub max_bid_atom: f64,
}

impl AuditReport {
    pub fn flatness_ok(&self) -> bool {
        self.flatness.spread <= FLATNESS_TOLERANCE * self.conditional_regret
    }

    pub fn best_response_ok(&self) -> bool {
        self.best_response.gap <= self.best_response_tolerance
    }

    pub fn passed(&self) -> bool {
        self.flatness_ok() && self.best_response_ok() && self.bounds.ok && self.atomless_ok
    }

    /// Flat `key=value` block, one entry per line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k}={v}").unwrap();
        kv("zero_atom", sig9(self.zero_atom));
        kv("grid", self.grid.to_string());
        kv("conditional_regret", sig9(self.conditional_regret));
        kv("minimax_regret", sig9(self.minimax_regret));
        kv("flatness_spread", sig9(self.flatness.spread));
        kv("flatness_min", sig9(self.flatness.min));
        kv("flatness_min_y", sig9(self.flatness.argmin_y));
        kv("flatness_max", sig9(self.flatness.max));
        kv("flatness_max_y", sig9(self.flatness.argmax_y));
        kv("flatness_ok", self.flatness_ok().to_string());
        kv("best_response_gap", sig9(self.best_response.gap));
        kv("best_response_worst_value", sig9(self.best_response.worst_value));
        kv("best_response_ok", self.best_response_ok().to_string());
        kv("bounds_ok", self.bounds.ok.to_string());
        if let Some(v) = &self.bounds.violation {
            kv("bounds_violation", v.clone());
        }
        kv("atomless_ok", self.atomless_ok.to_string());
        kv("max_bid_atom", sig9(self.max_bid_atom));
        kv("passed", self.passed().to_string());
        s
    }

    pub const CSV_HEADER: &'static str = "zero_atom,grid,minimax_regret,flatness_spread,\
best_response_gap,bounds_ok,atomless_ok,passed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            sig9(self.zero_atom),
            self.grid,
            sig9(self.minimax_regret),
            sig9(self.flatness.spread),
            sig9(self.best_response.gap),
            self.bounds.ok,
            self.atomless_ok,
            self.passed()
        )
    }
}

/// Audits an already solved pair for a distribution without a zero atom.
pub fn audit_pair(
    q: &QuantileStrategy,
    h: &HighestBidCdf,
    dist: &ValueDistribution,
) -> AuditReport {
    let (atomless_ok, max_bid_atom) = atomless_audit(q);
    let regret = minimax_regret(q);
    AuditReport {
        zero_atom: 0.0,
        grid: q.cells(),
        conditional_regret: regret,
        minimax_regret: regret,
        flatness: flatness_audit(q, dist),
        best_response: best_response_audit(q, h, dist, 100, 4001),
        best_response_tolerance: BEST_RESPONSE_TOLERANCE,
        bounds: bounds_audit(q, dist),
        atomless_ok,
        max_bid_atom,
    }
}

/// Strips the zero atom, solves on `grid` cells and runs all four audits on
/// the conditional problem.
pub fn audit_distribution(dist: &ValueDistribution, grid: usize) -> Result<AuditReport> {
    let (a, cond) = dist.strip_zero_atom()?;
    let q = solve_qstar(&cond, grid)?;
    let h = hstar(&cond, &q)?;
    let mut report = audit_pair(&q, &h, &cond);
    report.zero_atom = a;
    report.minimax_regret = (1.0 - a) * report.conditional_regret;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::{shade_to_quantile, DEFAULT_GRID};

    fn uniform() -> ValueDistribution {
        ValueDistribution::uniform(0.0, 1.0).unwrap()
    }

    fn exact_point_schedule(n: usize) -> QuantileStrategy {
        QuantileStrategy::from_fn(n, |t| 1.0 - (-t).exp()).unwrap()
    }

    #[test]
    fn flatness_examples() {
        let p = ValueDistribution::point(1.0).unwrap();
        let f = flatness_audit(&exact_point_schedule(10_000), &p);
        let inv_e = (-1.0f64).exp();
        assert!(f.spread <= 1e-6);
        assert!((f.min - inv_e).abs() <= 1e-6 && (f.max - inv_e).abs() <= 1e-6);

        let q = solve_qstar(&uniform(), DEFAULT_GRID).unwrap();
        assert!(flatness_audit(&q, &uniform()).spread <= 1e-3 * minimax_regret(&q));

        let half = QuantileStrategy::from_fn(1000, |t| 0.5 * t).unwrap();
        let f = flatness_audit(&half, &uniform());
        assert!(f.spread >= 0.1);
        assert_eq!(f.argmax_y, 0.0);
        // r(y) = (1 - y/2)^2 / 2 - (1 - y^2) / 4 bottoms out at y = 2/3.
        assert!((f.argmin_y - 2.0 / 3.0).abs() < 1e-3);
        assert!((f.min - 1.0 / 12.0).abs() < 1e-6);
    }

    #[test]
    fn best_response_examples() {
        let p = ValueDistribution::point(1.0).unwrap();
        let q = solve_qstar(&p, DEFAULT_GRID).unwrap();
        let h = hstar(&p, &q).unwrap();
        assert!(best_response_audit(&q, &h, &p, 100, 4001).gap <= 1e-9);

        let q = solve_qstar(&uniform(), DEFAULT_GRID).unwrap();
        let h = hstar(&uniform(), &q).unwrap();
        let br = best_response_audit(&q, &h, &uniform(), 100, 4001);
        assert!(br.gap <= 1e-3, "{br:?}");
    }

    #[test]
    fn bounds_examples() {
        let p = ValueDistribution::point(1.0).unwrap();
        assert!(bounds_audit(&solve_qstar(&p, 10_000).unwrap(), &p).ok);
        assert!(bounds_audit(&solve_qstar(&uniform(), DEFAULT_GRID).unwrap(), &uniform()).ok);
        let identity = QuantileStrategy::from_fn(100, |t| t).unwrap();
        let b = bounds_audit(&identity, &uniform());
        assert!(!b.ok);
        assert!(b.violation.unwrap().starts_with("Q(0.01)"));
    }

    #[test]
    fn atomless_examples() {
        assert!(atomless_audit(&solve_qstar(&uniform(), 1000).unwrap()).0);
        let p = ValueDistribution::point(1.0).unwrap();
        let (ok, atom) = atomless_audit(&shade_to_quantile(0.5, &p, 1000).unwrap());
        // Everything but the first cell bids exactly 0.5.
        assert!(!ok);
        assert!((atom - 0.999).abs() < 1e-12);
        assert!(atomless_audit(&shade_to_quantile(0.5, &uniform(), 1000).unwrap()).0);
    }

    #[test]
    fn report_renders_and_passes() {
        let mix = ValueDistribution::mixture(&[
            (0.5, ValueDistribution::point(0.0).unwrap()),
            (0.5, ValueDistribution::point(1.0).unwrap()),
        ])
        .unwrap();
        let r = audit_distribution(&mix, 10_000).unwrap();
        assert!(r.passed(), "{}", r.render());
        assert!((r.zero_atom - 0.5).abs() < 1e-15);
        assert!((r.minimax_regret - 0.5 * (-1.0f64).exp()).abs() < 1e-4);
        let text = r.render();
        assert!(text.contains("passed=true\n"));
        assert!(text.lines().all(|l| l.contains('=')));
        assert_eq!(
            r.csv_row().split(',').count(),
            AuditReport::CSV_HEADER.split(',').count()
        );
    }
}
