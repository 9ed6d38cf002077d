//! Brute-force cross-check: the minimax problem on finite grids, solved as a
//! zero-sum game by fictitious play.
//!
//! Nature picks a highest bid `h_k` from the bid grid; the buyer picks, for
//! each discretized value, a distribution over bids. The payoff to nature is
//! regret, `O(h) - E[(v - b) 1{b >= h}]`, with ties going to the buyer.

use std::io::{self, Write};

use crate::dist::ValueDistribution;
use crate::error::{Error, Result};
use crate::format::sig9;

pub const DEFAULT_MAX_ITERS: usize = 1_000_000;
pub const DEFAULT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteGame {
    values: Vec<(f64, f64)>,
    bids: Vec<f64>,
    benchmark: Vec<f64>,
}

impl DiscreteGame {
    /// `values` holds `(v, weight)` pairs; `bids` doubles as nature's grid.
    /// Equal values are merged.
    pub fn new(values: Vec<(f64, f64)>, bids: Vec<f64>) -> Result<Self> {
        if values.is_empty() || bids.is_empty() {
            return Err(Error::InvalidDistribution("empty game grid".into()));
        }
        if values.iter().any(|&(v, w)| !(0.0..=1.0).contains(&v) || w.is_nan() || w < 0.0) {
            return Err(Error::InvalidDistribution(
                "values must lie in [0, 1] with nonnegative weights".into(),
            ));
        }
        let total: f64 = values.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "value weights sum to {total}, not 1"
            )));
        }
        if bids[0] != 0.0
            || bids.windows(2).any(|w| w[1] <= w[0])
            || *bids.last().unwrap() > 1.0
        {
            return Err(Error::InvalidStrategy(
                "bid grid must start at 0 and increase strictly within [0, 1]".into(),
            ));
        }
        let mut values = values;
        values.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(values.len());
        for (v, w) in values {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => merged.push((v, w)),
            }
        }
        let benchmark = bids
            .iter()
            .map(|&h| merged.iter().map(|&(v, w)| w * (v - h).max(0.0)).sum())
            .collect();
        Ok(DiscreteGame {
            values: merged,
            bids,
            benchmark,
        })
    }

    pub fn values(&self) -> &[(f64, f64)] {
        &self.values
    }

    pub fn bids(&self) -> &[f64] {
        &self.bids
    }

    /// Nature's actions; the same grid as the bids so ties are exact.
    pub fn h_grid(&self) -> &[f64] {
        &self.bids
    }

    /// `O(h_k) = Σ w (v - h_k)^+`.
    pub fn benchmark(&self) -> &[f64] {
        &self.benchmark
    }
}

/// Values at the quantile midpoints `F⁻((i - 0.5) / n_values)` with equal
/// weights; bids and highest bids on `{ j / (n_bids - 1) }`.
pub fn build_game(dist: &ValueDistribution, n_values: usize, n_bids: usize) -> Result<DiscreteGame> {
    if n_bids < 2 {
        return Err(Error::InvalidStrategy(format!(
            "bid grid needs at least 2 points, got {n_bids}"
        )));
    }
    let bids = (0..n_bids).map(|j| j as f64 / (n_bids - 1) as f64).collect();
    build_game_with_bids(dist, n_values, bids)
}

/// As [`build_game`] with an explicit bid grid.
pub fn build_game_with_bids(
    dist: &ValueDistribution,
    n_values: usize,
    bids: Vec<f64>,
) -> Result<DiscreteGame> {
    if n_values == 0 {
        return Err(Error::InvalidDistribution("need at least one value".into()));
    }
    let w = 1.0 / n_values as f64;
    let values = (1..=n_values)
        .map(|i| (dist.quantile_unchecked((i as f64 - 0.5) * w), w))
        .collect();
    DiscreteGame::new(values, bids)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    /// Worst-case regret of the averaged buyer policy.
    pub value: f64,
    /// Best regret nature's empirical mixtures were shown to force.
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub iters: usize,
    pub converged: bool,
    /// Averaged bid distribution per merged value, rows aligned with
    /// [`DiscreteGame::values`].
    pub buyer_policy: Vec<Vec<f64>>,
    /// Nature's empirical mixture over the h grid.
    pub nature_mixture: Vec<f64>,
}

/// Alternating fictitious play until the duality gap drops to `tol` or
/// `max_iters` rounds have run.
pub fn solve_game(game: &DiscreteGame, max_iters: usize, tol: f64) -> Result<OracleSolution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain {
            what: "oracle tolerance",
            value: tol,
        });
    }
    let m = game.bids.len();
    let n = game.values.len();
    let mut nature = vec![0u64; m];
    let mut policy = vec![0u64; n * m];
    // Σ_i w_i count(i, b) (v_i - b), the buyer's accumulated payoff per bid.
    let mut payoff = vec![0.0; m];
    let mut choice = vec![0usize; n];
    let mut best_utility = vec![0.0; n];
    let mut h_cdf = vec![0.0; m];

    nature[0] = 1;
    let mut nature_total = 1u64;
    let mut regrets = vec![0.0; m];
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut iters = 0;
    while iters < max_iters {
        iters += 1;

        let mut acc = 0u64;
        for (c, &k) in h_cdf.iter_mut().zip(&nature) {
            acc += k;
            *c = acc as f64 / nature_total as f64;
        }
        best_responses(&game.values, &game.bids, &h_cdf, &mut choice, &mut best_utility);
        let forced: f64 = nature
            .iter()
            .zip(&game.benchmark)
            .map(|(&k, o)| k as f64 / nature_total as f64 * o)
            .sum::<f64>()
            - game
                .values
                .iter()
                .zip(&best_utility)
                .map(|(&(_, w), u)| w * u)
                .sum::<f64>();
        lower = lower.max(forced);

        for (i, &j) in choice.iter().enumerate() {
            let (v, w) = game.values[i];
            policy[i * m + j] += 1;
            payoff[j] += w * (v - game.bids[j]);
        }

        let mut suffix = 0.0;
        let mut worst = (0, f64::NEG_INFINITY);
        for k in (0..m).rev() {
            suffix += payoff[k];
            regrets[k] = game.benchmark[k] - suffix / iters as f64;
        }
        for (k, &r) in regrets.iter().enumerate() {
            if r > worst.1 {
                worst = (k, r);
            }
        }
        upper = worst.1;
        nature[worst.0] += 1;
        nature_total += 1;

        if upper - lower <= tol {
            break;
        }
    }

    let gap = (upper - lower).max(0.0);
    let buyer_policy = (0..n)
        .map(|i| policy[i * m..(i + 1) * m].iter().map(|&c| c as f64 / iters as f64).collect())
        .collect();
    let nature_mixture = nature.iter().map(|&k| k as f64 / nature_total as f64).collect();
    Ok(OracleSolution {
        value: upper,
        lower,
        upper,
        gap,
        iters,
        converged: gap <= tol,
        buyer_policy,
        nature_mixture,
    })
}

/// Smallest-index maximizer of `(v - b_j) H(b_j)` for every value. The
/// maximizer is nondecreasing in `v`, so each split only searches between the
/// neighbours' answers.
fn best_responses(
    values: &[(f64, f64)],
    bids: &[f64],
    h_cdf: &[f64],
    choice: &mut [usize],
    best: &mut [f64],
) {
    struct Search<'a> {
        values: &'a [(f64, f64)],
        bids: &'a [f64],
        h_cdf: &'a [f64],
    }

    impl Search<'_> {
        fn run(&self, lo: usize, hi: usize, jlo: usize, jhi: usize, choice: &mut [usize], best: &mut [f64]) {
            if lo >= hi {
                return;
            }
            let mid = lo + (hi - lo) / 2;
            let v = self.values[mid].0;
            let mut arg = jlo;
            let mut top = (v - self.bids[jlo]) * self.h_cdf[jlo];
            for j in jlo + 1..=jhi {
                let u = (v - self.bids[j]) * self.h_cdf[j];
                if u > top {
                    top = u;
                    arg = j;
                }
            }
            choice[mid] = arg;
            best[mid] = top;
            self.run(lo, mid, jlo, arg, choice, best);
            self.run(mid + 1, hi, arg, jhi, choice, best);
        }
    }

    let search = Search { values, bids, h_cdf };
    search.run(0, values.len(), 0, bids.len() - 1, choice, best);
}

pub const ORACLE_HEADER: &str = "grid,value,gap,iters";

pub fn write_oracle_csv<W: Write>(rows: &[(usize, OracleSolution)], mut out: W) -> io::Result<()> {
    writeln!(out, "{ORACLE_HEADER}")?;
    for (grid, s) in rows {
        writeln!(out, "{grid},{},{},{}", sig9(s.value), sig9(s.gap), s.iters)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn game_construction_examples() {
        let p = ValueDistribution::point(1.0).unwrap();
        let g = build_game_with_bids(&p, 1, vec![0.0, 0.5]).unwrap();
        assert_eq!(g.values(), &[(1.0, 1.0)]);
        assert_eq!(g.benchmark(), &[1.0, 0.5]);

        let u = ValueDistribution::uniform(0.0, 1.0).unwrap();
        let g = build_game(&u, 4, 5).unwrap();
        let vs: Vec<f64> = g.values().iter().map(|p| p.0).collect();
        assert_eq!(vs, vec![0.125, 0.375, 0.625, 0.875]);
        assert!(g.values().iter().all(|p| p.1 == 0.25));

        let mix = ValueDistribution::mixture(&[
            (0.5, ValueDistribution::point(0.0).unwrap()),
            (0.5, ValueDistribution::point(1.0).unwrap()),
        ])
        .unwrap();
        let g = build_game(&mix, 2, 3).unwrap();
        assert_eq!(g.values(), &[(0.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn game_invariants() {
        let d = ValueDistribution::beta(2.0, 5.0).unwrap();
        let g = build_game(&d, 50, 40).unwrap();
        let total: f64 = g.values().iter().map(|p| p.1).sum();
        assert!((total - 1.0).abs() <= 1e-12);
        assert!(g.benchmark().windows(2).all(|w| w[1] <= w[0]));
        assert!(g.values().windows(2).all(|w| w[0].0 < w[1].0));
        assert!(DiscreteGame::new(vec![(0.5, 0.7)], vec![0.0, 1.0]).is_err());
        assert!(DiscreteGame::new(vec![(0.5, 1.0)], vec![0.1, 1.0]).is_err());
    }

    #[test]
    fn two_bid_hand_case() {
        let p = ValueDistribution::point(1.0).unwrap();
        let g = build_game_with_bids(&p, 1, vec![0.0, 0.5]).unwrap();
        let s = solve_game(&g, DEFAULT_MAX_ITERS, 1e-4).unwrap();
        assert!(s.converged);
        assert!((s.value - 0.25).abs() <= 1e-3);
        assert!((s.buyer_policy[0][0] - 0.5).abs() <= 1e-2);
        assert!(s.lower <= s.value && s.value <= s.upper);
    }

    #[test]
    fn corner_bids_hand_case() {
        // Bids {0, 1}: bidding 0 is dominant and h = 1 costs nothing.
        let p = ValueDistribution::point(1.0).unwrap();
        let s = solve_game(&build_game(&p, 2, 2).unwrap(), 1000, 1e-9).unwrap();
        assert!(s.converged);
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn best_responses_match_brute_force() {
        let values: Vec<(f64, f64)> = (0..37).map(|i| (i as f64 / 36.0, 1.0 / 37.0)).collect();
        let bids: Vec<f64> = (0..23).map(|j| j as f64 / 22.0).collect();
        let h: Vec<f64> = (0..23).map(|j| ((j as f64 + 1.0) / 23.0).powf(0.3)).collect();
        let mut choice = vec![0; 37];
        let mut best = vec![0.0; 37];
        best_responses(&values, &bids, &h, &mut choice, &mut best);
        for (i, &(v, _)) in values.iter().enumerate() {
            let mut arg = 0;
            for j in 1..23 {
                if (v - bids[j]) * h[j] > (v - bids[arg]) * h[arg] {
                    arg = j;
                }
            }
            assert_eq!(choice[i], arg, "value {v}");
        }
    }

    #[test]
    fn non_convergence_is_flagged() {
        let u = ValueDistribution::uniform(0.0, 1.0).unwrap();
        let s = solve_game(&build_game(&u, 50, 50).unwrap(), 3, 1e-9).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iters, 3);
        assert!(s.gap > 1e-9);
    }

    #[test]
    fn csv_rows() {
        let p = ValueDistribution::point(1.0).unwrap();
        let s = solve_game(&build_game(&p, 2, 2).unwrap(), 1000, 1e-9).unwrap();
        let mut buf = Vec::new();
        write_oracle_csv(&[(2, s)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some(ORACLE_HEADER));
        assert!(text.lines().nth(1).unwrap().starts_with("2,0.00000000,"));
    }
}
