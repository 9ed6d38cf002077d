//! Construction of the minimax-optimal bid schedule `Q*` and of the
//! highest-competing-bid distribution `H*` that makes it a best response.
//!
//! `Q*` solves
//!
//! ```text
//! x'(t) = (F⁻(t) - x(t)) / (1 - F(x(t))),   x(0) = 0,
//! ```
//!
//! and the minimax regret equals `∫_0^1 Q*`. The right-hand side is only
//! measurable in `t` (it jumps wherever `F⁻` does) and discontinuous in `x`
//! at atoms of `F`, so a fixed-step second-order scheme with a projection
//! onto `[x_prev, F⁻(t)]` is used rather than an adaptive high-order method.

use crate::dist::ValueDistribution;
use crate::error::{Error, Result};
use crate::strategy::{QuantileStrategy, DEFAULT_GRID};

/// Lower clamp for `1 - F(x)` in the ODE right-hand side.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Number of grid cells `N` of the returned schedule.
    pub grid: usize,
    /// Heun steps per grid cell.
    pub substeps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid: DEFAULT_GRID,
            substeps: 4,
        }
    }
}

impl SolverConfig {
    pub fn with_grid(grid: usize) -> Self {
        SolverConfig {
            grid,
            ..Self::default()
        }
    }
}

/// Solves for `Q*` on an `n`-cell grid. Requires `F(0) = 0`; use
/// [`ValueDistribution::strip_zero_atom`] first otherwise.
pub fn solve_qstar(dist: &ValueDistribution, n: usize) -> Result<QuantileStrategy> {
    solve_qstar_with(dist, &SolverConfig::with_grid(n))
}

pub fn solve_qstar_with(dist: &ValueDistribution, config: &SolverConfig) -> Result<QuantileStrategy> {
    let atom = dist.eval_right(0.0);
    if atom >= 1.0 - 1e-15 {
        return Err(Error::DegenerateZeroValue);
    }
    if atom > 0.0 {
        return Err(Error::AtomAtZero(atom));
    }
    if config.grid < 1 || config.substeps < 1 {
        return Err(Error::SolverFailure {
            step: 0,
            reason: "grid and substeps must be positive".into(),
        });
    }
    let rhs = |ceiling: f64, x: f64| (ceiling - x) / (1.0 - dist.eval_right(x)).max(DENOMINATOR_FLOOR);

    let n = config.grid;
    let steps = n * config.substeps;
    let h = 1.0 / steps as f64;
    let mut bids = Vec::with_capacity(n + 1);
    bids.push(0.0);
    let mut x = 0.0_f64;
    for step in 0..steps {
        let t = step as f64 * h;
        let t_next = (step + 1) as f64 * h;
        // One-sided limits of F⁻ so a jump at a grid point never leaks into
        // the wrong step.
        let k1 = rhs(dist.quantile_right_unchecked(t), x);
        let k2 = rhs(dist.quantile_unchecked(t_next), x + h * k1);
        let candidate = x + 0.5 * h * (k1 + k2);
        if !candidate.is_finite() {
            return Err(Error::SolverFailure {
                step,
                reason: format!("non-finite state at t = {t}"),
            });
        }
        x = candidate.min(dist.quantile_unchecked(t_next)).max(x);
        if (step + 1) % config.substeps == 0 {
            bids.push(x.clamp(0.0, 1.0));
        }
    }
    QuantileStrategy::from_bids(bids)
}

/// Minimax regret `∫_0^1 Q*` (trapezoidal, exact for the tabulated schedule).
pub fn minimax_regret(qstar: &QuantileStrategy) -> f64 {
    qstar.integral()
}

/// The constructed highest-competing-bid CDF `H*`, stored through
/// `G = H* ∘ Q*` on the quantile grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HighestBidCdf {
    bids: Vec<f64>,
    g: Vec<f64>,
}

impl HighestBidCdf {
    /// `Q*(1)`; `H*` equals one from here on.
    pub fn support_top(&self) -> f64 {
        *self.bids.last().unwrap()
    }

    /// `G(t_i) = H*(Q*(t_i))`.
    pub fn g_grid(&self) -> &[f64] {
        &self.g
    }

    /// Mass of the atom at zero, `H*(0) = G(0)`.
    pub fn atom_at_zero(&self) -> f64 {
        self.g[0]
    }

    /// `H*(x)`, obtained by inverting `Q*` linearly on each grid cell.
    pub fn eval(&self, x: f64) -> f64 {
        if x >= self.support_top() {
            return 1.0;
        }
        if x < self.bids[0] {
            return 0.0;
        }
        let i = self.bids.partition_point(|&b| b <= x);
        // bids[i-1] <= x < bids[i]
        let (lo, hi) = (self.bids[i - 1], self.bids[i]);
        let s = (x - lo) / (hi - lo);
        self.g[i - 1] + s * (self.g[i] - self.g[i - 1])
    }
}

/// Builds `H*` from a solved schedule:
/// `G(y) = exp(-∫_y^1 dt / (1 - F(Q*(t))))`, accumulated from `t = 1` down.
pub fn hstar(dist: &ValueDistribution, qstar: &QuantileStrategy) -> Result<HighestBidCdf> {
    if !qstar.is_strict() {
        return Err(Error::NonStrictStrategy);
    }
    let n = qstar.cells();
    let dt = 1.0 / n as f64;
    let weights = qstar
        .bids()
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let denom = 1.0 - dist.eval_right(b);
            if denom < DENOMINATOR_FLOOR {
                Err(Error::SolverFailure {
                    step: i,
                    reason: format!("1 - F(Q*(t)) = {denom} underflows at t = {}", qstar.t(i)),
                })
            } else {
                Ok(1.0 / denom)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut g = vec![1.0; n + 1];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        acc += 0.5 * dt * (weights[i] + weights[i + 1]);
        g[i] = (-acc).exp();
    }
    Ok(HighestBidCdf {
        bids: qstar.bids().to_vec(),
        g,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeResidual {
    pub max: f64,
    /// Midpoint where the maximum is attained.
    pub at: f64,
}

/// Largest violation of `(1 - F(Q)) Q' = F⁻ - Q` over interior cell midpoints,
/// with `Q'` by central differences. Cells within one grid spacing of a jump
/// of `F⁻` or of `F ∘ Q` are skipped.
pub fn ode_residual(qstar: &QuantileStrategy, dist: &ValueDistribution) -> OdeResidual {
    let n = qstar.cells();
    let dt = 1.0 / n as f64;
    let mut jumps = dist.quantile_jumps();
    for (x, _) in dist.atoms() {
        if let Some(t) = qstar.inverse(x) {
            jumps.push(t);
        }
    }
    let mut best = OdeResidual { max: 0.0, at: 0.0 };
    let bids = qstar.bids();
    for i in 0..n {
        let mid = (i as f64 + 0.5) * dt;
        if jumps.iter().any(|&j| (j - mid).abs() <= dt) {
            continue;
        }
        let q = 0.5 * (bids[i] + bids[i + 1]);
        let slope = (bids[i + 1] - bids[i]) / dt;
        let lhs = (1.0 - dist.eval_right(q)) * slope;
        let r = (lhs - (dist.quantile_unchecked(mid) - q)).abs();
        if r > best.max {
            best = OdeResidual { max: r, at: mid };
        }
    }
    best
}

/// `Unif(1 - 1/ρ, 1)`, the value law with the largest minimax regret among
/// those whose density is bounded by `ρ`; `ρ = ∞` gives the Dirac mass at 1.
pub fn worst_family_member(rho: f64) -> Result<ValueDistribution> {
    if rho.is_nan() || rho < 1.0 {
        return Err(Error::DensityBound(rho));
    }
    if rho.is_infinite() {
        return ValueDistribution::point(1.0);
    }
    ValueDistribution::uniform(1.0 - 1.0 / rho, 1.0)
}
