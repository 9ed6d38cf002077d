//! Bidding strategies in quantile coordinates.
//!
//! A [`QuantileStrategy`] assigns a bid to each value quantile `t` in `[0, 1]`;
//! the buyer with quantile `t` has value `F⁻(t)` and bids `Q(t)`. Coupling
//! values and bids through the same uniform `t` turns every expectation into
//! a one-dimensional integral, so nothing is simulated.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dist::{Family, Knot, ValueDistribution};
use crate::error::{check_unit, Error, Result};

pub const DEFAULT_GRID: usize = 20_000;

/// Piecewise-linear bid schedule on the uniform grid `t_i = i / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileStrategy {
    bids: Vec<f64>,
    strict: bool,
    /// `suffix[i] = ∫_{t_i}^1 Q`.
    suffix: Vec<f64>,
}

impl QuantileStrategy {
    /// Builds a schedule from its values on a uniform grid of `bids.len() - 1` cells.
    pub fn from_bids(bids: Vec<f64>) -> Result<Self> {
        if bids.len() < 2 {
            return Err(Error::InvalidStrategy(
                "a quantile strategy needs at least two grid points".into(),
            ));
        }
        if let Some(i) = bids.iter().position(|b| !(0.0..=1.0).contains(b)) {
            return Err(Error::InvalidStrategy(format!(
                "bid {} at grid index {i} is outside [0, 1]",
                bids[i]
            )));
        }
        if let Some(i) = bids.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidStrategy(format!(
                "bids decrease at grid index {}",
                i + 1
            )));
        }
        let strict = bids.windows(2).all(|w| w[1] > w[0]);
        let n = bids.len() - 1;
        let dt = 1.0 / n as f64;
        let mut suffix = vec![0.0; bids.len()];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] + 0.5 * dt * (bids[i] + bids[i + 1]);
        }
        Ok(QuantileStrategy {
            bids,
            strict,
            suffix,
        })
    }

    /// Tabulates `q` on an `n`-cell grid.
    pub fn from_fn(n: usize, q: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_bids((0..=n).map(|i| q(i as f64 / n as f64)).collect())
    }

    /// Number of grid cells `N`.
    pub fn cells(&self) -> usize {
        self.bids.len() - 1
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 / self.cells() as f64
    }

    pub fn bids(&self) -> &[f64] {
        &self.bids
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn top_bid(&self) -> f64 {
        *self.bids.last().unwrap()
    }

    /// `Q(t)` by linear interpolation.
    pub fn value_at(&self, t: f64) -> f64 {
        let (i, s) = self.locate(t);
        match self.bids.get(i + 1) {
            Some(next) => self.bids[i] + s * (next - self.bids[i]),
            None => self.bids[i],
        }
    }

    /// `∫_0^1 Q`.
    pub fn integral(&self) -> f64 {
        self.suffix[0]
    }

    /// `∫_y^1 Q`, exact for the piecewise-linear schedule.
    pub fn integral_from(&self, y: f64) -> f64 {
        let (i, s) = self.locate(y);
        match self.bids.get(i + 1) {
            None => 0.0,
            Some(&next) => {
                let dt = 1.0 / self.cells() as f64;
                let q_y = self.bids[i] + s * (next - self.bids[i]);
                0.5 * (1.0 - s) * dt * (q_y + next) + self.suffix[i + 1]
            }
        }
    }

    /// Smallest quantile whose bid reaches `h`, or `None` when `h > Q(1)`.
    pub fn inverse(&self, h: f64) -> Option<f64> {
        if h <= self.bids[0] {
            return Some(0.0);
        }
        if h > self.top_bid() {
            return None;
        }
        let i = self.bids.partition_point(|&b| b < h);
        let (lo, hi) = (self.bids[i - 1], self.bids[i]);
        let s = ((h - lo) / (hi - lo)).clamp(0.0, 1.0);
        Some(((i - 1) as f64 + s) / self.cells() as f64)
    }

    /// Expected utility against a deterministic highest bid `Q(y)`:
    /// `∫_y^1 (F⁻(t) - Q(t)) dt`. Defined for strictly increasing schedules.
    pub fn utility_quantile(&self, dist: &ValueDistribution, y: f64) -> Result<f64> {
        check_unit("y", y)?;
        if !self.strict {
            return Err(Error::NonStrictStrategy);
        }
        Ok(self.utility_from(dist, y))
    }

    pub(crate) fn utility_from(&self, dist: &ValueDistribution, y: f64) -> f64 {
        dist.upper_quantile_integral(y) - self.integral_from(y)
    }

    /// Expected utility against a deterministic highest bid `h`.
    ///
    /// The buyer wins exactly on the quantiles `t >= inf { t : Q(t) >= h }`,
    /// which also covers ties on flat stretches of a non-strict schedule.
    pub fn utility_vs_h(&self, dist: &ValueDistribution, h: f64) -> f64 {
        match self.inverse(h) {
            Some(y) => self.utility_from(dist, y),
            None => 0.0,
        }
    }

    /// Distribution of the bid `Q(t)` for `t ~ Unif(0, 1)`. Flats of `Q`
    /// become atoms.
    pub fn bid_cdf(&self) -> ValueDistribution {
        let mut knots: Vec<Knot> = Vec::with_capacity(self.bids.len());
        for (i, &b) in self.bids.iter().enumerate() {
            let t = self.t(i);
            match knots.last_mut() {
                Some(k) if k.x == b => k.f_right = t,
                _ => knots.push(Knot::new(b, if i == 0 { 0.0 } else { t }, t)),
            }
        }
        ValueDistribution::from_knots(knots, Family::Tabulated)
            .expect("a nondecreasing schedule always yields a valid CDF")
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.cells();
        let pos = t.clamp(0.0, 1.0) * n as f64;
        let i = (pos.floor() as usize).min(n);
        (i, pos - i as f64)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
        if headers.len() < 2 || &headers[0] != "t" || &headers[1] != "Q" {
            return Err(Error::InvalidStrategy(format!(
                "{}: expected header `t,Q`",
                path.display()
            )));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::csv(path, e))?;
            let parse = |i: usize| {
                record[i].parse::<f64>().map_err(|_| {
                    Error::InvalidStrategy(format!(
                        "{}: `{}` is not a number",
                        path.display(),
                        &record[i]
                    ))
                })
            };
            rows.push((parse(0)?, parse(1)?));
        }
        if rows.len() < 2 {
            return Err(Error::InvalidStrategy(format!(
                "{}: need at least two rows",
                path.display()
            )));
        }
        let n = (rows.len() - 1) as f64;
        for (i, (t, _)) in rows.iter().enumerate() {
            if (t - i as f64 / n).abs() > 1e-9 {
                return Err(Error::InvalidStrategy(format!(
                    "{}: t column must be the uniform grid i/{n} (row {i} has t = {t})",
                    path.display()
                )));
            }
        }
        Self::from_bids(rows.into_iter().map(|(_, q)| q).collect())
    }
}

/// Uniform bid shading: bid `alpha * v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadeStrategy {
    alpha: f64,
}

impl ShadeStrategy {
    pub fn new(alpha: f64) -> Result<Self> {
        check_unit("shading factor", alpha)?;
        Ok(ShadeStrategy { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `E[(1 - α) v 1{α v >= h}]`, integrated exactly against `F`
    /// (atoms included).
    pub fn utility_vs_h(&self, dist: &ValueDistribution, h: f64) -> f64 {
        let alpha = self.alpha;
        if alpha == 0.0 {
            return if h <= 0.0 { dist.mean() } else { 0.0 };
        }
        let c = h / alpha;
        if c > 1.0 {
            return 0.0;
        }
        let c = c.max(0.0);
        // E[v 1{v >= c}] = c P(v >= c) + ∫_c^1 (1 - F).
        let upper = c * (1.0 - dist.eval_left(c)) + dist.survival_unchecked(c);
        (1.0 - alpha) * upper
    }

    /// `Q(t) = α F⁻(t)` on an `n`-cell grid.
    pub fn to_quantile(&self, dist: &ValueDistribution, n: usize) -> QuantileStrategy {
        shade_to_quantile(self.alpha, dist, n).expect("alpha validated on construction")
    }
}

/// Tabulates `α F⁻` on an `n`-cell grid. Strict exactly when `F` has no atoms
/// (and `α > 0`).
pub fn shade_to_quantile(alpha: f64, dist: &ValueDistribution, n: usize) -> Result<QuantileStrategy> {
    check_unit("shading factor", alpha)?;
    QuantileStrategy::from_fn(n, |t| alpha * dist.quantile_unchecked(t))
}

/// Any strategy the crate can evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Quantile(QuantileStrategy),
    Shade(ShadeStrategy),
}

impl Strategy {
    pub fn utility_vs_h(&self, dist: &ValueDistribution, h: f64) -> f64 {
        match self {
            Strategy::Quantile(q) => q.utility_vs_h(dist, h),
            Strategy::Shade(s) => s.utility_vs_h(dist, h),
        }
    }

    /// Bids where the regret curve may kink: every grid bid, or `α x` for
    /// every knot `x` of `F`.
    pub fn bid_breakpoints(&self, dist: &ValueDistribution) -> Vec<f64> {
        match self {
            Strategy::Quantile(q) => q.bids().to_vec(),
            Strategy::Shade(s) => dist.knots().iter().map(|k| s.alpha * k.x).collect(),
        }
    }

    /// Whether the induced bid distribution has no atoms.
    pub fn has_atomless_bids(&self, dist: &ValueDistribution) -> bool {
        match self {
            Strategy::Quantile(q) => q.bid_cdf().is_atomless(),
            Strategy::Shade(s) => s.alpha > 0.0 && dist.is_atomless(),
        }
    }

    /// Largest bid ever placed.
    pub fn top_bid(&self, dist: &ValueDistribution) -> f64 {
        match self {
            Strategy::Quantile(q) => q.top_bid(),
            Strategy::Shade(s) => s.alpha * dist.quantile_unchecked(1.0),
        }
    }
}

impl From<QuantileStrategy> for Strategy {
    fn from(q: QuantileStrategy) -> Self {
        Strategy::Quantile(q)
    }
}

impl From<ShadeStrategy> for Strategy {
    fn from(s: ShadeStrategy) -> Self {
        Strategy::Shade(s)
    }
}

/// Textual strategy selector: `shade:<alpha>` | `qstar` | `file:<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    Shade(f64),
    QStar,
    File(PathBuf),
}

impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "qstar" {
            return Ok(StrategySpec::QStar);
        }
        if let Some(alpha) = s.strip_prefix("shade:") {
            let alpha: f64 = alpha
                .parse()
                .map_err(|_| Error::spec(s, "shading factor is not a number"))?;
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::spec(s, "shading factor must lie in [0, 1]"));
            }
            return Ok(StrategySpec::Shade(alpha));
        }
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err(Error::spec(s, "missing path"));
            }
            return Ok(StrategySpec::File(PathBuf::from(path)));
        }
        Err(Error::spec(s, "expected shade:<alpha>, qstar or file:<path>"))
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Shade(a) => write!(f, "shade:{a}"),
            StrategySpec::QStar => f.write_str("qstar"),
            StrategySpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}
