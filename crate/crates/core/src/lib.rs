//! Minimax-regret bidding for first-price auctions.
//!
//! A buyer with value `v ~ F` bids against an unknown highest competing bid.
//! The crate builds the strategy minimizing worst-case regret, evaluates the
//! worst-case regret of arbitrary monotone strategies, audits the saddle point
//! numerically and cross-checks it against a discretized zero-sum game.

pub mod audit;
pub mod cli;
pub mod dist;
pub mod error;
pub mod format;
pub mod oracle;
pub mod quad;
pub mod regret;
pub mod search;
pub mod solver;
pub mod strategy;

pub use audit::{audit_distribution, AuditReport};
pub use dist::{DistSpec, Family, Knot, ValueDistribution};
pub use error::{Error, Result};
pub use oracle::{build_game, solve_game, DiscreteGame, OracleSolution};
pub use regret::{best_alpha, worst_case_regret, BestAlpha, LineSearch, Method, RegretReport};
pub use solver::{hstar, minimax_regret, solve_qstar, HighestBidCdf, SolverConfig};
pub use strategy::{QuantileStrategy, ShadeStrategy, Strategy, StrategySpec};
