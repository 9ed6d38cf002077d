//! Best uniform shading factor against the minimax schedule.

use minimax_bidding::{best_alpha, minimax_regret, solve_qstar, ValueDistribution};

fn main() -> minimax_bidding::Result<()> {
    for (name, dist) in [
        ("uniform 0 1", ValueDistribution::uniform(0.0, 1.0)?),
        ("beta 2 2", ValueDistribution::beta(2.0, 2.0)?),
        ("point 1", ValueDistribution::point(1.0)?),
    ] {
        let best = best_alpha(&dist, 1e-3);
        let minimax = minimax_regret(&solve_qstar(&dist, 20_000)?);
        println!(
            "{name}: alpha {:.4} regret {:.6} ({}), minimax {:.6}",
            best.alpha, best.regret, best.method, minimax
        );
    }
    Ok(())
}
