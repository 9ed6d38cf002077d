//! Discretized game solved by fictitious play, compared with the continuous
//! minimax regret as the grid refines.

use minimax_bidding::oracle::DEFAULT_MAX_ITERS;
use minimax_bidding::{build_game, minimax_regret, solve_game, solve_qstar, ValueDistribution};

fn main() -> minimax_bidding::Result<()> {
    let dist = ValueDistribution::beta(2.0, 2.0)?;
    let target = minimax_regret(&solve_qstar(&dist, 20_000)?);
    println!("continuous {target:.6}");
    for grid in [25, 50, 100, 200] {
        let s = solve_game(&build_game(&dist, grid, grid)?, DEFAULT_MAX_ITERS, 1e-3)?;
        println!(
            "grid {grid:>3}: value {:.6} in [{:.6}, {:.6}] after {} iterations, delta {:.2e}",
            s.value,
            s.lower,
            s.upper,
            s.iters,
            (s.value - target).abs()
        );
    }
    Ok(())
}
