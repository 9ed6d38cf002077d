//! Minimax regret of the worst value law whose density is bounded by ρ.

use minimax_bidding::solver::worst_family_member;
use minimax_bidding::{minimax_regret, solve_qstar};

fn main() -> minimax_bidding::Result<()> {
    for rho in [1.0, 1.5, 2.0, 4.0, 10.0, f64::INFINITY] {
        let member = worst_family_member(rho)?;
        let regret = minimax_regret(&solve_qstar(&member, 20_000)?);
        println!("rho {rho:>4}: {regret:.9}");
    }
    Ok(())
}
