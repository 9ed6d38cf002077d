//! Minimax quantile bidding for a few value laws, with the matching
//! highest-competing-bid CDF.

use minimax_bidding::dist::make_distribution;
use minimax_bidding::{hstar, minimax_regret, solve_qstar};

fn main() -> minimax_bidding::Result<()> {
    for spec in ["uniform 0 1", "beta 2 2", "point 1", "mix 0.5 point 0.4 + 0.5 uniform 0 1"] {
        let dist = make_distribution(&spec.parse()?)?;
        let q = solve_qstar(&dist, 20_000)?;
        let h = hstar(&dist, &q)?;
        println!("{spec}");
        println!("  minimax regret  {:.9}", minimax_regret(&q));
        println!("  top bid         {:.6}", q.top_bid());
        for t in [0.25, 0.5, 0.75] {
            println!("  Q({t:.2}) = {:.6}", q.value_at(t));
        }
        println!("  H at zero       {:.6}", h.eval(0.0));
    }
    Ok(())
}
