//! Worst-case regret of shading and of the minimax schedule, with the
//! adversarial competing bid that attains it.

use minimax_bidding::regret::shading_regret_closed_form;
use minimax_bidding::{solve_qstar, worst_case_regret, ShadeStrategy, Strategy, ValueDistribution};

fn main() -> minimax_bidding::Result<()> {
    let dist = ValueDistribution::uniform(0.0, 1.0)?;
    for alpha in [0.3, 0.5, 0.7] {
        let report = worst_case_regret(&Strategy::Shade(ShadeStrategy::new(alpha)?), &dist);
        println!(
            "shade {alpha}: regret {:.6} at h = {:.4} ({}), closed form {:.6}",
            report.worst_regret,
            report.worst_h,
            report.method,
            shading_regret_closed_form(alpha, &dist)?
        );
    }
    let qstar = Strategy::Quantile(solve_qstar(&dist, 20_000)?);
    let report = worst_case_regret(&qstar, &dist);
    println!("minimax schedule: regret {:.6} at h = {:.4}", report.worst_regret, report.worst_h);
    Ok(())
}
