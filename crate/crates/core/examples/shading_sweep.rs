//! Regret across Unif(a, 1) and Beta(ρ, ρ), written as CSV to stdout.

use minimax_bidding::regret::{family_sweep, write_sweep_csv, SweepFamily, SweepStrategy};

fn main() -> std::io::Result<()> {
    let strategies = [SweepStrategy::Shade(0.5), SweepStrategy::QStar, SweepStrategy::BestAlpha];
    let a: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
    let rows = family_sweep(SweepFamily::UniformA, &a, &strategies, 20_000);
    write_sweep_csv(&rows, std::io::stdout().lock())?;
    let rhos = [0.5, 1.0, 2.0, 4.0, 8.0];
    let rows = family_sweep(SweepFamily::BetaSym, &rhos, &strategies, 20_000);
    write_sweep_csv(&rows, std::io::stdout().lock())
}
