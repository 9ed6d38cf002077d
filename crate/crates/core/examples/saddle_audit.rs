use minimax_bidding::{audit_distribution, ValueDistribution};

fn main() -> minimax_bidding::Result<()> {
    let mixed = ValueDistribution::mixture(&[
        (0.2, ValueDistribution::point(0.0)?),
        (0.8, ValueDistribution::beta(2.0, 5.0)?),
    ])?;
    let report = audit_distribution(&mixed, 20_000)?;
    print!("{}", report.render());
    Ok(())
}
