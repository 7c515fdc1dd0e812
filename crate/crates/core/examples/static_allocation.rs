//! Allocates a full unit from an empty book under the base static scenario
//! and prints the nominal and post-trade CFaR per tenor.
//!
//! Usage: `cargo run --example static_allocation [-- <budget>]`

use hedge_tenor::allocator::{StaticScenario, SweepParam};

fn main() -> hedge_tenor::Result<()> {
    let mut scenario = StaticScenario::default();
    if let Some(budget) = std::env::args().nth(1) {
        let budget: f64 = budget.parse().map_err(|_| hedge_tenor::Error::InvalidParameter(budget))?;
        scenario = scenario.with(SweepParam::Budget, budget);
    }
    let result = scenario.allocate()?;
    println!(
        "L = {}, p = {}, k = {}, theta = S0 = {:.4}, nu = {}",
        scenario.config.budget, scenario.config.tail_p, scenario.params.k, scenario.spot, scenario.params.nu
    );
    println!("tenor  nominal   cfar_post  action");
    for t in &result.new_trades {
        let b = result.profile.bucket(t.tenor_months).expect("traded tenor");
        println!("{:>5}  {:>8.5}  {:>9.6}  {:?}", t.tenor_months, t.nominal, b.cfar_post, t.action);
    }
    println!("total {:.12}, longest tenor {} months", result.total_nominal(), result.max_occupied_tenor());
    Ok(())
}
