//! In-sample replay of the six optimal strategies and three equal-weight
//! ladders on the shipped synthetic history, with Table 1 transaction costs.
//! Cash statistics are per 100 units of foreign nominal.
//!
//! Usage: `cargo run --release --example backtest [-- <spot.csv> <forwards.csv> <costs.csv>]`

use std::path::PathBuf;

use hedge_tenor::backtest::{run_backtest, StrategySpec};
use hedge_tenor::market_data::{index_curves, load_cost_csv, load_forward_csv, load_spot_csv, Quotation};
use hedge_tenor::ou::calibrate;

fn main() -> hedge_tenor::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let args: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    let (spot_path, fwd_path, cost_path) = match args.as_slice() {
        [s, f, c] => (s.clone(), f.clone(), c.clone()),
        _ => (
            data.join("synthetic_spot.csv"),
            data.join("synthetic_forwards.csv"),
            data.join("dealer_costs.csv"),
        ),
    };
    let spot = load_spot_csv(&spot_path, Quotation::ForeignPerDomestic)?;
    let curves = index_curves(load_forward_csv(&fwd_path, Quotation::ForeignPerDomestic, &spot)?);
    let costs = load_cost_csv(&cost_path)?;
    let params = calibrate(&spot)?;
    println!(
        "calibrated in sample: k = {:.4}, theta = 1/{:.4}, nu = {:.4}",
        params.k,
        1.0 / params.theta,
        params.nu
    );
    println!();
    println!("strategy  An.CF  Vol.   1%-CFaR  min     max    infeasible");
    for name in StrategySpec::PRESETS {
        let strategy = StrategySpec::preset(name).expect("preset");
        let r = run_backtest(&spot, &curves, &costs, &params, &strategy)?;
        let s = r.stats;
        println!(
            "{name:<8}  {:>5.2}  {:>5.2}  {:>7.2}  {:>6.2}  {:>5.2}  {:>10}",
            s.annual_cf,
            s.volatility,
            s.cfar,
            s.min,
            s.max,
            r.infeasible_months.len()
        );
        if name == "str1" {
            let last = r.pnl.hedged_mtm.len() - 1;
            println!(
                "          P&L at end: unhedged {:.3}, hedged {:.3}, hedged + MtM {:.3}",
                r.pnl.unhedged[last], r.pnl.hedged[last], r.pnl.hedged_mtm[last]
            );
        }
    }
    Ok(())
}
