//! Writes the synthetic market-data fixtures shipped under `data/`.
//!
//! * `synthetic_spot.csv`, `synthetic_forwards.csv`: 298 monthly spots from
//!   November 1993 with fixed-ratio forward curves, for backtests.
//! * `calibration_spot.csv`: 10,000 months from `k = 0.4`, `theta = 4/3`,
//!   `nu = 0.2`, long enough for calibration to pin all three parameters.
//! * `dealer_costs.csv`: annualised proportional transaction costs.
//!
//! Usage: `cargo run --example synthetic_data [-- <dir>]`

use std::fs::File;
use std::path::PathBuf;

use hedge_tenor::market_data::{
    parse_month, synthetic_history, write_cost_csv, write_forward_csv, write_spot_csv, CostCurve, RatioTable,
};
use hedge_tenor::ou::{simulate_path, OuParams, SpotSeries};

const SEED: u64 = 42;

fn main() -> hedge_tenor::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    std::fs::create_dir_all(&dir)?;

    let params = OuParams::new(0.2139, 1.0 / 0.7549, 0.1627)?;
    let start = parse_month("1993-11").expect("valid month");
    let (spot, curves) = synthetic_history(&params, params.theta, 297, start, &RatioTable::reference(), SEED)?;
    write_spot_csv(File::create(dir.join("synthetic_spot.csv"))?, &spot)?;
    write_forward_csv(File::create(dir.join("synthetic_forwards.csv"))?, &curves)?;

    let long = OuParams::new(0.4, 4.0 / 3.0, 0.2)?;
    let path = simulate_path(&long, long.theta, 9_999, SEED, 0);
    let series = SpotSeries::monthly(parse_month("1900-01").expect("valid month"), path)?;
    write_spot_csv(File::create(dir.join("calibration_spot.csv"))?, &series)?;

    write_cost_csv(File::create(dir.join("dealer_costs.csv"))?, &CostCurve::standard())?;
    println!("wrote fixtures to {}", dir.display());
    Ok(())
}
