//! Calibrates the spot model to the shipped 10,000-month fixture, which was
//! generated with `k = 0.4`, `theta = 4/3`, `nu = 0.2`.
//!
//! Usage: `cargo run --example calibrate [-- <spot.csv> [domestic-per-foreign]]`

use std::path::PathBuf;

use hedge_tenor::market_data::{load_spot_csv, Quotation};
use hedge_tenor::ou::calibrate;

fn main() -> hedge_tenor::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/calibration_spot.csv"));
    let quotation = match args.next().as_deref() {
        Some("domestic-per-foreign") => Quotation::DomesticPerForeign,
        _ => Quotation::ForeignPerDomestic,
    };
    let series = load_spot_csv(&path, quotation)?;
    let p = calibrate(&series)?;
    println!("{} monthly observations from {}", series.len(), path.display());
    println!("k     = {:.4} per year", p.k);
    println!("theta = {:.4} (1/{:.4})", p.theta, 1.0 / p.theta);
    println!("nu    = {:.4} per sqrt(year)", p.nu);
    println!("half-life of a deviation: {:.1} months", 12.0 * std::f64::consts::LN_2 / p.k);
    Ok(())
}
