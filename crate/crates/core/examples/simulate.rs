//! Monte Carlo dynamic hedging at the base parameters: the cross-sectional
//! 1% quantile of monthly cash flows should sit near `-L`, and most nominal
//! should go to short tenors.
//!
//! Usage: `cargo run --release --example simulate [-- <paths> [<seed>]]`

use hedge_tenor::simulator::{run_simulation, SimulationSpec};

fn main() -> hedge_tenor::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>());
    let n_paths = args.next().transpose().ok().flatten().unwrap_or(1_000) as usize;
    let seed = args.next().transpose().ok().flatten().unwrap_or(42);
    let spec = SimulationSpec { n_paths, seed, ..Default::default() };
    let report = run_simulation(&spec)?;

    println!("{} paths x {} months, seed {}", spec.n_paths, spec.horizon_months, spec.seed);
    println!("infeasible roll dates: {}", report.infeasible_events);
    println!("max |live - 1|: {:.2e}", report.max_hedge_error);
    println!();
    println!("month  mean_cf    q01_cf");
    for m in report.months.iter().filter(|m| m.month % 24 == 0 || m.month == 1) {
        println!("{:>5}  {:>8.5}  {:>8.5}", m.month, m.mean_cf, m.q_cf);
    }
    let q: Vec<f64> = report.steady_state().map(|m| m.q_cf).collect();
    let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("steady-state 1% quantile range [{lo:.5}, {hi:.5}], budget {}", spec.config.budget);
    println!();
    let total: f64 = report.mean_new_nominal.iter().sum();
    println!("tenor  mean_new_nominal  share");
    for (i, a) in report.mean_new_nominal.iter().take(12).enumerate() {
        println!("{:>5}  {:>16.5}  {:>5.1}%", i + 1, a, 100.0 * a / total);
    }
    let short: f64 = report.mean_new_nominal[..6].iter().sum();
    println!("tenors 1-6 hold {:.1}% of new nominal", 100.0 * short / total);
    Ok(())
}
