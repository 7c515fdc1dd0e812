//! Longest hedge tenor of a static full-unit allocation as one parameter at a
//! time moves away from the base scenario (`L = 0.01`, `p = 1%`, `k = 0.4`,
//! `theta = 1/0.75`, `nu = 0.2`).
//!
//! Budget, tail probability and volatility are swept with forwards at the
//! model's expected spot. Spot and mean-reversion speed only matter through
//! the forward points, so those sweeps use forwards flat at today's spot.

use hedge_tenor::allocator::{static_sensitivity, CurveConvention, StaticScenario, SweepParam};

fn show(base: &StaticScenario, label: &str, param: SweepParam, values: &[f64]) -> hedge_tenor::Result<()> {
    let rows = static_sensitivity(base, param, values)?;
    let tenors: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.4} -> {:>3}m", r.value, r.max_occupied_tenor))
        .collect();
    println!("{label:<22} {}", tenors.join("   "));
    Ok(())
}

fn main() -> hedge_tenor::Result<()> {
    let expected = StaticScenario::default();
    let flat = StaticScenario {
        convention: CurveConvention::FlatSpot,
        ..Default::default()
    };
    show(&expected, "budget L", SweepParam::Budget, &[0.05, 0.02, 0.01])?;
    show(&expected, "tail probability p", SweepParam::TailProb, &[0.05, 0.02, 0.01])?;
    show(&expected, "volatility nu", SweepParam::Vol, &[0.1, 0.2, 0.3])?;
    show(&flat, "spot S0", SweepParam::Spot, &[1.0 / 0.5, 1.0 / 0.75, 1.0])?;
    for s0 in [1.0 / 0.5, 1.0 / 0.75, 1.0] {
        let base = flat.with(SweepParam::Spot, s0);
        show(&base, &format!("speed k at S0 = {s0:.3}"), SweepParam::Speed, &[0.2, 0.4, 0.6])?;
    }
    Ok(())
}
