//! CFaR of every future settlement month for a small existing hedge book,
//! before and after adding one new contract.

use hedge_tenor::book::{ForwardContract, HedgeBook};
use hedge_tenor::cfar::{cfar_post, profile, LiquidityConfig};
use hedge_tenor::market_data::{synth_curve, RatioTable};
use hedge_tenor::ou::OuParams;

fn main() -> hedge_tenor::Result<()> {
    let params = OuParams::new(0.4, 1.0 / 0.75, 0.2)?;
    let config = LiquidityConfig { max_tenor_months: 12, ..Default::default() };

    // Hedges struck over the past three months; spot has since risen, so the
    // contracts are out of the money.
    let mut book = HedgeBook::default();
    book.add_contracts([
        ForwardContract::new(0, 4, 0.30, 1.30)?,
        ForwardContract::new(1, 4, 0.10, 1.31)?,
        ForwardContract::new(1, 6, 0.25, 1.31)?,
        ForwardContract::new(2, 9, 0.20, 1.29)?,
    ])?;
    let now = 3;
    let spot = 1.38;
    let curve = synth_curve(spot, &RatioTable::reference(), now)?;

    let prof = profile(&book, &params, &config, now, spot, &curve)?;
    println!("month  tenor  cfar_pre  unit_cfar  breached");
    for b in &prof.buckets {
        let flag = if b.cfar_pre > config.budget { "yes" } else { "" };
        println!("{:>5}  {:>5}  {:>8.5}  {:>9.5}  {flag}", b.bucket_month, b.tenor_months, b.cfar_pre, b.unit_cfar);
    }

    // Adding nominal a at tenor 5 moves that bucket's CFaR by a * unit.
    let a = 0.05;
    let b = prof.bucket(5).expect("tenor in range");
    let mut after = book.clone();
    after.add_contract(ForwardContract::new(now, now + 5, a, curve.forward(5)?)?)?;
    let direct = cfar_post(&after, &params, now, now + 5, spot, config.tail_p)?;
    println!();
    println!("adding {a} at 5 months: pre {:.6} + a*unit = {:.6}, recomputed {:.6}", b.cfar_pre, b.cfar_pre + a * b.unit_cfar, direct);
    Ok(())
}
