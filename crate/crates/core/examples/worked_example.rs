//! One roll date walked through step by step: an existing book whose
//! settlement months 3 and 6 breach the budget is repaired with negative
//! hedges, and the matured amount plus the repairs are filled from the
//! shortest tenor outward until the book is back at 100%.

use hedge_tenor::allocator::{allocate, RollDate, TenorRanking};
use hedge_tenor::book::{ForwardContract, HedgeBook};
use hedge_tenor::cfar::LiquidityConfig;
use hedge_tenor::market_data::ForwardCurve;
use hedge_tenor::ou::OuParams;

fn main() -> hedge_tenor::Result<()> {
    let params = OuParams::new(0.4, 1.0 / 0.75, 0.2)?;
    let config = LiquidityConfig::default();
    let now = 12;
    let spot = 1.36;
    let curve = ForwardCurve::flat(now, spot, config.max_tenor_months)?;

    // Live contracts expire up to eight months out; months 3 and 6 carry
    // large positions struck well below today's spot.
    let mut book = HedgeBook::default();
    for (tenor, nominal, rate) in [
        (1, 0.05, 1.36),
        (2, 0.03, 1.36),
        (3, 0.06, 1.30),
        (4, 0.03, 1.36),
        (5, 0.02, 1.36),
        (6, 0.05, 1.30),
        (7, 0.02, 1.36),
        (8, 0.02, 1.36),
    ] {
        book.add_contract(ForwardContract::new(now - 1, now + tenor, nominal, rate)?)?;
    }
    let amount = book.unhedged();
    println!("step 1: live nominal {:.2}, amount to hedge {:.2}", book.live_nominal(), amount);

    let date = RollDate { month: now, spot, curve: &curve };
    let r = allocate(&book, &params, &config, date, amount, &TenorRanking::shortest_first(config.max_tenor_months))?;
    let breached: Vec<u32> = r
        .profile
        .buckets
        .iter()
        .filter(|b| b.cfar_pre > config.budget)
        .map(|b| b.tenor_months)
        .collect();
    println!("step 2: breached tenors {breached:?}");
    println!("step 3: negative hedges totalling {:.4}", r.repair_total);
    println!("step 4: fills");
    println!("tenor  cfar_pre  nominal   cfar_post  action");
    let last = r.max_occupied_tenor() as usize;
    for b in r.profile.buckets.iter().take(last + 1) {
        let trade = r.new_trades.iter().find(|t| t.tenor_months == b.tenor_months);
        let (a, action) = trade.map_or((0.0, String::new()), |t| (t.nominal, format!("{:?}", t.action)));
        println!("{:>5}  {:>8.5}  {:>8.5}  {:>9.5}  {action}", b.tenor_months, b.cfar_pre, a, b.cfar_post);
    }
    println!("new nominal {:.12} = amount {:.2}", r.total_nominal(), amount);
    Ok(())
}
