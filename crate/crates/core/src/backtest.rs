//! Historical replay of the hedging strategy and the equal-weight ladders.
//!
//! A replay walks the spot history month by month: contracts maturing this
//! month settle against the observed spot, then the strategy tops the book
//! back up to the full hedge at the month's forward curve. Contracts still
//! live at the end of the data only show up in the mark-to-market series.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::allocator::{allocate_best_effort, rank_tenors, RankingMode, RollDate};
use crate::book::{settle_cash_flow, ForwardContract, HedgeBook, HEDGE_TOLERANCE};
use crate::cfar::LiquidityConfig;
use crate::error::{Error, Result};
use crate::market_data::{format_month, CostCurve, ForwardCurve};
use crate::ou::{OuParams, SpotSeries};
use crate::stats::{mean, quantile, std_dev};

/// Reported cash statistics are per this many units of foreign nominal.
pub const REPORT_UNITS: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StrategySpec {
    /// Greedy CFaR-budgeted allocation.
    Optimal {
        config: LiquidityConfig,
        ranking: RankingMode,
    },
    /// Equal nominal in each of the next `ladder_months` monthly buckets.
    EqualWeight { ladder_months: u32 },
}

impl StrategySpec {
    /// Carry-ranked optimal strategy with budget `budget` and position bounds
    /// `[a_lower, a_upper]`.
    pub fn optimal(budget: f64, a_lower: f64, a_upper: f64) -> Self {
        StrategySpec::Optimal {
            config: LiquidityConfig {
                budget,
                a_lower,
                a_upper,
                ..Default::default()
            },
            ranking: RankingMode::Ranked,
        }
    }

    /// The six optimal configurations and the 1, 3 and 10 year ladders, by name.
    pub fn preset(name: &str) -> Option<Self> {
        Some(match name {
            "str1" => Self::optimal(0.01, -1.0, 1.0),
            "str2" => Self::optimal(0.01, -0.01, 0.1),
            "str3" => Self::optimal(0.02, 0.0, 1.0),
            "str4" => Self::optimal(0.01, 0.0, 1.0),
            "str5" => Self::optimal(0.005, 0.0, 1.0),
            "str6" => Self::optimal(0.002, 0.0, 1.0),
            "eq1y" => StrategySpec::EqualWeight { ladder_months: 12 },
            "eq3y" => StrategySpec::EqualWeight { ladder_months: 36 },
            "eq10y" => StrategySpec::EqualWeight { ladder_months: 120 },
            _ => return None,
        })
    }

    pub const PRESETS: [&'static str; 9] = [
        "str1", "str2", "str3", "str4", "str5", "str6", "eq1y", "eq3y", "eq10y",
    ];

    pub fn validate(&self) -> Result<()> {
        match self {
            StrategySpec::Optimal { config, .. } => config.validate(),
            StrategySpec::EqualWeight { ladder_months: 0 } => {
                Err(Error::invalid("ladder_months must be at least 1"))
            }
            StrategySpec::EqualWeight { .. } => Ok(()),
        }
    }
}

/// Contracts that restore the full hedge under an `n`-month equal-weight ladder.
///
/// An empty book is seeded with `1/n` at every tenor `1..=n`; afterwards the
/// unhedged amount (whatever just matured) is rolled into one `n`-month contract.
pub fn equal_weight_refill(
    book: &HedgeBook,
    month: u32,
    n: u32,
    curve: &ForwardCurve,
) -> Result<Vec<ForwardContract>> {
    if n == 0 {
        return Err(Error::invalid("ladder_months must be at least 1"));
    }
    if book.is_empty() {
        let a = book.target_nominal() / n as f64;
        return (1..=n)
            .map(|t| ForwardContract::new(month, month + t, a, curve.forward(t)?))
            .collect();
    }
    let a = book.unhedged();
    if a.abs() <= HEDGE_TOLERANCE {
        return Ok(Vec::new());
    }
    Ok(vec![ForwardContract::new(month, month + n, a, curve.forward(n)?)?])
}

/// Summary of a monthly cash-flow series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    /// Twelve times the mean monthly cash flow.
    pub annual_cf: f64,
    /// `sqrt(12)` times the sample standard deviation.
    pub volatility: f64,
    /// Negated empirical 1% quantile.
    pub cfar: f64,
    pub min: f64,
    pub max: f64,
}

pub fn report_stats(cash_flows: &[f64]) -> Result<SummaryStats> {
    if cash_flows.is_empty() {
        return Err(Error::invalid("cannot summarise an empty cash-flow series"));
    }
    Ok(SummaryStats {
        annual_cf: 12.0 * mean(cash_flows),
        volatility: 12f64.sqrt() * std_dev(cash_flows),
        cfar: -quantile(cash_flows, 0.01),
        min: cash_flows.iter().copied().fold(f64::INFINITY, f64::min),
        max: cash_flows.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Cumulative P&L of one unit of foreign assets valued in domestic currency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PnlSeries {
    /// `S_t - S_0`.
    pub unhedged: Vec<f64>,
    /// Unhedged plus cumulative hedge cash flows.
    pub hedged: Vec<f64>,
    /// Hedged plus the mark-to-market of live hedges.
    pub hedged_mtm: Vec<f64>,
}

/// Builds the three P&L series from aligned monthly spots, hedge cash flows
/// and mark-to-market values.
pub fn cumulative_pnl(spots: &[f64], cash_flows: &[f64], mtm: &[f64]) -> PnlSeries {
    let s0 = spots.first().copied().unwrap_or(0.0);
    let unhedged: Vec<f64> = spots.iter().map(|s| s - s0).collect();
    let mut cum = 0.0;
    let hedged: Vec<f64> = unhedged
        .iter()
        .zip(cash_flows)
        .map(|(u, cf)| {
            cum += cf;
            u + cum
        })
        .collect();
    let hedged_mtm = hedged.iter().zip(mtm).map(|(h, m)| h + m).collect();
    PnlSeries {
        unhedged,
        hedged,
        hedged_mtm,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonthRecord {
    pub month: u32,
    pub spot: f64,
    /// Settlement of contracts maturing this month (zero on the first month).
    pub cash_flow: f64,
    /// Sum of positive new nominals traded this month.
    pub long_traded: f64,
    /// Sum of negative new nominals traded this month.
    pub short_traded: f64,
    /// Live nominal after the roll.
    pub live_nominal: f64,
    /// Mark-to-market of the live book after the roll.
    pub mtm: f64,
    pub fully_hedged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub strategy: StrategySpec,
    pub months: Vec<MonthRecord>,
    /// Statistics of the cash flows after the first month, per [`REPORT_UNITS`].
    pub stats: SummaryStats,
    pub pnl: PnlSeries,
    /// Months where the allocator could not place the full amount.
    pub infeasible_months: Vec<u32>,
    #[serde(skip)]
    pub final_book: HedgeBook,
}

impl BacktestReport {
    /// Realised monthly cash flows per unit, excluding the first month.
    pub fn cash_flows(&self) -> Vec<f64> {
        self.months.iter().skip(1).map(|m| m.cash_flow).collect()
    }

    /// Writes `month,spot,cash_flow,long_traded,short_traded,live_nominal,mtm,unhedged_pnl,hedged_pnl,hedged_mtm_pnl`.
    pub fn write_monthly_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "month",
            "spot",
            "cash_flow",
            "long_traded",
            "short_traded",
            "live_nominal",
            "mtm",
            "unhedged_pnl",
            "hedged_pnl",
            "hedged_mtm_pnl",
        ])?;
        for (i, m) in self.months.iter().enumerate() {
            w.write_record([
                format_month(m.month),
                m.spot.to_string(),
                m.cash_flow.to_string(),
                m.long_traded.to_string(),
                m.short_traded.to_string(),
                m.live_nominal.to_string(),
                m.mtm.to_string(),
                self.pnl.unhedged[i].to_string(),
                self.pnl.hedged[i].to_string(),
                self.pnl.hedged_mtm[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Writes one `strategy,annual_cf,volatility,cfar,min,max` row per report.
pub fn write_summary_csv<W: Write>(out: W, rows: &[(String, SummaryStats)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["strategy", "annual_cf", "volatility", "cfar", "min", "max"])?;
    for (name, s) in rows {
        w.write_record([
            name.clone(),
            s.annual_cf.to_string(),
            s.volatility.to_string(),
            s.cfar.to_string(),
            s.min.to_string(),
            s.max.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Replays `strategy` over the spot history.
///
/// `curves` must hold a curve for every month of `spot`; `params` are used for
/// the CFaR model and the carry ranking.
pub fn run_backtest(
    spot: &SpotSeries,
    curves: &BTreeMap<u32, ForwardCurve>,
    costs: &CostCurve,
    params: &OuParams,
    strategy: &StrategySpec,
) -> Result<BacktestReport> {
    strategy.validate()?;
    params.validate()?;
    spot.validate()?;
    if spot.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: spot.len(),
        });
    }
    let mut book = HedgeBook::default();
    let mut months = Vec::with_capacity(spot.len());
    let mut infeasible_months = Vec::new();

    for (i, &s) in spot.values.iter().enumerate() {
        let month = spot.start_month + i as u32;
        let curve = curves
            .get(&month)
            .ok_or_else(|| Error::DataGap(format!("no forward curve for {}", format_month(month))))?;
        let cash_flow = if i == 0 {
            0.0
        } else {
            settle_cash_flow(&book.expire(month).1, s)
        };

        let (new, fully_hedged) = match strategy {
            StrategySpec::Optimal { config, ranking } => {
                let ranking = rank_tenors(params, s, curve, costs, config.max_tenor_months, *ranking)?;
                let date = RollDate {
                    month,
                    spot: s,
                    curve,
                };
                let amount = book.unhedged().max(0.0);
                let result = allocate_best_effort(&book, params, config, date, amount, &ranking)?;
                book.add_allocation(month, &result, curve)?;
                let new: Vec<f64> = result.new_trades.iter().map(|t| t.nominal).collect();
                (new, result.fully_hedged)
            }
            StrategySpec::EqualWeight { ladder_months } => {
                let contracts = equal_weight_refill(&book, month, *ladder_months, curve)?;
                let new = contracts.iter().map(|c| c.nominal).collect();
                book.add_contracts(contracts)?;
                (new, true)
            }
        };
        if !fully_hedged {
            infeasible_months.push(month);
        }
        months.push(MonthRecord {
            month,
            spot: s,
            cash_flow,
            long_traded: new.iter().filter(|a| **a > 0.0).sum(),
            short_traded: new.iter().filter(|a| **a < 0.0).sum(),
            live_nominal: book.live_nominal(),
            mtm: book.mtm(curve)?,
            fully_hedged,
        });
    }

    let scaled: Vec<f64> = months.iter().skip(1).map(|m| m.cash_flow * REPORT_UNITS).collect();
    let spots: Vec<f64> = months.iter().map(|m| m.spot).collect();
    let cfs: Vec<f64> = months.iter().map(|m| m.cash_flow).collect();
    let mtm: Vec<f64> = months.iter().map(|m| m.mtm).collect();
    Ok(BacktestReport {
        strategy: strategy.clone(),
        stats: report_stats(&scaled)?,
        pnl: cumulative_pnl(&spots, &cfs, &mtm),
        months,
        infeasible_months,
        final_book: book,
    })
}
