//! Monte Carlo dynamic hedging.
//!
//! Each path evolves the spot month by month and rolls its own hedge book:
//! matured contracts settle against the realised spot, a forward curve is
//! synthesised from the spot and a fixed ratio table, and the allocator places
//! whatever is unhedged. Paths run in parallel and are reduced in path order,
//! so reports are bitwise reproducible for a given seed.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocator::{allocate_best_effort, rank_tenors, RankingMode, RollDate};
use crate::book::{settle_cash_flow, HedgeBook};
use crate::cfar::LiquidityConfig;
use crate::error::{Error, Result};
use crate::market_data::{synth_curve, CostCurve, RatioTable};
use crate::ou::{path_rng, simulate_path_into, OuParams};
use crate::stats::quantile_sorted;

/// First month counted as steady state; earlier months belong to the ramp-up
/// while the book ladders out.
pub const STEADY_STATE_START: u32 = 36;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub params: OuParams,
    pub s0: f64,
    pub horizon_months: u32,
    pub n_paths: usize,
    pub seed: u64,
    pub config: LiquidityConfig,
    pub ratios: RatioTable,
    pub ranking: RankingMode,
    /// Only used by [`RankingMode::Ranked`].
    pub costs: CostCurve,
}

impl Default for SimulationSpec {
    /// Twenty years of monthly rolls at `k = 0.4`, `theta = S_0 = 1/0.75`,
    /// `nu = 0.2`, `L = 0.01`, `p = 1%`, shortest-first.
    fn default() -> Self {
        Self {
            params: OuParams {
                k: 0.4,
                theta: 1.0 / 0.75,
                nu: 0.2,
            },
            s0: 1.0 / 0.75,
            horizon_months: 240,
            n_paths: 10_000,
            seed: 42,
            config: LiquidityConfig::default(),
            ratios: RatioTable::reference(),
            ranking: RankingMode::ShortestFirst,
            costs: CostCurve::zero(),
        }
    }
}

impl SimulationSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.config.validate()?;
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return Err(Error::invalid(format!("s0 must be positive, got {}", self.s0)));
        }
        if self.horizon_months == 0 || self.n_paths == 0 {
            return Err(Error::invalid("horizon_months and n_paths must be at least 1"));
        }
        if self.ratios.max_tenor() < self.config.max_tenor_months {
            return Err(Error::TenorOutOfRange {
                tenor: self.config.max_tenor_months,
                max: self.ratios.max_tenor(),
            });
        }
        Ok(())
    }
}

/// Cross-sectional cash-flow statistics for one settlement month.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonthStats {
    pub month: u32,
    pub mean_cf: f64,
    /// Empirical `tail_p` quantile of the cash flow.
    pub q_cf: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub spec: SimulationSpec,
    /// Months `1..=horizon`.
    pub months: Vec<MonthStats>,
    /// Mean new-trade nominal per tenor over steady-state roll dates.
    pub mean_new_nominal: Vec<f64>,
    /// Mean live nominal per remaining tenor over steady-state months.
    pub mean_live_nominal: Vec<f64>,
    /// Cash flow of every path, months `1..=horizon`.
    pub path_cash_flows: Vec<Vec<f64>>,
    /// Roll dates where the allocator ran out of capacity.
    pub infeasible_events: usize,
    /// Largest `|live - target|` seen after any roll on any path.
    pub max_hedge_error: f64,
}

impl SimulationReport {
    pub fn cumulative_cash_flows(&self) -> Vec<f64> {
        self.path_cash_flows.iter().map(|p| p.iter().sum()).collect()
    }

    /// Months from [`STEADY_STATE_START`] on.
    pub fn steady_state(&self) -> impl Iterator<Item = &MonthStats> {
        self.months.iter().filter(|m| m.month >= STEADY_STATE_START)
    }

    /// Writes `month,mean_cf,q01_cf` rows.
    pub fn write_monthly_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["month", "mean_cf", "q01_cf"])?;
        for m in &self.months {
            w.write_record([m.month.to_string(), m.mean_cf.to_string(), m.q_cf.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `tenor_months,mean_nominal` rows of the mean new-trade nominal.
    pub fn write_tenor_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["tenor_months", "mean_nominal"])?;
        for (i, a) in self.mean_new_nominal.iter().enumerate() {
            w.write_record([(i + 1).to_string(), a.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct PathOutcome {
    cash_flows: Vec<f64>,
    new_nominal: Vec<f64>,
    live_nominal: Vec<f64>,
    infeasible: usize,
    max_hedge_error: f64,
}

fn run_path(spec: &SimulationSpec, path: usize) -> Result<PathOutcome> {
    let horizon = spec.horizon_months;
    let max_tenor = spec.config.max_tenor_months as usize;
    let mut spots = vec![0.0; horizon as usize + 1];
    simulate_path_into(&spec.params, spec.s0, &mut path_rng(spec.seed, path as u64), &mut spots);

    let mut book = HedgeBook::default();
    let mut out = PathOutcome {
        cash_flows: Vec::with_capacity(horizon as usize),
        new_nominal: vec![0.0; max_tenor],
        live_nominal: vec![0.0; max_tenor],
        infeasible: 0,
        max_hedge_error: 0.0,
    };
    for month in 0..=horizon {
        let spot = spots[month as usize];
        if month > 0 {
            let (_, matured) = book.expire(month);
            out.cash_flows.push(settle_cash_flow(&matured, spot));
        }
        let curve = synth_curve(spot, &spec.ratios, month)?;
        let ranking = rank_tenors(
            &spec.params,
            spot,
            &curve,
            &spec.costs,
            spec.config.max_tenor_months,
            spec.ranking,
        )?;
        let date = RollDate { month, spot, curve: &curve };
        let amount = book.unhedged().max(0.0);
        let result = allocate_best_effort(&book, &spec.params, &spec.config, date, amount, &ranking)?;
        if !result.fully_hedged {
            out.infeasible += 1;
        }
        book.add_allocation(month, &result, &curve)?;
        out.max_hedge_error = out.max_hedge_error.max((book.live_nominal() - book.target_nominal()).abs());

        if month >= STEADY_STATE_START {
            for t in &result.new_trades {
                out.new_nominal[t.tenor_months as usize - 1] += t.nominal;
            }
            for (expiry, a) in book.net_by_expiry() {
                if let Some(slot) = out.live_nominal.get_mut((expiry - month) as usize - 1) {
                    *slot += a;
                }
            }
        }
    }
    Ok(out)
}

/// Runs every path and aggregates cash-flow and allocation statistics.
///
/// Infeasible roll dates are counted rather than fatal; the shortfall stays
/// unhedged and is picked up on the next roll.
pub fn run_simulation(spec: &SimulationSpec) -> Result<SimulationReport> {
    spec.validate()?;
    let outcomes = (0..spec.n_paths)
        .into_par_iter()
        .map(|i| run_path(spec, i))
        .collect::<Result<Vec<_>>>()?;

    let horizon = spec.horizon_months as usize;
    let max_tenor = spec.config.max_tenor_months as usize;
    let n = outcomes.len();
    let mut new_nominal = vec![0.0; max_tenor];
    let mut live_nominal = vec![0.0; max_tenor];
    let mut infeasible_events = 0;
    let mut max_hedge_error: f64 = 0.0;
    for o in &outcomes {
        for (acc, x) in new_nominal.iter_mut().zip(&o.new_nominal) {
            *acc += x;
        }
        for (acc, x) in live_nominal.iter_mut().zip(&o.live_nominal) {
            *acc += x;
        }
        infeasible_events += o.infeasible;
        max_hedge_error = max_hedge_error.max(o.max_hedge_error);
    }
    let steady_months = (spec.horizon_months + 1).saturating_sub(STEADY_STATE_START) as f64;
    let scale = if steady_months > 0.0 { 1.0 / (n as f64 * steady_months) } else { 0.0 };
    new_nominal.iter_mut().chain(live_nominal.iter_mut()).for_each(|x| *x *= scale);

    let months = (0..horizon)
        .into_par_iter()
        .map(|i| {
            let mut column: Vec<f64> = outcomes.iter().map(|o| o.cash_flows[i]).collect();
            let mean_cf = column.iter().sum::<f64>() / n as f64;
            column.sort_by(f64::total_cmp);
            MonthStats {
                month: i as u32 + 1,
                mean_cf,
                q_cf: quantile_sorted(&column, spec.config.tail_p),
                n_samples: n,
            }
        })
        .collect();

    Ok(SimulationReport {
        spec: spec.clone(),
        months,
        mean_new_nominal: new_nominal,
        mean_live_nominal: live_nominal,
        path_cash_flows: outcomes.into_iter().map(|o| o.cash_flows).collect(),
        infeasible_events,
        max_hedge_error,
    })
}
