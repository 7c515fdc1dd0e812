//! Greedy hedge-tenor allocation under a per-bucket CFaR budget.
//!
//! Each roll date the amount `A_t` that just became unhedged is spread across
//! future expiry buckets:
//!
//! 1. compute the pre-trade CFaR of every bucket and flag those above budget;
//! 2. repair breached buckets with negative hedges that bring their CFaR back
//!    to the budget, and add the repaired amount to what must be placed;
//! 3. walk the tenor ranking over the remaining buckets, filling each up to
//!    the budget, and stop as soon as the required amount is placed (the last
//!    bucket is truncated; over-hedging is never allowed).
//!
//! New positions are bounded by `[a_lower, a_upper]`, and a repair never takes
//! a bucket's net nominal below zero. A bucket whose unit CFaR is non-positive
//! cannot be sized by the budget: if breached it is left alone, otherwise it
//! receives `a_upper` outright.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::book::HedgeBook;
use crate::cfar::{profile, CfarProfile, LiquidityConfig};
use crate::error::{Error, Result};
use crate::market_data::{CostCurve, ForwardCurve};
use crate::ou::{months_to_years, OuParams};

/// Remaining amount below which the hedge counts as fully placed.
const PLACEMENT_EPS: f64 = 1e-12;

/// Expected annualised carry net of costs for a forward of `tenor_months`,
/// `(F - E[S_T]) / tau - TC(tau)`.
pub fn expected_net_carry(
    params: &OuParams,
    spot: f64,
    curve: &ForwardCurve,
    costs: &CostCurve,
    tenor_months: u32,
) -> Result<f64> {
    let tau = months_to_years(tenor_months);
    let forward = curve.forward(tenor_months)?;
    Ok((forward - params.conditional_mean(spot, tau)) / tau - costs.cost(tenor_months))
}

/// Gross expected annualised carry `(F - E[S_T]) / tau`, the allocation objective.
pub fn expected_carry(params: &OuParams, spot: f64, curve: &ForwardCurve, tenor_months: u32) -> Result<f64> {
    expected_net_carry(params, spot, curve, &CostCurve::zero(), tenor_months)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankingMode {
    /// Shorter tenors are assumed to carry more; fill from one month outward.
    #[default]
    ShortestFirst,
    /// Sort tenors by expected net carry, best first.
    Ranked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TenorRanking {
    /// Tenors in months, best first.
    pub order: Vec<u32>,
    /// Expected net carry of each tenor in `order`, when computed.
    pub carries: Option<Vec<f64>>,
}

impl TenorRanking {
    pub fn shortest_first(max_tenor: u32) -> Self {
        Self {
            order: (1..=max_tenor).collect(),
            carries: None,
        }
    }

    /// Sorts `(tenor, carry)` pairs by carry descending; ties go to the shorter tenor.
    pub fn from_carries(mut carries: Vec<(u32, f64)>) -> Self {
        carries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        Self {
            order: carries.iter().map(|c| c.0).collect(),
            carries: Some(carries.iter().map(|c| c.1).collect()),
        }
    }
}

pub fn rank_tenors(
    params: &OuParams,
    spot: f64,
    curve: &ForwardCurve,
    costs: &CostCurve,
    max_tenor: u32,
    mode: RankingMode,
) -> Result<TenorRanking> {
    match mode {
        RankingMode::ShortestFirst => Ok(TenorRanking::shortest_first(max_tenor)),
        RankingMode::Ranked => {
            let carries = (1..=max_tenor)
                .map(|t| Ok((t, expected_net_carry(params, spot, curve, costs, t)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(TenorRanking::from_carries(carries))
        }
    }
}

/// What the allocator did to a bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BucketAction {
    /// Negative hedge bringing a breached bucket back to budget.
    Repair,
    /// Repair limited by `a_lower` or by the bucket's existing net nominal;
    /// the bucket stays above budget.
    RepairClamped,
    /// Breached with non-positive unit CFaR; left untouched.
    Unrepaired,
    /// Filled to the budget.
    Fill,
    /// Fill limited by `a_upper`.
    FillClamped,
    /// Non-positive unit CFaR: `a_upper` placed outright.
    FillNonPositiveUnit,
    /// Last fill, truncated at the required amount.
    FinalFill,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewTrade {
    pub expiry_month: u32,
    pub tenor_months: u32,
    pub nominal: f64,
    pub action: BucketAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub as_of_month: u32,
    /// Amount that had to be hedged, `A_t`.
    pub amount: f64,
    /// Total size of the negative repair hedges.
    pub repair_total: f64,
    /// Non-zero new trades, ordered by tenor.
    pub new_trades: Vec<NewTrade>,
    /// Breached buckets left above budget (unit CFaR not positive).
    pub unrepaired: Vec<u32>,
    pub fully_hedged: bool,
    pub shortfall: f64,
    /// CFaR before and after the new trades.
    pub profile: CfarProfile,
}

impl AllocationResult {
    pub fn total_nominal(&self) -> f64 {
        self.new_trades.iter().map(|t| t.nominal).sum()
    }

    /// Nominal per tenor `1..=max_tenor` (zeros where nothing was traded).
    pub fn nominal_by_tenor(&self, max_tenor: u32) -> Vec<f64> {
        let mut out = vec![0.0; max_tenor as usize];
        for t in &self.new_trades {
            if let Some(slot) = out.get_mut(t.tenor_months as usize - 1) {
                *slot += t.nominal;
            }
        }
        out
    }

    /// Longest tenor with a positive new trade.
    pub fn max_occupied_tenor(&self) -> u32 {
        self.new_trades
            .iter()
            .filter(|t| t.nominal > 0.0)
            .map(|t| t.tenor_months)
            .max()
            .unwrap_or(0)
    }

    /// `sum a * carry(tenor)` for per-tenor carries indexed from tenor 1.
    pub fn objective(&self, carry_by_tenor: &[f64]) -> f64 {
        self.new_trades
            .iter()
            .map(|t| t.nominal * carry_by_tenor[t.tenor_months as usize - 1])
            .sum()
    }

    /// Writes `tenor_months,nominal` rows for every traded tenor.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["tenor_months", "nominal"])?;
        for t in &self.new_trades {
            w.write_record([t.tenor_months.to_string(), t.nominal.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Market inputs observed on the roll date.
#[derive(Debug, Clone, Copy)]
pub struct RollDate<'a> {
    pub month: u32,
    pub spot: f64,
    pub curve: &'a ForwardCurve,
}

/// Spreads `amount` across future buckets in ranking order without breaching
/// the liquidity budget.
///
/// `book` must hold only contracts traded before `date.month`. Returns
/// [`Error::InfeasibleHedge`] (carrying the partial allocation) when the
/// ranking is exhausted before the amount is placed.
pub fn allocate(
    book: &HedgeBook,
    params: &OuParams,
    config: &LiquidityConfig,
    date: RollDate<'_>,
    amount: f64,
    ranking: &TenorRanking,
) -> Result<AllocationResult> {
    config.validate()?;
    if !(amount >= 0.0 && amount.is_finite()) {
        return Err(Error::invalid(format!("hedge amount must be non-negative, got {amount}")));
    }
    let budget = config.budget;
    let mut prof = profile(book, params, config, date.month, date.spot, date.curve)?;
    let n = prof.buckets.len();
    let mut trades: Vec<Option<(f64, BucketAction)>> = vec![None; n];
    let mut unrepaired = Vec::new();

    // Repairs.
    let mut repair_total = 0.0;
    for (i, b) in prof.buckets.iter().enumerate() {
        if b.cfar_pre <= budget {
            continue;
        }
        if b.unit_cfar > 0.0 {
            let wanted = (budget - b.cfar_pre) / b.unit_cfar;
            // A repair may unwind the bucket but never leave it net short.
            let floor = config.a_lower.max(-book.bucket_sums(b.bucket_month, date.month).nominal.max(0.0));
            let (a, action) = if wanted < floor {
                (floor, BucketAction::RepairClamped)
            } else {
                (wanted, BucketAction::Repair)
            };
            if a < 0.0 {
                repair_total += -a;
                trades[i] = Some((a, action));
            } else if action == BucketAction::RepairClamped {
                // Long-only books cannot repair at all.
                unrepaired.push(b.tenor_months);
            }
        } else {
            unrepaired.push(b.tenor_months);
        }
    }

    // Fills in ranking order.
    let required = amount + repair_total;
    let mut remaining = required;
    for &tenor in &ranking.order {
        if remaining <= PLACEMENT_EPS {
            break;
        }
        let Some(i) = (tenor as usize).checked_sub(1).filter(|&i| i < n) else {
            return Err(Error::invalid(format!(
                "ranking contains tenor {tenor} outside 1..={n}"
            )));
        };
        let b = &prof.buckets[i];
        if b.cfar_pre > budget || trades[i].is_some() {
            continue;
        }
        let (cap, mut action) = if b.unit_cfar > 0.0 {
            let cap = (budget - b.cfar_pre) / b.unit_cfar;
            if cap > config.a_upper {
                (config.a_upper, BucketAction::FillClamped)
            } else {
                (cap, BucketAction::Fill)
            }
        } else {
            (config.a_upper, BucketAction::FillNonPositiveUnit)
        };
        if cap <= 0.0 {
            continue;
        }
        let placed = if cap >= remaining {
            if cap > remaining {
                action = BucketAction::FinalFill;
            }
            let placed = remaining;
            remaining = 0.0;
            placed
        } else {
            remaining -= cap;
            cap
        };
        trades[i] = Some((placed, action));
    }
    let shortfall = if remaining > PLACEMENT_EPS { remaining } else { 0.0 };

    let new_trades: Vec<NewTrade> = trades
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            t.filter(|(a, _)| *a != 0.0).map(|(nominal, action)| NewTrade {
                expiry_month: prof.buckets[i].bucket_month,
                tenor_months: prof.buckets[i].tenor_months,
                nominal,
                action,
            })
        })
        .collect();
    prof.apply_trades(new_trades.iter().map(|t| (t.tenor_months, t.nominal)));

    let result = AllocationResult {
        as_of_month: date.month,
        amount,
        repair_total,
        new_trades,
        unrepaired,
        fully_hedged: shortfall == 0.0,
        shortfall,
        profile: prof,
    };
    if result.fully_hedged {
        Ok(result)
    } else {
        Err(Error::InfeasibleHedge {
            shortfall,
            partial: Box::new(result),
        })
    }
}

/// Like [`allocate`] but accepts a partial hedge, returning it with
/// `fully_hedged = false`.
pub fn allocate_best_effort(
    book: &HedgeBook,
    params: &OuParams,
    config: &LiquidityConfig,
    date: RollDate<'_>,
    amount: f64,
    ranking: &TenorRanking,
) -> Result<AllocationResult> {
    match allocate(book, params, config, date, amount, ranking) {
        Err(Error::InfeasibleHedge { partial, .. }) => Ok(*partial),
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Static sensitivity analysis

/// How the initial forward curve is built for a static allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveConvention {
    /// `F_{0,T} = E_0[S_T]`: no carry, only the spot-volatility term matters.
    ExpectedSpot,
    /// `F_{0,T} = S_0` at every tenor.
    FlatSpot,
    /// `F_{0,T} = S_0 / ratio(T)`.
    Ratios(crate::market_data::RatioTable),
}

impl CurveConvention {
    pub fn curve(&self, params: &OuParams, spot: f64, month: u32, max_tenor: u32) -> Result<ForwardCurve> {
        match self {
            CurveConvention::ExpectedSpot => ForwardCurve::expected_spot(month, spot, max_tenor, params),
            CurveConvention::FlatSpot => ForwardCurve::flat(month, spot, max_tenor),
            CurveConvention::Ratios(r) => crate::market_data::synth_curve(spot, r, month),
        }
    }
}

/// Starting point for a static (empty-book) allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticScenario {
    pub params: OuParams,
    pub spot: f64,
    pub config: LiquidityConfig,
    pub convention: CurveConvention,
}

impl Default for StaticScenario {
    /// `L = 0.01`, `p = 1%`, `k = 0.4`, `theta = S_0 = 1/0.75`, `nu = 0.2`.
    fn default() -> Self {
        Self {
            params: OuParams {
                k: 0.4,
                theta: 1.0 / 0.75,
                nu: 0.2,
            },
            spot: 1.0 / 0.75,
            config: LiquidityConfig::default(),
            convention: CurveConvention::ExpectedSpot,
        }
    }
}

impl StaticScenario {
    /// Shortest-first allocation of one full unit from an empty book.
    pub fn allocate(&self) -> Result<AllocationResult> {
        let curve = self
            .convention
            .curve(&self.params, self.spot, 0, self.config.max_tenor_months)?;
        let book = HedgeBook::default();
        let ranking = TenorRanking::shortest_first(self.config.max_tenor_months);
        allocate(
            &book,
            &self.params,
            &self.config,
            RollDate {
                month: 0,
                spot: self.spot,
                curve: &curve,
            },
            book.target_nominal(),
            &ranking,
        )
    }

    pub fn with(&self, param: SweepParam, value: f64) -> Self {
        let mut s = self.clone();
        match param {
            SweepParam::Budget => s.config.budget = value,
            SweepParam::TailProb => s.config.tail_p = value,
            SweepParam::Vol => s.params.nu = value,
            SweepParam::Spot => s.spot = value,
            SweepParam::Speed => s.params.k = value,
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    /// Liquidity budget `L`.
    Budget,
    /// CFaR tail probability `p`.
    TailProb,
    /// Spot volatility `nu`.
    Vol,
    /// Initial spot `S_0`.
    Spot,
    /// Mean-reversion speed `k`.
    Speed,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "budget" => Ok(SweepParam::Budget),
            "p" | "tail-p" => Ok(SweepParam::TailProb),
            "nu" | "vol" => Ok(SweepParam::Vol),
            "s0" | "S0" | "spot" => Ok(SweepParam::Spot),
            "k" | "speed" => Ok(SweepParam::Speed),
            other => Err(Error::invalid(format!("unknown sweep parameter `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub value: f64,
    pub nominal_by_tenor: Vec<f64>,
    pub max_occupied_tenor: u32,
    pub fully_hedged: bool,
}

/// One static allocation per swept value, everything else held at `base`.
pub fn static_sensitivity(base: &StaticScenario, param: SweepParam, values: &[f64]) -> Result<Vec<SensitivityRow>> {
    values
        .iter()
        .map(|&value| {
            let scenario = base.with(param, value);
            scenario.params.validate()?;
            let result = allocate_static_best_effort(&scenario)?;
            Ok(SensitivityRow {
                value,
                nominal_by_tenor: result.nominal_by_tenor(scenario.config.max_tenor_months),
                max_occupied_tenor: result.max_occupied_tenor(),
                fully_hedged: result.fully_hedged,
            })
        })
        .collect()
}

fn allocate_static_best_effort(s: &StaticScenario) -> Result<AllocationResult> {
    match s.allocate() {
        Err(Error::InfeasibleHedge { partial, .. }) => Ok(*partial),
        other => other,
    }
}

/// Writes `sweep_value,tenor_months,nominal` rows for non-zero nominals.
pub fn write_sensitivity_csv<W: Write>(out: W, rows: &[SensitivityRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sweep_value", "tenor_months", "nominal"])?;
    for row in rows {
        for (i, a) in row.nominal_by_tenor.iter().enumerate() {
            if *a != 0.0 {
                w.write_record([row.value.to_string(), (i + 1).to_string(), a.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::book::ForwardContract;
    use crate::cfar::{cfar_post, inv_norm_cdf};

    fn base_params() -> OuParams {
        OuParams::new(0.4, 1.0 / 0.75, 0.2).unwrap()
    }

    #[test]
    fn carry_examples() {
        let p = base_params();
        let s = p.theta;
        let flat = ForwardCurve::flat(0, s, 120).unwrap();
        for t in [1, 7, 60, 120] {
            assert!(expected_net_carry(&p, s, &flat, &CostCurve::zero(), t).unwrap().abs() < 1e-12);
        }
        let e12 = p.conditional_mean(s, 1.0);
        let curve = ForwardCurve::new(0, s, vec![(12, e12 + 0.01)]).unwrap();
        let costs = CostCurve::new(vec![(12, 0.0002)]).unwrap();
        let c = expected_net_carry(&p, s, &curve, &costs, 12).unwrap();
        assert!((c - 0.0098).abs() < 1e-12);
    }

    #[test]
    fn ranking_rules() {
        assert_eq!(TenorRanking::shortest_first(120).order, (1..=120).collect::<Vec<_>>());
        let r = TenorRanking::from_carries(vec![(1, 0.05), (2, 0.03), (3, 0.07)]);
        assert_eq!(r.order, vec![3, 1, 2]);
        let r = TenorRanking::from_carries(vec![(5, 0.02), (4, 0.02), (6, 0.01)]);
        assert_eq!(r.order, vec![4, 5, 6]);
    }

    #[test]
    fn ranked_mode_sorts_by_carry() {
        let p = base_params();
        let s = p.theta;
        let curve = crate::market_data::synth_curve(s, &crate::market_data::RatioTable::reference(), 0).unwrap();
        let r = rank_tenors(&p, s, &curve, &CostCurve::standard(), 120, RankingMode::Ranked).unwrap();
        let carries = r.carries.unwrap();
        assert!(carries.windows(2).all(|w| w[0] >= w[1]));
        let mut sorted = r.order.clone();
        sorted.sort();
        assert_eq!(sorted, (1..=120).collect::<Vec<_>>());
    }

    fn date(curve: &ForwardCurve) -> RollDate<'_> {
        RollDate {
            month: curve.as_of_month,
            spot: curve.spot,
            curve,
        }
    }

    #[test]
    fn unbounded_budget_uses_first_bucket() {
        let p = base_params();
        let config = LiquidityConfig { budget: 1e6, ..Default::default() };
        let curve = ForwardCurve::expected_spot(0, p.theta, 120, &p).unwrap();
        let r = allocate(&HedgeBook::default(), &p, &config, date(&curve), 1.0, &TenorRanking::shortest_first(120)).unwrap();
        assert_eq!(r.new_trades.len(), 1);
        assert_eq!(r.new_trades[0].tenor_months, 1);
        assert_eq!(r.new_trades[0].nominal, 1.0);
    }

    #[test]
    fn zero_amount_is_empty() {
        let p = base_params();
        let curve = ForwardCurve::expected_spot(0, p.theta, 120, &p).unwrap();
        let r = allocate(
            &HedgeBook::default(),
            &p,
            &LiquidityConfig::default(),
            date(&curve),
            0.0,
            &TenorRanking::shortest_first(120),
        )
        .unwrap();
        assert!(r.new_trades.is_empty());
        assert!(r.fully_hedged);
    }

    /// Static base case: each bucket gets `L / (-sd_T z)` until the unit is placed,
    /// checked by re-evaluating the CFaR of the booked trades.
    #[test]
    fn static_base_case_fills_front_to_back() {
        let s = StaticScenario::default();
        let r = s.allocate().unwrap();
        let z = inv_norm_cdf(0.01).unwrap();
        let n = r.new_trades.len();
        for (i, t) in r.new_trades.iter().enumerate() {
            assert_eq!(t.tenor_months as usize, i + 1);
            let cap = 0.01 / (-s.params.conditional_std(t.tenor_months as f64 / 12.0) * z);
            if i + 1 < n {
                assert!((t.nominal - cap).abs() < 1e-12);
            } else {
                assert!(t.nominal <= cap + 1e-12);
            }
        }
        assert!((r.total_nominal() - 1.0).abs() < 1e-12);

        let curve = ForwardCurve::expected_spot(0, s.spot, 120, &s.params).unwrap();
        let mut book = HedgeBook::default();
        book.add_allocation(0, &r, &curve).unwrap();
        for t in 1..=120 {
            let c = cfar_post(&book, &s.params, 0, t, s.spot, 0.01).unwrap();
            assert!(c <= 0.01 + 1e-12, "tenor {t}: {c}");
        }
    }

    #[test]
    fn five_percent_budget_is_short() {
        let s = StaticScenario::default().with(SweepParam::Budget, 0.05);
        let r = s.allocate().unwrap();
        let m = r.max_occupied_tenor();
        assert!((2..=6).contains(&m), "max tenor {m}");
    }

    #[test]
    fn repairs_breached_bucket() {
        let p = base_params();
        let config = LiquidityConfig { max_tenor_months: 24, ..Default::default() };
        // Spot has jumped up, so the contract struck at 1.30 expects a loss.
        let spot = 1.35;
        let curve = ForwardCurve::flat(1, spot, 24).unwrap();
        let mut book = HedgeBook::default();
        book.add_contract(ForwardContract::new(0, 4, 0.1, 1.30).unwrap()).unwrap();
        let r = allocate(&book, &p, &config, date(&curve), 0.0, &TenorRanking::shortest_first(24)).unwrap();
        let repair = r.new_trades.iter().find(|t| t.tenor_months == 3).unwrap();
        assert_eq!(repair.action, BucketAction::Repair);
        assert!(repair.nominal < 0.0 && repair.nominal > -0.1);
        assert!((r.repair_total + repair.nominal).abs() < 1e-15);
        assert!((r.profile.bucket(3).unwrap().cfar_post - 0.01).abs() < 1e-12);
        assert!(r.total_nominal().abs() < 1e-12);
    }

    #[test]
    fn repair_never_leaves_bucket_short() {
        let p = base_params();
        let config = LiquidityConfig { max_tenor_months: 24, ..Default::default() };
        // Reaching the budget would take more than the bucket's 0.2 nominal.
        let spot = 1.45;
        let curve = ForwardCurve::flat(1, spot, 24).unwrap();
        let mut book = HedgeBook::default();
        book.add_contract(ForwardContract::new(0, 4, 0.2, 1.30).unwrap()).unwrap();
        let r = allocate(&book, &p, &config, date(&curve), 0.0, &TenorRanking::shortest_first(24)).unwrap();
        let repair = r.new_trades.iter().find(|t| t.tenor_months == 3).unwrap();
        assert_eq!(repair.action, BucketAction::RepairClamped);
        assert!((repair.nominal + 0.2).abs() < 1e-15);
        assert!(r.profile.bucket(3).unwrap().cfar_post > 0.01);
    }

    #[test]
    fn long_only_cannot_repair() {
        let p = base_params();
        let config = LiquidityConfig { max_tenor_months: 12, a_lower: 0.0, ..Default::default() };
        let spot = 1.6;
        let curve = ForwardCurve::flat(1, spot, 12).unwrap();
        let mut book = HedgeBook::default();
        book.add_contract(ForwardContract::new(0, 4, 0.5, 1.30).unwrap()).unwrap();
        let r = allocate(&book, &p, &config, date(&curve), 0.1, &TenorRanking::shortest_first(12)).unwrap();
        assert_eq!(r.repair_total, 0.0);
        assert_eq!(r.unrepaired, vec![3]);
        assert!(r.new_trades.iter().all(|t| t.tenor_months != 3 && t.nominal > 0.0));
    }

    #[test]
    fn upper_bound_and_infeasible() {
        let p = base_params();
        let config = LiquidityConfig {
            budget: 1e6,
            a_upper: 0.1,
            max_tenor_months: 5,
            ..Default::default()
        };
        let curve = ForwardCurve::flat(0, p.theta, 5).unwrap();
        let err = allocate(&HedgeBook::default(), &p, &config, date(&curve), 1.0, &TenorRanking::shortest_first(5))
            .unwrap_err();
        match err {
            Error::InfeasibleHedge { shortfall, partial } => {
                assert!((shortfall - 0.5).abs() < 1e-12);
                assert!(!partial.fully_hedged);
                assert_eq!(partial.new_trades.len(), 5);
                assert!(partial.new_trades.iter().all(|t| t.action == BucketAction::FillClamped));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_positive_unit_gets_upper_bound() {
        let p = base_params();
        let config = LiquidityConfig { max_tenor_months: 3, a_upper: 0.3, ..Default::default() };
        // Forwards far above expected spot make the unit CFaR negative.
        let curve = ForwardCurve::flat(0, p.theta, 3)
            .map(|c| ForwardCurve::new(0, c.spot, c.pillars.iter().map(|&(t, f)| (t, f + 1.0)).collect()).unwrap())
            .unwrap();
        let r = allocate(&HedgeBook::default(), &p, &config, date(&curve), 0.5, &TenorRanking::shortest_first(3)).unwrap();
        assert_eq!(r.new_trades[0].action, BucketAction::FillNonPositiveUnit);
        assert_eq!(r.new_trades[0].nominal, 0.3);
        assert!((r.new_trades[1].nominal - 0.2).abs() < 1e-15);
    }

    #[test]
    fn sensitivity_csv() {
        let rows = static_sensitivity(&StaticScenario::default(), SweepParam::Budget, &[0.05]).unwrap();
        let mut out = Vec::new();
        write_sensitivity_csv(&mut out, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("sweep_value,tenor_months,nominal\n0.05,1,"));
        assert_eq!(text.lines().count(), 1 + rows[0].max_occupied_tenor as usize);
    }
}
