//! Ledger of outstanding FX forwards.
//!
//! Nominals are signed amounts of foreign currency: positive is the hedging
//! direction (long domestic, short foreign). Contracts are grouped by expiry
//! month so that per-bucket sums needed by the CFaR engine are O(1).

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::allocator::AllocationResult;
use crate::error::{Error, Result};
use crate::market_data::ForwardCurve;

/// Tolerance for the full-hedge invariant.
pub const HEDGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwardContract {
    pub trade_month: u32,
    pub expiry_month: u32,
    pub nominal: f64,
    pub rate: f64,
}

impl ForwardContract {
    pub fn new(trade_month: u32, expiry_month: u32, nominal: f64, rate: f64) -> Result<Self> {
        if expiry_month <= trade_month {
            return Err(Error::invalid(format!(
                "contract expiry {expiry_month} must be after trade month {trade_month}"
            )));
        }
        if !(rate > 0.0 && rate.is_finite()) || !nominal.is_finite() {
            return Err(Error::invalid(format!("bad contract rate {rate} / nominal {nominal}")));
        }
        Ok(Self {
            trade_month,
            expiry_month,
            nominal,
            rate,
        })
    }

    /// Settlement cash flow against the realised spot, `a (F - S)`.
    pub fn payoff(&self, spot: f64) -> f64 {
        self.nominal * (self.rate - spot)
    }
}

/// Net position of one expiry bucket restricted to trades before some month.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BucketSums {
    /// `sum a`
    pub nominal: f64,
    /// `sum a F`
    pub weighted_rate: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Bucket {
    sums: BucketSums,
    last_trade: u32,
    contracts: BTreeMap<u32, ForwardContract>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HedgeBook {
    target_nominal: f64,
    buckets: BTreeMap<u32, Bucket>,
}

impl Default for HedgeBook {
    fn default() -> Self {
        Self::new(1.0)
    }
}

impl HedgeBook {
    pub fn new(target_nominal: f64) -> Self {
        Self {
            target_nominal,
            buckets: BTreeMap::new(),
        }
    }

    pub fn target_nominal(&self) -> f64 {
        self.target_nominal
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn contracts(&self) -> impl Iterator<Item = &ForwardContract> {
        self.buckets.values().flat_map(|b| b.contracts.values())
    }

    pub fn len(&self) -> usize {
        self.buckets.values().map(|b| b.contracts.len()).sum()
    }

    /// Sum of live nominals.
    pub fn live_nominal(&self) -> f64 {
        self.buckets.values().map(|b| b.sums.nominal).sum()
    }

    /// Amount that is currently unhedged, `W - live`.
    pub fn unhedged(&self) -> f64 {
        self.target_nominal - self.live_nominal()
    }

    pub fn last_expiry(&self) -> Option<u32> {
        self.buckets.keys().next_back().copied()
    }

    /// Expiry months with live contracts.
    pub fn expiries(&self) -> impl Iterator<Item = u32> + '_ {
        self.buckets.keys().copied()
    }

    /// Net nominal per expiry month.
    pub fn net_by_expiry(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.buckets.iter().map(|(e, b)| (*e, b.sums.nominal))
    }

    /// Sums over contracts expiring at `expiry` with `trade_month < traded_before`.
    pub fn bucket_sums(&self, expiry: u32, traded_before: u32) -> BucketSums {
        let Some(bucket) = self.buckets.get(&expiry) else {
            return BucketSums::default();
        };
        if bucket.last_trade < traded_before {
            return bucket.sums;
        }
        bucket
            .contracts
            .range(..traded_before)
            .fold(BucketSums::default(), |acc, (_, c)| BucketSums {
                nominal: acc.nominal + c.nominal,
                weighted_rate: acc.weighted_rate + c.nominal * c.rate,
            })
    }

    /// Adds a contract, netting it with an existing one of the same
    /// `(trade_month, expiry_month)`. Netted contracts must share a rate.
    pub fn add_contract(&mut self, contract: ForwardContract) -> Result<()> {
        let c = ForwardContract::new(
            contract.trade_month,
            contract.expiry_month,
            contract.nominal,
            contract.rate,
        )?;
        let bucket = self.buckets.entry(c.expiry_month).or_default();
        match bucket.contracts.get_mut(&c.trade_month) {
            Some(existing) => {
                if (existing.rate - c.rate).abs() > 1e-12 * c.rate {
                    return Err(Error::invalid(format!(
                        "cannot net contracts ({}, {}) struck at different rates {} and {}",
                        c.trade_month, c.expiry_month, existing.rate, c.rate
                    )));
                }
                existing.nominal += c.nominal;
            }
            None => {
                bucket.contracts.insert(c.trade_month, c);
            }
        }
        bucket.sums.nominal += c.nominal;
        bucket.sums.weighted_rate += c.nominal * c.rate;
        bucket.last_trade = bucket.last_trade.max(c.trade_month);
        Ok(())
    }

    /// Removes the contracts maturing at `month` and returns their total
    /// nominal `A_t` together with the contracts.
    pub fn expire(&mut self, month: u32) -> (f64, Vec<ForwardContract>) {
        debug_assert!(
            self.buckets.keys().next().is_none_or(|&e| e >= month),
            "expire called out of order"
        );
        match self.buckets.remove(&month) {
            Some(bucket) => {
                let contracts: Vec<_> = bucket.contracts.into_values().collect();
                (contracts.iter().map(|c| c.nominal).sum(), contracts)
            }
            None => (0.0, Vec::new()),
        }
    }

    /// Mark-to-market against `curve` with zero discounting,
    /// `sum a (F_locked - F_now(T))`.
    pub fn mtm(&self, curve: &ForwardCurve) -> Result<f64> {
        mtm(self, curve)
    }

    /// Books the allocator's new trades at the month's curve rates.
    ///
    /// When the allocation claims to be fully hedged the live nominal must end
    /// at the target; the book is left untouched if it would not.
    pub fn add_allocation(
        &mut self,
        month: u32,
        allocation: &AllocationResult,
        curve: &ForwardCurve,
    ) -> Result<()> {
        let mut contracts = Vec::with_capacity(allocation.new_trades.len());
        for trade in &allocation.new_trades {
            if trade.expiry_month <= month {
                return Err(Error::invalid(format!(
                    "allocation expiry {} is not after month {month}",
                    trade.expiry_month
                )));
            }
            let rate = curve.forward(trade.expiry_month - month)?;
            contracts.push(ForwardContract::new(month, trade.expiry_month, trade.nominal, rate)?);
        }
        if allocation.fully_hedged {
            let live = self.live_nominal() + contracts.iter().map(|c| c.nominal).sum::<f64>();
            if (live - self.target_nominal).abs() > HEDGE_TOLERANCE {
                return Err(Error::HedgeRatioViolation {
                    live,
                    target: self.target_nominal,
                });
            }
        }
        for c in contracts {
            self.add_contract(c)?;
        }
        Ok(())
    }

    pub fn add_contracts(&mut self, contracts: impl IntoIterator<Item = ForwardContract>) -> Result<()> {
        contracts.into_iter().try_for_each(|c| self.add_contract(c))
    }

    /// Writes `trade_month,expiry_month,nominal,rate` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["trade_month", "expiry_month", "nominal", "rate"])?;
        for c in self.contracts() {
            w.write_record([
                c.trade_month.to_string(),
                c.expiry_month.to_string(),
                c.nominal.to_string(),
                c.rate.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Domestic cash flow of contracts maturing together, `sum a (F - S_t)`.
pub fn settle_cash_flow(matured: &[ForwardContract], spot: f64) -> f64 {
    debug_assert!(matured.windows(2).all(|w| w[0].expiry_month == w[1].expiry_month));
    matured.iter().map(|c| c.payoff(spot)).sum()
}

pub fn mtm(book: &HedgeBook, curve: &ForwardCurve) -> Result<f64> {
    let now = curve.as_of_month;
    let mut value = 0.0;
    for (&expiry, bucket) in &book.buckets {
        if expiry < now {
            return Err(Error::invalid(format!(
                "contract expiring at {expiry} is already past curve date {now}"
            )));
        }
        let current = if expiry == now {
            curve.spot
        } else {
            curve.forward(expiry - now)?
        };
        value += bucket.sums.weighted_rate - bucket.sums.nominal * current;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(t: u32, e: u32, a: f64, f: f64) -> ForwardContract {
        ForwardContract::new(t, e, a, f).unwrap()
    }

    #[test]
    fn expire_single_and_empty() {
        let mut book = HedgeBook::default();
        book.add_contract(c(0, 3, 1.0, 1.3)).unwrap();
        assert_eq!(book.expire(2).0, 0.0);
        let (a, matured) = book.expire(3);
        assert_eq!(a, 1.0);
        assert_eq!(matured.len(), 1);
        assert!(book.is_empty());
    }

    #[test]
    fn settle_examples() {
        assert_eq!(settle_cash_flow(&[c(0, 1, 1.0, 1.3)], 1.3), 0.0);
        assert!((settle_cash_flow(&[c(0, 1, 2.0, 1.40)], 1.30) - 0.20).abs() < 1e-12);
        let mixed = [c(0, 5, 1.5, 1.2), c(1, 5, -0.7, 1.35), c(3, 5, 0.2, 1.31)];
        let spot = 1.28;
        let mut oracle = 0.0;
        for k in &mixed {
            oracle += k.nominal * k.rate - k.nominal * spot;
        }
        assert!((settle_cash_flow(&mixed, spot) - oracle).abs() < 1e-14);
    }

    #[test]
    fn netting_same_key() {
        let mut book = HedgeBook::default();
        book.add_contract(c(0, 3, 0.4, 1.3)).unwrap();
        book.add_contract(c(0, 3, 0.1, 1.3)).unwrap();
        assert_eq!(book.len(), 1);
        assert!((book.live_nominal() - 0.5).abs() < 1e-15);
        assert!(book.add_contract(c(0, 3, 0.1, 1.4)).is_err());
    }

    #[test]
    fn contract_validation() {
        assert!(ForwardContract::new(3, 3, 1.0, 1.0).is_err());
        assert!(ForwardContract::new(3, 4, 1.0, 0.0).is_err());
    }

    #[test]
    fn bucket_sums_respect_trade_cutoff() {
        let mut book = HedgeBook::default();
        book.add_contract(c(0, 6, 0.3, 1.2)).unwrap();
        book.add_contract(c(2, 6, 0.2, 1.4)).unwrap();
        let all = book.bucket_sums(6, 3);
        assert!((all.nominal - 0.5).abs() < 1e-15);
        let early = book.bucket_sums(6, 2);
        assert!((early.nominal - 0.3).abs() < 1e-15);
        assert!((early.weighted_rate - 0.36).abs() < 1e-15);
        assert_eq!(book.bucket_sums(7, 10), BucketSums::default());
    }

    #[test]
    fn mtm_examples() {
        let curve = ForwardCurve::new(2, 1.3, vec![(1, 1.31), (6, 1.35), (12, 1.4)]).unwrap();
        let mut book = HedgeBook::default();
        book.add_contract(c(0, 8, 1.0, curve.forward(6).unwrap())).unwrap();
        assert!(book.mtm(&curve).unwrap().abs() < 1e-15);

        let shifted = ForwardCurve::new(
            2,
            1.3,
            curve.pillars.iter().map(|&(t, f)| (t, f - 0.05)).collect(),
        )
        .unwrap();
        assert!((book.mtm(&shifted).unwrap() - 0.05).abs() < 1e-12);

        let contracts = [c(0, 3, 0.4, 1.25), c(1, 3, -0.1, 1.33), c(1, 14, 0.7, 1.45)];
        let mut book = HedgeBook::default();
        book.add_contracts(contracts).unwrap();
        let oracle: f64 = contracts
            .iter()
            .map(|k| k.nominal * (k.rate - curve.forward(k.expiry_month - 2).unwrap()))
            .sum();
        assert!((book.mtm(&curve).unwrap() - oracle).abs() < 1e-14);

        let short = ForwardCurve::new(2, 1.3, vec![(6, 1.35)]).unwrap();
        assert!(matches!(book.mtm(&short), Err(Error::TenorOutOfRange { .. })));
    }

    #[test]
    fn csv_snapshot() {
        let mut book = HedgeBook::default();
        book.add_contract(c(0, 3, 0.5, 1.25)).unwrap();
        let mut out = Vec::new();
        book.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "trade_month,expiry_month,nominal,rate\n0,3,0.5,1.25\n"
        );
    }
}
