//! Conditional cash-flow moments and Cash-Flow-at-Risk per expiry bucket.
//!
//! Under the OU model the cash flow of bucket `T` seen from month `t` is
//! Gaussian with mean `sum a (F - E_t[S_T])` and standard deviation
//! `|sum a| sd_t(S_T)`. The `p`-CFaR is its `(1 - p)` quantile of the
//! outflow, `-mean - sd * Phi^-1(p)`.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::book::HedgeBook;
use crate::error::{Error, Result};
use crate::market_data::ForwardCurve;
use crate::ou::{months_to_years, OuParams};

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile: Acklam's rational approximation followed by one
/// Halley step against the erfc-based CDF.
pub fn inv_norm_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DomainError(p));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - P_LOW {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    // Halley refinement.
    let e = norm_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    Ok(x - u / (1.0 + 0.5 * x * u))
}

/// Liquidity constraint and position bounds for the allocator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiquidityConfig {
    /// Liquidity budget `L`, domestic currency per unit of foreign nominal.
    pub budget: f64,
    /// Tail probability `p` of the CFaR.
    pub tail_p: f64,
    /// Lower bound on a single new position (repair trades).
    pub a_lower: f64,
    /// Upper bound on a single new position.
    pub a_upper: f64,
    pub max_tenor_months: u32,
}

impl Default for LiquidityConfig {
    fn default() -> Self {
        Self {
            budget: 0.01,
            tail_p: 0.01,
            a_lower: -1.0,
            a_upper: 1.0,
            max_tenor_months: 120,
        }
    }
}

impl LiquidityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return Err(Error::invalid(format!("budget must be positive, got {}", self.budget)));
        }
        if !(self.tail_p > 0.0 && self.tail_p < 0.5) {
            return Err(Error::invalid(format!(
                "tail probability must lie in (0, 0.5), got {}",
                self.tail_p
            )));
        }
        if !(self.a_lower <= 0.0 && self.a_upper >= 0.0) {
            return Err(Error::invalid(format!(
                "position bounds must satisfy a_lower <= 0 <= a_upper, got [{}, {}]",
                self.a_lower, self.a_upper
            )));
        }
        if self.max_tenor_months == 0 {
            return Err(Error::invalid("max_tenor_months must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfMoments {
    pub mean: f64,
    pub stdev: f64,
}

/// Horizon-dependent pieces of the model, `E_t[S_T]` and `sd_t(S_T)`.
#[derive(Debug, Clone, Copy)]
struct Horizon {
    expected_spot: f64,
    spot_sd: f64,
}

fn horizon(params: &OuParams, now: u32, target: u32, spot: f64) -> Horizon {
    let dt = months_to_years(target - now);
    Horizon {
        expected_spot: params.conditional_mean(spot, dt),
        spot_sd: params.conditional_std(dt),
    }
}

fn moments_before(
    book: &HedgeBook,
    h: Horizon,
    target: u32,
    traded_before: u32,
) -> CfMoments {
    let sums = book.bucket_sums(target, traded_before);
    CfMoments {
        mean: sums.weighted_rate - sums.nominal * h.expected_spot,
        stdev: sums.nominal.abs() * h.spot_sd,
    }
}

/// Moments of the bucket-`target` cash flow given spot at `now`, over
/// contracts traded at or before `now`. Signed nominals net before scaling
/// the spot volatility.
pub fn cf_moments(book: &HedgeBook, params: &OuParams, now: u32, target: u32, spot: f64) -> CfMoments {
    assert!(target > now, "target month must follow the current month");
    moments_before(book, horizon(params, now, target, spot), target, now + 1)
}

/// CFaR of bucket `target` immediately before the month-`now` trades, i.e.
/// over contracts traded at or before `now - 1`.
pub fn cfar_pre(
    book: &HedgeBook,
    params: &OuParams,
    now: u32,
    target: u32,
    spot: f64,
    p: f64,
) -> Result<f64> {
    let z = inv_norm_cdf(p)?;
    assert!(target > now, "target month must follow the current month");
    let m = moments_before(book, horizon(params, now, target, spot), target, now);
    Ok(cfar_from_moments(m, z))
}

/// CFaR of the full book (trades up to and including `now`).
pub fn cfar_post(
    book: &HedgeBook,
    params: &OuParams,
    now: u32,
    target: u32,
    spot: f64,
    p: f64,
) -> Result<f64> {
    let z = inv_norm_cdf(p)?;
    Ok(cfar_from_moments(cf_moments(book, params, now, target, spot), z))
}

fn cfar_from_moments(m: CfMoments, z: f64) -> f64 {
    -m.mean - m.stdev * z
}

/// Incremental CFaR per unit of new nominal struck at `forward`,
/// `-(F - E_t[S_T]) - sd_t(S_T) Phi^-1(p)`.
pub fn unit_cfar(
    params: &OuParams,
    now: u32,
    target: u32,
    spot: f64,
    forward: f64,
    p: f64,
) -> Result<f64> {
    assert!(target > now, "target month must follow the current month");
    let z = inv_norm_cdf(p)?;
    let h = horizon(params, now, target, spot);
    Ok(-(forward - h.expected_spot) - h.spot_sd * z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BucketCfar {
    pub bucket_month: u32,
    pub tenor_months: u32,
    pub cfar_pre: f64,
    pub unit_cfar: f64,
    pub cfar_post: f64,
}

/// CFaR for every future bucket `now + 1 ..= now + max_tenor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfarProfile {
    pub as_of_month: u32,
    pub buckets: Vec<BucketCfar>,
}

impl CfarProfile {
    pub fn bucket(&self, tenor_months: u32) -> Option<&BucketCfar> {
        tenor_months
            .checked_sub(1)
            .and_then(|i| self.buckets.get(i as usize))
    }

    /// Sets post-trade CFaR to `pre + a * unit` for the given `(tenor, a)` trades;
    /// untouched buckets keep `post = pre`.
    pub fn apply_trades(&mut self, trades: impl IntoIterator<Item = (u32, f64)>) {
        for b in &mut self.buckets {
            b.cfar_post = b.cfar_pre;
        }
        for (tenor, a) in trades {
            if let Some(b) = tenor.checked_sub(1).and_then(|i| self.buckets.get_mut(i as usize)) {
                b.cfar_post = b.cfar_pre + a * b.unit_cfar;
            }
        }
    }

    pub fn max_post(&self) -> f64 {
        self.buckets.iter().map(|b| b.cfar_post).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Writes `bucket_month,cfar_pre,unit_cfar,cfar_post` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bucket_month", "cfar_pre", "unit_cfar", "cfar_post"])?;
        for b in &self.buckets {
            w.write_record([
                b.bucket_month.to_string(),
                b.cfar_pre.to_string(),
                b.unit_cfar.to_string(),
                b.cfar_post.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Pre-trade CFaR and unit CFaR for every bucket up to the maximum tenor,
/// with unit CFaR evaluated at the month's curve.
pub fn profile(
    book: &HedgeBook,
    params: &OuParams,
    config: &LiquidityConfig,
    now: u32,
    spot: f64,
    curve: &ForwardCurve,
) -> Result<CfarProfile> {
    let z = inv_norm_cdf(config.tail_p)?;
    let buckets = (1..=config.max_tenor_months)
        .map(|tenor| {
            let target = now + tenor;
            let h = horizon(params, now, target, spot);
            let pre = cfar_from_moments(moments_before(book, h, target, now), z);
            let forward = curve.forward(tenor)?;
            let unit = -(forward - h.expected_spot) - h.spot_sd * z;
            Ok(BucketCfar {
                bucket_month: target,
                tenor_months: tenor,
                cfar_pre: pre,
                unit_cfar: unit,
                cfar_post: pre,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CfarProfile {
        as_of_month: now,
        buckets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::book::ForwardContract;

    fn base() -> OuParams {
        OuParams::new(0.4, 4.0 / 3.0, 0.2).unwrap()
    }

    /// Bisection on the erfc-based CDF, independent of the rational approximation.
    fn bisect_quantile(p: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0, 40.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if norm_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn quantile_examples() {
        assert!(inv_norm_cdf(0.5).unwrap().abs() < 1e-15);
        let q = inv_norm_cdf(0.01).unwrap();
        assert!((q - bisect_quantile(0.01)).abs() < 1e-10);
        assert!((q + 2.326348).abs() < 1e-6);
        for p in [1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.7, 0.975, 0.999999] {
            let x = inv_norm_cdf(p).unwrap();
            assert!((norm_cdf(x) - p).abs() < 1e-10, "p={p}");
        }
        for p in [1e-6, 0.001, 0.01, 0.05, 0.2, 0.45] {
            let sum = inv_norm_cdf(p).unwrap() + inv_norm_cdf(1.0 - p).unwrap();
            assert!(sum.abs() < 1e-8, "symmetry p={p}");
        }
    }

    #[test]
    fn quantile_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(inv_norm_cdf(p), Err(Error::DomainError(_))));
        }
    }

    #[test]
    fn config_validation() {
        assert!(LiquidityConfig::default().validate().is_ok());
        let bad = [
            LiquidityConfig { budget: 0.0, ..Default::default() },
            LiquidityConfig { tail_p: 0.5, ..Default::default() },
            LiquidityConfig { a_lower: 0.1, ..Default::default() },
            LiquidityConfig { a_upper: -0.1, ..Default::default() },
            LiquidityConfig { max_tenor_months: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn moments_examples() {
        let p = base();
        let book = HedgeBook::default();
        let m = cf_moments(&book, &p, 0, 6, 1.3);
        assert_eq!((m.mean, m.stdev), (0.0, 0.0));

        let spot = 1.5;
        let e = p.conditional_mean(spot, 0.5);
        let sd = p.conditional_std(0.5);
        let mut book = HedgeBook::default();
        book.add_contract(ForwardContract::new(0, 6, 1.0, e).unwrap()).unwrap();
        let m = cf_moments(&book, &p, 0, 6, spot);
        assert!(m.mean.abs() < 1e-15);
        assert!((m.stdev - sd).abs() < 1e-15);

        let mut book = HedgeBook::default();
        book.add_contract(ForwardContract::new(0, 6, 1.0, 1.40).unwrap()).unwrap();
        book.add_contract(ForwardContract::new(1, 6, -1.0, 1.35).unwrap()).unwrap();
        let m = cf_moments(&book, &p, 1, 6, spot);
        assert!((m.mean - 0.05).abs() < 1e-14);
        assert_eq!(m.stdev, 0.0);
    }

    #[test]
    fn cfar_pre_examples() {
        let p = base();
        let book = HedgeBook::default();
        assert_eq!(cfar_pre(&book, &p, 0, 3, 1.3, 0.01).unwrap(), 0.0);

        let spot = 1.2;
        let e = p.conditional_mean(spot, 1.0);
        let mut book = HedgeBook::default();
        book.add_contract(ForwardContract::new(0, 12, 1.0, e).unwrap()).unwrap();
        let expected = 2.326_347_874_040_841 * p.conditional_std(1.0);
        let got = cfar_pre(&book, &p, 1, 12, spot, 0.01).unwrap();
        // At month 1 the horizon is 11 months and E uses the month-1 spot.
        let e11 = p.conditional_mean(spot, 11.0 / 12.0);
        let expected11 = -(e - e11) + 2.326_347_874_040_841 * p.conditional_std(11.0 / 12.0);
        assert!((got - expected11).abs() < 1e-10);
        // Contracts traded in the current month are excluded.
        assert_eq!(cfar_pre(&book, &p, 0, 12, spot, 0.01).unwrap(), 0.0);
        assert!((cfar_post(&book, &p, 0, 12, spot, 0.01).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn unit_cfar_examples() {
        let p = base();
        let spot = 4.0 / 3.0;
        let e = p.conditional_mean(spot, 1.0 / 12.0);
        let u = unit_cfar(&p, 0, 1, spot, e, 0.01).unwrap();
        let expected = 2.326348 * (0.05 * (1.0 - (-0.8f64 / 12.0).exp())).sqrt();
        assert!((u - expected).abs() < 1e-6);
        assert!((u - 0.13211).abs() < 1e-5);
        assert!(unit_cfar(&p, 0, 1, spot, e, 0.5).unwrap().abs() < 1e-15);
        assert!(unit_cfar(&p, 0, 1, spot, e + 1.0, 0.01).unwrap() < 0.0);
    }

    #[test]
    fn profile_matches_per_bucket_calls() {
        let p = base();
        let config = LiquidityConfig { max_tenor_months: 24, ..Default::default() };
        let spot = 1.4;
        let curve = ForwardCurve::flat(3, spot, 24).unwrap();
        let mut book = HedgeBook::default();
        for (t, e, a, f) in [(0, 5, 0.3, 1.30), (1, 8, 0.5, 1.32), (2, 8, -0.1, 1.36), (2, 11, 0.2, 1.29)] {
            book.add_contract(ForwardContract::new(t, e, a, f).unwrap()).unwrap();
        }
        let prof = profile(&book, &p, &config, 3, spot, &curve).unwrap();
        assert_eq!(prof.buckets.len(), 24);
        for b in &prof.buckets {
            let pre = cfar_pre(&book, &p, 3, b.bucket_month, spot, 0.01).unwrap();
            assert_eq!(b.cfar_pre, pre);
            let unit = unit_cfar(&p, 3, b.bucket_month, spot, spot, 0.01).unwrap();
            assert!((b.unit_cfar - unit).abs() < 1e-15);
            if b.bucket_month > 11 {
                assert_eq!(b.cfar_pre, 0.0);
            }
        }
        let empty = profile(&HedgeBook::default(), &p, &config, 3, spot, &curve).unwrap();
        assert!(empty.buckets.iter().all(|b| b.cfar_pre == 0.0));
    }

    #[test]
    fn profile_csv_header() {
        let p = base();
        let config = LiquidityConfig { max_tenor_months: 2, ..Default::default() };
        let curve = ForwardCurve::flat(0, 1.3, 2).unwrap();
        let prof = profile(&HedgeBook::default(), &p, &config, 0, 1.3, &curve).unwrap();
        let mut out = Vec::new();
        prof.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("bucket_month,cfar_pre,unit_cfar,cfar_post\n1,0,"));
        assert_eq!(text.lines().count(), 3);
    }
}
