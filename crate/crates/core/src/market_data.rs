//! Forward curves, transaction-cost curves and spot-to-forward ratio tables,
//! plus the CSV formats they are loaded from.
//!
//! All curves are keyed by whole-month tenors and interpolate linearly between
//! pillars. Below the first pillar a tenor-0 anchor is used: spot for forward
//! curves, the first pillar's cost for cost curves.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ou::{OuParams, SpotSeries};

/// A `(tenor_months, value)` pillar.
pub type Pillar = (u32, f64);

fn check_pillars(pillars: &[Pillar], what: &str, allow_zero_value: bool) -> Result<()> {
    if pillars.is_empty() {
        return Err(Error::invalid(format!("{what}: no pillars")));
    }
    let mut prev = 0;
    for &(tenor, value) in pillars {
        if tenor <= prev {
            return Err(Error::invalid(format!(
                "{what}: pillar tenors must be strictly increasing and positive (got {tenor} after {prev})"
            )));
        }
        let ok = if allow_zero_value { value >= 0.0 } else { value > 0.0 };
        if !(ok && value.is_finite()) {
            return Err(Error::invalid(format!("{what}: bad value {value} at tenor {tenor}")));
        }
        prev = tenor;
    }
    Ok(())
}

/// Linear interpolation over `(0, anchor)` followed by `pillars`.
fn interp_anchored(anchor: f64, pillars: &[Pillar], tenor: u32) -> f64 {
    let idx = pillars.partition_point(|&(t, _)| t < tenor);
    if let Some(&(t, v)) = pillars.get(idx) {
        if t == tenor {
            return v;
        }
    }
    let (t0, v0) = if idx == 0 { (0, anchor) } else { pillars[idx - 1] };
    let (t1, v1) = pillars[idx];
    v0 + (v1 - v0) * (tenor - t0) as f64 / (t1 - t0) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardCurve {
    pub as_of_month: u32,
    pub spot: f64,
    pub pillars: Vec<Pillar>,
}

impl ForwardCurve {
    pub fn new(as_of_month: u32, spot: f64, pillars: Vec<Pillar>) -> Result<Self> {
        if !(spot > 0.0 && spot.is_finite()) {
            return Err(Error::invalid(format!("forward curve spot must be positive, got {spot}")));
        }
        check_pillars(&pillars, "forward curve", false)?;
        Ok(Self {
            as_of_month,
            spot,
            pillars,
        })
    }

    /// Curve with a forward at every monthly tenor `1..=max_tenor` given by `f(tenor)`.
    pub fn from_fn(
        as_of_month: u32,
        spot: f64,
        max_tenor: u32,
        f: impl Fn(u32) -> f64,
    ) -> Result<Self> {
        Self::new(as_of_month, spot, (1..=max_tenor).map(|t| (t, f(t))).collect())
    }

    /// Every forward equal to spot.
    pub fn flat(as_of_month: u32, spot: f64, max_tenor: u32) -> Result<Self> {
        Self::from_fn(as_of_month, spot, max_tenor, |_| spot)
    }

    /// Forwards struck at the model's expected spot, `F_T = E[S_T]`.
    pub fn expected_spot(as_of_month: u32, spot: f64, max_tenor: u32, params: &OuParams) -> Result<Self> {
        Self::from_fn(as_of_month, spot, max_tenor, |t| {
            params.conditional_mean(spot, crate::ou::months_to_years(t))
        })
    }

    pub fn max_tenor(&self) -> u32 {
        self.pillars.last().map_or(0, |p| p.0)
    }

    pub fn forward(&self, tenor_months: u32) -> Result<f64> {
        interp_forward(self, tenor_months)
    }
}

/// Forward rate at `tenor_months`, interpolated linearly between pillars with
/// spot as the tenor-0 anchor.
pub fn interp_forward(curve: &ForwardCurve, tenor_months: u32) -> Result<f64> {
    let max = curve.max_tenor();
    if tenor_months > max {
        return Err(Error::TenorOutOfRange {
            tenor: tenor_months,
            max,
        });
    }
    Ok(interp_anchored(curve.spot, &curve.pillars, tenor_months))
}

/// Annualised proportional transaction costs, stored as non-negative magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostCurve {
    pub pillars: Vec<Pillar>,
}

impl CostCurve {
    pub fn new(pillars: Vec<Pillar>) -> Result<Self> {
        check_pillars(&pillars, "cost curve", true)?;
        Ok(Self { pillars })
    }

    pub fn zero() -> Self {
        Self {
            pillars: vec![(1, 0.0)],
        }
    }

    /// Dealer cost schedule for 3M, 1Y, 2Y, 3Y, 5Y and 7Y forwards.
    pub fn standard() -> Self {
        Self {
            pillars: vec![
                (3, 0.0001),
                (12, 0.0002),
                (24, 0.0004),
                (36, 0.0005),
                (60, 0.0008),
                (84, 0.0010),
            ],
        }
    }

    pub fn cost(&self, tenor_months: u32) -> f64 {
        interp_cost(self, tenor_months)
    }
}

/// Cost at `tenor_months`: flat at the first pillar below it, linear between
/// pillars and flat at the last pillar beyond it.
pub fn interp_cost(costs: &CostCurve, tenor_months: u32) -> f64 {
    let first = costs.pillars[0].1;
    match costs.pillars.last() {
        Some(&(t, v)) if tenor_months >= t => v,
        _ => interp_anchored(first, &costs.pillars, tenor_months),
    }
}

/// Mean spot-to-forward ratio per pillar tenor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub pillars: Vec<Pillar>,
}

impl RatioTable {
    pub fn new(pillars: Vec<Pillar>) -> Result<Self> {
        check_pillars(&pillars, "ratio table", false)?;
        Ok(Self { pillars })
    }

    /// Ratio of one at every pillar up to `max_tenor`: forwards equal spot.
    pub fn flat(max_tenor: u32) -> Self {
        Self {
            pillars: vec![(max_tenor.max(1), 1.0)],
        }
    }

    /// Reference ratio table used by the synthetic fixtures: forwards at a
    /// premium to spot, with annualised forward points falling from about
    /// 2.5% at one month to about 1.5% at ten years.
    pub fn reference() -> Self {
        const TENORS: [u32; 13] = [1, 2, 3, 6, 9, 12, 18, 24, 36, 48, 60, 84, 120];
        let pillars = TENORS
            .iter()
            .map(|&t| {
                let carry = 0.015 + 0.01 * (-(t as f64) / 24.0).exp();
                (t, 1.0 / (1.0 + carry * t as f64 / 12.0))
            })
            .collect();
        Self { pillars }
    }

    pub fn max_tenor(&self) -> u32 {
        self.pillars.last().map_or(0, |p| p.0)
    }
}

/// Per-pillar arithmetic mean of `spot / forward` over a curve history.
pub fn ratio_table_from_history(curves: &[ForwardCurve]) -> Result<RatioTable> {
    let first = curves.first().ok_or(Error::EmptyHistory)?;
    let tenors: Vec<u32> = first.pillars.iter().map(|p| p.0).collect();
    let mut sums = vec![0.0; tenors.len()];
    for curve in curves {
        if curve.pillars.len() != tenors.len()
            || curve.pillars.iter().zip(&tenors).any(|(p, t)| p.0 != *t)
        {
            return Err(Error::invalid(format!(
                "curve for month {} does not share the pillar tenors of the first curve",
                format_month(curve.as_of_month)
            )));
        }
        for (sum, &(_, fwd)) in sums.iter_mut().zip(&curve.pillars) {
            *sum += curve.spot / fwd;
        }
    }
    let n = curves.len() as f64;
    RatioTable::new(tenors.into_iter().zip(sums).map(|(t, s)| (t, s / n)).collect())
}

/// Forward curve implied by a spot level and a fixed ratio table,
/// `F(tenor) = spot / ratio(tenor)` at each ratio pillar.
pub fn synth_curve(spot: f64, ratios: &RatioTable, as_of: u32) -> Result<ForwardCurve> {
    ForwardCurve::new(
        as_of,
        spot,
        ratios.pillars.iter().map(|&(t, r)| (t, spot / r)).collect(),
    )
}

/// Spot path plus fixed-ratio forward curves, for in-sample studies on
/// synthetic data.
pub fn synthetic_history(
    params: &OuParams,
    s0: f64,
    n_months: usize,
    start_month: u32,
    ratios: &RatioTable,
    seed: u64,
) -> Result<(SpotSeries, Vec<ForwardCurve>)> {
    let path = crate::ou::simulate_path(params, s0, n_months, seed, 0);
    let curves = path
        .iter()
        .enumerate()
        .map(|(i, &s)| synth_curve(s, ratios, start_month + i as u32))
        .collect::<Result<Vec<_>>>()?;
    Ok((SpotSeries::monthly(start_month, path)?, curves))
}

// ---------------------------------------------------------------------------
// CSV formats

/// How rates in an input file are quoted relative to the internal
/// foreign-per-domestic convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quotation {
    #[default]
    ForeignPerDomestic,
    /// Reciprocal quotation; inverted once on load.
    DomesticPerForeign,
}

impl Quotation {
    fn apply(self, rate: f64) -> f64 {
        match self {
            Quotation::ForeignPerDomestic => rate,
            Quotation::DomesticPerForeign => 1.0 / rate,
        }
    }
}

/// Month index for `YYYY-MM` (`year * 12 + month - 1`).
pub fn parse_month(s: &str) -> Option<u32> {
    let (y, m) = s.trim().split_once('-')?;
    if y.len() != 4 || m.len() != 2 {
        return None;
    }
    let y: u32 = y.parse().ok()?;
    let m: u32 = m.parse().ok()?;
    (1..=12).contains(&m).then(|| y * 12 + m - 1)
}

pub fn format_month(month: u32) -> String {
    format!("{:04}-{:02}", month / 12, month % 12 + 1)
}

struct CsvRows<R: Read> {
    source: String,
    reader: csv::Reader<R>,
}

impl<R: Read> CsvRows<R> {
    fn new(reader: R, source: &str, header: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let found = reader.headers().map_err(|e| Error::Parse {
            path: source.to_string(),
            line: 1,
            message: e.to_string(),
        })?;
        if found.iter().collect::<Vec<_>>() != header {
            return Err(Error::Parse {
                path: source.to_string(),
                line: 1,
                message: format!("expected header `{}`", header.join(",")),
            });
        }
        Ok(Self {
            source: source.to_string(),
            reader,
        })
    }

    fn err(&self, line: u64, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.source.clone(),
            line,
            message: message.into(),
        }
    }

    /// Yields `(line, fields)` for every data row.
    fn rows(&mut self) -> Result<Vec<(u64, Vec<String>)>> {
        let mut out = Vec::new();
        for record in self.reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::Parse {
                    path: self.source.clone(),
                    line,
                    message: e.to_string(),
                }
            })?;
            let line = record.position().map_or(0, |p| p.line());
            out.push((line, record.iter().map(str::to_string).collect()));
        }
        Ok(out)
    }

    fn month(&self, line: u64, s: &str) -> Result<u32> {
        parse_month(s).ok_or_else(|| self.err(line, format!("bad month `{s}`, expected YYYY-MM")))
    }

    fn positive(&self, line: u64, s: &str, what: &str) -> Result<f64> {
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(self.err(line, format!("{what} must be a positive number, got `{s}`"))),
        }
    }

    fn tenor(&self, line: u64, s: &str) -> Result<u32> {
        match s.parse::<u32>() {
            Ok(t) if t > 0 => Ok(t),
            _ => Err(self.err(line, format!("tenor_months must be a positive integer, got `{s}`"))),
        }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })
}

/// Reads `month,spot` rows into a consecutive monthly series.
pub fn read_spot_csv<R: Read>(reader: R, source: &str, quotation: Quotation) -> Result<SpotSeries> {
    let mut csv = CsvRows::new(reader, source, &["month", "spot"])?;
    let mut start = None;
    let mut values = Vec::new();
    for (line, row) in csv.rows()? {
        let month = csv.month(line, &row[0])?;
        let spot = csv.positive(line, &row[1], "spot")?;
        match start {
            None => start = Some(month),
            Some(s) => {
                let expected = s + values.len() as u32;
                if month < expected {
                    return Err(csv.err(line, "months must be strictly increasing"));
                }
                if month > expected {
                    return Err(csv.err(
                        line,
                        format!("gap in monthly series: missing {}", format_month(expected)),
                    ));
                }
            }
        }
        values.push(quotation.apply(spot));
    }
    let start = start.ok_or_else(|| csv.err(1, "no data rows"))?;
    SpotSeries::monthly(start, values)
}

pub fn load_spot_csv(path: &Path, quotation: Quotation) -> Result<SpotSeries> {
    read_spot_csv(open(path)?, &path.display().to_string(), quotation)
}

/// Reads long-format `month,tenor_months,forward` rows. Each curve takes its
/// spot from `spots`.
pub fn read_forward_csv<R: Read>(
    reader: R,
    source: &str,
    quotation: Quotation,
    spots: &SpotSeries,
) -> Result<Vec<ForwardCurve>> {
    let mut csv = CsvRows::new(reader, source, &["month", "tenor_months", "forward"])?;
    let mut curves: Vec<(u64, u32, Vec<Pillar>)> = Vec::new();
    for (line, row) in csv.rows()? {
        let month = csv.month(line, &row[0])?;
        let tenor = csv.tenor(line, &row[1])?;
        let fwd = quotation.apply(csv.positive(line, &row[2], "forward")?);
        match curves.last_mut() {
            Some((_, m, pillars)) if *m == month => {
                if tenor <= pillars.last().map_or(0, |p| p.0) {
                    return Err(csv.err(line, "tenors must be strictly increasing within a month"));
                }
                pillars.push((tenor, fwd));
            }
            Some((_, m, _)) if *m > month => {
                return Err(csv.err(line, "months must be sorted ascending"));
            }
            _ => curves.push((line, month, vec![(tenor, fwd)])),
        }
    }
    curves
        .into_iter()
        .map(|(line, month, pillars)| {
            let spot = spots.at(month).ok_or_else(|| {
                csv.err(line, format!("no spot observation for {}", format_month(month)))
            })?;
            ForwardCurve::new(month, spot, pillars).map_err(|e| csv.err(line, e.to_string()))
        })
        .collect()
}

pub fn load_forward_csv(path: &Path, quotation: Quotation, spots: &SpotSeries) -> Result<Vec<ForwardCurve>> {
    read_forward_csv(open(path)?, &path.display().to_string(), quotation, spots)
}

/// Reads `tenor_months,annualized_cost` rows (decimal costs, 0.0002 = 0.02%).
/// Negative entries are read as magnitudes.
pub fn read_cost_csv<R: Read>(reader: R, source: &str) -> Result<CostCurve> {
    let mut csv = CsvRows::new(reader, source, &["tenor_months", "annualized_cost"])?;
    let mut pillars: Vec<Pillar> = Vec::new();
    for (line, row) in csv.rows()? {
        let tenor = csv.tenor(line, &row[0])?;
        let cost = match row[1].parse::<f64>() {
            Ok(c) if c.is_finite() => c.abs(),
            _ => return Err(csv.err(line, format!("bad cost `{}`", row[1]))),
        };
        if tenor <= pillars.last().map_or(0, |p| p.0) {
            return Err(csv.err(line, "tenors must be strictly increasing"));
        }
        pillars.push((tenor, cost));
    }
    if pillars.is_empty() {
        return Err(csv.err(1, "no data rows"));
    }
    CostCurve::new(pillars)
}

pub fn load_cost_csv(path: &Path) -> Result<CostCurve> {
    read_cost_csv(open(path)?, &path.display().to_string())
}

pub fn write_spot_csv<W: Write>(out: W, series: &SpotSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["month", "spot"])?;
    for (i, v) in series.values.iter().enumerate() {
        w.write_record([format_month(series.start_month + i as u32), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_forward_csv<W: Write>(out: W, curves: &[ForwardCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["month", "tenor_months", "forward"])?;
    for c in curves {
        for &(t, f) in &c.pillars {
            w.write_record([format_month(c.as_of_month), t.to_string(), f.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_cost_csv<W: Write>(out: W, costs: &CostCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tenor_months", "annualized_cost"])?;
    for &(t, c) in &costs.pillars {
        w.write_record([t.to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Curves indexed by as-of month.
pub fn index_curves(curves: Vec<ForwardCurve>) -> BTreeMap<u32, ForwardCurve> {
    curves.into_iter().map(|c| (c.as_of_month, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(pillars: Vec<Pillar>) -> ForwardCurve {
        ForwardCurve::new(0, 1.0, pillars).unwrap()
    }

    #[test]
    fn pillar_hit_and_midpoint() {
        let c = curve(vec![(12, 0.74)]);
        assert_eq!(interp_forward(&c, 12).unwrap(), 0.74);
        let c = curve(vec![(12, 0.70), (24, 0.80)]);
        assert!((interp_forward(&c, 18).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn interpolation_matches_two_point_line() {
        let (a, b) = (0.81, 0.93);
        let c = curve(vec![(3, a), (12, b)]);
        // Line through (3, a) and (12, b), solved independently.
        let slope = (b - a) / 9.0;
        let icept = a - slope * 3.0;
        assert!((interp_forward(&c, 9).unwrap() - (icept + slope * 9.0)).abs() < 1e-14);
        assert!((interp_forward(&c, 9).unwrap() - (a + (b - a) * 6.0 / 9.0)).abs() < 1e-14);
    }

    #[test]
    fn below_first_pillar_uses_spot_anchor() {
        let c = ForwardCurve::new(0, 1.0, vec![(4, 1.2)]).unwrap();
        assert_eq!(interp_forward(&c, 0).unwrap(), 1.0);
        assert!((interp_forward(&c, 2).unwrap() - 1.1).abs() < 1e-15);
    }

    #[test]
    fn beyond_last_pillar_is_an_error() {
        let c = curve(vec![(12, 0.7), (24, 0.8)]);
        assert!(matches!(
            interp_forward(&c, 25),
            Err(Error::TenorOutOfRange { tenor: 25, max: 24 })
        ));
    }

    #[test]
    fn standard_costs() {
        let c = CostCurve::standard();
        assert!((c.cost(12) - 0.0002).abs() < 1e-15);
        assert!((c.cost(48) - 0.00065).abs() < 1e-15);
        assert!((c.cost(84) - 0.0010).abs() < 1e-15);
        assert_eq!(c.cost(1), 0.0001);
        assert_eq!(c.cost(120), 0.0010);
    }

    #[test]
    fn invalid_curves_rejected() {
        assert!(ForwardCurve::new(0, 1.0, vec![(12, 0.7), (6, 0.8)]).is_err());
        assert!(ForwardCurve::new(0, 1.0, vec![(0, 0.7)]).is_err());
        assert!(ForwardCurve::new(0, 1.0, vec![(3, -0.7)]).is_err());
        assert!(ForwardCurve::new(0, 0.0, vec![(3, 0.7)]).is_err());
        assert!(CostCurve::new(vec![(3, -0.1)]).is_err());
        assert!(RatioTable::new(vec![]).is_err());
    }

    #[test]
    fn ratio_history_mean() {
        let flat = ForwardCurve::new(0, 1.3, vec![(1, 1.3), (12, 1.3)]).unwrap();
        let r = ratio_table_from_history(std::slice::from_ref(&flat)).unwrap();
        assert_eq!(r.pillars, vec![(1, 1.0), (12, 1.0)]);

        let a = ForwardCurve::new(0, 0.9, vec![(6, 1.0)]).unwrap();
        let b = ForwardCurve::new(1, 1.1, vec![(6, 1.0)]).unwrap();
        let r = ratio_table_from_history(&[a, b]).unwrap();
        assert!((r.pillars[0].1 - 1.0).abs() < 1e-15);

        assert!(matches!(ratio_table_from_history(&[]), Err(Error::EmptyHistory)));
    }

    #[test]
    fn synth_curve_divides_spot() {
        let flat = synth_curve(1.4, &RatioTable::flat(12), 3).unwrap();
        assert_eq!(flat.forward(7).unwrap(), 1.4);
        let r = RatioTable::new(vec![(12, 1.05)]).unwrap();
        let c = synth_curve(1.40, &r, 0).unwrap();
        assert!((c.forward(12).unwrap() - 1.3333333333333333).abs() < 1e-12);
    }

    #[test]
    fn synth_then_history_round_trips() {
        let r = RatioTable::reference();
        let c = synth_curve(1.37, &r, 5).unwrap();
        let back = ratio_table_from_history(&[c]).unwrap();
        for (a, b) in r.pillars.iter().zip(&back.pillars) {
            assert_eq!(a.0, b.0);
            assert!((a.1 - b.1).abs() < 1e-15);
        }
    }

    #[test]
    fn month_codec() {
        assert_eq!(parse_month("1993-11"), Some(1993 * 12 + 10));
        assert_eq!(format_month(1993 * 12 + 10), "1993-11");
        assert_eq!(parse_month("1993-13"), None);
        assert_eq!(parse_month("93-11"), None);
    }

    #[test]
    fn spot_csv_parsing() {
        let ok = "month,spot\n2000-01,0.5\n2000-02,0.25\n";
        let s = read_spot_csv(ok.as_bytes(), "t", Quotation::DomesticPerForeign).unwrap();
        assert_eq!(s.values, vec![2.0, 4.0]);
        assert_eq!(s.start_month, 2000 * 12);

        let bad_header = "date,spot\n2000-01,0.5\n";
        assert!(matches!(
            read_spot_csv(bad_header.as_bytes(), "t", Quotation::default()),
            Err(Error::Parse { line: 1, .. })
        ));
        let negative = "month,spot\n2000-01,0.5\n2000-02,-1\n";
        assert!(matches!(
            read_spot_csv(negative.as_bytes(), "t", Quotation::default()),
            Err(Error::Parse { line: 3, .. })
        ));
        let unsorted = "month,spot\n2000-02,0.5\n2000-01,0.6\n";
        assert!(matches!(
            read_spot_csv(unsorted.as_bytes(), "t", Quotation::default()),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn forward_and_cost_csv_parsing() {
        let spots = SpotSeries::monthly(2000 * 12, vec![1.0, 1.1]).unwrap();
        let ok = "month,tenor_months,forward\n2000-01,1,1.01\n2000-01,12,1.05\n2000-02,1,1.11\n";
        let curves = read_forward_csv(ok.as_bytes(), "f", Quotation::default(), &spots).unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[1].spot, 1.1);
        assert_eq!(curves[0].pillars, vec![(1, 1.01), (12, 1.05)]);

        let unsorted = "month,tenor_months,forward\n2000-01,12,1.01\n2000-01,3,1.05\n";
        assert!(matches!(
            read_forward_csv(unsorted.as_bytes(), "f", Quotation::default(), &spots),
            Err(Error::Parse { line: 3, .. })
        ));

        let costs = "tenor_months,annualized_cost\n3,-0.0001\n12,0.0002\n";
        let c = read_cost_csv(costs.as_bytes(), "c").unwrap();
        assert_eq!(c.pillars, vec![(3, 0.0001), (12, 0.0002)]);
        let unsorted = "tenor_months,annualized_cost\n12,0.0001\n3,0.0002\n";
        assert!(matches!(
            read_cost_csv(unsorted.as_bytes(), "c"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn csv_writers_round_trip() {
        let r = RatioTable::reference();
        let params = OuParams::new(0.3, 1.3, 0.15).unwrap();
        let (spots, curves) = synthetic_history(&params, 1.3, 6, 24000, &r, 3).unwrap();
        let mut buf = Vec::new();
        write_spot_csv(&mut buf, &spots).unwrap();
        let back = read_spot_csv(buf.as_slice(), "s", Quotation::default()).unwrap();
        assert_eq!(back, spots);
        let mut buf = Vec::new();
        write_forward_csv(&mut buf, &curves).unwrap();
        let back = read_forward_csv(buf.as_slice(), "f", Quotation::default(), &spots).unwrap();
        assert_eq!(back, curves);
    }
}
