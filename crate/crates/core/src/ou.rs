//! Ornstein-Uhlenbeck spot dynamics.
//!
//! `dS = k (theta - S) dt + nu dB`, with spot quoted as foreign currency per
//! unit of domestic currency. Time is measured in years; the rest of the crate
//! works on an integer month grid and converts with [`months_to_years`].
//!
//! Simulation uses the exact Gaussian transition rather than an Euler step, so
//! [`calibrate`] applied to simulated data recovers the generating parameters
//! without discretisation bias.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Year fraction of one month on the monthly grid.
pub const MONTH: f64 = 1.0 / 12.0;

pub fn months_to_years(months: u32) -> f64 {
    months as f64 / 12.0
}

/// Parameters of the mean-reverting spot process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuParams {
    /// Mean-reversion speed, per year.
    pub k: f64,
    /// Long-run mean of the spot rate.
    pub theta: f64,
    /// Volatility, per square-root year.
    pub nu: f64,
}

impl OuParams {
    pub fn new(k: f64, theta: f64, nu: f64) -> Result<Self> {
        let params = Self { k, theta, nu };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::invalid(format!("k must be positive, got {}", self.k)));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::invalid(format!(
                "theta must be positive, got {}",
                self.theta
            )));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::invalid(format!("nu must be positive, got {}", self.nu)));
        }
        Ok(())
    }

    /// `E[S_{t+dt} | S_t = spot]`.
    pub fn conditional_mean(&self, spot: f64, dt: f64) -> f64 {
        let decay = (-self.k * dt).exp();
        spot * decay + self.theta * (1.0 - decay)
    }

    /// `Var[S_{t+dt} | S_t]`, independent of the starting spot.
    pub fn conditional_var(&self, dt: f64) -> f64 {
        self.stationary_var() * -(-2.0 * self.k * dt).exp_m1()
    }

    pub fn conditional_std(&self, dt: f64) -> f64 {
        self.conditional_var(dt).sqrt()
    }

    /// Limit of the conditional variance as the horizon grows, `nu^2 / 2k`.
    pub fn stationary_var(&self) -> f64 {
        self.nu * self.nu / (2.0 * self.k)
    }

    /// One exact transition over `dt` years driven by the standard normal draw `z`.
    pub fn step(&self, spot: f64, dt: f64, z: f64) -> f64 {
        self.conditional_mean(spot, dt) + self.conditional_std(dt) * z
    }
}

/// An equally spaced history of spot observations.
#[derive(Debug, Clone, PartialEq)]
pub struct SpotSeries {
    pub start_month: u32,
    pub values: Vec<f64>,
    pub step_years: f64,
}

impl SpotSeries {
    /// Monthly series starting at `start_month`.
    pub fn monthly(start_month: u32, values: Vec<f64>) -> Result<Self> {
        let series = Self {
            start_month,
            values,
            step_years: MONTH,
        };
        series.validate()?;
        Ok(series)
    }

    pub fn validate(&self) -> Result<()> {
        if self.step_years.is_nan() || self.step_years <= 0.0 {
            return Err(Error::invalid("step_years must be positive"));
        }
        if let Some((i, v)) = self
            .values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::invalid(format!(
                "spot observation {i} must be positive, got {v}"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end_month(&self) -> u32 {
        self.start_month + self.values.len().saturating_sub(1) as u32
    }

    /// Spot at an absolute month index, if covered.
    pub fn at(&self, month: u32) -> Option<f64> {
        month
            .checked_sub(self.start_month)
            .and_then(|i| self.values.get(i as usize).copied())
    }

    /// Reciprocal quotation of the same history.
    pub fn inverted(&self) -> Self {
        Self {
            start_month: self.start_month,
            values: self.values.iter().map(|v| 1.0 / v).collect(),
            step_years: self.step_years,
        }
    }
}

/// Simulated spot paths, row-major with `n_months + 1` columns (column 0 is the start).
#[derive(Debug, Clone, PartialEq)]
pub struct PathMatrix {
    n_paths: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl PathMatrix {
    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_months(&self) -> usize {
        self.n_cols - 1
    }

    pub fn path(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_cols)
    }

    /// Cross-section of all paths at one month.
    pub fn column(&self, month: usize) -> Vec<f64> {
        self.paths().map(|p| p[month]).collect()
    }
}

/// Random stream for one path. Streams depend only on `(seed, path)`, so
/// adding paths never perturbs existing ones.
pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// Fills `out` with one monthly path starting at `s0` (`out[0] = s0`).
pub fn simulate_path_into(params: &OuParams, s0: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let decay = (-params.k * MONTH).exp();
    let sd = params.conditional_std(MONTH);
    let mut s = s0;
    if let Some(first) = out.first_mut() {
        *first = s0;
    }
    for slot in out.iter_mut().skip(1) {
        let z: f64 = StandardNormal.sample(rng);
        s = s * decay + params.theta * (1.0 - decay) + sd * z;
        *slot = s;
    }
}

pub fn simulate_path(params: &OuParams, s0: f64, n_months: usize, seed: u64, path: u64) -> Vec<f64> {
    let mut out = vec![0.0; n_months + 1];
    simulate_path_into(params, s0, &mut path_rng(seed, path), &mut out);
    out
}

/// Monte Carlo paths of the monthly spot process, deterministic in `seed`.
pub fn simulate_paths(
    params: &OuParams,
    s0: f64,
    n_paths: usize,
    n_months: usize,
    seed: u64,
) -> Result<PathMatrix> {
    params.validate()?;
    if n_paths == 0 || n_months == 0 {
        return Err(Error::invalid("n_paths and n_months must be at least 1"));
    }
    let n_cols = n_months + 1;
    let mut data = vec![0.0; n_paths * n_cols];
    data.par_chunks_mut(n_cols)
        .enumerate()
        .for_each(|(i, row)| simulate_path_into(params, s0, &mut path_rng(seed, i as u64), row));
    Ok(PathMatrix {
        n_paths,
        n_cols,
        data,
    })
}

/// Fits the process to a history by least squares on the exact AR(1) form
/// `S_{t+h} = c + b S_t + e`, mapped back with `k = -ln b / h`,
/// `theta = c / (1 - b)` and `nu = sd(e) sqrt(2k / (1 - b^2))`.
pub fn calibrate(series: &SpotSeries) -> Result<OuParams> {
    series.validate()?;
    let n_obs = series.values.len();
    if n_obs < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: n_obs,
        });
    }
    let x = &series.values[..n_obs - 1];
    let y = &series.values[1..];
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let (sxx, sxy) = x
        .iter()
        .zip(y)
        .fold((0.0, 0.0), |(sxx, sxy), (xi, yi)| {
            let dx = xi - mean_x;
            (sxx + dx * dx, sxy + dx * (yi - mean_y))
        });
    if sxx <= n * (16.0 * f64::EPSILON * mean_x.abs()).powi(2) {
        return Err(Error::DegenerateSeries("spot series has zero variance".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let e = yi - intercept - slope * xi;
            e * e
        })
        .sum();
    let resid_var = rss / n;
    if !(slope > 0.0 && slope < 1.0) {
        return Err(Error::NonMeanReverting { slope });
    }
    // Exact recurrences leave only rounding noise in the residuals.
    if resid_var <= (16.0 * f64::EPSILON * mean_y.abs()).powi(2) {
        return Err(Error::DegenerateSeries("residual variance is zero".into()));
    }
    let h = series.step_years;
    let k = -slope.ln() / h;
    let theta = intercept / (1.0 - slope);
    let nu = resid_var.sqrt() * (2.0 * k / (1.0 - slope * slope)).sqrt();
    OuParams::new(k, theta, nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> OuParams {
        OuParams::new(0.4, 4.0 / 3.0, 0.2).unwrap()
    }

    #[test]
    fn mean_fixed_point_and_zero_horizon() {
        let p = base();
        assert!((p.conditional_mean(4.0 / 3.0, 1.0) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.conditional_mean(1.7, 0.0), 1.7);
    }

    #[test]
    fn mean_closed_form() {
        let p = base();
        let expected = 2.0 * (-0.4f64).exp() + (4.0 / 3.0) * (1.0 - (-0.4f64).exp());
        assert!((p.conditional_mean(2.0, 1.0) - expected).abs() < 1e-15);
        assert!((expected - 1.78021).abs() < 1e-5);
    }

    #[test]
    fn variance_limits() {
        let p = base();
        assert_eq!(p.conditional_var(0.0), 0.0);
        assert!((p.conditional_var(1e6) - 0.05).abs() < 1e-15);
        assert!((p.conditional_var(1.0) - 0.0275336).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(OuParams::new(0.0, 1.0, 0.1).is_err());
        assert!(OuParams::new(-0.1, 1.0, 0.1).is_err());
        assert!(OuParams::new(0.4, 0.0, 0.1).is_err());
        assert!(OuParams::new(0.4, 1.0, 0.0).is_err());
    }

    #[test]
    fn zero_vol_paths_stay_at_theta() {
        let p = OuParams::new(0.4, 4.0 / 3.0, 1e-300).unwrap();
        let paths = simulate_paths(&p, 4.0 / 3.0, 5, 24, 7).unwrap();
        for path in paths.paths() {
            assert!(path.iter().all(|s| (s - 4.0 / 3.0).abs() < 1e-12));
        }
    }

    #[test]
    fn paths_reproducible_and_prefix_stable() {
        let p = base();
        let a = simulate_paths(&p, 1.2, 8, 12, 99).unwrap();
        let b = simulate_paths(&p, 1.2, 16, 12, 99).unwrap();
        assert_eq!(a, simulate_paths(&p, 1.2, 8, 12, 99).unwrap());
        for i in 0..8 {
            assert_eq!(a.path(i), b.path(i));
        }
        assert_eq!(a.path(3), simulate_path(&p, 1.2, 12, 99, 3).as_slice());
    }

    #[test]
    fn simulate_rejects_empty_shapes() {
        assert!(simulate_paths(&base(), 1.0, 0, 12, 1).is_err());
        assert!(simulate_paths(&base(), 1.0, 3, 0, 1).is_err());
    }

    #[test]
    fn calibrate_errors() {
        let flat = SpotSeries::monthly(0, vec![1.3; 50]).unwrap();
        assert!(matches!(calibrate(&flat), Err(Error::DegenerateSeries(_))));

        let short = SpotSeries::monthly(0, vec![1.3, 1.4]).unwrap();
        assert!(matches!(calibrate(&short), Err(Error::InsufficientData { .. })));

        // A trending series has an AR(1) slope above one.
        let trend: Vec<f64> = (0..60).map(|i| 1.0 * 1.02f64.powi(i)).collect();
        let trend = SpotSeries::monthly(0, trend).unwrap();
        assert!(matches!(calibrate(&trend), Err(Error::NonMeanReverting { .. })));

        // Perfect AR(1) with no noise.
        let exact: Vec<f64> = (0..40).map(|i| 1.0 + 0.5 * 0.9f64.powi(i)).collect();
        let exact = SpotSeries::monthly(0, exact).unwrap();
        assert!(matches!(calibrate(&exact), Err(Error::DegenerateSeries(_))));
    }

    #[test]
    fn series_rejects_non_positive() {
        assert!(SpotSeries::monthly(0, vec![1.0, -1.0, 1.0]).is_err());
        let s = SpotSeries::monthly(10, vec![2.0, 4.0]).unwrap();
        assert_eq!(s.at(11), Some(4.0));
        assert_eq!(s.at(9), None);
        assert_eq!(s.inverted().values, vec![0.5, 0.25]);
    }
}
