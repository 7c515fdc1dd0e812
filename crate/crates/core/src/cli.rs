//! Command-line front end.
//!
//! Every subcommand writes its outputs into one directory together with a
//! `run_manifest.json` describing the inputs and parameters. Files are written
//! to a temporary name and renamed into place, so a failed run never leaves a
//! partial file behind. Usage errors exit with status 2, data errors with 1.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::allocator::{
    static_sensitivity, write_sensitivity_csv, CurveConvention, RankingMode, StaticScenario, SweepParam,
};
use crate::backtest::{run_backtest, write_summary_csv, StrategySpec};
use crate::cfar::LiquidityConfig;
use crate::error::{Error, Result};
use crate::market_data::{index_curves, load_cost_csv, load_forward_csv, load_spot_csv, CostCurve, Quotation, RatioTable};
use crate::ou::{calibrate, OuParams};
use crate::simulator::{run_simulation, SimulationSpec};

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "HEDGE_TENOR_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "hedge-tenor",
    version,
    about = "Stagger FX forward hedges across tenors under a Cash-Flow-at-Risk budget",
    long_about = "Stagger FX forward hedges across tenors under a Cash-Flow-at-Risk budget.\n\n\
        Units: spot and forward rates are foreign currency per unit of domestic currency; \
        nominals are in foreign currency with the hedged position normalised to 1; \
        cash flows and the liquidity budget L are in domestic currency per unit hedged; \
        tenors are whole months; k is per year and nu per square-root year."
)]
pub struct Cli {
    /// Directory for output files (created if missing).
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,

    /// Format of the main result file.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the mean-reverting spot model to a monthly spot CSV; writes calibration.{csv,json}.
    Calibrate(CalibrateArgs),
    /// One static allocation of a full unit from an empty book; writes allocation.* and cfar_profile.csv.
    Allocate(AllocateArgs),
    /// Static allocations across a parameter sweep; writes sensitivity.*.
    Sensitivity(SensitivityArgs),
    /// Monte Carlo dynamic hedging; writes simulation_monthly.csv and simulation_tenors.csv.
    Simulate(SimulateArgs),
    /// Replay strategies on spot and forward history; writes backtest_summary.* and backtest_<strategy>.csv.
    Backtest(BacktestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuotationArg {
    /// Foreign currency per unit of domestic currency (used as is).
    ForeignPerDomestic,
    /// Domestic per foreign; inverted on load.
    DomesticPerForeign,
}

impl From<QuotationArg> for Quotation {
    fn from(q: QuotationArg) -> Self {
        match q {
            QuotationArg::ForeignPerDomestic => Quotation::ForeignPerDomestic,
            QuotationArg::DomesticPerForeign => Quotation::DomesticPerForeign,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveArg {
    /// Forward equals the model's expected spot at every tenor.
    ExpectedSpot,
    /// Forward equals today's spot at every tenor.
    FlatSpot,
    /// Forward is spot divided by the built-in reference ratio table.
    ReferenceRatios,
}

impl CurveArg {
    fn convention(self) -> CurveConvention {
        match self {
            CurveArg::ExpectedSpot => CurveConvention::ExpectedSpot,
            CurveArg::FlatSpot => CurveConvention::FlatSpot,
            CurveArg::ReferenceRatios => CurveConvention::Ratios(RatioTable::reference()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankingArg {
    /// Fill from the one-month tenor outward.
    ShortestFirst,
    /// Fill by expected carry net of transaction costs, best first.
    Ranked,
}

impl From<RankingArg> for RankingMode {
    fn from(r: RankingArg) -> Self {
        match r {
            RankingArg::ShortestFirst => RankingMode::ShortestFirst,
            RankingArg::Ranked => RankingMode::Ranked,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatiosArg {
    /// Built-in spot-to-forward ratios (forwards at a premium to spot).
    Reference,
    /// Ratio one at every tenor: forwards equal spot.
    Flat,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Mean-reversion speed k, per year.
    #[arg(long, default_value_t = 0.4)]
    pub k: f64,
    /// Long-run mean theta, foreign per domestic.
    #[arg(long, default_value_t = 1.0 / 0.75)]
    pub theta: f64,
    /// Spot volatility nu, per square-root year.
    #[arg(long, default_value_t = 0.2)]
    pub nu: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<OuParams> {
        OuParams::new(self.k, self.theta, self.nu)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BudgetArgs {
    /// Liquidity budget L, domestic currency per unit hedged.
    #[arg(long, default_value_t = 0.01)]
    pub budget: f64,
    /// CFaR tail probability p, in (0, 1).
    #[arg(long, default_value_t = 0.01)]
    pub tail_p: f64,
    /// Lower bound on a new position, foreign nominal per unit hedged.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub a_lower: f64,
    /// Upper bound on a new position, foreign nominal per unit hedged.
    #[arg(long, default_value_t = 1.0)]
    pub a_upper: f64,
    /// Longest tenor allowed, in months.
    #[arg(long, default_value_t = 120, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_tenor: u32,
}

impl BudgetArgs {
    fn config(&self) -> Result<LiquidityConfig> {
        let c = LiquidityConfig {
            budget: self.budget,
            tail_p: self.tail_p,
            a_lower: self.a_lower,
            a_upper: self.a_upper,
            max_tenor_months: self.max_tenor,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CalibrateArgs {
    /// Spot CSV with header `month,spot` (month as YYYY-MM).
    #[arg(long)]
    pub spot: PathBuf,
    /// Quotation of the rates in the input file.
    #[arg(long, value_enum, default_value_t = QuotationArg::ForeignPerDomestic)]
    pub quotation: QuotationArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AllocateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Initial spot S_0, foreign per domestic (defaults to theta).
    #[arg(long)]
    pub s0: Option<f64>,
    /// How the initial forward curve is built.
    #[arg(long, value_enum, default_value_t = CurveArg::ExpectedSpot)]
    pub curve: CurveArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub scenario: AllocateArgs,
    /// Parameter to sweep: L, p, nu, s0 or k.
    #[arg(long, value_parser = parse_sweep)]
    #[serde(serialize_with = "serialize_debug")]
    pub sweep: SweepParam,
    /// Comma-separated sweep values, in the swept parameter's units.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1.., allow_hyphen_values = true)]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Initial spot S_0, foreign per domestic (defaults to theta).
    #[arg(long)]
    pub s0: Option<f64>,
    /// Number of Monte Carlo paths.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub paths: u64,
    /// Simulation horizon in months.
    #[arg(long, default_value_t = 240, value_parser = clap::value_parser!(u32).range(1..))]
    pub horizon: u32,
    /// Random seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Spot-to-forward ratios used to build each month's curve.
    #[arg(long, value_enum, default_value_t = RatiosArg::Reference)]
    pub ratios: RatiosArg,
    /// Tenor ranking.
    #[arg(long, value_enum, default_value_t = RankingArg::ShortestFirst)]
    pub ranking: RankingArg,
    /// Transaction cost CSV (`tenor_months,annualized_cost`), used by --ranking ranked.
    #[arg(long)]
    pub costs: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BacktestArgs {
    /// Spot CSV with header `month,spot`.
    #[arg(long)]
    pub spot: PathBuf,
    /// Forward CSV with header `month,tenor_months,forward` (long format, one row per pillar).
    #[arg(long)]
    pub forwards: PathBuf,
    /// Transaction cost CSV with header `tenor_months,annualized_cost`; zero costs if omitted.
    #[arg(long)]
    pub costs: Option<PathBuf>,
    /// Quotation of the spot and forward files.
    #[arg(long, value_enum, default_value_t = QuotationArg::ForeignPerDomestic)]
    pub quotation: QuotationArg,
    /// Strategy: a preset (str1..str6, eq1y, eq3y, eq10y), `all` presets, `optimal` or `equal-weight`.
    #[arg(long, default_value = "all")]
    pub strategy: String,
    /// Ladder length in months for `--strategy equal-weight`.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    pub ladder: u32,
    /// Tenor ranking for `--strategy optimal`.
    #[arg(long, value_enum, default_value_t = RankingArg::Ranked)]
    pub ranking: RankingArg,
    /// Budget and position bounds for `--strategy optimal`.
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Model parameters `k,theta,nu`; calibrated in-sample on the spot file if omitted.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub params: Option<Vec<f64>>,
}

fn parse_sweep(s: &str) -> std::result::Result<SweepParam, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn serialize_debug<S: serde::Serializer, T: std::fmt::Debug>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:?}"))
}

/// Reproducibility record written next to every run's outputs.
#[derive(Debug, Serialize)]
struct Manifest<'a, A: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    args: &'a A,
    resolved: R,
    outputs: Vec<String>,
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    /// Writes `name` atomically via a temporary sibling and a rename.
    fn write(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp{}", std::process::id()));
        let result = fs::File::create(&tmp)
            .and_then(|mut f| f.write_all(&buf).and_then(|_| f.sync_all()))
            .and_then(|_| fs::rename(&tmp, &target));
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        result?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value)?;
            buf.push(b'\n');
            Ok(())
        })
    }

    fn manifest<A: Serialize, R: Serialize>(mut self, command: &'static str, args: &A, resolved: R) -> Result<Vec<String>> {
        let mut outputs = self.written.clone();
        outputs.push("run_manifest.json".into());
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            args,
            resolved,
            outputs: outputs.clone(),
        };
        self.json("run_manifest.json", &manifest)?;
        Ok(outputs)
    }
}

fn scenario(args: &AllocateArgs) -> Result<StaticScenario> {
    let params = args.model.params()?;
    let spot = args.s0.unwrap_or(params.theta);
    if !(spot > 0.0 && spot.is_finite()) {
        return Err(Error::invalid(format!("s0 must be positive, got {spot}")));
    }
    Ok(StaticScenario {
        params,
        spot,
        config: args.budget.config()?,
        convention: args.curve.convention(),
    })
}

fn cmd_calibrate(args: &CalibrateArgs, out: &mut Outputs, format: Format) -> Result<OuParams> {
    let series = load_spot_csv(&args.spot, args.quotation.into())?;
    let params = calibrate(&series)?;
    match format {
        Format::Json => out.json("calibration.json", &params)?,
        Format::Csv => out.write("calibration.csv", |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["k", "theta", "nu"])?;
            w.write_record([params.k.to_string(), params.theta.to_string(), params.nu.to_string()])?;
            w.flush()?;
            Ok(())
        })?,
    }
    Ok(params)
}

fn cmd_allocate(args: &AllocateArgs, out: &mut Outputs, format: Format) -> Result<StaticScenario> {
    let s = scenario(args)?;
    let result = match s.allocate() {
        Ok(r) => r,
        Err(Error::InfeasibleHedge { partial, .. }) => *partial,
        Err(e) => return Err(e),
    };
    match format {
        Format::Json => out.json("allocation.json", &result)?,
        Format::Csv => out.write("allocation.csv", |buf| result.write_csv(buf))?,
    }
    out.write("cfar_profile.csv", |buf| result.profile.write_csv(buf))?;
    if !result.fully_hedged {
        return Err(Error::InfeasibleHedge {
            shortfall: result.shortfall,
            partial: Box::new(result),
        });
    }
    Ok(s)
}

fn cmd_sensitivity(args: &SensitivityArgs, out: &mut Outputs, format: Format) -> Result<StaticScenario> {
    let base = scenario(&args.scenario)?;
    let rows = static_sensitivity(&base, args.sweep, &args.values)?;
    match format {
        Format::Json => out.json("sensitivity.json", &rows)?,
        Format::Csv => out.write("sensitivity.csv", |buf| write_sensitivity_csv(buf, &rows))?,
    }
    Ok(base)
}

fn cmd_simulate(args: &SimulateArgs, out: &mut Outputs) -> Result<SimulationSpec> {
    let params = args.model.params()?;
    let config = args.budget.config()?;
    let spec = SimulationSpec {
        params,
        s0: args.s0.unwrap_or(params.theta),
        horizon_months: args.horizon,
        n_paths: args.paths as usize,
        seed: args.seed,
        config,
        ratios: match args.ratios {
            RatiosArg::Reference => RatioTable::reference(),
            RatiosArg::Flat => RatioTable::flat(config.max_tenor_months),
        },
        ranking: args.ranking.into(),
        costs: match &args.costs {
            Some(p) => load_cost_csv(p)?,
            None => CostCurve::zero(),
        },
    };
    let report = run_simulation(&spec)?;
    out.write("simulation_monthly.csv", |buf| report.write_monthly_csv(buf))?;
    out.write("simulation_tenors.csv", |buf| report.write_tenor_csv(buf))?;
    #[derive(Serialize)]
    struct Diagnostics {
        infeasible_events: usize,
        max_hedge_error: f64,
    }
    out.json(
        "simulation_diagnostics.json",
        &Diagnostics {
            infeasible_events: report.infeasible_events,
            max_hedge_error: report.max_hedge_error,
        },
    )?;
    Ok(spec)
}

#[derive(Debug, Serialize)]
struct BacktestResolved {
    params: OuParams,
    calibrated_in_sample: bool,
    strategies: Vec<(String, StrategySpec)>,
}

fn cmd_backtest(args: &BacktestArgs, out: &mut Outputs, format: Format) -> Result<BacktestResolved> {
    let quotation = args.quotation.into();
    let spot = load_spot_csv(&args.spot, quotation)?;
    let curves = index_curves(load_forward_csv(&args.forwards, quotation, &spot)?);
    let costs = match &args.costs {
        Some(p) => load_cost_csv(p)?,
        None => CostCurve::zero(),
    };
    let (params, calibrated) = match &args.params {
        Some(v) => (OuParams::new(v[0], v[1], v[2])?, false),
        None => (calibrate(&spot)?, true),
    };
    let strategies: Vec<(String, StrategySpec)> = match args.strategy.as_str() {
        "all" => StrategySpec::PRESETS
            .iter()
            .map(|n| (n.to_string(), StrategySpec::preset(n).expect("known preset")))
            .collect(),
        "optimal" => vec![(
            "optimal".into(),
            StrategySpec::Optimal {
                config: args.budget.config()?,
                ranking: args.ranking.into(),
            },
        )],
        "equal-weight" => vec![(
            format!("eq{}m", args.ladder),
            StrategySpec::EqualWeight {
                ladder_months: args.ladder,
            },
        )],
        name => vec![(
            name.to_string(),
            StrategySpec::preset(name).ok_or_else(|| Error::invalid(format!("unknown strategy `{name}`")))?,
        )],
    };
    let reports = strategies
        .par_iter()
        .map(|(_, s)| run_backtest(&spot, &curves, &costs, &params, s))
        .collect::<Result<Vec<_>>>()?;

    let summary: Vec<(String, _)> = strategies
        .iter()
        .zip(&reports)
        .map(|((n, _), r)| (n.clone(), r.stats))
        .collect();
    match format {
        Format::Json => out.json("backtest_summary.json", &summary)?,
        Format::Csv => out.write("backtest_summary.csv", |buf| write_summary_csv(buf, &summary))?,
    }
    for ((name, _), report) in strategies.iter().zip(&reports) {
        out.write(&format!("backtest_{name}.csv"), |buf| report.write_monthly_csv(buf))?;
    }
    Ok(BacktestResolved {
        params,
        calibrated_in_sample: calibrated,
        strategies,
    })
}

/// Runs a parsed command line and returns the list of files written.
pub fn run(cli: &Cli) -> Result<Vec<String>> {
    let mut out = Outputs::new(&cli.out_dir)?;
    let format = cli.format;
    match &cli.command {
        Command::Calibrate(a) => {
            let r = cmd_calibrate(a, &mut out, format)?;
            out.manifest("calibrate", a, r)
        }
        Command::Allocate(a) => {
            let r = cmd_allocate(a, &mut out, format)?;
            out.manifest("allocate", a, r)
        }
        Command::Sensitivity(a) => {
            let r = cmd_sensitivity(a, &mut out, format)?;
            out.manifest("sensitivity", a, r)
        }
        Command::Simulate(a) => {
            let r = cmd_simulate(a, &mut out)?;
            out.manifest("simulate", a, r)
        }
        Command::Backtest(a) => {
            let r = cmd_backtest(a, &mut out, format)?;
            out.manifest("backtest", a, r)
        }
    }
}

/// Entry point for the binary: parses `argv`, runs, maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", cli.out_dir.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
