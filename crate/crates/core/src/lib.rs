//! Liquidity-constrained FX hedge tenor optimisation.
//!
//! A fund holding foreign assets keeps them fully hedged with FX forwards and
//! rolls whatever matures each month. This crate decides how to stagger the
//! rolled nominal across forward tenors so that expected carry is maximised
//! while the Cash-Flow-at-Risk of every future settlement month stays within
//! a liquidity budget.
//!
//! * [`ou`]: mean-reverting spot model, exact simulation and calibration.
//! * [`market_data`]: forward, cost and ratio curves and their CSV formats.
//! * [`book`]: the forward-contract ledger.
//! * [`cfar`]: per-bucket cash-flow moments and CFaR.
//! * [`allocator`]: the greedy tenor allocation and static sensitivities.
//! * [`simulator`]: Monte Carlo dynamic hedging.
//! * [`backtest`]: historical replay, equal-weight ladders and summary statistics.
//! * [`cli`]: the `hedge-tenor` command-line front end.
//!
//! The runnable programs under `examples/` walk through each capability.

pub mod allocator;
pub mod backtest;
pub mod book;
pub mod cfar;
pub mod cli;
pub mod error;
pub mod market_data;
pub mod ou;
pub mod simulator;
pub mod stats;

pub use allocator::{allocate, AllocationResult, RankingMode, RollDate, TenorRanking};
pub use book::{ForwardContract, HedgeBook};
pub use cfar::{CfarProfile, LiquidityConfig};
pub use error::{Error, Result};
pub use market_data::{CostCurve, ForwardCurve, RatioTable};
pub use ou::{OuParams, SpotSeries};
