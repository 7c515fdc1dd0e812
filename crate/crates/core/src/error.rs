use thiserror::Error;

use crate::allocator::AllocationResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fitted AR(1) slope {slope} is outside (0, 1); series is not mean reverting")]
    NonMeanReverting { slope: f64 },

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("tenor {tenor} months is outside the curve range 0..={max}")]
    TenorOutOfRange { tenor: u32, max: u32 },

    #[error("probability {0} is outside (0, 1)")]
    DomainError(f64),

    #[error("empty curve history")]
    EmptyHistory,

    #[error("no forward curve for month {0}")]
    DataGap(String),

    #[error("hedge ratio violated: live nominal {live} differs from target {target}")]
    HedgeRatioViolation { live: f64, target: f64 },

    #[error("could not place the full hedge amount, shortfall {shortfall}")]
    InfeasibleHedge {
        shortfall: f64,
        partial: Box<AllocationResult>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
