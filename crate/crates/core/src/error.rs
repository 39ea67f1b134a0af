use thiserror::Error;

/// Coarse failure class, used by callers (e.g. the CLI) to map errors to
/// exit codes without matching on every variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Invalid configuration or arguments.
    Config,
    /// Problems with input data (files, parsing, shapes).
    Data,
    /// Numerical failure (singular systems, non-finite values).
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("cannot parse cell in row {row}, column '{column}': '{value}'")]
    UnparsableCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("non-finite value in row {row}, column '{column}'")]
    NonFiniteCell { row: usize, column: String },
    #[error("no data rows in {0}")]
    EmptyData(String),
    #[error("column '{0}' is constant; cannot standardize")]
    ConstantColumn(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("design matrix is rank deficient or ill-conditioned{}", detail_suffix(.0))]
    RankDeficient(Option<String>),
    #[error("failure on subset {subset}: {reason}")]
    SubsetFailure { subset: usize, reason: String },
    #[error("non-finite data passed to solver: {0}")]
    NonFiniteData(String),
    #[error("no scorable candidate model: {0}")]
    NoCandidate(String),
    #[error("subset enumeration too large: {count} subsets exceed the 10^6 bound; reduce s or p")]
    EnumerationBound { count: u128 },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn detail_suffix(detail: &Option<String>) -> String {
    match detail {
        Some(d) => format!(" ({d})"),
        None => String::new(),
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            InvalidArgument(_) => ErrorCategory::Config,
            FileNotFound(_) | Io { .. } | Csv(_) | MissingColumn(_) | UnparsableCell { .. }
            | NonFiniteCell { .. } | EmptyData(_) | DimensionMismatch(_) | Json(_) => {
                ErrorCategory::Data
            }
            ConstantColumn(_) | RankDeficient(_) | SubsetFailure { .. } | NonFiniteData(_)
            | NoCandidate(_) | EnumerationBound { .. } => ErrorCategory::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
