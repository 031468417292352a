use thiserror::Error;
use ust_core::estimator::EstimatorError;
use ust_core::metrics::MetricsError;
use ust_core::miner::MinerError;
use ust_core::AnalysisError;

/// Command failures, each class with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("story text is empty")]
    EmptyText,
    #[error("dataset not found: {0}")]
    DatasetNotFound(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("training failed: {0}")]
    Training(String),
    #[error("mining failed: {0}")]
    Mining(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("server error: {0}")]
    Server(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::EmptyText => 3,
            CliError::DatasetNotFound(_) => 4,
            CliError::InvalidDataset(_) => 5,
            CliError::Model(_) => 6,
            CliError::Training(_) => 7,
            CliError::Mining(_) => 8,
            CliError::Config(_) => 9,
            CliError::Server(_) => 10,
        }
    }

    pub fn from_dataset(err: EstimatorError) -> Self {
        match err {
            EstimatorError::Io { path, source } if source.kind() == std::io::ErrorKind::NotFound => {
                CliError::DatasetNotFound(path.display().to_string())
            }
            other => CliError::InvalidDataset(other.to_string()),
        }
    }

    pub fn from_training(err: EstimatorError) -> Self {
        match err {
            EstimatorError::EmptyDataset | EstimatorError::InvalidTarget { .. } => {
                CliError::InvalidDataset(err.to_string())
            }
            EstimatorError::BadFoldCount { .. } | EstimatorError::InvalidHyperparams(_) => {
                CliError::Usage(err.to_string())
            }
            EstimatorError::Io { .. } => CliError::Model(err.to_string()),
            other => CliError::Training(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(err: AnalysisError) -> Self {
        match err {
            AnalysisError::Metrics(MetricsError::EmptyText) => CliError::EmptyText,
            AnalysisError::Metrics(e) => CliError::Usage(e.to_string()),
            AnalysisError::Estimator(e) => CliError::Model(e.to_string()),
        }
    }
}

impl From<MinerError> for CliError {
    fn from(err: MinerError) -> Self {
        match err {
            MinerError::Config(_) | MinerError::InvalidConfig(_) => CliError::Config(err.to_string()),
            other => CliError::Mining(other.to_string()),
        }
    }
}
