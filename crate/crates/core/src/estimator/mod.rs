//! Story-point estimation from story text.
//!
//! Text is turned into L2-normalised TF-IDF vectors and fed to a linear
//! support vector regressor. Predictions are clamped to `[0, 100]`.

mod dataset;
mod eval;
mod model;
mod svr;
mod vocabulary;

use std::path::PathBuf;

use thiserror::Error;

pub use dataset::{Example, TextField, TrainingDataset, MAX_STORY_POINTS};
pub use eval::{cross_validate, cross_validate_folds, fold_indexes, EvalReport, FoldOutcome};
pub use model::{load_model, save_model, StoryPointModel, FORMAT_VERSION};
pub use svr::{train, train_with_trace, Hyperparams, LearningRate, TrainingTrace};
pub use vocabulary::{
    build_vocabulary, tfidf_transform, SparseVector, Vocabulary, VocabularyConfig,
};

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("row {row}: story points {value} outside [0, 100]")]
    InvalidTarget { row: usize, value: f64 },
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(&'static str),
    #[error("training diverged at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("fold count {k} must lie in 2..={n}")]
    BadFoldCount { k: usize, n: usize },
    #[error("invalid model: {0}")]
    InvalidModel(&'static str),
    #[error("corrupt model file: {0}")]
    CorruptModel(&'static str),
    #[error("model format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("could not parse dataset: {0}")]
    Parse(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
