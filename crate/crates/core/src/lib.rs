//! User story analysis: readability indexes, story-point estimation,
//! improvement recommendations and dataset mining.

pub mod analysis;
pub mod estimator;
pub mod metrics;
pub mod miner;
pub mod recommender;

pub use analysis::{analyze, AnalysisError, AnalysisResult, Timings};
pub use estimator::{EvalReport, Hyperparams, StoryPointModel, TrainingDataset};
pub use metrics::{readability_report, ReadabilityReport, TextStats};
pub use miner::{DatasetSummary, IssueRecord, MiningConfig};
pub use recommender::{EndpointConfig, Recommendation, RecommendationSource, Recommender};
