//! The combined "Analyze" flow: readability, story points and a
//! recommendation for one story.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::{EstimatorError, StoryPointModel};
use crate::metrics::{readability_report, MetricsError, ReadabilityReport};
use crate::recommender::{Recommendation, Recommender};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub readability_ms: f64,
    pub estimation_ms: f64,
    pub recommendation_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub readability: ReadabilityReport,
    pub story_points: f64,
    pub recommendation: Recommendation,
    pub timings: Timings,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

/// Runs all three analyses. Readability and the estimate are computed
/// locally and never wait on the recommendation request.
pub async fn analyze(
    text: &str,
    model: &StoryPointModel,
    recommender: &Recommender,
) -> Result<AnalysisResult, AnalysisError> {
    let total = Instant::now();

    let started = Instant::now();
    let readability = readability_report(text)?;
    let readability_ms = ms_since(started);

    let estimate = async {
        let started = Instant::now();
        model.predict(text).map(|points| (points, ms_since(started)))
    };
    let recommend = async {
        let started = Instant::now();
        let rec = recommender.recommend(text, &readability).await;
        (rec, ms_since(started))
    };
    let (estimate, (recommendation, recommendation_ms)) = tokio::join!(estimate, recommend);
    let (story_points, estimation_ms) = estimate?;

    Ok(AnalysisResult {
        readability,
        story_points,
        recommendation,
        timings: Timings {
            readability_ms,
            estimation_ms,
            recommendation_ms,
            total_ms: ms_since(total),
        },
    })
}
