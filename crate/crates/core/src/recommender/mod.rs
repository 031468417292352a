//! Improvement suggestions for a user story.
//!
//! The remote path sends a fixed two-message prompt to any
//! chat-completions-compatible server. Any failure (transport, timeout,
//! non-success status, empty completion) falls back to deterministic offline
//! rules, so callers always get a recommendation.

mod client;
mod fallback;
mod prompt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{request_recommendation, EndpointConfig, Recommender, DEFAULT_TIMEOUT};
pub use fallback::{fallback_recommend, FallbackThresholds, TEMPLATE_OK};
pub use prompt::{build_prompt, ChatMessage, ChatRequest, DEFAULT_MODEL, SYSTEM_PROMPT, USER_PREFIX};

#[derive(Debug, Error)]
pub enum RecommenderError {
    #[error("story text is empty")]
    EmptyText,
    #[error("endpoint returned status {0}")]
    Status(u16),
    #[error("endpoint returned no completion text")]
    EmptyCompletion,
    #[error(transparent)]
    Http(#[from] reqwest::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecommendationSource {
    RemoteLlm,
    OfflineHeuristic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recommendation {
    pub text: String,
    pub source: RecommendationSource,
    pub latency_ms: u64,
}
