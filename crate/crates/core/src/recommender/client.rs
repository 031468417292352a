use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::fallback::{fallback_recommend, FallbackThresholds};
use super::prompt::{build_prompt, DEFAULT_MODEL};
use super::{Recommendation, RecommendationSource, RecommenderError};
use crate::metrics::ReadabilityReport;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// Where to send chat-completion requests.
///
/// `base_url` is the API root, e.g. `https://api.openai.com/v1`; requests go
/// to `{base_url}/chat/completions`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub base_url: String,
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default)]
    pub api_key: Option<String>,
    #[serde(default = "default_timeout", with = "secs")]
    pub timeout: Duration,
}

fn default_model() -> String {
    DEFAULT_MODEL.to_owned()
}

fn default_timeout() -> Duration {
    DEFAULT_TIMEOUT
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model: default_model(),
            api_key: None,
            timeout: DEFAULT_TIMEOUT,
        }
    }

    /// Reads `UST_LLM_BASE_URL`, `UST_LLM_MODEL`, `UST_LLM_API_KEY` (or
    /// `OPENAI_API_KEY`) and `UST_LLM_TIMEOUT_SECS`. Returns `None` when no
    /// base URL is set.
    pub fn from_env() -> Option<Self> {
        let var = |name: &str| std::env::var(name).ok().filter(|v| !v.trim().is_empty());
        let mut config = Self::new(var("UST_LLM_BASE_URL")?);
        if let Some(model) = var("UST_LLM_MODEL") {
            config.model = model;
        }
        config.api_key = var("UST_LLM_API_KEY").or_else(|| var("OPENAI_API_KEY"));
        if let Some(t) = var("UST_LLM_TIMEOUT_SECS").and_then(|t| t.parse::<f64>().ok()) {
            if let Ok(timeout) = Duration::try_from_secs_f64(t) {
                config.timeout = timeout;
            }
        }
        Some(config)
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ResponseMessage,
}

#[derive(Deserialize)]
struct ResponseMessage {
    #[serde(default)]
    content: Option<String>,
}

/// Produces a recommendation for every story: from the remote model when one
/// is configured and answers, otherwise from the offline rules.
#[derive(Debug, Clone)]
pub struct Recommender {
    endpoint: Option<EndpointConfig>,
    thresholds: FallbackThresholds,
    http: reqwest::Client,
}

impl Recommender {
    pub fn new(endpoint: Option<EndpointConfig>, thresholds: FallbackThresholds) -> Self {
        Self { endpoint, thresholds, http: reqwest::Client::new() }
    }

    pub fn offline(thresholds: FallbackThresholds) -> Self {
        Self::new(None, thresholds)
    }

    pub fn endpoint(&self) -> Option<&EndpointConfig> {
        self.endpoint.as_ref()
    }

    pub fn thresholds(&self) -> &FallbackThresholds {
        &self.thresholds
    }

    pub async fn recommend(&self, story_text: &str, report: &ReadabilityReport) -> Recommendation {
        let started = Instant::now();
        if let Some(endpoint) = &self.endpoint {
            match self.query(endpoint, story_text).await {
                Ok(text) => {
                    return Recommendation {
                        text,
                        source: RecommendationSource::RemoteLlm,
                        latency_ms: elapsed_ms(started),
                    }
                }
                Err(err) => log::warn!("recommendation endpoint failed, using offline rules: {err}"),
            }
        }
        let mut rec = fallback_recommend(story_text, report, &self.thresholds);
        rec.latency_ms = elapsed_ms(started);
        rec
    }

    async fn query(
        &self,
        endpoint: &EndpointConfig,
        story_text: &str,
    ) -> Result<String, RecommenderError> {
        let body = build_prompt(&endpoint.model, story_text)?;
        let mut request = self.http.post(endpoint.url()).timeout(endpoint.timeout).json(&body);
        if let Some(key) = endpoint.api_key.as_deref().filter(|k| !k.is_empty()) {
            request = request.bearer_auth(key);
        }

        let response = request.send().await?;
        let status = response.status();
        if !status.is_success() {
            return Err(RecommenderError::Status(status.as_u16()));
        }
        let parsed: ChatResponse = response.json().await?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .filter(|text| !text.trim().is_empty())
            .ok_or(RecommenderError::EmptyCompletion)
    }
}

/// One-shot helper around [`Recommender::recommend`].
pub async fn request_recommendation(
    endpoint: &EndpointConfig,
    story_text: &str,
    report: &ReadabilityReport,
) -> Recommendation {
    Recommender::new(Some(endpoint.clone()), FallbackThresholds::default())
        .recommend(story_text, report)
        .await
}

fn elapsed_ms(started: Instant) -> u64 {
    u64::try_from(started.elapsed().as_millis()).unwrap_or(u64::MAX)
}
