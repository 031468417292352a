//! HTTP API: `POST /analyze` and `GET /health`.

use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::CorsLayer;
use ust_core::metrics::MetricsError;
use ust_core::{analyze, AnalysisError, Recommender, StoryPointModel};

/// Shared server state. The model sits behind a lock that is only held long
/// enough to clone the `Arc`, so a swap never blocks running requests and
/// requests never observe a half-replaced model.
pub struct AppState {
    model: RwLock<Option<Arc<StoryPointModel>>>,
    recommender: Recommender,
}

impl AppState {
    pub fn new(model: Option<StoryPointModel>, recommender: Recommender) -> Self {
        Self { model: RwLock::new(model.map(Arc::new)), recommender }
    }

    pub fn model(&self) -> Option<Arc<StoryPointModel>> {
        self.model.read().expect("model lock poisoned").clone()
    }

    /// Replaces the loaded model; returns the previous one.
    pub fn swap_model(&self, model: StoryPointModel) -> Option<Arc<StoryPointModel>> {
        self.model.write().expect("model lock poisoned").replace(Arc::new(model))
    }
}

#[derive(Deserialize)]
struct AnalyzeRequest {
    text: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

fn error(status: StatusCode, kind: &str, message: impl Into<String>) -> Response {
    let body = ErrorBody { error: kind.to_owned(), message: message.into() };
    (status, Json(body)).into_response()
}

async fn analyze_handler(
    State(state): State<Arc<AppState>>,
    body: Result<Bytes, BytesRejection>,
) -> Response {
    let body = match body {
        Ok(b) => b,
        Err(rejection) if rejection.status() == StatusCode::PAYLOAD_TOO_LARGE => {
            return error(StatusCode::PAYLOAD_TOO_LARGE, "BodyTooLarge", rejection.body_text())
        }
        Err(rejection) => return error(rejection.status(), "BadRequest", rejection.body_text()),
    };
    let request: AnalyzeRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, "BadRequest", e.to_string()),
    };
    if request.text.trim().is_empty() {
        return error(StatusCode::BAD_REQUEST, "EmptyText", "text must not be empty");
    }
    let Some(model) = state.model() else {
        return error(StatusCode::SERVICE_UNAVAILABLE, "ModelNotLoaded", "model is not loaded yet");
    };

    match analyze(&request.text, &model, &state.recommender).await {
        Ok(result) => Json(result).into_response(),
        Err(AnalysisError::Metrics(MetricsError::EmptyText)) => {
            error(StatusCode::BAD_REQUEST, "EmptyText", "text contains no words")
        }
        Err(AnalysisError::Metrics(e)) => error(StatusCode::BAD_REQUEST, "DegenerateStats", e.to_string()),
        Err(AnalysisError::Estimator(e)) => {
            log::error!("prediction failed: {e}");
            error(StatusCode::INTERNAL_SERVER_ERROR, "InvalidModel", e.to_string())
        }
    }
}

async fn health_handler(State(state): State<Arc<AppState>>) -> Response {
    match state.model() {
        Some(model) => Json(json!({
            "status": "ok",
            "model_version": model.format_version(),
            "vocabulary_size": model.vocabulary().len(),
        }))
        .into_response(),
        None => (StatusCode::SERVICE_UNAVAILABLE, Json(json!({"status": "loading"}))).into_response(),
    }
}

pub fn router(state: Arc<AppState>, body_limit: usize) -> Router {
    Router::new()
        .route("/analyze", post(analyze_handler))
        .route("/health", get(health_handler))
        .layer(DefaultBodyLimit::max(body_limit))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve<F>(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    body_limit: usize,
    shutdown: F,
) -> std::io::Result<()>
where
    F: std::future::Future<Output = ()> + Send + 'static,
{
    axum::serve(listener, router(state, body_limit))
        .with_graceful_shutdown(shutdown)
        .await
}
