#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Duration;

use axum::extract::{Path as UrlPath, Query};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};
use ust_core::estimator::{train, Hyperparams, TextField, TrainingDataset};
use ust_core::StoryPointModel;

pub const EXAMPLE_STORY: &str = "As a UI designer, I want to redesign the Resources page, so that it matches the new Broker design styles.";
pub const STUB_COMPLETION: &str = "Add acceptance criteria describing the new styles.";

pub fn core_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core")
}

pub fn sample_csv() -> PathBuf {
    core_dir().join("data/sample_stories.csv")
}

pub fn gitlab_fixtures() -> PathBuf {
    core_dir().join("tests/fixtures/gitlab")
}

pub fn sample_model() -> StoryPointModel {
    static MODEL: OnceLock<StoryPointModel> = OnceLock::new();
    MODEL
        .get_or_init(|| {
            let ds = TrainingDataset::load(&sample_csv(), TextField::Description).unwrap();
            train(&ds, &Hyperparams::default()).unwrap()
        })
        .clone()
}

async fn spawn(router: Router) -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router).await.unwrap() });
    format!("http://{addr}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LlmMode {
    Ok,
    ServerError,
    Slow,
}

/// Chat-completions stub; returns the base URL (`.../v1`) and the raw
/// request bodies it received.
pub async fn spawn_llm(mode: LlmMode) -> (String, Arc<Mutex<Vec<String>>>) {
    let captured = Arc::new(Mutex::new(Vec::new()));
    let cap = captured.clone();
    let handler = move |body: String| {
        let cap = cap.clone();
        async move {
            cap.lock().unwrap().push(body);
            match mode {
                LlmMode::Ok => Json(json!({
                    "id": "chatcmpl-1",
                    "choices": [{"index": 0, "message": {"role": "assistant", "content": STUB_COMPLETION}}]
                }))
                .into_response(),
                LlmMode::ServerError => (StatusCode::INTERNAL_SERVER_ERROR, "unavailable").into_response(),
                LlmMode::Slow => {
                    tokio::time::sleep(Duration::from_secs(10)).await;
                    Json(json!({"choices": []})).into_response()
                }
            }
        }
    };
    let base = spawn(Router::new().route("/v1/chat/completions", post(handler))).await;
    (format!("{base}/v1"), captured)
}

async fn gitlab_issues(
    UrlPath(project): UrlPath<String>,
    Query(q): Query<HashMap<String, String>>,
) -> Response {
    let dir = gitlab_fixtures().join(&project);
    if !dir.is_dir() {
        return StatusCode::NOT_FOUND.into_response();
    }
    let page = q.get("page").cloned().unwrap_or_else(|| "1".into());
    match std::fs::read(dir.join(format!("page_{page}.json"))) {
        Ok(bytes) => Json(serde_json::from_slice::<Value>(&bytes).unwrap()).into_response(),
        Err(_) => Json(json!([])).into_response(),
    }
}

/// GitLab stub serving the recorded fixture pages.
pub async fn spawn_gitlab() -> String {
    spawn(Router::new().route("/api/v4/projects/{project}/issues", get(gitlab_issues))).await
}
