mod common;

use std::sync::Arc;
use std::time::Duration;

use common::{sample_model, spawn_llm, LlmMode, EXAMPLE_STORY, STUB_COMPLETION};
use serde_json::{json, Value};
use ust_cli::server::{self, AppState};
use ust_core::recommender::{EndpointConfig, FallbackThresholds};
use ust_core::Recommender;

async fn start(state: Arc<AppState>, body_limit: usize) -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(server::serve(listener, state, body_limit, std::future::pending()));
    format!("http://{addr}")
}

fn recommender(base: Option<String>) -> Recommender {
    let endpoint = base.map(|b| {
        let mut e = EndpointConfig::new(b);
        e.timeout = Duration::from_millis(300);
        e
    });
    Recommender::new(endpoint, FallbackThresholds::default())
}

async fn post_text(client: &reqwest::Client, base: &str, body: Value) -> (u16, Value) {
    let resp = client.post(format!("{base}/analyze")).json(&body).send().await.unwrap();
    let status = resp.status().as_u16();
    (status, resp.json().await.unwrap_or(Value::Null))
}

#[tokio::test]
async fn analyze_returns_all_sections() {
    let (llm, captured) = spawn_llm(LlmMode::Ok).await;
    let state = Arc::new(AppState::new(Some(sample_model()), recommender(Some(llm))));
    let base = start(state, 64 * 1024).await;
    let client = reqwest::Client::new();

    let (status, body) = post_text(&client, &base, json!({"text": EXAMPLE_STORY})).await;
    assert_eq!(status, 200);
    assert_eq!(body["readability"]["stats"]["word_count"], 20);
    assert!((body["readability"]["gunning_fog"].as_f64().unwrap() - 14.0).abs() < 1e-9);
    let points = body["story_points"].as_f64().unwrap();
    assert!((0.0..=100.0).contains(&points));
    assert_eq!(body["recommendation"]["source"], "remote-llm");
    assert_eq!(body["recommendation"]["text"], STUB_COMPLETION);
    for key in ["readability_ms", "estimation_ms", "recommendation_ms", "total_ms"] {
        assert!(body["timings"][key].is_number());
    }
    assert_eq!(captured.lock().unwrap().len(), 1);

    // identical input, identical local results
    let (_, again) = post_text(&client, &base, json!({"text": EXAMPLE_STORY})).await;
    assert_eq!(again["readability"], body["readability"]);
    assert_eq!(again["story_points"], body["story_points"]);
}

#[tokio::test]
async fn bad_requests() {
    let state = Arc::new(AppState::new(Some(sample_model()), recommender(None)));
    let base = start(state, 256).await;
    let client = reqwest::Client::new();

    let (status, body) = post_text(&client, &base, json!({"text": ""})).await;
    assert_eq!(status, 400);
    assert_eq!(body["error"], "EmptyText");
    let (status, _) = post_text(&client, &base, json!({"text": " ?! "})).await;
    assert_eq!(status, 400);
    let (status, _) = post_text(&client, &base, json!({"story": "x"})).await;
    assert_eq!(status, 400);

    let (status, body) = post_text(&client, &base, json!({"text": "word ".repeat(200)})).await;
    assert_eq!(status, 413);
    assert_eq!(body["error"], "BodyTooLarge");
}

#[tokio::test]
async fn unreachable_llm_falls_back() {
    let (llm, _) = spawn_llm(LlmMode::ServerError).await;
    let state = Arc::new(AppState::new(Some(sample_model()), recommender(Some(llm))));
    let base = start(state, 64 * 1024).await;
    let (status, body) = post_text(&reqwest::Client::new(), &base, json!({"text": "Fix the bug"})).await;
    assert_eq!(status, 200);
    assert_eq!(body["recommendation"]["source"], "offline-heuristic");
}

#[tokio::test]
async fn health_reports_model_state() {
    let state = Arc::new(AppState::new(None, recommender(None)));
    let base = start(state.clone(), 1024).await;
    let client = reqwest::Client::new();

    let resp = client.get(format!("{base}/health")).send().await.unwrap();
    assert_eq!(resp.status().as_u16(), 503);
    let (status, body) = post_text(&client, &base, json!({"text": EXAMPLE_STORY})).await;
    assert_eq!((status, body["error"].as_str()), (503, Some("ModelNotLoaded")));

    state.swap_model(sample_model());
    let resp = client.get(format!("{base}/health")).send().await.unwrap();
    assert_eq!(resp.status().as_u16(), 200);
    let body: Value = resp.json().await.unwrap();
    assert_eq!(body["status"], "ok");
    assert_eq!(body["model_version"], 1);
}

#[tokio::test]
async fn cors_headers_present() {
    let state = Arc::new(AppState::new(Some(sample_model()), recommender(None)));
    let base = start(state, 1024).await;
    let resp = reqwest::Client::new()
        .request(reqwest::Method::OPTIONS, format!("{base}/analyze"))
        .header("Origin", "http://ui.local")
        .header("Access-Control-Request-Method", "POST")
        .send()
        .await
        .unwrap();
    assert!(resp.headers().contains_key("access-control-allow-origin"));
}

#[tokio::test]
async fn hot_swap_under_load_stays_healthy() {
    let state = Arc::new(AppState::new(Some(sample_model()), recommender(None)));
    let base = start(state.clone(), 64 * 1024).await;
    let client = reqwest::Client::new();

    let mut tasks = tokio::task::JoinSet::new();
    for i in 0..40 {
        let (client, base) = (client.clone(), base.clone());
        tasks.spawn(async move {
            if i % 2 == 0 {
                client.get(format!("{base}/health")).send().await.unwrap().status().as_u16()
            } else {
                post_text(&client, &base, json!({"text": EXAMPLE_STORY})).await.0
            }
        });
    }
    for _ in 0..10 {
        state.swap_model(sample_model());
        tokio::task::yield_now().await;
    }
    while let Some(status) = tasks.join_next().await {
        assert_eq!(status.unwrap(), 200);
    }
}
