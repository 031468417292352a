use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::Value;
use ust_core::estimator::{TextField, TrainingDataset};
use ust_core::miner::{
    mine_projects, GitLabClient, IssueRecord, MinerError, MiningConfig, ProjectRef, RateLimiter,
    RetryPolicy,
};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/gitlab")
}

#[derive(Clone, Default)]
struct Stub {
    hits: Arc<Mutex<HashMap<String, usize>>>,
    tokens: Arc<Mutex<Vec<Option<String>>>>,
    flaky_failures: Arc<AtomicUsize>,
}

async fn issues(
    State(stub): State<Stub>,
    UrlPath(project): UrlPath<String>,
    Query(q): Query<HashMap<String, String>>,
    headers: HeaderMap,
) -> Response {
    *stub.hits.lock().unwrap().entry(project.clone()).or_default() += 1;
    stub.tokens
        .lock()
        .unwrap()
        .push(headers.get("private-token").map(|v| v.to_str().unwrap().to_owned()));
    let page: usize = q.get("page").and_then(|p| p.parse().ok()).unwrap_or(1);
    match project.as_str() {
        "401" => return StatusCode::UNAUTHORIZED.into_response(),
        "429" => return StatusCode::TOO_MANY_REQUESTS.into_response(),
        "empty" => return Json(Value::Array(vec![])).into_response(),
        "flaky" => {
            if stub.flaky_failures.fetch_add(1, Ordering::SeqCst) < 2 {
                return StatusCode::BAD_GATEWAY.into_response();
            }
            return serve(&fixtures().join("202"), page);
        }
        _ => {}
    }
    let dir = fixtures().join(&project);
    if !dir.is_dir() {
        return StatusCode::NOT_FOUND.into_response();
    }
    serve(&dir, page)
}

fn serve(dir: &Path, page: usize) -> Response {
    let file = dir.join(format!("page_{page}.json"));
    let body: Value = match std::fs::read(&file) {
        Ok(bytes) => serde_json::from_slice(&bytes).unwrap(),
        Err(_) => Value::Array(vec![]),
    };
    Json(body).into_response()
}

async fn spawn_stub() -> (String, Stub) {
    let stub = Stub::default();
    let app = Router::new()
        .route("/api/v4/projects/{project}/issues", get(issues))
        .with_state(stub.clone());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (format!("http://{addr}"), stub)
}

fn fast_client(base: &str) -> GitLabClient {
    GitLabClient::new(
        base,
        Some("tok".into()),
        100,
        Arc::new(RateLimiter::new(1000.0).unwrap()),
        RetryPolicy { max_retries: 3, base_delay: Duration::from_millis(1) },
    )
    .unwrap()
}

fn config(base: &str, projects: &[ProjectRef], out: &Path) -> MiningConfig {
    let mut c = MiningConfig::new(base, projects.to_vec(), out.to_owned());
    c.rate_limit = 1000.0;
    c.backoff_ms = 1;
    c.token = Some("tok".into());
    c
}

#[tokio::test]
async fn two_pages_yield_every_record() {
    let (base, stub) = spawn_stub().await;
    let raw = fast_client(&base).fetch_project_issues("101").await.unwrap();
    assert_eq!(raw.len(), 137);
    let mut iids: Vec<u64> = raw.iter().map(|r| r["iid"].as_u64().unwrap()).collect();
    iids.dedup();
    assert_eq!(iids.len(), 137);
    // pages 1 and 2, then the empty page 3
    assert_eq!(stub.hits.lock().unwrap()["101"], 3);
    assert!(stub.tokens.lock().unwrap().iter().all(|t| t.as_deref() == Some("tok")));
}

#[tokio::test]
async fn error_statuses_are_classified() {
    let (base, stub) = spawn_stub().await;
    let client = fast_client(&base);
    assert!(matches!(client.fetch_project_issues("401").await, Err(MinerError::AuthFailed { .. })));
    assert!(matches!(
        client.fetch_project_issues("nope").await,
        Err(MinerError::ProjectNotFound { .. })
    ));
    assert!(matches!(client.fetch_project_issues("429").await, Err(MinerError::RateLimited { .. })));
    // one attempt plus three retries
    assert_eq!(stub.hits.lock().unwrap()["429"], 4);
}

#[tokio::test]
async fn transient_failures_are_retried() {
    let (base, _) = spawn_stub().await;
    let raw = fast_client(&base).fetch_project_issues("flaky").await.unwrap();
    assert_eq!(raw.len(), 9);
}

#[tokio::test]
async fn empty_first_page_is_empty_stream() {
    let (base, stub) = spawn_stub().await;
    let raw = fast_client(&base).fetch_project_issues("empty").await.unwrap();
    assert!(raw.is_empty());
    assert_eq!(stub.hits.lock().unwrap()["empty"], 1);
}

fn read_records(path: &Path) -> Vec<IssueRecord> {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[tokio::test]
async fn mines_fixture_universe() {
    let (base, stub) = spawn_stub().await;
    let out = tempfile::tempdir().unwrap();
    let cfg = config(&base, &[ProjectRef::Id(101), ProjectRef::Id(202)], out.path());
    let report = mine_projects(&cfg).await.unwrap();

    let s = &report.summary;
    assert_eq!((s.project_count, s.issue_count), (2, 8));
    assert_eq!(s.total_story_points, 2.0 + 5.0 + 8.0 + 3.0 + 13.0 + 1.0 + 3.0 + 5.0);
    assert!(report.failures.is_empty());

    let records = read_records(&cfg.json_path());
    assert_eq!(records.len(), 8);
    assert!(records.iter().all(|r| r.weight > 0.0 && r.raw["state"] == "closed"));
    let keys: Vec<(u64, u64)> = records.iter().map(|r| (r.project_id, r.issue_id)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(records.iter().map(|r| r.weight).sum::<f64>(), s.total_story_points);

    let mut rdr = csv::Reader::from_path(cfg.csv_path()).unwrap();
    assert_eq!(rdr.records().count(), 8);
    // the export is directly usable as training data
    let ds = TrainingDataset::load(&cfg.csv_path(), TextField::Description).unwrap();
    assert_eq!(ds.len(), 8);

    // rerun: nothing fetched again, byte-identical output
    let csv_before = std::fs::read(cfg.csv_path()).unwrap();
    let json_before = std::fs::read(cfg.json_path()).unwrap();
    let hits_before: usize = stub.hits.lock().unwrap().values().sum();
    let again = mine_projects(&cfg).await.unwrap();
    assert_eq!(again.resumed, vec!["101", "202"]);
    assert_eq!(again.summary, report.summary);
    assert_eq!(std::fs::read(cfg.csv_path()).unwrap(), csv_before);
    assert_eq!(std::fs::read(cfg.json_path()).unwrap(), json_before);
    assert_eq!(stub.hits.lock().unwrap().values().sum::<usize>(), hits_before);

    // a fresh crawl in another directory produces the same bytes
    let out2 = tempfile::tempdir().unwrap();
    let mut cfg2 = config(&base, &[ProjectRef::Id(202), ProjectRef::Id(101)], out2.path());
    cfg2.workers = 2;
    mine_projects(&cfg2).await.unwrap();
    assert_eq!(std::fs::read(cfg2.csv_path()).unwrap(), csv_before);
    assert_eq!(std::fs::read(cfg2.json_path()).unwrap(), json_before);
}

#[tokio::test]
async fn failing_projects_do_not_stop_others() {
    let (base, _) = spawn_stub().await;
    let out = tempfile::tempdir().unwrap();
    let cfg = config(
        &base,
        &[ProjectRef::Id(303), ProjectRef::Id(404), ProjectRef::Path("401".into()), ProjectRef::Id(202)],
        out.path(),
    );
    let report = mine_projects(&cfg).await.unwrap();
    let s = &report.summary;
    assert_eq!((s.project_count, s.issue_count), (2, 3));
    let p303 = s.projects.iter().find(|p| p.project == "303").unwrap();
    assert_eq!((p303.issues, p303.fetched), (0, 4));
    let failed: Vec<&str> = report.failures.iter().map(|f| f.project.as_str()).collect();
    assert_eq!(failed, vec!["401", "404"]);
}

#[test]
fn config_from_toml() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mine.toml");
    std::fs::write(
        &path,
        "base_url = \"https://gitlab.com\"\nprojects = [278964, \"gitlab-org/gitaly\"]\noutput_dir = \"out\"\nworkers = 2\n",
    )
    .unwrap();
    let cfg = MiningConfig::from_toml_file(&path).unwrap();
    assert_eq!(cfg.projects, vec![ProjectRef::Id(278964), ProjectRef::Path("gitlab-org/gitaly".into())]);
    assert_eq!(cfg.page_size, 100);
    assert_eq!(cfg.rate_limit, 5.0);
    assert_eq!(cfg.output_dir, dir.path().join("out"));
}
