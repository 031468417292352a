use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;
use tokio::task::JoinSet;

use super::client::{GitLabClient, RateLimiter, RetryPolicy};
use super::export::{to_csv, to_json, write_atomic, DatasetSummary, ProjectSummary};
use super::{filter_issue, IssueRecord, MinerError};

pub const DATASET_CSV: &str = "dataset.csv";
pub const DATASET_JSON: &str = "dataset.json";
pub const MANIFEST: &str = "manifest.json";
const CACHE_DIR: &str = "projects";

/// A project given either by numeric id or by its `group/name` path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProjectRef {
    Id(u64),
    Path(String),
}

impl ProjectRef {
    pub fn key(&self) -> String {
        match self {
            ProjectRef::Id(id) => id.to_string(),
            ProjectRef::Path(p) => p.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MiningConfig {
    pub base_url: String,
    pub projects: Vec<ProjectRef>,
    /// Falls back to the `GITLAB_TOKEN` environment variable.
    #[serde(default)]
    pub token: Option<String>,
    #[serde(default = "default_page_size")]
    pub page_size: u32,
    /// Requests per second, shared by all workers.
    #[serde(default = "default_rate_limit")]
    pub rate_limit: f64,
    pub output_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
}

fn default_page_size() -> u32 {
    100
}
fn default_rate_limit() -> f64 {
    5.0
}
fn default_workers() -> usize {
    1
}
fn default_max_retries() -> u32 {
    3
}
fn default_backoff_ms() -> u64 {
    500
}

impl MiningConfig {
    pub fn new(base_url: impl Into<String>, projects: Vec<ProjectRef>, output_dir: PathBuf) -> Self {
        Self {
            base_url: base_url.into(),
            projects,
            token: None,
            page_size: default_page_size(),
            rate_limit: default_rate_limit(),
            output_dir,
            workers: default_workers(),
            max_retries: default_max_retries(),
            backoff_ms: default_backoff_ms(),
        }
    }

    pub fn from_toml_file(path: &Path) -> Result<Self, MinerError> {
        let text = fs::read_to_string(path)
            .map_err(|source| MinerError::Io { path: path.to_owned(), source })?;
        let mut config: Self =
            toml::from_str(&text).map_err(|e| MinerError::Config(e.to_string()))?;
        if config.output_dir.is_relative() {
            if let Some(parent) = path.parent() {
                config.output_dir = parent.join(&config.output_dir);
            }
        }
        Ok(config)
    }

    pub fn csv_path(&self) -> PathBuf {
        self.output_dir.join(DATASET_CSV)
    }

    pub fn json_path(&self) -> PathBuf {
        self.output_dir.join(DATASET_JSON)
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.output_dir.join(MANIFEST)
    }

    fn validate(&self) -> Result<(), MinerError> {
        if self.projects.is_empty() {
            return Err(MinerError::InvalidConfig("no projects listed"));
        }
        if self.workers == 0 {
            return Err(MinerError::InvalidConfig("workers must be at least 1"));
        }
        Ok(())
    }
}

/// Projects already mined, keyed by project reference.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub completed: BTreeMap<String, ProjectSummary>,
}

impl Manifest {
    fn load(path: &Path) -> Result<Self, MinerError> {
        match fs::read(path) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map_err(|e| MinerError::Config(format!("{}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(source) => Err(MinerError::Io { path: path.to_owned(), source }),
        }
    }

    fn save(&self, path: &Path) -> Result<(), MinerError> {
        let mut bytes = serde_json::to_vec_pretty(self).map_err(|e| MinerError::Export(e.to_string()))?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectFailure {
    pub project: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningReport {
    pub summary: DatasetSummary,
    /// Projects skipped because the manifest already listed them.
    pub resumed: Vec<String>,
    pub failures: Vec<ProjectFailure>,
}

fn cache_path(config: &MiningConfig, key: &str) -> PathBuf {
    let name: String = key
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    config.output_dir.join(CACHE_DIR).join(format!("{name}.json"))
}

struct Mined {
    fetched: usize,
    records: Vec<IssueRecord>,
}

async fn mine_one(client: GitLabClient, project: String) -> Result<Mined, MinerError> {
    let mut fetched = 0;
    let mut records = Vec::new();
    client
        .for_each_page(&project, |page| {
            fetched += page.len();
            for raw in &page {
                match filter_issue(raw) {
                    Ok(Some(record)) => records.push(record),
                    Ok(None) => {}
                    Err(e) => log::warn!("{project}: skipping issue: {e}"),
                }
            }
            Ok(())
        })
        .await?;
    records.sort_by_key(|r| (r.project_id, r.issue_id));
    records.dedup_by_key(|r| (r.project_id, r.issue_id));
    Ok(Mined { fetched, records })
}

/// Crawls every configured project, keeps closed weighted issues and writes
/// `dataset.csv`, `dataset.json` and `manifest.json` into the output dir.
///
/// A project that fails is reported and left out of the manifest; the others
/// still complete. Projects already in the manifest are not fetched again,
/// their cached records are reused.
pub async fn mine_projects(config: &MiningConfig) -> Result<MiningReport, MinerError> {
    config.validate()?;
    let cache_dir = config.output_dir.join(CACHE_DIR);
    fs::create_dir_all(&cache_dir)
        .map_err(|source| MinerError::Io { path: cache_dir.clone(), source })?;

    let token = config.token.clone().or_else(|| std::env::var("GITLAB_TOKEN").ok());
    let limiter = Arc::new(RateLimiter::new(config.rate_limit)?);
    let retry = RetryPolicy {
        max_retries: config.max_retries,
        base_delay: Duration::from_millis(config.backoff_ms),
    };
    let client = GitLabClient::new(&config.base_url, token, config.page_size, limiter, retry)?;

    let manifest_path = config.manifest_path();
    let mut manifest = Manifest::load(&manifest_path)?;
    let mut keys: Vec<String> = Vec::new();
    for key in config.projects.iter().map(ProjectRef::key) {
        if !keys.contains(&key) {
            keys.push(key);
        }
    }

    let (resumed, pending): (Vec<String>, Vec<String>) =
        keys.iter().cloned().partition(|k| manifest.completed.contains_key(k));

    let permits = Arc::new(Semaphore::new(config.workers));
    let mut tasks = JoinSet::new();
    for key in pending {
        let client = client.clone();
        let permits = permits.clone();
        tasks.spawn(async move {
            let _permit = permits.acquire_owned().await.expect("semaphore closed");
            let result = mine_one(client, key.clone()).await;
            (key, result)
        });
    }

    let mut failures = Vec::new();
    while let Some(joined) = tasks.join_next().await {
        let (key, result) = joined.map_err(|e| MinerError::Export(e.to_string()))?;
        match result {
            Ok(mined) => {
                write_atomic(&cache_path(config, &key), &to_json(&mined.records)?)?;
                let summary = ProjectSummary {
                    project: key.clone(),
                    fetched: mined.fetched,
                    issues: mined.records.len(),
                    story_points: mined.records.iter().map(|r| r.weight).sum(),
                };
                log::info!("{key}: kept {} of {} issues", summary.issues, summary.fetched);
                manifest.completed.insert(key, summary);
                manifest.save(&manifest_path)?;
            }
            Err(e) => {
                log::error!("{key}: {e}");
                failures.push(ProjectFailure { project: key, error: e.to_string() });
            }
        }
    }
    failures.sort_by(|a, b| a.project.cmp(&b.project));

    let summary = export(config, &manifest, &keys)?;
    Ok(MiningReport { summary, resumed, failures })
}

fn export(config: &MiningConfig, manifest: &Manifest, keys: &[String]) -> Result<DatasetSummary, MinerError> {
    let mut records: Vec<IssueRecord> = Vec::new();
    let mut projects = Vec::new();
    for (key, summary) in &manifest.completed {
        if !keys.contains(key) {
            continue;
        }
        let path = cache_path(config, key);
        let bytes = fs::read(&path).map_err(|source| MinerError::Io { path: path.clone(), source })?;
        let cached: Vec<IssueRecord> = serde_json::from_slice(&bytes)
            .map_err(|e| MinerError::Export(format!("{}: {e}", path.display())))?;
        records.extend(cached);
        projects.push(summary.clone());
    }
    records.sort_by_key(|r| (r.project_id, r.issue_id));
    records.dedup_by_key(|r| (r.project_id, r.issue_id));

    write_atomic(&config.csv_path(), &to_csv(&records)?)?;
    write_atomic(&config.json_path(), &to_json(&records)?)?;

    Ok(DatasetSummary {
        project_count: projects.len(),
        issue_count: records.len(),
        total_story_points: records.iter().map(|r| r.weight).sum(),
        projects,
    })
}
