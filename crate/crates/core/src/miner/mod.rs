//! Dataset mining from a GitLab instance.
//!
//! Lists each project's issues through the v4 REST API, keeps closed issues
//! whose `weight` (story points) is set, and exports the result as CSV and
//! JSON. Progress is tracked in a manifest so an interrupted crawl resumes
//! where it stopped.

mod client;
mod export;
mod issue;
mod mine;

use std::path::PathBuf;

use thiserror::Error;

pub use client::{GitLabClient, RateLimiter, RetryPolicy};
pub use export::{DatasetSummary, ProjectSummary};
pub use issue::{filter_issue, IssueRecord, IssueState};
pub use mine::{
    mine_projects, Manifest, MiningConfig, MiningReport, ProjectFailure, ProjectRef, DATASET_CSV,
    DATASET_JSON, MANIFEST,
};

#[derive(Debug, Error)]
pub enum MinerError {
    #[error("issue is missing field `{0}`")]
    MalformedIssue(&'static str),
    #[error("authentication failed for project {project}")]
    AuthFailed { project: String },
    #[error("project {project} not found")]
    ProjectNotFound { project: String },
    #[error("rate limited while fetching project {project}")]
    RateLimited { project: String },
    #[error("request failed: {0}")]
    Http(String),
    #[error("invalid mining config: {0}")]
    InvalidConfig(&'static str),
    #[error("could not read mining config: {0}")]
    Config(String),
    #[error("export failed: {0}")]
    Export(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
