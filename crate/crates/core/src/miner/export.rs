use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IssueRecord, MinerError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectSummary {
    pub project: String,
    /// Raw issues returned by the API.
    pub fetched: usize,
    /// Issues that passed the closed + weighted filter.
    pub issues: usize,
    pub story_points: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub project_count: usize,
    pub issue_count: usize,
    pub total_story_points: f64,
    pub projects: Vec<ProjectSummary>,
}

impl fmt::Display for DatasetSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "projects: {}", self.project_count)?;
        writeln!(f, "issues: {}", self.issue_count)?;
        writeln!(f, "story_points: {}", self.total_story_points)?;
        for p in &self.projects {
            writeln!(
                f,
                "  {}: {} of {} issues, {} story points",
                p.project, p.issues, p.fetched, p.story_points
            )?;
        }
        Ok(())
    }
}

pub(crate) const CSV_HEADER: [&str; 9] = [
    "title",
    "description",
    "weight",
    "project_id",
    "issue_id",
    "state",
    "created_at",
    "closed_at",
    "labels",
];

/// Writes `bytes` next to `path` and renames it into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), MinerError> {
    let io_err = |source| MinerError::Io { path: path.to_owned(), source };
    let tmp = path.with_extension("tmp");
    let mut file = fs::File::create(&tmp).map_err(io_err)?;
    file.write_all(bytes).and_then(|_| file.sync_all()).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

pub(crate) fn to_csv(records: &[IssueRecord]) -> Result<Vec<u8>, MinerError> {
    let mut writer = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Always)
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| MinerError::Export(e.to_string());
    writer.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        let state = match r.state {
            super::IssueState::Opened => "opened",
            super::IssueState::Closed => "closed",
        };
        writer
            .write_record([
                r.title.as_str(),
                r.description.as_str(),
                &r.weight.to_string(),
                &r.project_id.to_string(),
                &r.issue_id.to_string(),
                state,
                r.created_at.as_deref().unwrap_or(""),
                r.closed_at.as_deref().unwrap_or(""),
                &r.labels.join(";"),
            ])
            .map_err(csv_err)?;
    }
    writer.into_inner().map_err(|e| MinerError::Export(e.to_string()))
}

pub(crate) fn to_json(records: &[IssueRecord]) -> Result<Vec<u8>, MinerError> {
    let mut bytes =
        serde_json::to_vec_pretty(records).map_err(|e| MinerError::Export(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}
