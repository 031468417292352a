use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::MinerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IssueState {
    Opened,
    Closed,
}

/// A closed issue with a positive weight, ready for export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueRecord {
    pub project_id: u64,
    /// Project-scoped issue number (`iid`).
    pub issue_id: u64,
    pub title: String,
    pub description: String,
    pub state: IssueState,
    /// Story points, taken from the `weight` field.
    pub weight: f64,
    pub created_at: Option<String>,
    pub closed_at: Option<String>,
    pub labels: Vec<String>,
    /// Untouched API payload.
    pub raw: Value,
}

fn required_u64(raw: &Value, field: &'static str) -> Result<u64, MinerError> {
    raw.get(field).and_then(Value::as_u64).ok_or(MinerError::MalformedIssue(field))
}

fn optional_str(raw: &Value, field: &str) -> Option<String> {
    raw.get(field).and_then(Value::as_str).map(str::to_owned)
}

/// Keeps an issue only when it is closed and carries a positive weight.
///
/// Fails when the identifying fields (`project_id`, `iid`, `state`) are
/// missing or mistyped.
pub fn filter_issue(raw: &Value) -> Result<Option<IssueRecord>, MinerError> {
    let project_id = required_u64(raw, "project_id")?;
    let issue_id = required_u64(raw, "iid")?;
    let state = match raw.get("state").and_then(Value::as_str) {
        Some("closed") => IssueState::Closed,
        Some(_) => return Ok(None),
        None => return Err(MinerError::MalformedIssue("state")),
    };

    let weight = match raw.get("weight").and_then(Value::as_f64) {
        Some(w) if w.is_finite() && w > 0.0 => w,
        _ => return Ok(None),
    };

    let labels = raw
        .get("labels")
        .and_then(Value::as_array)
        .map(|ls| ls.iter().filter_map(Value::as_str).map(str::to_owned).collect())
        .unwrap_or_default();

    Ok(Some(IssueRecord {
        project_id,
        issue_id,
        title: optional_str(raw, "title").unwrap_or_default(),
        description: optional_str(raw, "description").unwrap_or_default(),
        state,
        weight,
        created_at: optional_str(raw, "created_at"),
        closed_at: optional_str(raw, "closed_at"),
        labels,
        raw: raw.clone(),
    }))
}
