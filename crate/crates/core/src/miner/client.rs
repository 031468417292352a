use std::sync::Arc;
use std::time::{Duration, Instant};

use reqwest::header::HeaderMap;
use reqwest::{StatusCode, Url};
use serde_json::Value;
use tokio::sync::Mutex;

use super::MinerError;

/// Spaces out requests to at most `per_second`, shared by every worker that
/// holds a clone of the `Arc`.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    next_slot: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(per_second: f64) -> Result<Self, MinerError> {
        if !(per_second.is_finite() && per_second > 0.0) {
            return Err(MinerError::InvalidConfig("rate_limit must be positive"));
        }
        Ok(Self {
            interval: Duration::from_secs_f64(1.0 / per_second),
            next_slot: Mutex::new(None),
        })
    }

    pub async fn acquire(&self) {
        let wait = {
            let mut slot = self.next_slot.lock().await;
            let now = Instant::now();
            let start = slot.map_or(now, |s| s.max(now));
            *slot = Some(start + self.interval);
            start - now
        };
        if !wait.is_zero() {
            tokio::time::sleep(wait).await;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { max_retries: 3, base_delay: Duration::from_millis(500) }
    }
}

/// Minimal client for the GitLab v4 issue listing.
#[derive(Debug, Clone)]
pub struct GitLabClient {
    http: reqwest::Client,
    base_url: Url,
    token: Option<String>,
    page_size: u32,
    limiter: Arc<RateLimiter>,
    retry: RetryPolicy,
}

enum Attempt {
    Done(Vec<Value>, Option<String>),
    Retry(MinerError),
}

impl GitLabClient {
    pub fn new(
        base_url: &str,
        token: Option<String>,
        page_size: u32,
        limiter: Arc<RateLimiter>,
        retry: RetryPolicy,
    ) -> Result<Self, MinerError> {
        if !(1..=100).contains(&page_size) {
            return Err(MinerError::InvalidConfig("page_size must lie in 1..=100"));
        }
        let base_url =
            Url::parse(base_url).map_err(|_| MinerError::InvalidConfig("base_url is not a URL"))?;
        Ok(Self { http: reqwest::Client::new(), base_url, token, page_size, limiter, retry })
    }

    fn issues_url(&self, project: &str, page: u32) -> Result<Url, MinerError> {
        let mut url = self.base_url.clone();
        url.path_segments_mut()
            .map_err(|_| MinerError::InvalidConfig("base_url cannot be a base"))?
            .pop_if_empty()
            // the project path is one segment, so "group/name" becomes "group%2Fname"
            .extend(["api", "v4", "projects", project, "issues"]);
        url.query_pairs_mut()
            .append_pair("state", "closed")
            .append_pair("order_by", "created_at")
            .append_pair("sort", "asc")
            .append_pair("per_page", &self.page_size.to_string())
            .append_pair("page", &page.to_string());
        Ok(url)
    }

    /// Fetches one page of raw issues with retries. Returns the issues and
    /// the `X-Next-Page` header when the server sent one.
    pub async fn fetch_page(
        &self,
        project: &str,
        page: u32,
    ) -> Result<(Vec<Value>, Option<String>), MinerError> {
        let url = self.issues_url(project, page)?;
        let mut attempt = 0;
        loop {
            self.limiter.acquire().await;
            match self.try_fetch(&url, project).await? {
                Attempt::Done(issues, next) => return Ok((issues, next)),
                Attempt::Retry(err) if attempt >= self.retry.max_retries => return Err(err),
                Attempt::Retry(err) => {
                    let delay = self.retry.base_delay * 2u32.pow(attempt);
                    log::debug!("{project} page {page}: {err}; retrying in {delay:?}");
                    tokio::time::sleep(delay).await;
                    attempt += 1;
                }
            }
        }
    }

    async fn try_fetch(&self, url: &Url, project: &str) -> Result<Attempt, MinerError> {
        let mut request = self.http.get(url.clone());
        if let Some(token) = &self.token {
            request = request.header("PRIVATE-TOKEN", token);
        }
        let response = match request.send().await {
            Ok(r) => r,
            Err(e) => return Ok(Attempt::Retry(MinerError::Http(e.to_string()))),
        };

        let status = response.status();
        match status {
            StatusCode::UNAUTHORIZED | StatusCode::FORBIDDEN => {
                return Err(MinerError::AuthFailed { project: project.to_owned() })
            }
            StatusCode::NOT_FOUND => {
                return Err(MinerError::ProjectNotFound { project: project.to_owned() })
            }
            StatusCode::TOO_MANY_REQUESTS => {
                return Ok(Attempt::Retry(MinerError::RateLimited { project: project.to_owned() }))
            }
            s if s.is_server_error() => {
                return Ok(Attempt::Retry(MinerError::Http(format!("status {s}"))))
            }
            s if !s.is_success() => return Err(MinerError::Http(format!("status {s}"))),
            _ => {}
        }

        let next = next_page_header(response.headers());
        match response.json::<Vec<Value>>().await {
            Ok(issues) => Ok(Attempt::Done(issues, next)),
            Err(e) => Ok(Attempt::Retry(MinerError::Http(e.to_string()))),
        }
    }

    /// Pages through a project's issues until an empty page (or an empty
    /// `X-Next-Page`), handing each page to `sink`.
    pub async fn for_each_page<F>(&self, project: &str, mut sink: F) -> Result<(), MinerError>
    where
        F: FnMut(Vec<Value>) -> Result<(), MinerError>,
    {
        let mut page = 1;
        loop {
            let (issues, next) = self.fetch_page(project, page).await?;
            if issues.is_empty() {
                return Ok(());
            }
            sink(issues)?;
            if next.as_deref() == Some("") {
                return Ok(());
            }
            page += 1;
        }
    }

    pub async fn fetch_project_issues(&self, project: &str) -> Result<Vec<Value>, MinerError> {
        let mut all = Vec::new();
        self.for_each_page(project, |page| {
            all.extend(page);
            Ok(())
        })
        .await?;
        Ok(all)
    }
}

fn next_page_header(headers: &HeaderMap) -> Option<String> {
    headers
        .get("x-next-page")
        .and_then(|v| v.to_str().ok())
        .map(|v| v.trim().to_owned())
}
