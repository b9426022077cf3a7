//! Live artifact provider backed by the GitHub REST API.
//!
//! HTTP access goes through the [`HttpFetch`] trait so the pagination,
//! rate-limit and retry logic is testable without a network. Responses
//! are mapped onto the same [`ArtifactRecord`]s the offline dumps
//! produce, restricted to the whitelisted fields.

use std::collections::BTreeMap;
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::Deserialize;

use crate::artifacts::{ArtifactKind, ArtifactProvider, ArtifactRecord, ProviderPayload, RepoMeta};
use crate::error::{Error, Result};

/// A minimal HTTP response view: status, body, and the Retry-After hint
/// when the server sent one.
#[derive(Debug, Clone)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
    pub retry_after: Option<u64>,
}

pub trait HttpFetch: Send + Sync {
    fn get(&self, url: &str, token: Option<&str>) -> Result<HttpResponse>;
}

/// Blocking HTTP client used by the CLI.
pub struct UreqFetch {
    agent: ureq::Agent,
}

impl UreqFetch {
    pub fn new() -> Self {
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(30)))
            .build();
        UreqFetch {
            agent: config.into(),
        }
    }
}

impl Default for UreqFetch {
    fn default() -> Self {
        Self::new()
    }
}

impl HttpFetch for UreqFetch {
    fn get(&self, url: &str, token: Option<&str>) -> Result<HttpResponse> {
        let mut request = self
            .agent
            .get(url)
            .header("User-Agent", "docmine")
            .header("Accept", "application/vnd.github+json");
        if let Some(token) = token {
            request = request.header("Authorization", format!("Bearer {token}"));
        }
        let mut response = request
            .call()
            .map_err(|e| Error::Provider(format!("GET {url}: {e}")))?;
        let status = response.status().as_u16();
        let retry_after = response
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.parse().ok());
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Provider(format!("GET {url}: {e}")))?;
        Ok(HttpResponse {
            status,
            body,
            retry_after,
        })
    }
}

/// Bounded exponential backoff on rate-limit responses.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay_ms: 1000,
        }
    }
}

impl RetryPolicy {
    fn delay(&self, attempt: u32, retry_after: Option<u64>) -> Duration {
        let backoff = self.base_delay_ms.saturating_mul(1 << attempt.min(16));
        let hinted = retry_after.map(|s| s * 1000).unwrap_or(0);
        Duration::from_millis(backoff.max(hinted))
    }
}

enum Fetched {
    Body(String),
    RateLimitExhausted,
}

pub struct ApiProvider<F: HttpFetch> {
    base_url: String,
    token: Option<String>,
    fetch: F,
    retry: RetryPolicy,
}

impl ApiProvider<UreqFetch> {
    pub fn github(token: Option<String>) -> Self {
        ApiProvider::new(
            "https://api.github.com",
            token,
            UreqFetch::new(),
            RetryPolicy::default(),
        )
    }
}

impl<F: HttpFetch> ApiProvider<F> {
    pub fn new(
        base_url: impl Into<String>,
        token: Option<String>,
        fetch: F,
        retry: RetryPolicy,
    ) -> Self {
        ApiProvider {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            token,
            fetch,
            retry,
        }
    }

    fn get(&self, path: &str) -> Result<Fetched> {
        let url = format!("{}{path}", self.base_url);
        for attempt in 0..self.retry.max_attempts {
            let response = self.fetch.get(&url, self.token.as_deref())?;
            match response.status {
                200 => return Ok(Fetched::Body(response.body)),
                401 => return Err(Error::Auth(401)),
                429 => {}
                403 => {
                    let rate_limited = response.retry_after.is_some()
                        || response.body.to_ascii_lowercase().contains("rate limit");
                    if !rate_limited {
                        return Err(Error::Auth(403));
                    }
                }
                other => {
                    return Err(Error::Provider(format!(
                        "GET {url} returned status {other}"
                    )))
                }
            }
            if attempt + 1 < self.retry.max_attempts {
                let delay = self.retry.delay(attempt, response.retry_after);
                log::warn!(
                    "rate limited on {url} (attempt {}/{}), backing off {delay:?}",
                    attempt + 1,
                    self.retry.max_attempts
                );
                if !delay.is_zero() {
                    std::thread::sleep(delay);
                }
            }
        }
        Ok(Fetched::RateLimitExhausted)
    }

    /// Collect pages of a JSON-array endpoint until one comes back
    /// short, retries are exhausted (flagging `partial`), or the page
    /// cap is hit.
    fn get_paginated(&self, path: &str, partial: &mut bool) -> Result<Vec<serde_json::Value>> {
        const MAX_PAGES: u32 = 1000;
        let mut items = Vec::new();
        for page in 1..=MAX_PAGES {
            let sep = if path.contains('?') { '&' } else { '?' };
            let full = format!("{path}{sep}per_page=100&page={page}");
            match self.get(&full)? {
                Fetched::RateLimitExhausted => {
                    *partial = true;
                    return Ok(items);
                }
                Fetched::Body(body) => {
                    let page_items: Vec<serde_json::Value> = serde_json::from_str(&body)
                        .map_err(|e| Error::json(format!("GET {full}"), e))?;
                    if page_items.is_empty() {
                        return Ok(items);
                    }
                    let len = page_items.len();
                    items.extend(page_items);
                    if len < 100 {
                        return Ok(items);
                    }
                }
            }
        }
        log::warn!("{path}: stopping after {MAX_PAGES} pages; listing may be truncated");
        *partial = true;
        Ok(items)
    }
}

#[derive(Debug, Deserialize)]
struct ApiThread {
    number: u64,
    created_at: DateTime<Utc>,
    #[serde(default)]
    title: Option<String>,
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    pull_request: Option<serde_json::Value>,
}

#[derive(Debug, Deserialize)]
struct ApiIssueComment {
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    issue_url: Option<String>,
    #[serde(default)]
    pull_request_url: Option<String>,
}

#[derive(Debug, Deserialize)]
struct ApiCommit {
    sha: String,
    commit: ApiCommitInner,
}

#[derive(Debug, Deserialize)]
struct ApiCommitInner {
    #[serde(default)]
    message: Option<String>,
    author: ApiCommitAuthor,
}

#[derive(Debug, Deserialize)]
struct ApiCommitAuthor {
    date: DateTime<Utc>,
}

#[derive(Debug, Deserialize)]
struct ApiCommitComment {
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    commit_id: Option<String>,
}

#[derive(Debug, Deserialize)]
struct ApiRepo {
    #[serde(default)]
    fork: bool,
}

fn trailing_number(url: &str) -> Option<u64> {
    url.rsplit('/').next()?.parse().ok()
}

impl<F: HttpFetch> ArtifactProvider for ApiProvider<F> {
    fn name(&self) -> &'static str {
        "api"
    }

    fn repo_meta(&self, repo_id: &str) -> Result<RepoMeta> {
        let repo: ApiRepo = match self.get(&format!("/repos/{repo_id}"))? {
            Fetched::Body(body) => serde_json::from_str(&body)
                .map_err(|e| Error::json(format!("/repos/{repo_id}"), e))?,
            Fetched::RateLimitExhausted => {
                return Err(Error::Provider(format!(
                    "rate limit exhausted fetching metadata for {repo_id}"
                )))
            }
        };
        let mut partial = false;
        let pulls =
            self.get_paginated(&format!("/repos/{repo_id}/pulls?state=all"), &mut partial)?;
        Ok(RepoMeta {
            fork: repo.fork,
            pull_request_count: pulls.len() as u64,
        })
    }

    fn fetch(&self, repo_id: &str) -> Result<ProviderPayload> {
        let mut payload = ProviderPayload::default();
        let mut partial = false;

        // Issues and pull requests share the issues listing; entries
        // carrying a pull_request key are PRs and come from /pulls with
        // their own fields instead.
        let parse_threads = |raw: Vec<serde_json::Value>,
                             kind: ArtifactKind,
                             payload: &mut ProviderPayload|
         -> BTreeMap<u64, usize> {
            let mut index = BTreeMap::new();
            for value in raw {
                match serde_json::from_value::<ApiThread>(value) {
                    Ok(t) if kind == ArtifactKind::Issue && t.pull_request.is_some() => {}
                    Ok(t) => {
                        let record = match kind {
                            ArtifactKind::Issue => ArtifactRecord::issue(
                                t.number.to_string(),
                                t.created_at,
                                t.title,
                                t.body,
                                vec![],
                            ),
                            _ => ArtifactRecord::pull_request(
                                t.number.to_string(),
                                t.created_at,
                                t.title,
                                t.body,
                                vec![],
                            ),
                        };
                        index.insert(t.number, payload.records.len());
                        payload.records.push(record);
                    }
                    Err(err) => {
                        log::warn!("skipping malformed {kind:?} entry: {err}");
                        payload.malformed += 1;
                    }
                }
            }
            index
        };

        let issues_raw =
            self.get_paginated(&format!("/repos/{repo_id}/issues?state=all"), &mut partial)?;
        let issues_blank = issues_raw.is_empty();
        let issue_index = parse_threads(issues_raw, ArtifactKind::Issue, &mut payload);

        let pulls_raw =
            self.get_paginated(&format!("/repos/{repo_id}/pulls?state=all"), &mut partial)?;
        let pulls_blank = pulls_raw.is_empty();
        let pull_index = parse_threads(pulls_raw, ArtifactKind::PullRequest, &mut payload);

        // Conversation comments cover both issues and PRs; review-thread
        // comments are PR-only. Both ingest under the comment field.
        let comments_raw =
            self.get_paginated(&format!("/repos/{repo_id}/issues/comments"), &mut partial)?;
        let review_raw =
            self.get_paginated(&format!("/repos/{repo_id}/pulls/comments"), &mut partial)?;
        for value in comments_raw.into_iter().chain(review_raw) {
            match serde_json::from_value::<ApiIssueComment>(value) {
                Ok(c) => {
                    let number = c
                        .issue_url
                        .as_deref()
                        .and_then(trailing_number)
                        .or_else(|| c.pull_request_url.as_deref().and_then(trailing_number));
                    let slot = number
                        .and_then(|n| issue_index.get(&n).or_else(|| pull_index.get(&n)).copied());
                    match (slot, c.body) {
                        (Some(i), Some(body)) => payload.records[i]
                            .texts
                            .push((crate::artifacts::FieldName::Comment, body)),
                        _ => payload.malformed += 1,
                    }
                }
                Err(err) => {
                    log::warn!("skipping malformed comment entry: {err}");
                    payload.malformed += 1;
                }
            }
        }

        let commits_raw = self.get_paginated(&format!("/repos/{repo_id}/commits"), &mut partial)?;
        let commits_blank = commits_raw.is_empty();
        let mut commit_index = BTreeMap::new();
        for value in commits_raw {
            match serde_json::from_value::<ApiCommit>(value) {
                Ok(c) => {
                    let record = ArtifactRecord::commit(
                        c.sha.clone(),
                        c.commit.author.date,
                        c.commit.message,
                        vec![],
                    );
                    commit_index.insert(c.sha, payload.records.len());
                    payload.records.push(record);
                }
                Err(err) => {
                    log::warn!("skipping malformed commit entry: {err}");
                    payload.malformed += 1;
                }
            }
        }

        let commit_comments_raw =
            self.get_paginated(&format!("/repos/{repo_id}/comments"), &mut partial)?;
        for value in commit_comments_raw {
            match serde_json::from_value::<ApiCommitComment>(value) {
                Ok(c) => {
                    let slot = c.commit_id.as_deref().and_then(|id| commit_index.get(id));
                    match (slot, c.body) {
                        (Some(&i), Some(body)) => payload.records[i]
                            .texts
                            .push((crate::artifacts::FieldName::Comment, body)),
                        _ => payload.malformed += 1,
                    }
                }
                Err(err) => {
                    log::warn!("skipping malformed commit comment: {err}");
                    payload.malformed += 1;
                }
            }
        }

        if issues_blank {
            payload.blank_kinds.push(ArtifactKind::Issue);
        }
        if pulls_blank {
            payload.blank_kinds.push(ArtifactKind::PullRequest);
        }
        if commits_blank {
            payload.blank_kinds.push(ArtifactKind::Commit);
        }
        payload.partial = partial;
        Ok(payload)
    }
}
