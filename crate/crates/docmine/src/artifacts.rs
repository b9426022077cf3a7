//! Issue, pull-request and commit ingestion.
//!
//! Artifacts arrive either from offline JSON-lines dumps or from the
//! live API (see [`crate::github`]); both paths produce the same
//! [`ArtifactRecord`]s, carrying only the documentation-bearing fields.
//! A recency window drops records older than `span_years` before the
//! anchor date (boundary inclusive).

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;

use chrono::{DateTime, Months, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    Issue,
    PullRequest,
    Commit,
}

impl ArtifactKind {
    pub const ALL: [ArtifactKind; 3] = [
        ArtifactKind::Issue,
        ArtifactKind::PullRequest,
        ArtifactKind::Commit,
    ];

    pub fn dump_file(&self) -> &'static str {
        match self {
            ArtifactKind::Issue => "issues.jsonl",
            ArtifactKind::PullRequest => "pulls.jsonl",
            ArtifactKind::Commit => "commits.jsonl",
        }
    }
}

/// The whitelisted text fields of Table-style artifact schemas: title,
/// body and comments for issues and pull requests; message and comments
/// for commits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldName {
    Title,
    Body,
    Message,
    Comment,
}

impl FieldName {
    fn allowed_for(&self, kind: ArtifactKind) -> bool {
        match kind {
            ArtifactKind::Issue | ArtifactKind::PullRequest => {
                matches!(
                    self,
                    FieldName::Title | FieldName::Body | FieldName::Comment
                )
            }
            ArtifactKind::Commit => matches!(self, FieldName::Message | FieldName::Comment),
        }
    }
}

/// One artifact with its documentation-bearing texts in field order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub kind: ArtifactKind,
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub texts: Vec<(FieldName, String)>,
}

impl ArtifactRecord {
    pub fn issue(
        id: impl Into<String>,
        created_at: DateTime<Utc>,
        title: Option<String>,
        body: Option<String>,
        comments: Vec<String>,
    ) -> Self {
        Self::threaded(
            ArtifactKind::Issue,
            id.into(),
            created_at,
            title,
            body,
            comments,
        )
    }

    pub fn pull_request(
        id: impl Into<String>,
        created_at: DateTime<Utc>,
        title: Option<String>,
        body: Option<String>,
        comments: Vec<String>,
    ) -> Self {
        Self::threaded(
            ArtifactKind::PullRequest,
            id.into(),
            created_at,
            title,
            body,
            comments,
        )
    }

    fn threaded(
        kind: ArtifactKind,
        id: String,
        created_at: DateTime<Utc>,
        title: Option<String>,
        body: Option<String>,
        comments: Vec<String>,
    ) -> Self {
        let mut texts = Vec::new();
        if let Some(t) = title {
            texts.push((FieldName::Title, t));
        }
        if let Some(b) = body {
            texts.push((FieldName::Body, b));
        }
        texts.extend(comments.into_iter().map(|c| (FieldName::Comment, c)));
        ArtifactRecord {
            kind,
            id,
            created_at,
            texts,
        }
    }

    pub fn commit(
        id: impl Into<String>,
        created_at: DateTime<Utc>,
        message: Option<String>,
        comments: Vec<String>,
    ) -> Self {
        let mut texts = Vec::new();
        if let Some(m) = message {
            texts.push((FieldName::Message, m));
        }
        texts.extend(comments.into_iter().map(|c| (FieldName::Comment, c)));
        ArtifactRecord {
            kind: ArtifactKind::Commit,
            id: id.into(),
            created_at,
            texts,
        }
    }

    /// Checks the field whitelist invariant.
    pub fn validate(&self) -> Result<()> {
        for (field, _) in &self.texts {
            if !field.allowed_for(self.kind) {
                return Err(Error::Provider(format!(
                    "field {field:?} is not allowed on {:?} records",
                    self.kind
                )));
            }
        }
        Ok(())
    }
}

/// The anchor-minus-N-years recency filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecencyWindow {
    pub anchor_date: NaiveDate,
    pub span_years: u32,
}

impl RecencyWindow {
    pub fn new(anchor_date: NaiveDate, span_years: u32) -> Result<Self> {
        if span_years < 1 {
            return Err(Error::InvalidConfig("span_years must be >= 1".into()));
        }
        Ok(RecencyWindow {
            anchor_date,
            span_years,
        })
    }

    /// Oldest admissible date (inclusive).
    pub fn cutoff(&self) -> NaiveDate {
        self.anchor_date
            .checked_sub_months(Months::new(12 * self.span_years))
            .unwrap_or(self.anchor_date)
    }

    pub fn contains(&self, created_at: DateTime<Utc>) -> bool {
        created_at.date_naive() >= self.cutoff()
    }
}

/// Raw per-repository payload from a provider, before windowing.
#[derive(Debug, Clone, Default)]
pub struct ProviderPayload {
    pub records: Vec<ArtifactRecord>,
    /// Kinds for which the provider returned an empty or blank payload.
    pub blank_kinds: Vec<ArtifactKind>,
    /// Malformed entries skipped while parsing.
    pub malformed: usize,
    /// True when rate-limit retries were exhausted and data may be
    /// incomplete.
    pub partial: bool,
}

/// Repository metadata used by the eligibility filter.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct RepoMeta {
    #[serde(default)]
    pub fork: bool,
    #[serde(default)]
    pub pull_request_count: u64,
}

pub trait ArtifactProvider: Send + Sync {
    fn name(&self) -> &'static str;
    fn repo_meta(&self, repo_id: &str) -> Result<RepoMeta>;
    fn fetch(&self, repo_id: &str) -> Result<ProviderPayload>;
}

/// Windowed artifact load for one repository.
#[derive(Debug, Clone, Default)]
pub struct ArtifactLoad {
    pub records: Vec<ArtifactRecord>,
    pub blank_kinds: Vec<ArtifactKind>,
    pub malformed: usize,
    pub partial: bool,
}

/// Fetch a repository's artifacts and keep the records inside the
/// recency window (cutoff date inclusive).
pub fn load_artifacts(
    provider: &dyn ArtifactProvider,
    repo_id: &str,
    window: &RecencyWindow,
) -> Result<ArtifactLoad> {
    let payload = provider.fetch(repo_id)?;
    let records = payload
        .records
        .into_iter()
        .filter(|r| window.contains(r.created_at))
        .collect();
    Ok(ArtifactLoad {
        records,
        blank_kinds: payload.blank_kinds,
        malformed: payload.malformed,
        partial: payload.partial,
    })
}

/// The non-empty field texts of a record, in (title, body, comments...)
/// order for issues and pull requests, (message, comments...) for
/// commits.
pub fn extract_fields(record: &ArtifactRecord) -> Vec<String> {
    record
        .texts
        .iter()
        .filter(|(_, text)| !text.trim().is_empty())
        .map(|(_, text)| text.clone())
        .collect()
}

// Dump entry shapes. Unknown fields (status, date, labels, ...) are
// deliberately ignored.
#[derive(Debug, Deserialize)]
struct ThreadedEntry {
    id: serde_json::Value,
    created_at: DateTime<Utc>,
    #[serde(default)]
    title: Option<String>,
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    comments: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct CommitEntry {
    id: serde_json::Value,
    created_at: DateTime<Utc>,
    #[serde(default)]
    message: Option<String>,
    #[serde(default)]
    comments: Vec<String>,
}

fn id_string(value: &serde_json::Value) -> String {
    match value {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Offline provider reading `<dir>/<repo_id>/{issues,pulls,commits}.jsonl`
/// plus an optional `meta.json` with the fork flag and pull-request count.
pub struct DumpProvider {
    dir: PathBuf,
}

impl DumpProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        DumpProvider { dir: dir.into() }
    }

    fn read_kind(
        &self,
        repo_id: &str,
        kind: ArtifactKind,
        payload: &mut ProviderPayload,
    ) -> Result<()> {
        let path = self.dir.join(repo_id).join(kind.dump_file());
        if !path.exists() {
            payload.blank_kinds.push(kind);
            return Ok(());
        }
        let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
        let mut seen = 0usize;
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(&path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            seen += 1;
            let parsed = match kind {
                ArtifactKind::Commit => serde_json::from_str::<CommitEntry>(&line).map(|e| {
                    ArtifactRecord::commit(id_string(&e.id), e.created_at, e.message, e.comments)
                }),
                ArtifactKind::Issue => serde_json::from_str::<ThreadedEntry>(&line).map(|e| {
                    ArtifactRecord::issue(
                        id_string(&e.id),
                        e.created_at,
                        e.title,
                        e.body,
                        e.comments,
                    )
                }),
                ArtifactKind::PullRequest => {
                    serde_json::from_str::<ThreadedEntry>(&line).map(|e| {
                        ArtifactRecord::pull_request(
                            id_string(&e.id),
                            e.created_at,
                            e.title,
                            e.body,
                            e.comments,
                        )
                    })
                }
            };
            match parsed {
                Ok(record) => payload.records.push(record),
                Err(err) => {
                    log::warn!(
                        "skipping malformed entry {}:{}: {err}",
                        path.display(),
                        lineno + 1
                    );
                    payload.malformed += 1;
                }
            }
        }
        if seen == 0 {
            payload.blank_kinds.push(kind);
        }
        Ok(())
    }
}

impl ArtifactProvider for DumpProvider {
    fn name(&self) -> &'static str {
        "dump"
    }

    fn repo_meta(&self, repo_id: &str) -> Result<RepoMeta> {
        let meta_path = self.dir.join(repo_id).join("meta.json");
        if meta_path.exists() {
            let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
            return serde_json::from_str(&text)
                .map_err(|e| Error::json(meta_path.display().to_string(), e));
        }
        // Without metadata, fall back to the pulls dump for the count.
        let pulls = self
            .dir
            .join(repo_id)
            .join(ArtifactKind::PullRequest.dump_file());
        let count = match fs::read_to_string(&pulls) {
            Ok(text) => text.lines().filter(|l| !l.trim().is_empty()).count() as u64,
            Err(_) => 0,
        };
        Ok(RepoMeta {
            fork: false,
            pull_request_count: count,
        })
    }

    fn fetch(&self, repo_id: &str) -> Result<ProviderPayload> {
        let mut payload = ProviderPayload::default();
        for kind in ArtifactKind::ALL {
            self.read_kind(repo_id, kind, &mut payload)?;
        }
        Ok(payload)
    }
}
