use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the mining pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown language tag `{0}` (expected cpp, csharp, java or python)")]
    UnknownLanguage(String),

    #[error("unknown documentation source `{0}`")]
    UnknownSource(String),

    #[error("empty corpus: no documents with tokens remain")]
    EmptyCorpus,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("label count {got} does not match topic count {expected}")]
    LabelArity { expected: usize, got: usize },

    #[error("invalid lexicon: {0}")]
    Lexicon(String),

    #[error("repo list {path}, line {line}: {msg}")]
    RepoList {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("artifact provider error: {0}")]
    Provider(String),

    #[error("authentication failed against the artifact API (status {0})")]
    Auth(u16),

    #[error("no eligible repositories (all were forks, had zero pull requests, or failed)")]
    NoEligibleRepos,

    #[error("json error in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
