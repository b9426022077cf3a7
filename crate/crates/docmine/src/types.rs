//! Shared domain tags: the four studied languages and the five
//! documentation sources every downstream stage keys on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Programming languages whose source files are lexed for comments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    Cpp,
    CSharp,
    Java,
    Python,
}

impl Language {
    pub const ALL: [Language; 4] = [
        Language::Cpp,
        Language::CSharp,
        Language::Java,
        Language::Python,
    ];

    /// Language for a source-file extension (lowercase, no dot).
    pub fn from_extension(ext: &str) -> Option<Language> {
        match ext {
            "cpp" => Some(Language::Cpp),
            "cs" => Some(Language::CSharp),
            "java" => Some(Language::Java),
            "py" => Some(Language::Python),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Language::Cpp => "cpp",
            Language::CSharp => "csharp",
            Language::Java => "java",
            Language::Python => "python",
        }
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "cpp" | "c++" => Ok(Language::Cpp),
            "csharp" | "c#" | "cs" => Ok(Language::CSharp),
            "java" => Ok(Language::Java),
            "python" | "py" => Ok(Language::Python),
            other => Err(Error::UnknownLanguage(other.to_string())),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The five documentation sources the pipeline extracts text from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    SourceCodeComments,
    TextualDocs,
    Commits,
    Issues,
    PullRequests,
}

impl Source {
    pub const ALL: [Source; 5] = [
        Source::SourceCodeComments,
        Source::TextualDocs,
        Source::Commits,
        Source::Issues,
        Source::PullRequests,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Source::SourceCodeComments => "source_code_comments",
            Source::TextualDocs => "textual_docs",
            Source::Commits => "commits",
            Source::Issues => "issues",
            Source::PullRequests => "pull_requests",
        }
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "source_code_comments" => Ok(Source::SourceCodeComments),
            "textual_docs" => Ok(Source::TextualDocs),
            "commits" => Ok(Source::Commits),
            "issues" => Ok(Source::Issues),
            "pull_requests" => Ok(Source::PullRequests),
            other => Err(Error::UnknownSource(other.to_string())),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn language_tag_round_trip() {
        for lang in Language::ALL {
            assert_eq!(lang.as_str().parse::<Language>().unwrap(), lang);
        }
    }

    #[test]
    fn unsupported_language_is_a_typed_error() {
        let err = "ruby".parse::<Language>().unwrap_err();
        assert!(matches!(err, Error::UnknownLanguage(_)));
    }

    #[test]
    fn source_tag_round_trip() {
        for source in Source::ALL {
            assert_eq!(source.as_str().parse::<Source>().unwrap(), source);
        }
    }
}
