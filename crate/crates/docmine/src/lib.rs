//! docmine — documentation mining for Git repositories.
//!
//! Quantifies what documentation types exist in a repository and where
//! they live, by pulling text out of five sources (source-code comments,
//! textual files, commits, issues, pull requests), fitting seeded LDA
//! topic models per repository and source, labeling topics against
//! keyword lexicons, and aggregating the results into distribution and
//! contribution reports.

pub mod artifacts;
pub mod classify;
pub mod comments;
pub mod error;
pub mod github;
pub mod lda;
pub mod pipeline;
pub mod report;
pub mod scan;
pub mod text;
pub mod types;

pub use error::{Error, Result};
