//! Rule-based documentation-type labeling.
//!
//! Each topic's top keywords are compared against five 10-keyword
//! category lexicons; the topic takes the best-matching category unless
//! all five similarity scores sit within 0.05 of each other, in which
//! case it falls into the `others` bucket. Labeled topics then turn into
//! per-source documentation-type percentages weighted by topic mass.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lda::{LdaModel, TopicSummary};
use crate::types::Source;

/// The documentation types the automated classifier can assign.
/// Architecture-related documentation is deliberately absent: no
/// keywords for it were observed in these sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocType {
    ApiRelated,
    FileRelated,
    ProjectRelated,
    LicenseRelated,
    ErrorRelated,
    Others,
}

impl DocType {
    pub const ALL: [DocType; 6] = [
        DocType::ApiRelated,
        DocType::FileRelated,
        DocType::ProjectRelated,
        DocType::LicenseRelated,
        DocType::ErrorRelated,
        DocType::Others,
    ];

    /// The five lexicon-backed categories in fixed tie-break order.
    pub const NAMED: [DocType; 5] = [
        DocType::ApiRelated,
        DocType::FileRelated,
        DocType::ProjectRelated,
        DocType::LicenseRelated,
        DocType::ErrorRelated,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DocType::ApiRelated => "api_related",
            DocType::FileRelated => "file_related",
            DocType::ProjectRelated => "project_related",
            DocType::LicenseRelated => "license_related",
            DocType::ErrorRelated => "error_related",
            DocType::Others => "others",
        }
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The keyword sets the rule classifier matches against: one set of
/// exactly 10 lowercase keywords per named category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategoryLexicon {
    entries: BTreeMap<DocType, BTreeSet<String>>,
}

/// The lexicon shipped with the tool, seeded from the definitional
/// vocabulary of the observed documentation types.
pub const DEFAULT_LEXICON: &str = include_str!("../data/lexicon_v1.json");
pub const DEFAULT_LEXICON_NAME: &str = "lexicon_v1";

impl CategoryLexicon {
    pub fn default_lexicon() -> Self {
        Self::from_json(DEFAULT_LEXICON).expect("shipped lexicon is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, Vec<String>> =
            serde_json::from_str(text).map_err(|e| Error::json("lexicon", e))?;
        let mut entries = BTreeMap::new();
        for (key, words) in raw {
            let doc_type = DocType::NAMED
                .iter()
                .find(|t| t.as_str() == key)
                .copied()
                .ok_or_else(|| Error::Lexicon(format!("unknown category `{key}`")))?;
            if words.len() != 10 {
                return Err(Error::Lexicon(format!(
                    "category `{key}` has {} keywords, expected exactly 10",
                    words.len()
                )));
            }
            let set: BTreeSet<String> = words.iter().cloned().collect();
            if set.len() != 10 {
                return Err(Error::Lexicon(format!(
                    "category `{key}` contains duplicate keywords"
                )));
            }
            if let Some(bad) = set.iter().find(|w| *w != &w.to_lowercase()) {
                return Err(Error::Lexicon(format!(
                    "keyword `{bad}` in `{key}` is not lowercase"
                )));
            }
            entries.insert(doc_type, set);
        }
        if entries.len() != 5 {
            return Err(Error::Lexicon(format!(
                "expected 5 categories, found {}",
                entries.len()
            )));
        }
        Ok(CategoryLexicon { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn keywords(&self, doc_type: DocType) -> &BTreeSet<String> {
        &self.entries[&doc_type]
    }

    /// Content fingerprint recorded in report provenance.
    pub fn sha256(&self) -> String {
        let mut hasher = Sha256::new();
        for (doc_type, words) in &self.entries {
            hasher.update(doc_type.as_str().as_bytes());
            for word in words {
                hasher.update(b" ");
                hasher.update(word.as_bytes());
            }
            hasher.update(b"\n");
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityMetric {
    Overlap,
    Cosine,
}

impl FromStr for SimilarityMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "overlap" => Ok(SimilarityMetric::Overlap),
            "cosine" => Ok(SimilarityMetric::Cosine),
            other => Err(Error::InvalidConfig(format!(
                "unknown similarity metric `{other}`"
            ))),
        }
    }
}

/// Overlap coefficient between keyword sets:
/// |A intersect B| / min(|A|, |B|).
pub fn overlap_similarity(topic: &BTreeSet<String>, lexicon: &BTreeSet<String>) -> f64 {
    if topic.is_empty() || lexicon.is_empty() {
        return 0.0;
    }
    let shared = topic.intersection(lexicon).count();
    shared as f64 / topic.len().min(lexicon.len()) as f64
}

/// Cosine between the topic's keyword-weight vector and the lexicon's
/// 0/1 indicator vector.
pub fn cosine_similarity(summary: &TopicSummary, lexicon: &BTreeSet<String>) -> f64 {
    let dot: f64 = summary
        .keywords
        .iter()
        .filter(|(token, _)| lexicon.contains(token))
        .map(|(_, w)| *w)
        .sum();
    let topic_norm: f64 = summary
        .keywords
        .iter()
        .map(|(_, w)| w * w)
        .sum::<f64>()
        .sqrt();
    let lexicon_norm = (lexicon.len() as f64).sqrt();
    if topic_norm == 0.0 || lexicon_norm == 0.0 {
        return 0.0;
    }
    dot / (topic_norm * lexicon_norm)
}

/// Similarity of a topic to one category's keyword set.
pub fn similarity(
    summary: &TopicSummary,
    lexicon: &BTreeSet<String>,
    metric: SimilarityMetric,
) -> f64 {
    match metric {
        SimilarityMetric::Overlap => {
            let topic: BTreeSet<String> = summary.keywords.iter().map(|(t, _)| t.clone()).collect();
            overlap_similarity(&topic, lexicon)
        }
        SimilarityMetric::Cosine => cosine_similarity(summary, lexicon),
    }
}

/// Default near-equality threshold for the `others` rule.
pub const DEFAULT_TIE_EPS: f64 = 0.05;

/// Decide a label from the five per-category scores (in [`DocType::NAMED`]
/// order): `others` when all scores sit within `tie_eps` of each other,
/// otherwise the argmax category, exact ties breaking by category order.
pub fn label_from_scores(scores: [f64; 5], tie_eps: f64) -> DocType {
    let mut max = scores[0];
    let mut min = scores[0];
    for s in &scores[1..] {
        if *s > max {
            max = *s;
        }
        if *s < min {
            min = *s;
        }
    }
    if max - min < tie_eps {
        return DocType::Others;
    }
    for (i, category) in DocType::NAMED.iter().enumerate() {
        if scores[i] == max {
            return *category;
        }
    }
    DocType::Others
}

/// Score a topic against all five categories and label it.
pub fn label_topic(
    summary: &TopicSummary,
    lexicon: &CategoryLexicon,
    tie_eps: f64,
    metric: SimilarityMetric,
) -> DocType {
    let mut scores = [0.0f64; 5];
    for (i, category) in DocType::NAMED.iter().enumerate() {
        scores[i] = similarity(summary, lexicon.keywords(*category), metric);
    }
    label_from_scores(scores, tie_eps)
}

/// How topic mass is measured when converting labels to percentages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopicWeighting {
    /// Tokens assigned to the topic (topic frequency in the artifact).
    TokenMass,
    /// Every topic counts once.
    Uniform,
}

/// Documentation-type percentages for one (repository, source) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeDistribution {
    pub source: Source,
    pub repo_id: String,
    pub percentages: BTreeMap<DocType, f64>,
    /// True when the source had no tokens; the percentages are all zero
    /// and the entry is excluded from averages.
    pub empty: bool,
}

impl TypeDistribution {
    pub fn empty_for(source: Source, repo_id: impl Into<String>) -> Self {
        TypeDistribution {
            source,
            repo_id: repo_id.into(),
            percentages: DocType::ALL.iter().map(|t| (*t, 0.0)).collect(),
            empty: true,
        }
    }

    pub fn pct(&self, doc_type: DocType) -> f64 {
        self.percentages[&doc_type]
    }
}

/// Convert per-topic labels into a documentation-type distribution,
/// weighting each topic by its assigned token mass.
pub fn distribution(
    model: &LdaModel,
    labels: &[DocType],
    source: Source,
    repo_id: &str,
    weighting: TopicWeighting,
) -> Result<TypeDistribution> {
    if labels.len() != model.k {
        return Err(Error::LabelArity {
            expected: model.k,
            got: labels.len(),
        });
    }
    let masses: Vec<u64> = match weighting {
        TopicWeighting::TokenMass => model.topic_masses(),
        TopicWeighting::Uniform => vec![1; model.k],
    };
    let total: u64 = masses.iter().sum();
    if total == 0 {
        return Ok(TypeDistribution::empty_for(source, repo_id));
    }
    let mut by_type: BTreeMap<DocType, u64> = DocType::ALL.iter().map(|t| (*t, 0)).collect();
    for (label, mass) in labels.iter().zip(&masses) {
        *by_type.get_mut(label).unwrap() += mass;
    }
    let percentages = by_type
        .into_iter()
        .map(|(t, mass)| (t, 100.0 * mass as f64 / total as f64))
        .collect();
    Ok(TypeDistribution {
        source,
        repo_id: repo_id.to_string(),
        percentages,
        empty: false,
    })
}
