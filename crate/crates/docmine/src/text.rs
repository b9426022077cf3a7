//! Text normalization and bag-of-words corpus construction.
//!
//! Raw text from every source is turned into lowercase token streams:
//! identifier-aware splitting (snake_case and camelCase fall apart into
//! constituent words), URL and stopword removal, and a length-two
//! minimum. Per-repository, per-source corpora are built separately so
//! no repository's topics are influenced by another's data.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::types::Source;

/// The English stopword list shipped with the tool, one token per line.
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

/// Token stream of one document, tagged with its origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDocument {
    pub source: Source,
    pub repo_id: String,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Tokenizer {
    stopwords: BTreeSet<String>,
    stem: bool,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer {
            stopwords: parse_stopwords(DEFAULT_STOPWORDS),
            stem: false,
        }
    }
}

impl Tokenizer {
    pub fn new(stopwords: BTreeSet<String>, stem: bool) -> Self {
        Tokenizer { stopwords, stem }
    }

    pub fn from_stopword_file(path: &Path, stem: bool) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Tokenizer::new(parse_stopwords(&text), stem))
    }

    /// Split on non-alphanumeric boundaries and camelCase transitions,
    /// lowercase, and drop URLs, pure numbers, stopwords and tokens
    /// shorter than two characters.
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for chunk in text.split_whitespace() {
            if is_url(chunk) {
                continue;
            }
            for run in chunk.split(|c: char| !c.is_alphanumeric()) {
                if run.is_empty() {
                    continue;
                }
                for part in split_camel_case(run) {
                    let mut token = part.to_lowercase();
                    if self.stem {
                        token = s_stem(&token);
                    }
                    if token.chars().count() < 2 {
                        continue;
                    }
                    if token.chars().all(|c| c.is_numeric()) {
                        continue;
                    }
                    if self.stopwords.contains(&token) {
                        continue;
                    }
                    out.push(token);
                }
            }
        }
        out
    }
}

fn is_url(chunk: &str) -> bool {
    let lower = chunk.to_ascii_lowercase();
    lower.starts_with("http://")
        || lower.starts_with("https://")
        || lower.starts_with("ftp://")
        || lower.starts_with("www.")
}

/// Split camelCase / PascalCase runs, keeping acronyms together:
/// `parseHTTPResponse` -> `parse`, `HTTP`, `Response`.
fn split_camel_case(s: &str) -> Vec<String> {
    let chars: Vec<char> = s.chars().collect();
    let mut parts = Vec::new();
    let mut start = 0;
    for i in 1..chars.len() {
        let prev_upper = chars[i - 1].is_uppercase();
        let curr_upper = chars[i].is_uppercase();
        let curr_lower = chars[i].is_lowercase();
        let split_camel = !prev_upper && curr_upper;
        let split_acronym = prev_upper && curr_lower && i >= 2 && chars[i - 2].is_uppercase();
        if split_camel {
            parts.push(chars[start..i].iter().collect());
            start = i;
        } else if split_acronym && start < i - 1 {
            parts.push(chars[start..i - 1].iter().collect());
            start = i - 1;
        }
    }
    if start < chars.len() {
        parts.push(chars[start..].iter().collect());
    }
    parts
}

/// Harman's S-stemmer: conflates plural surface forms only.
fn s_stem(word: &str) -> String {
    if let Some(stem) = word.strip_suffix("ies") {
        if !word.ends_with("eies") && !word.ends_with("aies") {
            return format!("{stem}y");
        }
    } else if word.ends_with("es") {
        if !word.ends_with("aes") && !word.ends_with("ees") && !word.ends_with("oes") {
            return word[..word.len() - 1].to_string();
        }
    } else if word.ends_with('s') && !word.ends_with("us") && !word.ends_with("ss") {
        return word[..word.len() - 1].to_string();
    }
    word.to_string()
}

/// Bag-of-words corpus: a token <-> id bijection (ids in first-seen
/// order), sparse per-document counts, and per-document origin tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    vocab: Vec<String>,
    docs: Vec<Vec<(usize, u32)>>,
    doc_meta: Vec<(String, Source)>,
    dropped_empty: usize,
    total_tokens: u64,
}

impl Corpus {
    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.vocab[id]
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn docs(&self) -> &[Vec<(usize, u32)>] {
        &self.docs
    }

    pub fn doc_meta(&self) -> &[(String, Source)] {
        &self.doc_meta
    }

    pub fn dropped_empty(&self) -> usize {
        self.dropped_empty
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn doc_token_count(&self, doc: usize) -> u64 {
        self.docs[doc].iter().map(|(_, c)| u64::from(*c)).sum()
    }

    /// Token instances of a document in ascending id order.
    pub fn expand_doc(&self, doc: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (id, count) in &self.docs[doc] {
            for _ in 0..*count {
                out.push(*id);
            }
        }
        out
    }

    /// Number of documents containing the token.
    pub fn doc_frequency(&self, token_id: usize) -> usize {
        self.docs
            .iter()
            .filter(|doc| doc.binary_search_by_key(&token_id, |(id, _)| *id).is_ok())
            .count()
    }

    /// Number of documents containing both tokens.
    pub fn co_document_count(&self, a: usize, b: usize) -> usize {
        self.docs
            .iter()
            .filter(|doc| {
                doc.binary_search_by_key(&a, |(id, _)| *id).is_ok()
                    && doc.binary_search_by_key(&b, |(id, _)| *id).is_ok()
            })
            .count()
    }

    /// Stable fingerprint of the vocabulary, recorded in saved models.
    pub fn vocab_sha256(&self) -> String {
        let mut hasher = Sha256::new();
        for token in &self.vocab {
            hasher.update(token.as_bytes());
            hasher.update(b"\n");
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Assemble a corpus from tokenized documents. Tokens appearing in
/// fewer than `min_df` documents are pruned first; documents left with
/// zero tokens are dropped and counted.
pub fn build_corpus(docs: &[TokenizedDocument], min_df: u32) -> Result<Corpus> {
    let min_df = min_df.max(1) as usize;
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        let unique: BTreeSet<&str> = doc.tokens.iter().map(String::as_str).collect();
        for token in unique {
            *df.entry(token).or_default() += 1;
        }
    }

    let mut vocab: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut out_docs = Vec::new();
    let mut doc_meta = Vec::new();
    let mut dropped_empty = 0usize;
    let mut total_tokens = 0u64;

    for doc in docs {
        let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
        for token in &doc.tokens {
            if df[token.as_str()] < min_df {
                continue;
            }
            let id = match index.get(token) {
                Some(&id) => id,
                None => {
                    let id = vocab.len();
                    vocab.push(token.clone());
                    index.insert(token.clone(), id);
                    id
                }
            };
            *counts.entry(id).or_default() += 1;
        }
        if counts.is_empty() {
            dropped_empty += 1;
            continue;
        }
        total_tokens += counts.values().map(|c| u64::from(*c)).sum::<u64>();
        out_docs.push(counts.into_iter().collect());
        doc_meta.push((doc.repo_id.clone(), doc.source));
    }

    if out_docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    Ok(Corpus {
        vocab,
        docs: out_docs,
        doc_meta,
        dropped_empty,
        total_tokens,
    })
}
