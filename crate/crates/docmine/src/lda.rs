//! Latent Dirichlet Allocation by collapsed Gibbs sampling, with UMass
//! coherence scoring and coherence-driven topic-count selection.
//!
//! The sampler keeps pure integer count state; the categorical draw uses
//! cumulative-sum inversion over weights computed in double precision
//! from those integers, so a fixed seed reproduces the exact same model
//! on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::Corpus;

/// Sampler hyperparameters and chain controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    /// Symmetric document-topic prior.
    pub alpha: f64,
    /// Symmetric topic-word prior.
    pub beta: f64,
    pub iterations: u32,
    pub burn_in: u32,
    pub seed: u64,
    /// When set, accumulate post-burn-in count samples; keyword ranking
    /// and topic masses then use the accumulated state instead of the
    /// final sweep.
    pub average_samples: bool,
}

impl LdaConfig {
    /// Pinned defaults: alpha = 50/K, beta = 0.01, 1000 sweeps with a
    /// burn-in of 200.
    pub fn default_for_k(k: usize) -> Self {
        LdaConfig {
            alpha: 50.0 / k as f64,
            beta: 0.01,
            iterations: 1000,
            burn_in: 200,
            seed: 0,
            average_samples: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(Error::InvalidConfig("alpha must be positive".into()));
        }
        if self.beta.is_nan() || self.beta <= 0.0 {
            return Err(Error::InvalidConfig("beta must be positive".into()));
        }
        if self.iterations == 0 || self.burn_in >= self.iterations {
            return Err(Error::InvalidConfig(
                "burn_in must be smaller than iterations".into(),
            ));
        }
        Ok(())
    }
}

/// Non-default knobs shared across a sweep; `alpha: None` means the
/// per-k default of 50/K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: u32,
    pub burn_in: u32,
    pub average_samples: bool,
}

impl Default for LdaParams {
    fn default() -> Self {
        LdaParams {
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            burn_in: 200,
            average_samples: false,
        }
    }
}

impl LdaParams {
    pub fn config_for(&self, k: usize, seed: u64) -> LdaConfig {
        LdaConfig {
            alpha: self.alpha.unwrap_or(50.0 / k as f64),
            beta: self.beta,
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed,
            average_samples: self.average_samples,
        }
    }
}

/// Post-burn-in sample accumulators (integer sums over sampled sweeps).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCounts {
    pub samples: u32,
    pub topic_word_sums: Vec<Vec<u64>>,
    pub doc_topic_sums: Vec<Vec<u64>>,
}

/// A fitted model: final-state assignment counts plus the configuration
/// and a fingerprint of the vocabulary it was trained against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub k: usize,
    pub vocab_size: usize,
    /// K x V token-assignment counts.
    pub topic_word_counts: Vec<Vec<u32>>,
    /// D x K token-assignment counts.
    pub doc_topic_counts: Vec<Vec<u32>>,
    pub config: LdaConfig,
    pub vocab_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(default)]
    pub averaged: Option<SampledCounts>,
}

impl LdaModel {
    pub fn total_tokens(&self) -> u64 {
        self.topic_word_counts
            .iter()
            .flatten()
            .map(|c| u64::from(*c))
            .sum()
    }

    pub fn topic_totals(&self) -> Vec<u64> {
        self.topic_word_counts
            .iter()
            .map(|row| row.iter().map(|c| u64::from(*c)).sum())
            .collect()
    }

    /// Topic mass: tokens assigned to each topic, from the averaged
    /// accumulators when present.
    pub fn topic_masses(&self) -> Vec<u64> {
        match &self.averaged {
            Some(acc) => acc
                .doc_topic_sums
                .iter()
                .fold(vec![0u64; self.k], |mut acc_row, row| {
                    for (k, v) in row.iter().enumerate() {
                        acc_row[k] += v;
                    }
                    acc_row
                }),
            None => {
                let mut masses = vec![0u64; self.k];
                for row in &self.doc_topic_counts {
                    for (k, c) in row.iter().enumerate() {
                        masses[k] += u64::from(*c);
                    }
                }
                masses
            }
        }
    }

    /// Exact count reconciliation against the training corpus: per-doc
    /// topic counts match document lengths and both matrices sum to the
    /// corpus token total.
    pub fn conserves(&self, corpus: &Corpus) -> bool {
        if self.doc_topic_counts.len() != corpus.num_docs() {
            return false;
        }
        for (d, row) in self.doc_topic_counts.iter().enumerate() {
            let sum: u64 = row.iter().map(|c| u64::from(*c)).sum();
            if sum != corpus.doc_token_count(d) {
                return false;
            }
        }
        let doc_side: u64 = self
            .doc_topic_counts
            .iter()
            .flatten()
            .map(|c| u64::from(*c))
            .sum();
        doc_side == self.total_tokens() && doc_side == corpus.total_tokens()
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::json("model serialization", e))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
    }
}

/// Per-topic keyword ranking: the n highest-probability tokens under the
/// smoothed topic-word distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic_index: usize,
    pub keywords: Vec<(String, f64)>,
}

struct GibbsState {
    k: usize,
    vocab_size: usize,
    alpha: f64,
    beta: f64,
    docs: Vec<Vec<usize>>,
    assignments: Vec<Vec<usize>>,
    doc_topic: Vec<Vec<u32>>,
    topic_word: Vec<Vec<u32>>,
    topic_total: Vec<u32>,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
}

impl GibbsState {
    fn init(corpus: &Corpus, k: usize, config: &LdaConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let vocab_size = corpus.vocab_len();
        let docs: Vec<Vec<usize>> = (0..corpus.num_docs())
            .map(|d| corpus.expand_doc(d))
            .collect();
        let mut doc_topic = vec![vec![0u32; k]; docs.len()];
        let mut topic_word = vec![vec![0u32; vocab_size]; k];
        let mut topic_total = vec![0u32; k];
        let mut assignments = Vec::with_capacity(docs.len());
        for (d, doc) in docs.iter().enumerate() {
            let mut z_d = Vec::with_capacity(doc.len());
            for &v in doc {
                let topic = rng.random_range(0..k);
                z_d.push(topic);
                doc_topic[d][topic] += 1;
                topic_word[topic][v] += 1;
                topic_total[topic] += 1;
            }
            assignments.push(z_d);
        }
        GibbsState {
            k,
            vocab_size,
            alpha: config.alpha,
            beta: config.beta,
            docs,
            assignments,
            doc_topic,
            topic_word,
            topic_total,
            rng,
            weights: vec![0.0; k],
        }
    }

    fn sweep(&mut self) {
        let v_beta = self.vocab_size as f64 * self.beta;
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let v = self.docs[d][i];
                let old = self.assignments[d][i];
                self.doc_topic[d][old] -= 1;
                self.topic_word[old][v] -= 1;
                self.topic_total[old] -= 1;

                let mut total = 0.0;
                for t in 0..self.k {
                    let w = (f64::from(self.doc_topic[d][t]) + self.alpha)
                        * (f64::from(self.topic_word[t][v]) + self.beta)
                        / (f64::from(self.topic_total[t]) + v_beta);
                    total += w;
                    self.weights[t] = total;
                }
                let u = self.rng.random::<f64>() * total;
                let mut chosen = self.k - 1;
                for (t, cum) in self.weights.iter().enumerate() {
                    if u < *cum {
                        chosen = t;
                        break;
                    }
                }

                self.assignments[d][i] = chosen;
                self.doc_topic[d][chosen] += 1;
                self.topic_word[chosen][v] += 1;
                self.topic_total[chosen] += 1;
            }
        }
    }

    #[cfg(test)]
    fn counts_conserved(&self, corpus: &Corpus) -> bool {
        for (d, row) in self.doc_topic.iter().enumerate() {
            let sum: u64 = row.iter().map(|c| u64::from(*c)).sum();
            if sum != corpus.doc_token_count(d) {
                return false;
            }
        }
        let word_side: u64 = self
            .topic_word
            .iter()
            .flatten()
            .map(|c| u64::from(*c))
            .sum();
        word_side == corpus.total_tokens()
    }
}

/// Fit one LDA model on the corpus.
///
/// The count matrices reflect the final assignment state; with
/// `average_samples` set, post-burn-in sample sums are stored alongside.
/// Identical (corpus, k, config) inputs produce identical models.
pub fn train_lda(corpus: &Corpus, k: usize, config: &LdaConfig) -> Result<LdaModel> {
    config.validate()?;
    if corpus.num_docs() == 0 {
        return Err(Error::EmptyCorpus);
    }
    if !(2..=100).contains(&k) {
        return Err(Error::InvalidConfig(format!(
            "topic count {k} outside the supported range 2..=100"
        )));
    }
    if k > corpus.num_docs() {
        log::warn!(
            "topic count {k} exceeds document count {}; proceeding",
            corpus.num_docs()
        );
    }

    let mut state = GibbsState::init(corpus, k, config);
    let mut accumulator = config.average_samples.then(|| SampledCounts {
        samples: 0,
        topic_word_sums: vec![vec![0u64; corpus.vocab_len()]; k],
        doc_topic_sums: vec![vec![0u64; k]; corpus.num_docs()],
    });
    for sweep in 0..config.iterations {
        state.sweep();
        if let Some(acc) = accumulator.as_mut() {
            if sweep >= config.burn_in {
                acc.samples += 1;
                for (row, sums) in state.topic_word.iter().zip(&mut acc.topic_word_sums) {
                    for (c, s) in row.iter().zip(sums.iter_mut()) {
                        *s += u64::from(*c);
                    }
                }
                for (row, sums) in state.doc_topic.iter().zip(&mut acc.doc_topic_sums) {
                    for (c, s) in row.iter().zip(sums.iter_mut()) {
                        *s += u64::from(*c);
                    }
                }
            }
        }
    }

    Ok(LdaModel {
        k,
        vocab_size: corpus.vocab_len(),
        topic_word_counts: state.topic_word,
        doc_topic_counts: state.doc_topic,
        config: *config,
        vocab_sha256: corpus.vocab_sha256(),
        averaged: accumulator,
    })
}

/// Smoothed topic-word weight used for ranking.
fn token_weight(model: &LdaModel, topic: usize, token: usize) -> f64 {
    match &model.averaged {
        Some(acc) => {
            let s = f64::from(acc.samples.max(1));
            let total: f64 = acc.topic_word_sums[topic].iter().map(|c| *c as f64).sum();
            (acc.topic_word_sums[topic][token] as f64 + s * model.config.beta)
                / (total + s * model.vocab_size as f64 * model.config.beta)
        }
        None => {
            let total: f64 = model.topic_word_counts[topic]
                .iter()
                .map(|c| f64::from(*c))
                .sum();
            (f64::from(model.topic_word_counts[topic][token]) + model.config.beta)
                / (total + model.vocab_size as f64 * model.config.beta)
        }
    }
}

fn ranked_tokens(model: &LdaModel, corpus: &Corpus, topic: usize, n: usize) -> Vec<(usize, f64)> {
    let mut ranked: Vec<(usize, f64)> = (0..model.vocab_size)
        .map(|v| (v, token_weight(model, topic, v)))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| corpus.token(a.0).cmp(corpus.token(b.0)))
    });
    ranked.truncate(n);
    ranked
}

/// Per-topic top-n keyword rankings; ties break lexicographically.
/// `n` larger than the vocabulary truncates with a warning.
pub fn top_keywords(model: &LdaModel, corpus: &Corpus, n: usize) -> Vec<TopicSummary> {
    if corpus.vocab_sha256() != model.vocab_sha256 {
        log::warn!("corpus vocabulary does not match the model's recorded fingerprint");
    }
    let n_eff = if n > model.vocab_size {
        log::warn!(
            "requested {n} keywords but the vocabulary has {}; truncating",
            model.vocab_size
        );
        model.vocab_size
    } else {
        n
    };
    (0..model.k)
        .map(|topic| TopicSummary {
            topic_index: topic,
            keywords: ranked_tokens(model, corpus, topic, n_eff)
                .into_iter()
                .map(|(v, w)| (corpus.token(v).to_string(), w))
                .collect(),
        })
        .collect()
}

/// UMass coherence over the training corpus.
///
/// Per topic the score sums, over ordered top-word pairs (w_i, w_j) with
/// i ranked above j, log((D(w_i, w_j) + 1) / D(w_j)) where D counts
/// document co-occurrence; the model score is the mean over topics.
pub fn coherence(model: &LdaModel, corpus: &Corpus, top_n: usize) -> f64 {
    let mut total = 0.0;
    for topic in 0..model.k {
        let words: Vec<usize> = ranked_tokens(model, corpus, topic, top_n.min(model.vocab_size))
            .into_iter()
            .map(|(v, _)| v)
            .collect();
        let mut topic_score = 0.0;
        for j in 1..words.len() {
            let df_j = corpus.doc_frequency(words[j]) as f64;
            for i in 0..j {
                let co = corpus.co_document_count(words[i], words[j]) as f64;
                topic_score += ((co + 1.0) / df_j).ln();
            }
        }
        total += topic_score;
    }
    total / model.k as f64
}

/// Result of a coherence sweep over candidate topic counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSweep {
    pub k_star: usize,
    pub scores: Vec<(usize, f64)>,
}

/// Train one model per k in `[k_min, k_max]`, score each with UMass
/// coherence over its top 10 keywords, and pick the argmax (ties break
/// toward smaller k).
pub fn select_topic_count(
    corpus: &Corpus,
    k_min: usize,
    k_max: usize,
    params: &LdaParams,
    seed: u64,
) -> Result<TopicSweep> {
    if k_min < 2 || k_min > k_max {
        return Err(Error::InvalidConfig(format!(
            "invalid sweep range {k_min}..={k_max}"
        )));
    }
    let scores: Vec<(usize, f64)> = (k_min..=k_max)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let config = params.config_for(k, seed);
            train_lda(corpus, k, &config).map(|model| (k, coherence(&model, corpus, 10)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut k_star = scores[0].0;
    let mut best = f64::NEG_INFINITY;
    for (k, score) in &scores {
        if score.is_finite() && *score > best {
            best = *score;
            k_star = *k;
        }
    }
    Ok(TopicSweep { k_star, scores })
}
