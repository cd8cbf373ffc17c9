//! Latent Dirichlet Allocation fitted by collapsed Gibbs sampling.
//!
//! Every sweep draws from its own ChaCha stream derived from the configured
//! seed and the sweep index, so a model is a pure function of
//! (documents, config) and can be persisted without RNG state.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::text_features::{DocTermMatrix, Weighting};

#[derive(Debug, Error)]
pub enum LdaError {
    #[error("corpus has no tokens")]
    EmptyCorpus,
    #[error("token id {id} out of range for vocabulary of size {vocab_size}")]
    TokenOutOfRange { id: usize, vocab_size: usize },
    #[error("document has no in-vocabulary tokens")]
    AllTokensUnknown,
    #[error("invalid LDA configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub n_topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub n_iterations: usize,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        Self {
            n_topics: 400,
            alpha: 0.5,
            beta: 0.01,
            n_iterations: 1000,
            seed: 0,
        }
    }
}

impl LdaConfig {
    pub fn validate(&self) -> Result<(), LdaError> {
        if self.n_topics < 1 {
            return Err(LdaError::InvalidConfig("n_topics must be at least 1".into()));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 || self.beta.is_nan() || self.beta <= 0.0 {
            return Err(LdaError::InvalidConfig("alpha and beta must be positive".into()));
        }
        if self.n_iterations < 1 {
            return Err(LdaError::InvalidConfig("n_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Count tables and per-token assignments of a collapsed Gibbs chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    config: LdaConfig,
    vocab_size: usize,
    docs: Vec<Vec<usize>>,
    assignments: Vec<Vec<usize>>,
    /// K x V, row-major.
    topic_word: Vec<u32>,
    /// D x K, row-major.
    doc_topic: Vec<u32>,
    topic_totals: Vec<u32>,
    sweeps_done: u64,
}

fn sweep_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws an index proportionally to `weights` (all positive).
fn sample_index(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, &w) in weights.iter().enumerate() {
        u -= w;
        if u < 0.0 {
            return k;
        }
    }
    weights.len() - 1
}

impl LdaModel {
    /// Assigns every token a uniformly random topic and tallies the counts.
    pub fn init(docs: Vec<Vec<usize>>, vocab_size: usize, config: LdaConfig) -> Result<Self, LdaError> {
        config.validate()?;
        if docs.iter().all(Vec::is_empty) {
            return Err(LdaError::EmptyCorpus);
        }
        if let Some(&id) = docs.iter().flatten().find(|&&id| id >= vocab_size) {
            return Err(LdaError::TokenOutOfRange { id, vocab_size });
        }
        let k = config.n_topics;
        let mut rng = sweep_rng(config.seed, 0);
        let assignments: Vec<Vec<usize>> = docs
            .iter()
            .map(|d| d.iter().map(|_| rng.random_range(0..k)).collect())
            .collect();
        let mut model = Self {
            topic_word: vec![0; k * vocab_size],
            doc_topic: vec![0; docs.len() * k],
            topic_totals: vec![0; k],
            config,
            vocab_size,
            docs,
            assignments,
            sweeps_done: 0,
        };
        for d in 0..model.docs.len() {
            for (n, &w) in model.docs[d].iter().enumerate() {
                let t = model.assignments[d][n];
                model.topic_word[t * vocab_size + w] += 1;
                model.doc_topic[d * k + t] += 1;
                model.topic_totals[t] += 1;
            }
        }
        Ok(model)
    }

    /// Initializes and runs `config.n_iterations` sweeps.
    pub fn fit(docs: Vec<Vec<usize>>, vocab_size: usize, config: LdaConfig) -> Result<Self, LdaError> {
        let iterations = config.n_iterations;
        let mut model = Self::init(docs, vocab_size, config)?;
        for _ in 0..iterations {
            model.gibbs_sweep();
        }
        Ok(model)
    }

    /// Resamples every token once, in document order.
    pub fn gibbs_sweep(&mut self) {
        self.sweeps_done += 1;
        let mut rng = sweep_rng(self.config.seed, self.sweeps_done);
        let k = self.config.n_topics;
        let v = self.vocab_size;
        let (alpha, beta) = (self.config.alpha, self.config.beta);
        let v_beta = v as f64 * beta;
        let k_alpha = k as f64 * alpha;
        let mut weights = vec![0.0; k];
        for d in 0..self.docs.len() {
            let len = self.docs[d].len();
            if len == 0 {
                continue;
            }
            let doc_denom = (len - 1) as f64 + k_alpha;
            for n in 0..len {
                let w = self.docs[d][n];
                let old = self.assignments[d][n];
                self.topic_word[old * v + w] -= 1;
                self.doc_topic[d * k + old] -= 1;
                self.topic_totals[old] -= 1;
                for (t, wt) in weights.iter_mut().enumerate() {
                    let doc_part = (self.doc_topic[d * k + t] as f64 + alpha) / doc_denom;
                    let word_part = (self.topic_word[t * v + w] as f64 + beta)
                        / (self.topic_totals[t] as f64 + v_beta);
                    *wt = doc_part * word_part;
                }
                let new = sample_index(&weights, &mut rng);
                self.assignments[d][n] = new;
                self.topic_word[new * v + w] += 1;
                self.doc_topic[d * k + new] += 1;
                self.topic_totals[new] += 1;
            }
        }
    }

    pub fn config(&self) -> &LdaConfig {
        &self.config
    }

    pub fn n_topics(&self) -> usize {
        self.config.n_topics
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn docs(&self) -> &[Vec<usize>] {
        &self.docs
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.assignments
    }

    pub fn sweeps_done(&self) -> u64 {
        self.sweeps_done
    }

    pub fn topic_word_count(&self, topic: usize, word: usize) -> u32 {
        self.topic_word[topic * self.vocab_size + word]
    }

    pub fn doc_topic_count(&self, doc: usize, topic: usize) -> u32 {
        self.doc_topic[doc * self.config.n_topics + topic]
    }

    pub fn topic_totals(&self) -> &[u32] {
        &self.topic_totals
    }

    /// Smoothed topic mixture of training document `d`:
    /// `(n_dk + alpha) / (len_d + K alpha)`.
    pub fn doc_mixture<T: Real>(&self, d: usize) -> Vec<T> {
        let k = self.config.n_topics;
        let denom = self.docs[d].len() as f64 + k as f64 * self.config.alpha;
        (0..k)
            .map(|t| T::lit((self.doc_topic_count(d, t) as f64 + self.config.alpha) / denom))
            .collect()
    }

    /// Document x topic proportions for all training documents.
    pub fn doc_topic_matrix<T: Real>(&self, doc_ids: &[String]) -> DocTermMatrix<T> {
        assert_eq!(doc_ids.len(), self.n_docs(), "one id per training document");
        let k = self.config.n_topics;
        let mut values = DMatrix::<T>::zeros(self.n_docs(), k);
        for d in 0..self.n_docs() {
            for (t, p) in self.doc_mixture::<T>(d).into_iter().enumerate() {
                values[(d, t)] = p;
            }
        }
        DocTermMatrix {
            rows: doc_ids.to_vec(),
            cols: topic_labels(k),
            values,
            weighting: Weighting::Topics,
        }
    }

    /// Fold-in inference: resamples only the new document's assignments
    /// against the frozen training topic-word counts and returns its
    /// smoothed topic mixture. Out-of-vocabulary ids are skipped.
    pub fn infer_document<T: Real>(
        &self,
        tokens: &[usize],
        n_iterations: usize,
        seed: u64,
    ) -> Result<Vec<T>, LdaError> {
        let tokens: Vec<usize> = tokens.iter().copied().filter(|&w| w < self.vocab_size).collect();
        if tokens.is_empty() {
            return Err(LdaError::AllTokensUnknown);
        }
        let k = self.config.n_topics;
        let v = self.vocab_size;
        let (alpha, beta) = (self.config.alpha, self.config.beta);
        let v_beta = v as f64 * beta;
        let mut rng = sweep_rng(seed, 0);
        let mut z: Vec<usize> = tokens.iter().map(|_| rng.random_range(0..k)).collect();
        let mut local = vec![0u32; k];
        let mut local_word = std::collections::HashMap::<(usize, usize), u32>::new();
        for (n, &w) in tokens.iter().enumerate() {
            local[z[n]] += 1;
            *local_word.entry((z[n], w)).or_default() += 1;
        }
        let mut local_totals = local.clone();
        let doc_denom = (tokens.len() - 1) as f64 + k as f64 * alpha;
        let mut weights = vec![0.0; k];
        for _ in 0..n_iterations {
            for (n, &w) in tokens.iter().enumerate() {
                let old = z[n];
                local[old] -= 1;
                local_totals[old] -= 1;
                *local_word.get_mut(&(old, w)).expect("tallied") -= 1;
                for (t, wt) in weights.iter_mut().enumerate() {
                    let tw = self.topic_word[t * v + w] + local_word.get(&(t, w)).copied().unwrap_or(0);
                    let tt = self.topic_totals[t] + local_totals[t];
                    *wt = (local[t] as f64 + alpha) / doc_denom * (tw as f64 + beta) / (tt as f64 + v_beta);
                }
                let new = sample_index(&weights, &mut rng);
                z[n] = new;
                local[new] += 1;
                local_totals[new] += 1;
                *local_word.entry((new, w)).or_default() += 1;
            }
        }
        let denom = tokens.len() as f64 + k as f64 * alpha;
        Ok(local
            .iter()
            .map(|&c| T::lit((c as f64 + alpha) / denom))
            .collect())
    }
}

pub fn topic_labels(k: usize) -> Vec<String> {
    (0..k).map(|t| format!("topic{t:04}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, seed: u64) -> LdaConfig {
        LdaConfig {
            n_topics: k,
            alpha: 0.5,
            beta: 0.01,
            n_iterations: 5,
            seed,
        }
    }

    /// Recounts all tables from the assignments.
    fn check_tally(m: &LdaModel) {
        let k = m.n_topics();
        let mut tw = vec![0u32; k * m.vocab_size()];
        let mut dt = vec![0u32; m.n_docs() * k];
        let mut tt = vec![0u32; k];
        for (d, doc) in m.docs().iter().enumerate() {
            for (n, &w) in doc.iter().enumerate() {
                let t = m.assignments()[d][n];
                assert!(t < k);
                tw[t * m.vocab_size() + w] += 1;
                dt[d * k + t] += 1;
                tt[t] += 1;
            }
        }
        for t in 0..k {
            for w in 0..m.vocab_size() {
                assert_eq!(m.topic_word_count(t, w), tw[t * m.vocab_size() + w]);
            }
        }
        for d in 0..m.n_docs() {
            for t in 0..k {
                assert_eq!(m.doc_topic_count(d, t), dt[d * k + t]);
            }
        }
        assert_eq!(m.topic_totals(), tt.as_slice());
    }

    #[test]
    fn init_conserves_counts() {
        let m = LdaModel::init(vec![vec![0, 1, 2, 1, 0]], 3, cfg(2, 1)).unwrap();
        assert_eq!(m.doc_topic_count(0, 0) + m.doc_topic_count(0, 1), 5);
        check_tally(&m);
    }

    #[test]
    fn sweeps_keep_tallies_consistent() {
        let docs = vec![vec![0, 1, 2, 3], vec![3, 3, 4], vec![], vec![1]];
        let mut m = LdaModel::init(docs, 5, cfg(3, 9)).unwrap();
        for _ in 0..10 {
            m.gibbs_sweep();
            check_tally(&m);
        }
    }

    #[test]
    fn single_topic_is_absorbing() {
        let m = LdaModel::fit(vec![vec![0, 1, 1, 2]], 3, cfg(1, 3)).unwrap();
        assert!(m.assignments()[0].iter().all(|&t| t == 0));
        let p: Vec<f64> = m.infer_document(&[0, 1], 5, 1).unwrap();
        assert_eq!(p, vec![1.0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            LdaModel::init(vec![vec![]], 3, cfg(2, 0)),
            Err(LdaError::EmptyCorpus)
        ));
        assert!(matches!(
            LdaModel::init(vec![vec![5]], 3, cfg(2, 0)),
            Err(LdaError::TokenOutOfRange { id: 5, .. })
        ));
        let bad = LdaConfig { n_iterations: 0, ..cfg(2, 0) };
        assert!(LdaModel::fit(vec![vec![0]], 1, bad).is_err());
        let m = LdaModel::fit(vec![vec![0]], 1, cfg(2, 0)).unwrap();
        assert!(matches!(
            m.infer_document::<f64>(&[], 3, 0),
            Err(LdaError::AllTokensUnknown)
        ));
        assert!(matches!(
            m.infer_document::<f64>(&[7], 3, 0),
            Err(LdaError::AllTokensUnknown)
        ));
    }

    #[test]
    fn mixture_hand_oracle() {
        // 3-token doc; tokens end up in whatever topics the chain chose, so
        // check against the formula evaluated on the model's own counts.
        let m = LdaModel::fit(vec![vec![0, 1, 2]], 3, cfg(2, 4)).unwrap();
        let n0 = m.doc_topic_count(0, 0) as f64;
        let n1 = m.doc_topic_count(0, 1) as f64;
        let p: Vec<f64> = m.doc_mixture(0);
        assert!((p[0] - (n0 + 0.5) / 4.0).abs() < 1e-15);
        assert!((p[1] - (n1 + 0.5) / 4.0).abs() < 1e-15);
    }
}
