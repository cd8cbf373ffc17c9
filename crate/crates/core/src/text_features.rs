//! Tokenization, vocabularies, tf-idf and word x venue centroid matrices.

use std::collections::{BTreeMap, HashMap, HashSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::scalar::Real;
use crate::table::ContingencyTable;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("no term occurs in at least {min_df} documents")]
    EmptyVocabulary { min_df: usize },
    #[error("document has no positive term count")]
    AllZeroDocument,
    #[error("invalid document counts: {0}")]
    InvalidCounts(String),
    #[error("min_df must be at least 1")]
    InvalidMinDf,
}

const STOP_WORDS: &[&str] = &[
    "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for",
    "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself",
    "him", "himself", "his", "how", "if", "in", "into", "is", "it", "its", "itself", "just", "me",
    "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "only",
    "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same", "she", "should", "so",
    "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then",
    "there", "these", "they", "this", "those", "through", "to", "too", "under", "until", "up",
    "very", "was", "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why",
    "will", "with", "would", "you", "your", "yours", "yourself", "yourselves",
];

pub fn is_stop_word(token: &str) -> bool {
    STOP_WORDS.binary_search(&token).is_ok()
}

/// Lowercases, splits on non-alphanumeric characters and drops tokens
/// shorter than two characters and stop-words. No stemming.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| t.chars().count() >= 2 && !is_stop_word(t))
        .collect()
}

/// Sorted term list with document frequencies over `n_docs` documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    n_docs: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new(terms: Vec<String>, doc_freq: Vec<usize>, n_docs: usize) -> Result<Self, TextError> {
        if terms.len() != doc_freq.len() {
            return Err(TextError::InvalidCounts("terms and doc_freq lengths differ".into()));
        }
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TextError::InvalidCounts("terms must be sorted and unique".into()));
        }
        let mut v = Self {
            terms,
            doc_freq,
            n_docs,
            index: HashMap::new(),
        };
        v.rebuild_index();
        Ok(v)
    }

    fn rebuild_index(&mut self) {
        self.index = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
    }

    /// Restores the lookup index after deserialization.
    pub fn reindexed(mut self) -> Self {
        self.rebuild_index();
        self
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    /// Number of documents the frequencies were counted over.
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// In-vocabulary token ids of `text`, in order of appearance.
    pub fn token_ids(&self, text: &str) -> Vec<usize> {
        tokenize(text).iter().filter_map(|t| self.id(t)).collect()
    }

    /// Raw term counts of `text` over the vocabulary.
    pub fn counts(&self, text: &str) -> Vec<usize> {
        let mut counts = vec![0; self.len()];
        for id in self.token_ids(text) {
            counts[id] += 1;
        }
        counts
    }
}

/// Terms occurring in at least `min_df` abstracts of `corpus`.
pub fn build_vocabulary(corpus: &Corpus, min_df: usize) -> Result<Vocabulary, TextError> {
    if min_df == 0 {
        return Err(TextError::InvalidMinDf);
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for p in corpus.papers() {
        let distinct: HashSet<String> = tokenize(&p.abstract_text).into_iter().collect();
        for t in distinct {
            *df.entry(t).or_default() += 1;
        }
    }
    let (terms, doc_freq): (Vec<_>, Vec<_>) = df.into_iter().filter(|(_, n)| *n >= min_df).unzip();
    if terms.is_empty() {
        return Err(TextError::EmptyVocabulary { min_df });
    }
    Vocabulary::new(terms, doc_freq, corpus.len())
}

/// Max-normalized term frequency: `f_i / max_z f_z`.
pub fn term_frequency<T: Real>(doc_counts: &[T]) -> Result<Vec<T>, TextError> {
    let max = doc_counts
        .iter()
        .copied()
        .fold(T::zero(), |m, v| if v > m { v } else { m });
    if max <= T::zero() {
        return Err(TextError::AllZeroDocument);
    }
    Ok(doc_counts.iter().map(|&f| f / max).collect())
}

/// `ln(N / n_i)` for every vocabulary term.
pub fn inverse_document_frequency<T: Real>(
    vocab: &Vocabulary,
    n_docs: usize,
) -> Result<Vec<T>, TextError> {
    vocab
        .doc_freq()
        .iter()
        .zip(vocab.terms())
        .map(|(&df, term)| {
            if df == 0 || df > n_docs {
                Err(TextError::InvalidCounts(format!(
                    "term `{term}` has doc_freq {df} with {n_docs} documents"
                )))
            } else {
                Ok((T::from_count(n_docs) / T::from_count(df)).ln())
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Count,
    Tfidf,
    Topics,
}

/// Labeled document x feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DocTermMatrix<T: Real> {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub values: DMatrix<T>,
    pub weighting: Weighting,
}

impl<T: Real> DocTermMatrix<T> {
    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.values.row(i).iter().copied().collect()
    }

    /// Indices of rows with no positive entry.
    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.nrows())
            .filter(|&i| self.values.row(i).iter().all(|&v| v <= T::zero()))
            .collect()
    }
}

/// Raw in-vocabulary term counts per paper.
pub fn count_matrix<T: Real>(corpus: &Corpus, vocab: &Vocabulary) -> DocTermMatrix<T> {
    let mut values = DMatrix::<T>::zeros(corpus.len(), vocab.len());
    for (i, p) in corpus.papers().iter().enumerate() {
        for (j, c) in vocab.counts(&p.abstract_text).into_iter().enumerate() {
            values[(i, j)] = T::from_count(c);
        }
    }
    DocTermMatrix {
        rows: corpus.papers().iter().map(|p| p.paper_id.clone()).collect(),
        cols: vocab.terms().to_vec(),
        values,
        weighting: Weighting::Count,
    }
}

/// tf-idf weights `TF x IDF` per paper, IDF taken from the vocabulary's own
/// document counts. Papers without any in-vocabulary token become zero rows
/// and are reported with a warning.
pub fn tfidf_matrix<T: Real>(corpus: &Corpus, vocab: &Vocabulary) -> DocTermMatrix<T> {
    let idf: Vec<T> = inverse_document_frequency(vocab, vocab.n_docs())
        .expect("vocabulary doc_freq bounded by its own n_docs");
    let mut m = count_matrix::<T>(corpus, vocab);
    for i in 0..m.nrows() {
        let row = m.row(i);
        if let Ok(tf) = term_frequency(&row) {
            for (j, t) in tf.into_iter().enumerate() {
                m.values[(i, j)] = t * idf[j];
            }
        }
    }
    m.weighting = Weighting::Tfidf;
    let zero = m.zero_rows();
    if !zero.is_empty() {
        log::warn!("{} of {} papers have an all-zero tf-idf row", zero.len(), m.nrows());
    }
    m
}

/// Feature x venue table whose column j is the mean of the rows of the papers
/// published in venue j. Venues without papers get a zero column.
pub fn word_conference_matrix<T: Real>(
    paper_matrix: &DocTermMatrix<T>,
    corpus: &Corpus,
) -> ContingencyTable<T> {
    let venue_of: HashMap<&str, usize> = corpus
        .papers()
        .iter()
        .map(|p| {
            (
                p.paper_id.as_str(),
                corpus.catalog().index_of(&p.venue_id).expect("validated venue"),
            )
        })
        .collect();
    let n_venues = corpus.catalog().len();
    let mut sums = DMatrix::<T>::zeros(paper_matrix.ncols(), n_venues);
    let mut members = vec![0usize; n_venues];
    for (i, id) in paper_matrix.rows.iter().enumerate() {
        let j = *venue_of
            .get(id.as_str())
            .unwrap_or_else(|| panic!("paper `{id}` missing from corpus"));
        members[j] += 1;
        for w in 0..paper_matrix.ncols() {
            sums[(w, j)] += paper_matrix.values[(i, w)];
        }
    }
    for (j, &n) in members.iter().enumerate() {
        if n == 0 {
            log::warn!("venue `{}` has no papers; its column is zero", corpus.catalog().venues()[j]);
        } else {
            let inv = T::one() / T::from_count(n);
            sums.column_mut(j).scale_mut(inv);
        }
    }
    ContingencyTable::new(
        paper_matrix.cols.clone(),
        corpus.catalog().venues().to_vec(),
        sums,
    )
    .expect("nonnegative centroid of nonnegative rows")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{PaperRecord, VenueCatalog};
    use approx::assert_abs_diff_eq;

    fn corpus(docs: &[(&str, &str)]) -> Corpus {
        let cat = VenueCatalog::new([("c1", "s"), ("c2", "s"), ("c3", "t")]).unwrap();
        Corpus::new(
            docs.iter()
                .enumerate()
                .map(|(i, (venue, text))| PaperRecord {
                    paper_id: format!("p{i}"),
                    title: String::new(),
                    author_ids: vec!["a".into()],
                    venue_id: venue.to_string(),
                    year: 2008,
                    abstract_text: text.to_string(),
                })
                .collect(),
            cat,
        )
        .unwrap()
    }

    #[test]
    fn stop_words_sorted_for_binary_search() {
        assert!(STOP_WORDS.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("The SVD-based CA model"), ["svd", "based", "ca", "model"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize("a an the of").is_empty());
    }

    #[test]
    fn tf_examples() {
        assert_eq!(term_frequency(&[2.0, 4.0, 0.0]).unwrap(), vec![0.5, 1.0, 0.0]);
        assert_eq!(term_frequency(&[7.0]).unwrap(), vec![1.0]);
        assert!(matches!(term_frequency(&[0.0, 0.0]), Err(TextError::AllZeroDocument)));
    }

    #[test]
    fn idf_examples() {
        let v = Vocabulary::new(vec!["a".into(), "b".into(), "c".into()], vec![10, 1, 2], 10).unwrap();
        let idf: Vec<f64> = inverse_document_frequency(&v, 10).unwrap();
        assert_abs_diff_eq!(idf[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(idf[1], std::f64::consts::LN_10, epsilon = 1e-9);
        let v = Vocabulary::new(vec!["x".into()], vec![2], 8).unwrap();
        let idf: Vec<f64> = inverse_document_frequency(&v, 8).unwrap();
        assert_abs_diff_eq!(idf[0], 1.3862943611198906, epsilon = 1e-9);
        assert!(inverse_document_frequency::<f64>(&v, 1).is_err());
    }

    #[test]
    fn vocabulary_thresholds() {
        let c = corpus(&[("c1", "svd matrix"), ("c2", "svd topic")]);
        let v = build_vocabulary(&c, 2).unwrap();
        assert_eq!(v.terms(), ["svd"]);
        assert_eq!(v.doc_freq(), [2]);
        assert!(matches!(build_vocabulary(&c, 3), Err(TextError::EmptyVocabulary { .. })));
        assert!(matches!(build_vocabulary(&c, 0), Err(TextError::InvalidMinDf)));
    }

    #[test]
    fn ubiquitous_term_gives_zero_row() {
        let c = corpus(&[("c1", "svd"), ("c2", "svd topic")]);
        let v = build_vocabulary(&c, 1).unwrap();
        let m: DocTermMatrix<f64> = tfidf_matrix(&c, &v);
        assert_eq!(m.zero_rows(), vec![0]);
    }

    #[test]
    fn centroid_column() {
        let c = corpus(&[("c1", ""), ("c1", ""), ("c2", "")]);
        let m = DocTermMatrix {
            rows: vec!["p0".into(), "p1".into(), "p2".into()],
            cols: vec!["x".into(), "y".into()],
            values: DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 3.0, 2.0, 5.0, 7.0]),
            weighting: Weighting::Count,
        };
        let wc = word_conference_matrix(&m, &c);
        assert_eq!(wc.column(0), vec![2.0, 1.0]);
        assert_eq!(wc.column(1), vec![5.0, 7.0]);
        assert_eq!(wc.column(2), vec![0.0, 0.0]);
    }
}
