//! Author x venue and paper x venue count tables.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::Corpus;
use crate::scalar::Real;
use crate::table::ContingencyTable;

/// Entry (i, j) counts the papers of author i (sorted by id) in venue j
/// (catalog order).
pub fn author_conference_matrix<T: Real>(corpus: &Corpus) -> ContingencyTable<T> {
    let authors = corpus.authors();
    let row_of: HashMap<&str, usize> = authors.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let venues = corpus.catalog().venues();
    let mut counts = DMatrix::<T>::zeros(authors.len(), venues.len());
    for p in corpus.papers() {
        let j = corpus
            .catalog()
            .index_of(&p.venue_id)
            .expect("validated corpus venue");
        for a in &p.author_ids {
            counts[(row_of[a.as_str()], j)] += T::one();
        }
    }
    ContingencyTable::new(
        authors.into_iter().map(String::from).collect(),
        venues.to_vec(),
        counts,
    )
    .expect("labels unique by construction")
}

/// One row per paper of `corpus`: the summed venue counts of its authors as
/// recorded in `author_history` (an author x venue table). Authors missing
/// from the history contribute nothing.
pub fn paper_conference_rows<T: Real>(
    corpus: &Corpus,
    author_history: &ContingencyTable<T>,
) -> ContingencyTable<T> {
    let history_row: HashMap<&str, usize> = author_history
        .row_labels()
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_str(), i))
        .collect();
    let ncols = author_history.ncols();
    let mut counts = DMatrix::<T>::zeros(corpus.len(), ncols);
    for (i, p) in corpus.papers().iter().enumerate() {
        for a in &p.author_ids {
            if let Some(&h) = history_row.get(a.as_str()) {
                for j in 0..ncols {
                    counts[(i, j)] += author_history.counts()[(h, j)];
                }
            }
        }
    }
    ContingencyTable::new(
        corpus.papers().iter().map(|p| p.paper_id.clone()).collect(),
        author_history.col_labels().to_vec(),
        counts,
    )
    .expect("paper ids unique in a validated corpus")
}

/// Paper x venue table whose rows come from the authors' publication counts
/// in `author_history` (for training rows the history is the training corpus
/// itself; for test rows it is the training corpus, never the test labels).
pub fn paper_conference_matrix<T: Real>(
    corpus: &Corpus,
    author_history: &Corpus,
) -> ContingencyTable<T> {
    let mut history = author_conference_matrix::<T>(author_history);
    if history.col_labels() != corpus.catalog().venues() {
        // align history columns with the corpus catalog
        let venues = corpus.catalog().venues();
        let mut counts = DMatrix::<T>::zeros(history.nrows(), venues.len());
        for (j, v) in venues.iter().enumerate() {
            if let Some(hj) = history.col_labels().iter().position(|c| c == v) {
                counts.set_column(j, &history.counts().column(hj));
            }
        }
        history = ContingencyTable::new(history.row_labels().to_vec(), venues.to_vec(), counts)
            .expect("aligned labels");
    }
    paper_conference_rows(corpus, &history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{PaperRecord, VenueCatalog};

    fn paper(id: &str, authors: &[&str], venue: &str) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            title: String::new(),
            author_ids: authors.iter().map(|s| s.to_string()).collect(),
            venue_id: venue.into(),
            year: 2008,
            abstract_text: String::new(),
        }
    }

    #[test]
    fn single_paper_two_authors() {
        let cat = VenueCatalog::acm_2008_2010();
        let c = Corpus::new(vec![paper("p", &["b", "a"], "DAC")], cat).unwrap();
        let m = author_conference_matrix::<f64>(&c);
        assert_eq!((m.nrows(), m.ncols()), (2, 16));
        assert_eq!(m.row_labels(), ["a", "b"]);
        let dac = c.catalog().index_of("DAC").unwrap();
        for i in 0..2 {
            for j in 0..16 {
                assert_eq!(m.counts()[(i, j)], if j == dac { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn counts_are_additive() {
        let cat = VenueCatalog::new([("c1", "s"), ("c2", "s"), ("c3", "s")]).unwrap();
        let c = Corpus::new(
            vec![
                paper("1", &["a"], "c1"),
                paper("2", &["a"], "c1"),
                paper("3", &["a"], "c1"),
                paper("4", &["a"], "c2"),
            ],
            cat,
        )
        .unwrap();
        let m = author_conference_matrix::<f64>(&c);
        assert_eq!(m.row(0), vec![3.0, 1.0, 0.0]);
    }

    #[test]
    fn paper_rows_from_history() {
        let cat = VenueCatalog::new([("c1", "s"), ("c2", "s"), ("c3", "s")]).unwrap();
        let history = Corpus::new(
            vec![
                paper("h1", &["a"], "c1"),
                paper("h2", &["a"], "c1"),
                paper("h3", &["b"], "c1"),
                paper("h4", &["c"], "c2"),
            ],
            cat.clone(),
        )
        .unwrap();
        let test = Corpus::new(
            vec![
                paper("t1", &["a"], "c3"),
                paper("t2", &["b", "c"], "c3"),
                paper("t3", &["new"], "c3"),
            ],
            cat,
        )
        .unwrap();
        let m = paper_conference_matrix::<f64>(&test, &history);
        assert_eq!(m.row(0), vec![2.0, 0.0, 0.0]);
        assert_eq!(m.row(1), vec![1.0, 1.0, 0.0]);
        assert_eq!(m.row(2), vec![0.0, 0.0, 0.0]);
    }
}
