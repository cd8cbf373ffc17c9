//! Publication corpus: records, venue catalog, validation and year splits.

mod io;
mod matrices;
mod synth;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{load_corpus, read_corpus, write_corpus, CorpusFormat};
pub use matrices::{author_conference_matrix, paper_conference_matrix, paper_conference_rows};
pub use synth::{generate_synthetic_corpus, SynthConfig};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    Validation { line: usize, message: String },
    #[error("invalid corpus: {0}")]
    Invalid(String),
    #[error("year split at {test_year} leaves the {side} side empty")]
    EmptySplit { test_year: i32, side: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One published paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    pub title: String,
    #[serde(rename = "authors")]
    pub author_ids: Vec<String>,
    #[serde(rename = "venue")]
    pub venue_id: String,
    pub year: i32,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
}

impl PaperRecord {
    /// Checks the per-record invariants.
    pub fn validate(&self) -> Result<(), String> {
        if self.paper_id.is_empty() {
            return Err("empty paper_id".into());
        }
        if self.author_ids.is_empty() {
            return Err(format!("paper `{}` has no authors", self.paper_id));
        }
        let mut seen = HashSet::new();
        for a in &self.author_ids {
            if a.is_empty() {
                return Err(format!("paper `{}` has an empty author id", self.paper_id));
            }
            if !seen.insert(a.as_str()) {
                return Err(format!(
                    "paper `{}` lists author `{a}` twice",
                    self.paper_id
                ));
            }
        }
        if self.venue_id.is_empty() {
            return Err(format!("paper `{}` has an empty venue", self.paper_id));
        }
        if self.year <= 0 {
            return Err(format!(
                "paper `{}` has non-positive year {}",
                self.paper_id, self.year
            ));
        }
        Ok(())
    }
}

/// Ordered list of venues, each belonging to exactly one special interest group.
///
/// Serialized as a JSON object `{"venue": "SIG", ...}` whose key order is the
/// venue order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VenueCatalog {
    venues: Vec<String>,
    sig_of: BTreeMap<String, String>,
}

impl VenueCatalog {
    pub fn new<I, V, S>(entries: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (V, S)>,
        V: Into<String>,
        S: Into<String>,
    {
        let mut venues = Vec::new();
        let mut sig_of = BTreeMap::new();
        for (v, s) in entries {
            let (v, s) = (v.into(), s.into());
            if v.is_empty() || s.is_empty() {
                return Err(CorpusError::Invalid("empty venue or SIG id in catalog".into()));
            }
            if sig_of.insert(v.clone(), s).is_some() {
                return Err(CorpusError::Invalid(format!("venue `{v}` listed twice")));
            }
            venues.push(v);
        }
        if venues.is_empty() {
            return Err(CorpusError::Invalid("empty venue catalog".into()));
        }
        Ok(Self { venues, sig_of })
    }

    /// The sixteen ACM conferences of 2008-2010 grouped into four SIGs.
    pub fn acm_2008_2010() -> Self {
        const GROUPS: [(&str, [&str; 4]); 4] = [
            ("SIGBED", ["CASES", "CODES+ISSS", "EMSOFT", "SENSYS"]),
            ("SIGDA", ["DAC", "DATE", "ICCAD", "SBCCI"]),
            ("SIGIR", ["CIKM", "JCDL", "SIGIR", "WWW"]),
            ("SIGPLAN", ["GPCE", "ICFP", "OOPSLA", "PLDI"]),
        ];
        Self::new(
            GROUPS
                .iter()
                .flat_map(|(sig, vs)| vs.iter().map(move |v| (*v, *sig))),
        )
        .expect("static catalog is valid")
    }

    pub fn venues(&self) -> &[String] {
        &self.venues
    }

    pub fn len(&self) -> usize {
        self.venues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.venues.is_empty()
    }

    pub fn contains(&self, venue: &str) -> bool {
        self.sig_of.contains_key(venue)
    }

    pub fn sig_of(&self, venue: &str) -> Option<&str> {
        self.sig_of.get(venue).map(String::as_str)
    }

    pub fn index_of(&self, venue: &str) -> Option<usize> {
        self.venues.iter().position(|v| v == venue)
    }

    /// Distinct SIG ids, sorted.
    pub fn sigs(&self) -> Vec<&str> {
        self.sig_of
            .values()
            .map(String::as_str)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Venues sharing `venue`'s SIG, including `venue` itself, in catalog order.
    pub fn same_sig(&self, venue: &str) -> Vec<&str> {
        match self.sig_of(venue) {
            Some(sig) => self
                .venues
                .iter()
                .filter(|v| self.sig_of(v) == Some(sig))
                .map(String::as_str)
                .collect(),
            None => Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CorpusError> {
        serde_json::from_str(s).map_err(|e| CorpusError::Invalid(format!("venue catalog: {e}")))
    }
}

impl Serialize for VenueCatalog {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let map: IndexMap<&str, &str> = self
            .venues
            .iter()
            .map(|v| (v.as_str(), self.sig_of[v].as_str()))
            .collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for VenueCatalog {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = IndexMap::<String, String>::deserialize(deserializer)?;
        VenueCatalog::new(map).map_err(serde::de::Error::custom)
    }
}

/// Validated set of papers over a venue catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    papers: Vec<PaperRecord>,
    catalog: VenueCatalog,
}

impl Corpus {
    pub fn new(papers: Vec<PaperRecord>, catalog: VenueCatalog) -> Result<Self, CorpusError> {
        let mut ids = HashSet::with_capacity(papers.len());
        for (i, p) in papers.iter().enumerate() {
            p.validate().map_err(|message| CorpusError::Validation {
                line: i + 1,
                message,
            })?;
            if !catalog.contains(&p.venue_id) {
                return Err(CorpusError::Validation {
                    line: i + 1,
                    message: format!("unknown venue `{}`", p.venue_id),
                });
            }
            if !ids.insert(p.paper_id.as_str()) {
                return Err(CorpusError::Validation {
                    line: i + 1,
                    message: format!("duplicate paper_id `{}`", p.paper_id),
                });
            }
        }
        Ok(Self { papers, catalog })
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn catalog(&self) -> &VenueCatalog {
        &self.catalog
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    /// Distinct author ids, sorted.
    pub fn authors(&self) -> Vec<&str> {
        self.papers
            .iter()
            .flat_map(|p| p.author_ids.iter().map(String::as_str))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Paper id to venue id.
    pub fn truth(&self) -> BTreeMap<String, String> {
        self.papers
            .iter()
            .map(|p| (p.paper_id.clone(), p.venue_id.clone()))
            .collect()
    }

    /// Splits into papers strictly before `test_year` and papers in
    /// `test_year`; later papers are dropped.
    pub fn split_by_year(&self, test_year: i32) -> Result<(Corpus, Corpus), CorpusError> {
        let train: Vec<_> = self
            .papers
            .iter()
            .filter(|p| p.year < test_year)
            .cloned()
            .collect();
        let test: Vec<_> = self
            .papers
            .iter()
            .filter(|p| p.year == test_year)
            .cloned()
            .collect();
        if train.is_empty() {
            return Err(CorpusError::EmptySplit {
                test_year,
                side: "training",
            });
        }
        if test.is_empty() {
            return Err(CorpusError::EmptySplit {
                test_year,
                side: "test",
            });
        }
        Ok((
            Corpus {
                papers: train,
                catalog: self.catalog.clone(),
            },
            Corpus {
                papers: test,
                catalog: self.catalog.clone(),
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn paper(id: &str, authors: &[&str], venue: &str, year: i32) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            title: format!("title {id}"),
            author_ids: authors.iter().map(|s| s.to_string()).collect(),
            venue_id: venue.into(),
            year,
            abstract_text: String::new(),
        }
    }

    fn catalog() -> VenueCatalog {
        VenueCatalog::new([("c1", "s1"), ("c2", "s1"), ("c3", "s2")]).unwrap()
    }

    #[test]
    fn split_partitions_by_year() {
        let c = Corpus::new(
            vec![
                paper("a", &["x"], "c1", 2008),
                paper("b", &["x"], "c1", 2009),
                paper("c", &["x"], "c2", 2010),
                paper("d", &["y"], "c2", 2011),
            ],
            catalog(),
        )
        .unwrap();
        let (train, test) = c.split_by_year(2010).unwrap();
        let ids = |c: &Corpus| c.papers().iter().map(|p| p.paper_id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&train), ["a", "b"]);
        assert_eq!(ids(&test), ["c"]);
    }

    #[test]
    fn split_with_empty_train_side() {
        let c = Corpus::new(vec![paper("a", &["x"], "c1", 2010)], catalog()).unwrap();
        assert!(matches!(
            c.split_by_year(2010),
            Err(CorpusError::EmptySplit { side: "training", .. })
        ));
    }

    #[test]
    fn split_drops_later_years() {
        let c = Corpus::new(
            vec![paper("a", &["x"], "c1", 2008), paper("b", &["x"], "c1", 2011)],
            catalog(),
        )
        .unwrap();
        assert!(matches!(
            c.split_by_year(2010),
            Err(CorpusError::EmptySplit { side: "test", .. })
        ));
    }

    #[test]
    fn rejects_unknown_venue_and_duplicates() {
        let err = Corpus::new(vec![paper("a", &["x"], "zz", 2008)], catalog()).unwrap_err();
        assert!(matches!(err, CorpusError::Validation { line: 1, .. }));
        let err = Corpus::new(
            vec![paper("a", &["x"], "c1", 2008), paper("a", &["y"], "c2", 2008)],
            catalog(),
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::Validation { line: 2, .. }));
    }

    #[test]
    fn record_invariants() {
        assert!(paper("a", &[], "c1", 2008).validate().is_err());
        assert!(paper("a", &["x", "x"], "c1", 2008).validate().is_err());
        assert!(paper("a", &["x"], "c1", 0).validate().is_err());
        assert!(paper("a", &["x"], "", 2008).validate().is_err());
    }

    #[test]
    fn acm_catalog_shape() {
        let cat = VenueCatalog::acm_2008_2010();
        assert_eq!(cat.len(), 16);
        assert_eq!(cat.sigs().len(), 4);
        assert_eq!(cat.same_sig("SIGIR"), ["CIKM", "JCDL", "SIGIR", "WWW"]);
    }

    #[test]
    fn catalog_json_keeps_order() {
        let cat = VenueCatalog::new([("zeta", "s"), ("alpha", "t")]).unwrap();
        let back = VenueCatalog::from_json(&cat.to_json()).unwrap();
        assert_eq!(back.venues(), ["zeta", "alpha"]);
        assert_eq!(back.sig_of("alpha"), Some("t"));
    }
}
