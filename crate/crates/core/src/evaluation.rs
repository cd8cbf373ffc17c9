//! Ranked-retrieval metrics and their aggregation over a set of queries.
//!
//! Rankings are slices of venue ids, best first. Binary metrics take the set
//! of relevant venues; NDCG takes integer grades.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::VenueCatalog;
use crate::recommenders::RankedRecommendation;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("relevant set is empty")]
    EmptyRelevantSet,
    #[error("all relevance grades are zero")]
    AllZeroGrades,
    #[error("no ground truth for paper `{0}`")]
    MissingTruth(String),
    #[error("no recommendations to evaluate")]
    EmptyInput,
    #[error("paper `{0}` appears more than once")]
    DuplicateQuery(String),
    #[error("cutoff must be at least 1")]
    InvalidCutoff,
    #[error("true venue `{0}` is not in the catalog")]
    UnknownVenue(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    /// Only the true venue is relevant.
    Actual,
    /// True venue graded 2, other venues of its SIG graded 1.
    Sig,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 2] = [Self::Actual, Self::Sig];
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Actual => "actual",
            Self::Sig => "sig",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "actual" => Ok(Self::Actual),
            "sig" => Ok(Self::Sig),
            other => Err(format!("unknown relevance scheme `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelevanceScheme {
    pub kind: SchemeKind,
    pub catalog: VenueCatalog,
}

impl RelevanceScheme {
    pub fn new(kind: SchemeKind, catalog: VenueCatalog) -> Self {
        Self { kind, catalog }
    }

    /// Positive grades only; venues not listed have grade 0.
    pub fn grades(&self, true_venue: &str) -> Result<BTreeMap<String, u32>, EvalError> {
        if !self.catalog.contains(true_venue) {
            return Err(EvalError::UnknownVenue(true_venue.to_string()));
        }
        let mut grades = BTreeMap::new();
        if self.kind == SchemeKind::Sig {
            for v in self.catalog.same_sig(true_venue) {
                grades.insert(v.to_string(), 1);
            }
        }
        let top = if self.kind == SchemeKind::Sig { 2 } else { 1 };
        grades.insert(true_venue.to_string(), top);
        Ok(grades)
    }
}

/// Venues with grade at least 1.
pub fn relevant_set(grades: &BTreeMap<String, u32>) -> BTreeSet<String> {
    grades
        .iter()
        .filter(|(_, &g)| g >= 1)
        .map(|(v, _)| v.clone())
        .collect()
}

fn hits_in_top<S: AsRef<str>>(ranking: &[S], relevant: &BTreeSet<String>, k: usize) -> usize {
    ranking
        .iter()
        .take(k)
        .filter(|v| relevant.contains(v.as_ref()))
        .count()
}

fn nonempty(relevant: &BTreeSet<String>) -> Result<f64, EvalError> {
    if relevant.is_empty() {
        Err(EvalError::EmptyRelevantSet)
    } else {
        Ok(relevant.len() as f64)
    }
}

pub fn precision_at_k<S: AsRef<str>>(ranking: &[S], relevant: &BTreeSet<String>, k: usize) -> f64 {
    assert!(k >= 1, "cutoff must be at least 1");
    hits_in_top(ranking, relevant, k) as f64 / k as f64
}

pub fn recall_at_k<S: AsRef<str>>(ranking: &[S], relevant: &BTreeSet<String>, k: usize) -> Result<f64, EvalError> {
    let r = nonempty(relevant)?;
    Ok(hits_in_top(ranking, relevant, k) as f64 / r)
}

/// Truncated average precision: precision at each relevant rank within the
/// top `k`, summed and divided by the total number of relevant venues.
pub fn average_precision_at_k<S: AsRef<str>>(
    ranking: &[S],
    relevant: &BTreeSet<String>,
    k: usize,
) -> Result<f64, EvalError> {
    let r = nonempty(relevant)?;
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, v) in ranking.iter().take(k).enumerate() {
        if relevant.contains(v.as_ref()) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Ok(sum / r)
}

fn gain(grade: u32) -> f64 {
    2f64.powi(grade as i32) - 1.0
}

fn discount(rank: usize) -> f64 {
    ((rank + 1) as f64).log2()
}

pub fn ndcg_at_p<S: AsRef<str>>(ranking: &[S], grades: &BTreeMap<String, u32>, p: usize) -> Result<f64, EvalError> {
    let mut ideal: Vec<u32> = grades.values().copied().filter(|&g| g > 0).collect();
    if ideal.is_empty() {
        return Err(EvalError::AllZeroGrades);
    }
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: f64 = ideal
        .iter()
        .take(p)
        .enumerate()
        .map(|(i, &g)| gain(g) / discount(i + 1))
        .sum();
    let dcg: f64 = ranking
        .iter()
        .take(p)
        .enumerate()
        .map(|(i, v)| gain(grades.get(v.as_ref()).copied().unwrap_or(0)) / discount(i + 1))
        .sum();
    Ok(dcg / idcg)
}

pub fn reciprocal_rank<S: AsRef<str>>(ranking: &[S], relevant: &BTreeSet<String>) -> f64 {
    ranking
        .iter()
        .position(|v| relevant.contains(v.as_ref()))
        .map_or(0.0, |i| 1.0 / (i + 1) as f64)
}

pub fn f_measure_at_k<S: AsRef<str>>(ranking: &[S], relevant: &BTreeSet<String>, k: usize) -> Result<f64, EvalError> {
    let r = recall_at_k(ranking, relevant, k)?;
    let p = precision_at_k(ranking, relevant, k);
    Ok(if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 })
}

/// Precision at rank R, R being the number of relevant venues.
pub fn r_precision<S: AsRef<str>>(ranking: &[S], relevant: &BTreeSet<String>) -> Result<f64, EvalError> {
    nonempty(relevant)?;
    Ok(precision_at_k(ranking, relevant, relevant.len()))
}

/// The seven per-query values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricValues {
    pub precision: f64,
    pub recall: f64,
    pub average_precision: f64,
    pub ndcg: f64,
    pub reciprocal_rank: f64,
    pub f_measure: f64,
    pub r_precision: f64,
}

impl MetricValues {
    /// Row names of the aggregate table, in `as_array` order.
    pub const MEAN_NAMES: [&'static str; 7] = ["MP@K", "MR@K", "MAP@K", "MNDCG@P", "MRR", "MF-M@K", "MR-P"];

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.precision,
            self.recall,
            self.average_precision,
            self.ndcg,
            self.reciprocal_rank,
            self.f_measure,
            self.r_precision,
        ]
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        Self {
            precision: a[0],
            recall: a[1],
            average_precision: a[2],
            ndcg: a[3],
            reciprocal_rank: a[4],
            f_measure: a[5],
            r_precision: a[6],
        }
    }

    pub fn compute<S: AsRef<str>>(ranking: &[S], grades: &BTreeMap<String, u32>, k: usize) -> Result<Self, EvalError> {
        if k == 0 {
            return Err(EvalError::InvalidCutoff);
        }
        let relevant = relevant_set(grades);
        Ok(Self {
            precision: precision_at_k(ranking, &relevant, k),
            recall: recall_at_k(ranking, &relevant, k)?,
            average_precision: average_precision_at_k(ranking, &relevant, k)?,
            ndcg: ndcg_at_p(ranking, grades, k)?,
            reciprocal_rank: reciprocal_rank(ranking, &relevant),
            f_measure: f_measure_at_k(ranking, &relevant, k)?,
            r_precision: r_precision(ranking, &relevant)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_query: BTreeMap<String, MetricValues>,
    pub means: MetricValues,
    pub k: usize,
    pub scheme: SchemeKind,
}

/// Scores every recommendation against `truth` with cutoff `k` for both the
/// precision family and NDCG.
pub fn evaluate<T: Real>(
    recommendations: &[RankedRecommendation<T>],
    truth: &BTreeMap<String, String>,
    scheme: &RelevanceScheme,
    k: usize,
) -> Result<EvalReport, EvalError> {
    if recommendations.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut per_query = BTreeMap::new();
    for rec in recommendations {
        let venue = truth
            .get(&rec.paper_id)
            .ok_or_else(|| EvalError::MissingTruth(rec.paper_id.clone()))?;
        let grades = scheme.grades(venue)?;
        let values = MetricValues::compute(&rec.venues(), &grades, k)?;
        if per_query.insert(rec.paper_id.clone(), values).is_some() {
            return Err(EvalError::DuplicateQuery(rec.paper_id.clone()));
        }
    }
    let mut sums = [0.0; 7];
    for v in per_query.values() {
        for (s, x) in sums.iter_mut().zip(v.as_array()) {
            *s += x;
        }
    }
    let n = per_query.len() as f64;
    Ok(EvalReport {
        per_query,
        means: MetricValues::from_array(sums.map(|s| s / n)),
        k,
        scheme: scheme.kind,
    })
}

/// One column of the aggregate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableColumn {
    pub similarity: String,
    pub scheme: SchemeKind,
    pub means: MetricValues,
}

/// Metrics as rows, one column per (similarity, scheme) pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<TableColumn>,
}

impl ResultTable {
    pub fn push(&mut self, similarity: impl Into<String>, report: &EvalReport) {
        self.columns.push(TableColumn {
            similarity: similarity.into(),
            scheme: report.scheme,
            means: report.means,
        });
    }

    /// CSV with six decimal places; stable across runs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric");
        for c in &self.columns {
            out.push_str(&format!(",{}_{}", c.similarity, c.scheme));
        }
        out.push('\n');
        for (row, name) in MetricValues::MEAN_NAMES.iter().enumerate() {
            out.push_str(name);
            for c in &self.columns {
                out.push_str(&format!(",{:.6}", c.means.as_array()[row]));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    const RANK: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

    #[test]
    fn precision_examples() {
        assert_eq!(precision_at_k(&RANK, &set(&["a"]), 5), 0.2);
        assert_eq!(precision_at_k(&RANK, &set(&["a", "b", "c", "d"]), 5), 0.8);
    }

    #[test]
    fn recall_examples() {
        assert_eq!(recall_at_k(&RANK, &set(&["c"]), 5).unwrap(), 1.0);
        assert_eq!(recall_at_k(&RANK, &set(&["a", "c", "f", "z"]), 5).unwrap(), 0.5);
        assert_eq!(recall_at_k(&RANK, &set(&[]), 5), Err(EvalError::EmptyRelevantSet));
    }

    #[test]
    fn average_precision_examples() {
        assert_eq!(average_precision_at_k(&RANK, &set(&["a"]), 5).unwrap(), 1.0);
        assert!((average_precision_at_k(&RANK, &set(&["c"]), 5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(average_precision_at_k(&RANK, &set(&["f"]), 5).unwrap(), 0.0);
    }

    #[test]
    fn ndcg_examples() {
        let g: BTreeMap<String, u32> = [("b".to_string(), 1)].into();
        assert!((ndcg_at_p(&RANK, &g, 5).unwrap() - 1.0 / 3f64.log2()).abs() < 1e-12);
        assert!((ndcg_at_p(&RANK, &g, 5).unwrap() - 0.6309).abs() < 1e-4);
        let ideal: BTreeMap<String, u32> = [("a".to_string(), 2), ("b".to_string(), 1)].into();
        assert_eq!(ndcg_at_p(&RANK, &ideal, 5).unwrap(), 1.0);
        assert_eq!(ndcg_at_p(&RANK, &BTreeMap::new(), 5), Err(EvalError::AllZeroGrades));
    }

    #[test]
    fn reciprocal_rank_examples() {
        assert_eq!(reciprocal_rank(&RANK, &set(&["a"])), 1.0);
        assert_eq!(reciprocal_rank(&RANK, &set(&["d", "e"])), 0.25);
        assert_eq!(reciprocal_rank(&RANK, &set(&["z"])), 0.0);
    }

    #[test]
    fn f_measure_examples() {
        assert!((f_measure_at_k(&RANK, &set(&["a"]), 5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(f_measure_at_k(&RANK, &set(&["f"]), 5).unwrap(), 0.0);
    }

    #[test]
    fn r_precision_examples() {
        assert_eq!(r_precision(&RANK, &set(&["a"])).unwrap(), 1.0);
        assert_eq!(r_precision(&RANK, &set(&["b"])).unwrap(), 0.0);
        assert_eq!(r_precision(&RANK, &set(&["a", "b", "d", "f"])).unwrap(), 0.75);
    }

    #[test]
    fn sig_grades() {
        let catalog = VenueCatalog::new([("v1", "s1"), ("v2", "s1"), ("v3", "s2")]).unwrap();
        let scheme = RelevanceScheme::new(SchemeKind::Sig, catalog.clone());
        let g = scheme.grades("v2").unwrap();
        assert_eq!(g["v2"], 2);
        assert_eq!(g["v1"], 1);
        assert!(!g.contains_key("v3"));
        let actual = RelevanceScheme::new(SchemeKind::Actual, catalog);
        assert_eq!(actual.grades("v2").unwrap().len(), 1);
        assert!(actual.grades("nope").is_err());
    }

    #[test]
    fn table_layout() {
        let mut t = ResultTable::default();
        let report = EvalReport {
            per_query: BTreeMap::new(),
            means: MetricValues::from_array([0.2, 1.0, 1.0, 1.0, 1.0, 1.0 / 3.0, 1.0]),
            k: 5,
            scheme: SchemeKind::Actual,
        };
        t.push("cosine", &report);
        let csv = t.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 8);
        assert_eq!(lines[0], "metric,cosine_actual");
        assert_eq!(lines[1], "MP@K,0.200000");
        assert_eq!(lines[6], "MF-M@K,0.333333");
    }
}
