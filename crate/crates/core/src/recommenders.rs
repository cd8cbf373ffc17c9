//! The six venue recommendation methods.
//!
//! | method | input | scoring |
//! | ------ | ----- | ------- |
//! | m1 | author x venue counts | CA; sum over authors of similarity to venue principal coordinates |
//! | m2 | paper x feature times feature x venue | CA of the composed paper x venue table |
//! | m3 | paper x feature, feature x venue | two CAs joined by a least-squares linear map |
//! | m4 | paper x feature, venue centroids | direct similarity to each centroid |
//! | m5 | paper x venue counts | similarity-weighted venue ratings of training papers |
//! | m6 | paper x feature, paper x venue counts | m5 with neighbors found in feature space |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ca_core::{ca_fit, max_dims, CaError, CaModel};
use crate::linalg::{pseudo_inverse, thin_svd};
use crate::scalar::Real;
use crate::similarity::{sort_scored, SimilarityKind};
use crate::table::ContingencyTable;
use crate::text_features::DocTermMatrix;

#[derive(Debug, Error)]
pub enum RecommendError {
    #[error(transparent)]
    Ca(#[from] CaError),
    #[error("feature labels of the test matrix do not match the training vocabulary")]
    VocabularyMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("composed matrix violates CA preconditions: {0}")]
    NegativeOrZeroMargin(String),
    #[error("requested {requested} dimensions, at most {max} available")]
    DimsTooLarge { requested: usize, max: usize },
    #[error("paper `{0}` has no known venue")]
    UnknownPaper(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "m1_author_ca")]
    M1AuthorCa,
    #[serde(rename = "m2_composed_ca")]
    M2ComposedCa,
    #[serde(rename = "m3_linear_map")]
    M3LinearMap,
    #[serde(rename = "m4_content")]
    M4Content,
    #[serde(rename = "m5_collaborative")]
    M5Collaborative,
    #[serde(rename = "m6_hybrid")]
    M6Hybrid,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Self::M1AuthorCa,
        Self::M2ComposedCa,
        Self::M3LinearMap,
        Self::M4Content,
        Self::M5Collaborative,
        Self::M6Hybrid,
    ];

    pub fn short(self) -> &'static str {
        match self {
            Self::M1AuthorCa => "m1",
            Self::M2ComposedCa => "m2",
            Self::M3LinearMap => "m3",
            Self::M4Content => "m4",
            Self::M5Collaborative => "m5",
            Self::M6Hybrid => "m6",
        }
    }

    /// Whether the method reads paper content.
    pub fn uses_content(self) -> bool {
        !matches!(self, Self::M1AuthorCa | Self::M5Collaborative)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| {
                m.short() == s
                    || serde_json::to_value(m).ok().and_then(|v| v.as_str().map(|x| x == s)) == Some(true)
            })
            .ok_or_else(|| format!("unknown method `{s}` (expected m1..m6)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Tfidf,
    Topics,
    None,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tfidf => "tfidf",
            Self::Topics => "topics",
            Self::None => "none",
        })
    }
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tfidf" | "tf-idf" => Ok(Self::Tfidf),
            "topics" | "lda" => Ok(Self::Topics),
            "none" => Ok(Self::None),
            other => Err(format!("unknown representation `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RankedVenue<T: Real> {
    pub venue: String,
    /// `None` when the similarity was undefined for this venue.
    pub score: Option<T>,
}

/// Ranked venues for one query paper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RankedRecommendation<T: Real> {
    pub paper_id: String,
    pub ranking: Vec<RankedVenue<T>>,
    pub method: Method,
    pub representation: Representation,
    /// The query vector was degenerate (all-zero input, origin projection or
    /// no positive neighbor weight).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl<T: Real> RankedRecommendation<T> {
    pub fn venues(&self) -> Vec<&str> {
        self.ranking.iter().map(|r| r.venue.as_str()).collect()
    }
}

fn to_ranking<T: Real>(mut scored: Vec<(String, Option<T>)>, order: SimilarityKind) -> Vec<RankedVenue<T>> {
    sort_scored(&mut scored, order);
    scored
        .into_iter()
        .map(|(venue, score)| RankedVenue { venue, score })
        .collect()
}

/// Ranks venues by similarity between `point` and each row of `venue_coords`.
pub fn rank_venues<T: Real>(
    point: &[T],
    venue_coords: &DMatrix<T>,
    venue_labels: &[String],
    kind: SimilarityKind,
) -> Vec<RankedVenue<T>> {
    let scored = venue_labels
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let coords: Vec<T> = venue_coords.row(j).iter().copied().collect();
            (v.clone(), kind.score(point, &coords).ok())
        })
        .collect();
    to_ranking(scored, kind)
}

fn rows_of<T: Real>(m: &DMatrix<T>) -> Vec<Vec<T>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

// ---------------------------------------------------------------- method 1

pub fn m1_fit<T: Real>(author_conf: &ContingencyTable<T>, n_dims: usize) -> Result<CaModel<T>, RecommendError> {
    Ok(ca_fit(author_conf, n_dims)?)
}

/// `author_rows` holds one venue-count row per author of the paper, columns
/// aligned with the model's venues. Venue score is the sum over authors of
/// the similarity between the author's supplementary principal coordinates
/// and the venue's principal coordinates.
pub fn m1_recommend<T: Real>(
    model: &CaModel<T>,
    paper_id: &str,
    author_rows: &DMatrix<T>,
    kind: SimilarityKind,
) -> Result<RankedRecommendation<T>, RecommendError> {
    let proj = model.project_rows(author_rows)?;
    let authors = rows_of(&proj.coords);
    let venues = rows_of(model.col_principal());
    let scored = model
        .col_labels()
        .iter()
        .zip(&venues)
        .map(|(label, g)| {
            let valid: Vec<T> = authors.iter().filter_map(|f| kind.score(f, g).ok()).collect();
            let score = if valid.is_empty() {
                None
            } else {
                Some(valid.into_iter().fold(T::zero(), |a, s| a + s))
            };
            (label.clone(), score)
        })
        .collect();
    Ok(RankedRecommendation {
        paper_id: paper_id.to_string(),
        ranking: to_ranking(scored, kind),
        method: Method::M1AuthorCa,
        representation: Representation::None,
        degenerate: author_rows.nrows() == 0 || proj.zero_points.len() == author_rows.nrows(),
    })
}

// ---------------------------------------------------------------- method 2

/// Paper x venue table `A C`. Feature labels must agree.
pub fn compose<T: Real>(
    paper_term: &DocTermMatrix<T>,
    word_conf: &ContingencyTable<T>,
) -> Result<ContingencyTable<T>, RecommendError> {
    if paper_term.cols != word_conf.row_labels() {
        return Err(RecommendError::VocabularyMismatch);
    }
    let product = &paper_term.values * word_conf.counts();
    ContingencyTable::new(paper_term.rows.clone(), word_conf.col_labels().to_vec(), product)
        .map_err(|e| RecommendError::NegativeOrZeroMargin(e.to_string()))
}

fn nonzero_rows<T: Real>(m: &DMatrix<T>) -> Vec<usize> {
    (0..m.nrows())
        .filter(|&i| m.row(i).iter().any(|&v| v > T::zero()))
        .collect()
}

fn nonzero_cols<T: Real>(m: &DMatrix<T>) -> Vec<usize> {
    (0..m.ncols())
        .filter(|&j| m.column(j).iter().any(|&v| v > T::zero()))
        .collect()
}

/// CA of the composed training paper x venue table. Training papers whose
/// composed row is zero carry no mass and are left out of the fit.
pub fn m2_fit<T: Real>(
    paper_term: &DocTermMatrix<T>,
    word_conf: &ContingencyTable<T>,
    n_dims: usize,
) -> Result<CaModel<T>, RecommendError> {
    let composed = compose(paper_term, word_conf)?;
    let cols = nonzero_cols(composed.counts());
    if cols.len() != composed.ncols() {
        let missing: Vec<_> = (0..composed.ncols())
            .filter(|j| !cols.contains(j))
            .map(|j| composed.col_labels()[j].clone())
            .collect();
        return Err(RecommendError::NegativeOrZeroMargin(format!(
            "venues with zero mass: {}",
            missing.join(", ")
        )));
    }
    let rows = nonzero_rows(composed.counts());
    if rows.len() < composed.nrows() {
        log::warn!(
            "{} training paper(s) have a zero composed row and are excluded from the fit",
            composed.nrows() - rows.len()
        );
    }
    Ok(ca_fit(&composed.select_rows(&rows), n_dims)?)
}

pub fn m2_recommend<T: Real>(
    model: &CaModel<T>,
    test_paper_terms: &DocTermMatrix<T>,
    word_conf: &ContingencyTable<T>,
    kind: SimilarityKind,
) -> Result<Vec<RankedRecommendation<T>>, RecommendError> {
    let composed = compose(test_paper_terms, word_conf)?;
    if composed.col_labels() != model.col_labels() {
        return Err(CaError::LabelMismatch { axis: "column" }.into());
    }
    let proj = model.project_rows(composed.counts())?;
    Ok(rank_projected(
        composed.row_labels(),
        &proj.coords,
        &proj.zero_points,
        model.col_principal(),
        model.col_labels(),
        kind,
        Method::M2ComposedCa,
        test_paper_terms.weighting.into(),
    ))
}

#[allow(clippy::too_many_arguments)]
fn rank_projected<T: Real>(
    paper_ids: &[String],
    coords: &DMatrix<T>,
    zero_points: &[usize],
    venue_coords: &DMatrix<T>,
    venue_labels: &[String],
    kind: SimilarityKind,
    method: Method,
    representation: Representation,
) -> Vec<RankedRecommendation<T>> {
    paper_ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let point: Vec<T> = coords.row(i).iter().copied().collect();
            RankedRecommendation {
                paper_id: id.clone(),
                ranking: rank_venues(&point, venue_coords, venue_labels, kind),
                method,
                representation,
                degenerate: zero_points.contains(&i),
            }
        })
        .collect()
}

impl From<crate::text_features::Weighting> for Representation {
    fn from(w: crate::text_features::Weighting) -> Self {
        use crate::text_features::Weighting;
        match w {
            Weighting::Tfidf => Self::Tfidf,
            Weighting::Topics => Self::Topics,
            Weighting::Count => Self::None,
        }
    }
}

// ---------------------------------------------------------------- method 3

/// Linear map `T` (d_p x d_c) from reduced paper space to reduced venue space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LinearMap<T: Real> {
    pub matrix: DMatrix<T>,
}

impl<T: Real> LinearMap<T> {
    pub fn source_dims(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn target_dims(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Minimum-norm least-squares solution of `F T = G` through the SVD
/// pseudo-inverse of `F`. The flag reports a rank-deficient `F`.
pub fn fit_linear_map<T: Real>(f: &DMatrix<T>, g: &DMatrix<T>) -> Result<(LinearMap<T>, bool), RecommendError> {
    if f.nrows() != g.nrows() {
        return Err(RecommendError::ShapeMismatch(format!(
            "{} source rows vs {} target rows",
            f.nrows(),
            g.nrows()
        )));
    }
    let svd = thin_svd(f).ok_or(RecommendError::Ca(CaError::SvdFailed))?;
    let smax = svd.s.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let tol = T::from_count(f.nrows().max(f.ncols())) * T::default_epsilon() * smax;
    let (pinv, kept) = pseudo_inverse(f, tol).ok_or(RecommendError::Ca(CaError::SvdFailed))?;
    let deficient = kept < f.ncols();
    if deficient {
        log::warn!("paper-space coordinate matrix is rank deficient; using the minimum-norm map");
    }
    Ok((LinearMap { matrix: pinv * g }, deficient))
}

/// State of method 3: paper-space CA, venue-space CA and the map between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LinearMapModel<T: Real> {
    pub paper_space: CaModel<T>,
    pub venue_space: CaModel<T>,
    pub map: LinearMap<T>,
    /// Feature columns retained in the paper-space fit.
    pub feature_columns: Vec<usize>,
    pub feature_labels: Vec<String>,
    pub rank_deficient: bool,
}

pub fn m3_fit<T: Real>(
    paper_term: &DocTermMatrix<T>,
    word_conf: &ContingencyTable<T>,
    paper_venues: &BTreeMap<String, String>,
    dims_paper: usize,
    dims_conf: usize,
) -> Result<LinearMapModel<T>, RecommendError> {
    if paper_term.cols != word_conf.row_labels() {
        return Err(RecommendError::VocabularyMismatch);
    }
    let rows = nonzero_rows(&paper_term.values);
    let cols = nonzero_cols(&paper_term.values);
    let paper_table = ContingencyTable::new(
        paper_term.rows.clone(),
        paper_term.cols.clone(),
        paper_term.values.clone(),
    )
    .map_err(|e| RecommendError::ShapeMismatch(e.to_string()))?
    .select_rows(&rows)
    .select_cols(&cols);
    let max_p = max_dims(paper_table.nrows(), paper_table.ncols());
    if dims_paper == 0 || dims_paper > max_p {
        return Err(RecommendError::DimsTooLarge {
            requested: dims_paper,
            max: max_p,
        });
    }
    let word_rows = nonzero_rows(word_conf.counts());
    let conf_table = word_conf.select_rows(&word_rows);
    if let Some(j) = (0..conf_table.ncols()).find(|&j| conf_table.column(j).iter().all(|&v| v <= T::zero())) {
        return Err(RecommendError::NegativeOrZeroMargin(format!(
            "venue `{}` has zero mass",
            conf_table.col_labels()[j]
        )));
    }
    let max_c = max_dims(conf_table.nrows(), conf_table.ncols());
    if dims_conf == 0 || dims_conf > max_c {
        return Err(RecommendError::DimsTooLarge {
            requested: dims_conf,
            max: max_c,
        });
    }
    let paper_space = ca_fit(&paper_table, dims_paper)?;
    let venue_space = ca_fit(&conf_table, dims_conf)?;

    let venue_row: BTreeMap<&str, usize> = venue_space
        .col_labels()
        .iter()
        .enumerate()
        .map(|(j, v)| (v.as_str(), j))
        .collect();
    let venue_coords = venue_space.col_principal();
    let mut g = DMatrix::<T>::zeros(paper_table.nrows(), venue_space.dims());
    for (i, id) in paper_table.row_labels().iter().enumerate() {
        let venue = paper_venues
            .get(id)
            .ok_or_else(|| RecommendError::UnknownPaper(id.clone()))?;
        let j = *venue_row
            .get(venue.as_str())
            .ok_or_else(|| RecommendError::UnknownPaper(id.clone()))?;
        g.set_row(i, &venue_coords.row(j));
    }
    let (map, rank_deficient) = fit_linear_map(paper_space.row_principal(), &g)?;
    Ok(LinearMapModel {
        paper_space,
        venue_space,
        map,
        feature_columns: cols,
        feature_labels: paper_term.cols.clone(),
        rank_deficient,
    })
}

pub fn m3_recommend<T: Real>(
    model: &LinearMapModel<T>,
    test_paper_terms: &DocTermMatrix<T>,
    kind: SimilarityKind,
) -> Result<Vec<RankedRecommendation<T>>, RecommendError> {
    if test_paper_terms.cols != model.feature_labels {
        return Err(RecommendError::VocabularyMismatch);
    }
    let restricted = test_paper_terms.values.select_columns(&model.feature_columns);
    let proj = model.paper_space.project_rows(&restricted)?;
    let mapped = &proj.coords * &model.map.matrix;
    Ok(rank_projected(
        &test_paper_terms.rows,
        &mapped,
        &proj.zero_points,
        model.venue_space.col_principal(),
        model.venue_space.col_labels(),
        kind,
        Method::M3LinearMap,
        test_paper_terms.weighting.into(),
    ))
}

// ---------------------------------------------------------------- method 4

/// Direct similarity of each test paper to each venue centroid column.
pub fn m4_recommend<T: Real>(
    test_paper_terms: &DocTermMatrix<T>,
    conf_centroids: &ContingencyTable<T>,
    kind: SimilarityKind,
) -> Result<Vec<RankedRecommendation<T>>, RecommendError> {
    if test_paper_terms.cols != conf_centroids.row_labels() {
        return Err(RecommendError::VocabularyMismatch);
    }
    let centroids = conf_centroids.counts().transpose();
    let zero = test_paper_terms.zero_rows();
    Ok(rank_projected(
        &test_paper_terms.rows,
        &test_paper_terms.values,
        &zero,
        &centroids,
        conf_centroids.col_labels(),
        kind,
        Method::M4Content,
        test_paper_terms.weighting.into(),
    ))
}

// ------------------------------------------------------------ methods 5, 6

/// Weighted venue scores: `sum_p s_p M[p,c] / sum_{p: M[p,c] > 0} s_p`, zero
/// for an empty denominator.
pub fn collaborative_scores<T: Real>(weights: &[T], train_pc: &DMatrix<T>) -> Vec<T> {
    (0..train_pc.ncols())
        .map(|c| {
            let (mut num, mut den) = (T::zero(), T::zero());
            for (p, &s) in weights.iter().enumerate() {
                let rating = train_pc[(p, c)];
                if rating > T::zero() {
                    num += s * rating;
                    den += s;
                }
            }
            if den > T::zero() {
                num / den
            } else {
                T::zero()
            }
        })
        .collect()
}

fn collaborative_rank<T: Real>(
    paper_id: &str,
    weights: &[T],
    train_pc: &ContingencyTable<T>,
    method: Method,
    representation: Representation,
) -> RankedRecommendation<T> {
    let degenerate = weights.iter().all(|&w| w <= T::zero());
    let scores = collaborative_scores(weights, train_pc.counts());
    let scored = train_pc
        .col_labels()
        .iter()
        .cloned()
        .zip(scores.into_iter().map(Some))
        .collect();
    RankedRecommendation {
        paper_id: paper_id.to_string(),
        // scores are similarities: higher first
        ranking: to_ranking(scored, SimilarityKind::Cosine),
        method,
        representation,
        degenerate,
    }
}

fn neighbor_weights<T: Real>(query: &[T], train: &[Vec<T>], kind: SimilarityKind) -> Vec<T> {
    train
        .iter()
        .map(|row| kind.score(query, row).map_or(T::zero(), |s| kind.weight(s)))
        .collect()
}

/// Collaborative filtering over paper x venue rows; all training papers are
/// neighbors.
pub fn m5_recommend<T: Real>(
    train_pc: &ContingencyTable<T>,
    test_pc: &ContingencyTable<T>,
    kind: SimilarityKind,
) -> Result<Vec<RankedRecommendation<T>>, RecommendError> {
    if train_pc.col_labels() != test_pc.col_labels() {
        return Err(RecommendError::ShapeMismatch("venue columns differ".into()));
    }
    let train = rows_of(train_pc.counts());
    Ok(test_pc
        .row_labels()
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let w = neighbor_weights(&test_pc.row(i), &train, kind);
            collaborative_rank(id, &w, train_pc, Method::M5Collaborative, Representation::None)
        })
        .collect())
}

/// Collaborative scoring with neighbors found in content space.
pub fn m6_recommend<T: Real>(
    train_pc: &ContingencyTable<T>,
    train_terms: &DocTermMatrix<T>,
    test_terms: &DocTermMatrix<T>,
    kind: SimilarityKind,
) -> Result<Vec<RankedRecommendation<T>>, RecommendError> {
    if train_terms.rows != train_pc.row_labels() {
        return Err(RecommendError::ShapeMismatch(
            "training feature rows and paper x venue rows differ".into(),
        ));
    }
    if train_terms.cols != test_terms.cols {
        return Err(RecommendError::VocabularyMismatch);
    }
    let train = rows_of(&train_terms.values);
    Ok(test_terms
        .rows
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let w = neighbor_weights(&test_terms.row(i), &train, kind);
            collaborative_rank(id, &w, train_pc, Method::M6Hybrid, test_terms.weighting.into())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text_features::Weighting;

    fn dtm(rows: &[&str], cols: &[&str], values: &[f64]) -> DocTermMatrix<f64> {
        DocTermMatrix {
            rows: rows.iter().map(|s| s.to_string()).collect(),
            cols: cols.iter().map(|s| s.to_string()).collect(),
            values: DMatrix::from_row_slice(rows.len(), cols.len(), values),
            weighting: Weighting::Tfidf,
        }
    }

    fn table(rows: &[&str], cols: &[&str], values: &[f64]) -> ContingencyTable<f64> {
        ContingencyTable::new(
            rows.iter().map(|s| s.to_string()).collect(),
            cols.iter().map(|s| s.to_string()).collect(),
            DMatrix::from_row_slice(rows.len(), cols.len(), values),
        )
        .unwrap()
    }

    #[test]
    fn method_names() {
        assert_eq!("m3".parse::<Method>().unwrap(), Method::M3LinearMap);
        assert_eq!("m6_hybrid".parse::<Method>().unwrap(), Method::M6Hybrid);
        assert!("m7".parse::<Method>().is_err());
    }

    #[test]
    fn compose_hand_product() {
        let a = dtm(&["p1", "p2", "p3"], &["w1", "w2"], &[1.0, 2.0, 0.0, 1.0, 3.0, 0.0]);
        let c = table(&["w1", "w2"], &["c1", "c2"], &[1.0, 0.5, 2.0, 0.0]);
        let m = compose(&a, &c).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (3, 2));
        assert_eq!(m.row(0), vec![5.0, 0.5]);
        assert_eq!(m.row(1), vec![2.0, 0.0]);
        assert_eq!(m.row(2), vec![3.0, 1.5]);
    }

    #[test]
    fn compose_requires_aligned_vocabulary() {
        let a = dtm(&["p1"], &["w1", "w2"], &[1.0, 2.0]);
        let c = table(&["w1", "w3"], &["c1"], &[1.0, 2.0]);
        assert!(matches!(compose(&a, &c), Err(RecommendError::VocabularyMismatch)));
    }

    #[test]
    fn single_training_paper_cf() {
        let train = table(&["t"], &["c1", "c2", "c3"], &[1.0, 0.0, 0.0]);
        let test = table(&["q"], &["c1", "c2", "c3"], &[1.0, 1.0, 0.0]);
        let recs = m5_recommend(&train, &test, SimilarityKind::Cosine).unwrap();
        let r = &recs[0];
        assert_eq!(r.ranking[0].venue, "c1");
        assert_eq!(r.ranking[0].score, Some(1.0));
        assert_eq!(r.ranking[1].score, Some(0.0));
    }

    #[test]
    fn duplicate_neighbors_cancel() {
        let one = collaborative_scores(&[0.7], &DMatrix::from_row_slice(1, 2, &[2.0, 1.0]));
        let two = collaborative_scores(&[0.7, 0.7], &DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 2.0, 1.0]));
        assert_eq!(one, two);
    }

    #[test]
    fn zero_similarity_is_flagged() {
        let train = table(&["t"], &["c1", "c2"], &[1.0, 0.0]);
        let test = table(&["q"], &["c1", "c2"], &[0.0, 1.0]);
        let recs = m5_recommend(&train, &test, SimilarityKind::Cosine).unwrap();
        assert!(recs[0].degenerate);
        assert_eq!(recs[0].venues(), ["c1", "c2"]);
    }

    #[test]
    fn linear_map_shape() {
        let f = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 0.5]);
        let g = DMatrix::from_row_slice(4, 3, &[1.0, 2.0, 3.0, 0.0, 1.0, 0.0, 1.0, 3.0, 3.0, 2.0, 4.5, 6.0]);
        let (t, deficient) = fit_linear_map(&f, &g).unwrap();
        assert_eq!((t.source_dims(), t.target_dims()), (2, 3));
        assert!(!deficient);
        let (_, deficient) = fit_linear_map(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]), &DMatrix::zeros(2, 1)).unwrap();
        assert!(deficient);
    }

    #[test]
    fn m4_equal_to_centroid_ranks_first() {
        let centroids = table(&["w1", "w2", "w3"], &["c1", "c2"], &[1.0, 0.0, 2.0, 1.0, 0.0, 3.0]);
        let test = dtm(&["q"], &["w1", "w2", "w3"], &[0.0, 1.0, 3.0]);
        let recs = m4_recommend(&test, &centroids, SimilarityKind::Cosine).unwrap();
        assert_eq!(recs[0].ranking[0].venue, "c2");
    }
}
