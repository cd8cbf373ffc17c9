//! Euclidean distance, cosine similarity and Pearson correlation, and
//! ranking of labeled candidates by any of them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimilarityError {
    #[error("vectors have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("empty vectors")]
    Empty,
    #[error("cosine undefined for a zero vector")]
    ZeroVector,
    #[error("pearson undefined for a constant vector")]
    ZeroVariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityKind {
    Euclidean,
    Cosine,
    Pearson,
}

impl SimilarityKind {
    pub const ALL: [SimilarityKind; 3] = [Self::Euclidean, Self::Cosine, Self::Pearson];

    pub fn score<T: Real>(self, x: &[T], y: &[T]) -> Result<T, SimilarityError> {
        match self {
            Self::Euclidean => euclidean(x, y),
            Self::Cosine => cosine(x, y),
            Self::Pearson => pearson(x, y),
        }
    }

    /// Distances rank ascending, similarities descending.
    pub fn higher_is_better(self) -> bool {
        !matches!(self, Self::Euclidean)
    }

    /// Nonnegative neighbor weight: `1 / (1 + d)` for distances, the
    /// similarity clamped at zero otherwise.
    pub fn weight<T: Real>(self, score: T) -> T {
        match self {
            Self::Euclidean => T::one() / (T::one() + score),
            Self::Cosine | Self::Pearson => score.max(T::zero()),
        }
    }

    /// Orders two valid scores so that the better one comes first.
    pub fn compare<T: Real>(self, a: T, b: T) -> Ordering {
        let ord = a.partial_cmp(&b).unwrap_or(Ordering::Equal);
        if self.higher_is_better() {
            ord.reverse()
        } else {
            ord
        }
    }
}

impl fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Euclidean => "euclidean",
            Self::Cosine => "cosine",
            Self::Pearson => "pearson",
        })
    }
}

impl FromStr for SimilarityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "euclid" => Ok(Self::Euclidean),
            "cosine" => Ok(Self::Cosine),
            "pearson" => Ok(Self::Pearson),
            other => Err(format!("unknown similarity `{other}`")),
        }
    }
}

fn check_lengths<T>(x: &[T], y: &[T]) -> Result<(), SimilarityError> {
    if x.len() != y.len() {
        return Err(SimilarityError::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(SimilarityError::Empty);
    }
    Ok(())
}

pub fn euclidean<T: Real>(x: &[T], y: &[T]) -> Result<T, SimilarityError> {
    check_lengths(x, y)?;
    Ok(x.iter()
        .zip(y)
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
        .sqrt())
}

pub fn cosine<T: Real>(x: &[T], y: &[T]) -> Result<T, SimilarityError> {
    check_lengths(x, y)?;
    let (mut dot, mut nx, mut ny) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        dot += a * b;
        nx += a * a;
        ny += b * b;
    }
    if nx <= T::zero() || ny <= T::zero() {
        return Err(SimilarityError::ZeroVector);
    }
    Ok(dot / (nx.sqrt() * ny.sqrt()))
}

pub fn pearson<T: Real>(x: &[T], y: &[T]) -> Result<T, SimilarityError> {
    check_lengths(x, y)?;
    let n = T::from_count(x.len());
    let mx = x.iter().fold(T::zero(), |a, &v| a + v) / n;
    let my = y.iter().fold(T::zero(), |a, &v| a + v) / n;
    let (mut cov, mut vx, mut vy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        cov += da * db;
        vx += da * da;
        vy += db * db;
    }
    if vx <= T::zero() || vy <= T::zero() {
        return Err(SimilarityError::ZeroVariance);
    }
    Ok(cov / (vx.sqrt() * vy.sqrt()))
}

/// Sorts `(label, score)` pairs: valid scores best-first under `kind`, then
/// invalid ones (`None`); ties broken by label.
pub fn sort_scored<T: Real>(scored: &mut [(String, Option<T>)], kind: SimilarityKind) {
    scored.sort_by(|(la, sa), (lb, sb)| {
        let primary = match (sa, sb) {
            (Some(a), Some(b)) => kind.compare(*a, *b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        };
        primary.then_with(|| la.cmp(lb))
    });
}

/// Ranks labeled candidates by their similarity to `query`. Candidates for
/// which the measure is undefined are placed last with no score.
pub fn rank_by_similarity<T: Real, L: AsRef<str>>(
    query: &[T],
    candidates: &[(L, Vec<T>)],
    kind: SimilarityKind,
) -> Vec<(String, Option<T>)> {
    let mut scored: Vec<(String, Option<T>)> = candidates
        .iter()
        .map(|(label, v)| (label.as_ref().to_string(), kind.score(query, v).ok()))
        .collect();
    sort_scored(&mut scored, kind);
    scored
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(euclidean(&[1.5, 2.0], &[1.5, 2.0]).unwrap(), 0.0);
        assert_eq!(
            euclidean(&[1.0], &[1.0, 2.0]),
            Err(SimilarityError::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(cosine(&[2.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0, epsilon = 1e-15);
        let expected = 32.0 / (14f64.sqrt() * 77f64.sqrt());
        assert_abs_diff_eq!(cosine(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.974632, epsilon = 1e-6);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]), Err(SimilarityError::ZeroVector));
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 4.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        assert_abs_diff_eq!(pearson(&x, &y).unwrap(), 1.0, epsilon = 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_abs_diff_eq!(pearson(&x, &neg).unwrap(), -1.0, epsilon = 1e-12);
        assert_eq!(pearson(&[2.0, 2.0, 2.0], &x[..3]), Err(SimilarityError::ZeroVariance));
    }

    #[test]
    fn ranking_directions_and_demotion() {
        let cands = vec![("b", vec![2.0, 0.0]), ("a", vec![1.0, 0.0])];
        let r = rank_by_similarity(&[0.0, 0.0], &cands, SimilarityKind::Euclidean);
        assert_eq!(r[0].0, "a");
        let cands = vec![("orth", vec![0.0, 1.0]), ("zero", vec![0.0, 0.0]), ("par", vec![3.0, 0.0])];
        let r = rank_by_similarity(&[1.0, 0.0], &cands, SimilarityKind::Cosine);
        let labels: Vec<_> = r.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["par", "orth", "zero"]);
        assert_eq!(r[2].1, None);
    }

    #[test]
    fn ties_broken_by_label() {
        let cands = vec![("z", vec![1.0, 0.0]), ("m", vec![1.0, 0.0]), ("a", vec![1.0, 0.0])];
        let r = rank_by_similarity(&[1.0, 0.0], &cands, SimilarityKind::Cosine);
        let labels: Vec<_> = r.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["a", "m", "z"]);
    }

    #[test]
    fn weights_nonnegative() {
        assert_eq!(SimilarityKind::Euclidean.weight(1.0), 0.5);
        assert_eq!(SimilarityKind::Cosine.weight(-0.3), 0.0);
        assert_eq!(SimilarityKind::Pearson.weight(0.4), 0.4);
    }

    #[test]
    fn parse_and_display() {
        for k in SimilarityKind::ALL {
            assert_eq!(k.to_string().parse::<SimilarityKind>().unwrap(), k);
        }
    }
}
