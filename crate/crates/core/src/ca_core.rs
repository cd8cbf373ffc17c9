//! Simple correspondence analysis of a two-way table.
//!
//! The fit works on the matrix of standardized residuals
//! `S = D_r^{-1/2} (P - r c^T) D_c^{-1/2}`, so the trivial axis
//! (inertia 1) never appears. Axes are oriented so that the entry of largest
//! magnitude in each column of the row standard coordinates is positive.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::thin_svd;
use crate::scalar::Real;
use crate::table::ContingencyTable;

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CaError {
    #[error("table grand total is zero")]
    ZeroGrandTotal,
    #[error("row {0} has zero sum")]
    ZeroMarginalRow(usize),
    #[error("column {0} has zero sum")]
    ZeroMarginalColumn(usize),
    #[error("requested {requested} dimensions, at most {max} available")]
    DimsTooLarge { requested: usize, max: usize },
    #[error("supplementary labels do not match the fitted {axis} labels")]
    LabelMismatch { axis: &'static str },
    #[error("supplementary data has {found} entries per point, model expects {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("singular value decomposition failed")]
    SvdFailed,
    #[error("unsupported model format version {0}")]
    Version(u32),
}

fn grand_total<T: Real>(table: &ContingencyTable<T>) -> Result<T, CaError> {
    let n = table.grand_total();
    if n <= T::zero() {
        return Err(CaError::ZeroGrandTotal);
    }
    Ok(n)
}

fn positive_margins<T: Real>(table: &ContingencyTable<T>) -> Result<(Vec<T>, Vec<T>), CaError> {
    let rows = table.row_sums();
    let cols = table.col_sums();
    if let Some(i) = rows.iter().position(|&v| v <= T::zero()) {
        return Err(CaError::ZeroMarginalRow(i));
    }
    if let Some(j) = cols.iter().position(|&v| v <= T::zero()) {
        return Err(CaError::ZeroMarginalColumn(j));
    }
    Ok((rows, cols))
}

/// `P = N / n`.
pub fn correspondence_matrix<T: Real>(table: &ContingencyTable<T>) -> Result<DMatrix<T>, CaError> {
    let n = grand_total(table)?;
    Ok(table.counts() / n)
}

/// Counts expected under independence: `row_i x col_j / n`.
pub fn expected_counts<T: Real>(table: &ContingencyTable<T>) -> Result<DMatrix<T>, CaError> {
    let n = grand_total(table)?;
    let rows = table.row_sums();
    let cols = table.col_sums();
    Ok(DMatrix::from_fn(table.nrows(), table.ncols(), |i, j| {
        rows[i] * cols[j] / n
    }))
}

/// Pearson chi-square test of independence.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareReport<T: Real> {
    pub statistic: T,
    pub dof: usize,
    pub total_inertia: T,
    pub expected: DMatrix<T>,
}

pub fn chi_square<T: Real>(table: &ContingencyTable<T>) -> Result<ChiSquareReport<T>, CaError> {
    let n = grand_total(table)?;
    positive_margins(table)?;
    let expected = expected_counts(table)?;
    let statistic = table
        .counts()
        .iter()
        .zip(expected.iter())
        .fold(T::zero(), |acc, (&o, &e)| acc + (o - e) * (o - e) / e);
    Ok(ChiSquareReport {
        statistic,
        dof: (table.nrows() - 1) * (table.ncols() - 1),
        total_inertia: statistic / n,
        expected,
    })
}

/// `alpha_ij = p_ij / (p_i p_j)`; all ones under independence.
pub fn pearson_ratios<T: Real>(table: &ContingencyTable<T>) -> Result<DMatrix<T>, CaError> {
    let n = grand_total(table)?;
    let (rows, cols) = positive_margins(table)?;
    Ok(DMatrix::from_fn(table.nrows(), table.ncols(), |i, j| {
        (table.counts()[(i, j)] / n) / ((rows[i] / n) * (cols[j] / n))
    }))
}

/// Fitted correspondence analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    bound = "T: Real",
    into = "CaModelRecord<T>",
    try_from = "CaModelRecord<T>"
)]
pub struct CaModel<T: Real> {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    row_masses: DVector<T>,
    col_masses: DVector<T>,
    singular_values: DVector<T>,
    all_inertias: Vec<T>,
    total_inertia: T,
    row_standard: DMatrix<T>,
    col_standard: DMatrix<T>,
    row_principal: DMatrix<T>,
    col_principal: DMatrix<T>,
}

/// Persisted form: principal coordinates are recomputed on load.
#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct CaModelRecord<T: Real> {
    format_version: u32,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    row_masses: DVector<T>,
    col_masses: DVector<T>,
    singular_values: DVector<T>,
    all_inertias: Vec<T>,
    total_inertia: T,
    row_standard: DMatrix<T>,
    col_standard: DMatrix<T>,
}

impl<T: Real> From<CaModel<T>> for CaModelRecord<T> {
    fn from(m: CaModel<T>) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            row_labels: m.row_labels,
            col_labels: m.col_labels,
            row_masses: m.row_masses,
            col_masses: m.col_masses,
            singular_values: m.singular_values,
            all_inertias: m.all_inertias,
            total_inertia: m.total_inertia,
            row_standard: m.row_standard,
            col_standard: m.col_standard,
        }
    }
}

impl<T: Real> TryFrom<CaModelRecord<T>> for CaModel<T> {
    type Error = CaError;

    fn try_from(r: CaModelRecord<T>) -> Result<Self, CaError> {
        if r.format_version != MODEL_FORMAT_VERSION {
            return Err(CaError::Version(r.format_version));
        }
        let row_principal = scale_columns(&r.row_standard, &r.singular_values);
        let col_principal = scale_columns(&r.col_standard, &r.singular_values);
        Ok(Self {
            row_labels: r.row_labels,
            col_labels: r.col_labels,
            row_masses: r.row_masses,
            col_masses: r.col_masses,
            singular_values: r.singular_values,
            all_inertias: r.all_inertias,
            total_inertia: r.total_inertia,
            row_standard: r.row_standard,
            col_standard: r.col_standard,
            row_principal,
            col_principal,
        })
    }
}

fn scale_columns<T: Real>(m: &DMatrix<T>, s: &DVector<T>) -> DMatrix<T> {
    let mut out = m.clone();
    for (k, mut col) in out.column_iter_mut().enumerate() {
        col *= s[k];
    }
    out
}

/// Maximum number of non-trivial axes of an `rows x cols` table.
pub fn max_dims(rows: usize, cols: usize) -> usize {
    rows.min(cols).saturating_sub(1)
}

/// Fits CA and keeps the first `n_dims` non-trivial axes (fewer if the
/// table's numerical rank is lower).
pub fn ca_fit<T: Real>(table: &ContingencyTable<T>, n_dims: usize) -> Result<CaModel<T>, CaError> {
    let n = grand_total(table)?;
    let (row_sums, col_sums) = positive_margins(table)?;
    let (ni, nj) = (table.nrows(), table.ncols());
    let max = max_dims(ni, nj);
    if n_dims == 0 || n_dims > max {
        return Err(CaError::DimsTooLarge {
            requested: n_dims,
            max,
        });
    }
    let r = DVector::from_iterator(ni, row_sums.iter().map(|&v| v / n));
    let c = DVector::from_iterator(nj, col_sums.iter().map(|&v| v / n));
    let r_isqrt = r.map(|v| T::one() / v.sqrt());
    let c_isqrt = c.map(|v| T::one() / v.sqrt());
    let s = DMatrix::from_fn(ni, nj, |i, j| {
        let p = table.counts()[(i, j)] / n;
        (p - r[i] * c[j]) * r_isqrt[i] * c_isqrt[j]
    });

    let svd = thin_svd(&s).ok_or(CaError::SvdFailed)?;
    let sv: Vec<T> = svd.s.iter().copied().collect();
    let all_inertias: Vec<T> = sv.iter().take(max).map(|&a| a * a).collect();

    let tol = T::lit(RANK_TOLERANCE) * sv[0];
    let rank = sv.iter().take(max).filter(|&&a| a > tol).count();
    let kept = n_dims.min(rank);

    let mut phi = DMatrix::<T>::zeros(ni, kept);
    let mut gamma = DMatrix::<T>::zeros(nj, kept);
    for k in 0..kept {
        let mut uk: DVector<T> = svd.u.column(k).into_owned();
        let mut vk: DVector<T> = svd.v.column(k).into_owned();
        uk.component_mul_assign(&r_isqrt);
        vk.component_mul_assign(&c_isqrt);
        let mut best = 0;
        for i in 1..ni {
            if uk[i].abs() > uk[best].abs() {
                best = i;
            }
        }
        if uk[best] < T::zero() {
            uk.neg_mut();
            vk.neg_mut();
        }
        phi.set_column(k, &uk);
        gamma.set_column(k, &vk);
    }
    let singular_values = DVector::from_iterator(kept, sv.iter().take(kept).copied());
    let total_inertia = chi_square(table)?.total_inertia;
    Ok(CaModel {
        row_labels: table.row_labels().to_vec(),
        col_labels: table.col_labels().to_vec(),
        row_principal: scale_columns(&phi, &singular_values),
        col_principal: scale_columns(&gamma, &singular_values),
        row_masses: r,
        col_masses: c,
        singular_values,
        all_inertias,
        total_inertia,
        row_standard: phi,
        col_standard: gamma,
    })
}

/// Principal coordinates of supplementary points plus the indices of
/// all-zero inputs, which are placed at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T: Real> {
    pub coords: DMatrix<T>,
    pub zero_points: Vec<usize>,
}

fn profile_times<T: Real>(points: &DMatrix<T>, standard: &DMatrix<T>) -> Projection<T> {
    let mut coords = DMatrix::<T>::zeros(points.nrows(), standard.ncols());
    let mut zero_points = Vec::new();
    for i in 0..points.nrows() {
        let total = points.row(i).iter().fold(T::zero(), |a, &v| a + v);
        if total <= T::zero() {
            zero_points.push(i);
            continue;
        }
        let coord = (points.row(i) / total) * standard;
        coords.set_row(i, &coord);
    }
    if !zero_points.is_empty() {
        log::warn!(
            "{} supplementary point(s) have zero total and were placed at the origin",
            zero_points.len()
        );
    }
    Projection {
        coords,
        zero_points,
    }
}

impl<T: Real> CaModel<T> {
    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn row_masses(&self) -> &DVector<T> {
        &self.row_masses
    }

    pub fn col_masses(&self) -> &DVector<T> {
        &self.col_masses
    }

    /// Retained singular values, descending.
    pub fn singular_values(&self) -> &DVector<T> {
        &self.singular_values
    }

    /// Number of retained axes.
    pub fn dims(&self) -> usize {
        self.singular_values.len()
    }

    /// Principal inertias of the retained axes.
    pub fn principal_inertias(&self) -> Vec<T> {
        self.singular_values.iter().map(|&a| a * a).collect()
    }

    /// Principal inertias of every non-trivial axis, before truncation.
    pub fn all_inertias(&self) -> &[T] {
        &self.all_inertias
    }

    /// `chi^2 / n` of the fitted table.
    pub fn total_inertia(&self) -> T {
        self.total_inertia
    }

    /// Share of total inertia carried by each retained axis.
    pub fn inertia_shares(&self) -> Vec<T> {
        self.principal_inertias()
            .into_iter()
            .map(|l| l / self.total_inertia)
            .collect()
    }

    pub fn row_standard(&self) -> &DMatrix<T> {
        &self.row_standard
    }

    pub fn col_standard(&self) -> &DMatrix<T> {
        &self.col_standard
    }

    pub fn row_principal(&self) -> &DMatrix<T> {
        &self.row_principal
    }

    pub fn col_principal(&self) -> &DMatrix<T> {
        &self.col_principal
    }

    /// Supplementary rows (one per matrix row, one entry per fitted column):
    /// row profile times the column standard coordinates.
    pub fn project_rows(&self, rows: &DMatrix<T>) -> Result<Projection<T>, CaError> {
        if rows.ncols() != self.col_labels.len() {
            return Err(CaError::ShapeMismatch {
                expected: self.col_labels.len(),
                found: rows.ncols(),
            });
        }
        Ok(profile_times(rows, &self.col_standard))
    }

    /// Supplementary columns (one per matrix column, one entry per fitted
    /// row): column profile times the row standard coordinates.
    pub fn project_cols(&self, cols: &DMatrix<T>) -> Result<Projection<T>, CaError> {
        if cols.nrows() != self.row_labels.len() {
            return Err(CaError::ShapeMismatch {
                expected: self.row_labels.len(),
                found: cols.nrows(),
            });
        }
        Ok(profile_times(&cols.transpose(), &self.row_standard))
    }

    /// Reconstitution of the correspondence matrix from the fitted masses and
    /// the first `n_dims` axes.
    pub fn reconstitute(&self, n_dims: usize) -> Result<DMatrix<T>, CaError> {
        reconstitute(
            self,
            self.row_masses.as_slice(),
            self.col_masses.as_slice(),
            n_dims,
        )
    }

    /// CSV of row and column principal coordinates for external biplots:
    /// `kind,label,mass,dim1,...`.
    pub fn write_coordinates_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["kind".to_string(), "label".into(), "mass".into()];
        header.extend((1..=self.dims()).map(|k| format!("dim{k}")));
        w.write_record(&header)?;
        let blocks = [
            ("row", &self.row_labels, &self.row_masses, &self.row_principal),
            ("col", &self.col_labels, &self.col_masses, &self.col_principal),
        ];
        for (kind, labels, masses, coords) in blocks {
            for (i, label) in labels.iter().enumerate() {
                let mut rec = vec![kind.to_string(), label.clone(), masses[i].as_f64().to_string()];
                rec.extend(coords.row(i).iter().map(|v| v.as_f64().to_string()));
                w.write_record(&rec)?;
            }
        }
        w.flush()
    }
}

/// `p_ij = r_i c_j (1 + sum_k alpha_k phi_ik gamma_jk)` over the first
/// `n_dims` retained axes.
pub fn reconstitute<T: Real>(
    model: &CaModel<T>,
    row_masses: &[T],
    col_masses: &[T],
    n_dims: usize,
) -> Result<DMatrix<T>, CaError> {
    if n_dims > model.dims() {
        return Err(CaError::DimsTooLarge {
            requested: n_dims,
            max: model.dims(),
        });
    }
    if row_masses.len() != model.row_labels.len() || col_masses.len() != model.col_labels.len() {
        return Err(CaError::ShapeMismatch {
            expected: model.row_labels.len(),
            found: row_masses.len(),
        });
    }
    Ok(DMatrix::from_fn(row_masses.len(), col_masses.len(), |i, j| {
        let mut s = T::one();
        for k in 0..n_dims {
            s += model.singular_values[k] * model.row_standard[(i, k)] * model.col_standard[(j, k)];
        }
        row_masses[i] * col_masses[j] * s
    }))
}

/// Projects the rows of `table` (columns must carry the fitted column labels).
pub fn project_supplementary_rows<T: Real>(
    model: &CaModel<T>,
    table: &ContingencyTable<T>,
) -> Result<Projection<T>, CaError> {
    if table.col_labels() != model.col_labels() {
        return Err(CaError::LabelMismatch { axis: "column" });
    }
    model.project_rows(table.counts())
}

/// Projects the columns of `table` (rows must carry the fitted row labels).
pub fn project_supplementary_cols<T: Real>(
    model: &CaModel<T>,
    table: &ContingencyTable<T>,
) -> Result<Projection<T>, CaError> {
    if table.row_labels() != model.row_labels() {
        return Err(CaError::LabelMismatch { axis: "row" });
    }
    model.project_cols(table.counts())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn table(rows: &[&[f64]]) -> ContingencyTable<f64> {
        ContingencyTable::from_rows(rows).unwrap()
    }

    #[test]
    fn uniform_correspondence_matrix() {
        let p = correspondence_matrix(&table(&[&[3.0, 3.0], &[3.0, 3.0]])).unwrap();
        assert!(p.iter().all(|&v| v == 0.25));
        assert!(matches!(
            correspondence_matrix(&table(&[&[0.0, 0.0]])),
            Err(CaError::ZeroGrandTotal)
        ));
    }

    #[test]
    fn expected_counts_examples() {
        let e = expected_counts(&table(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert!(e.iter().all(|&v| v == 1.0));
        let t = table(&[&[2.0, 4.0], &[1.0, 2.0]]);
        let e = expected_counts(&t).unwrap();
        for (a, b) in e.iter().zip(t.counts().iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn independent_table_has_zero_statistic() {
        let rep = chi_square(&table(&[&[2.0, 4.0], &[1.0, 2.0]])).unwrap();
        assert_abs_diff_eq!(rep.statistic, 0.0, epsilon = 1e-12);
        assert_eq!(rep.dof, 1);
        assert!(matches!(
            chi_square(&table(&[&[1.0, 0.0], &[1.0, 0.0]])),
            Err(CaError::ZeroMarginalColumn(1))
        ));
    }

    #[test]
    fn pearson_ratio_identity_diagonal() {
        let a = pearson_ratios(&table(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_eq!(a, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]));
    }

    #[test]
    fn dims_bounds() {
        let t = table(&[&[1.0, 2.0, 3.0], &[3.0, 1.0, 1.0]]);
        assert!(matches!(ca_fit(&t, 0), Err(CaError::DimsTooLarge { .. })));
        assert!(matches!(ca_fit(&t, 2), Err(CaError::DimsTooLarge { max: 1, .. })));
        assert_eq!(ca_fit(&t, 1).unwrap().dims(), 1);
    }

    #[test]
    fn zero_margins_rejected() {
        let t = table(&[&[1.0, 2.0], &[0.0, 0.0], &[1.0, 1.0]]);
        assert!(matches!(ca_fit(&t, 1), Err(CaError::ZeroMarginalRow(1))));
    }

    #[test]
    fn sign_convention_largest_phi_positive() {
        let t = table(&[&[10.0, 1.0, 3.0], &[2.0, 8.0, 1.0], &[1.0, 2.0, 9.0]]);
        let m = ca_fit(&t, 2).unwrap();
        for k in 0..m.dims() {
            let col = m.row_standard().column(k);
            let big = col.iter().copied().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn model_serde_round_trip() {
        let t = table(&[&[10.0, 1.0, 3.0], &[2.0, 8.0, 1.0], &[1.0, 2.0, 9.0]]);
        let m = ca_fit(&t, 2).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: CaModel<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn coordinates_csv_shape() {
        let t = table(&[&[10.0, 1.0, 3.0], &[2.0, 8.0, 1.0]]);
        let m = ca_fit(&t, 1).unwrap();
        let mut buf = Vec::new();
        m.write_coordinates_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 + 3);
        assert!(text.starts_with("kind,label,mass,dim1"));
    }
}
