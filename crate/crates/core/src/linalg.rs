//! Thin SVD and pseudo-inverse on nalgebra matrices, computed by faer in f64.
//!
//! nalgebra's own bidiagonal SVD fails to reconstruct a few percent of
//! small rank-deficient matrices (typical of CA on sparse count tables), so
//! decompositions go through faer and results are converted back to `T`.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;

/// `m = u * diag(s) * v^T` with `s` sorted descending.
#[derive(Debug, Clone)]
pub struct ThinSvd<T: Real> {
    pub u: DMatrix<T>,
    pub s: DVector<T>,
    pub v: DMatrix<T>,
}

/// Returns `None` if the decomposition does not converge or `m` is empty.
pub fn thin_svd<T: Real>(m: &DMatrix<T>) -> Option<ThinSvd<T>> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return None;
    }
    let f = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)].as_f64());
    let svd = f.thin_svd().ok()?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = rows.min(cols);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal));
    if order.iter().any(|&i| !s[i].is_finite()) {
        return None;
    }
    Some(ThinSvd {
        u: DMatrix::from_fn(rows, k, |i, j| T::lit(u[(i, order[j])])),
        s: DVector::from_fn(k, |j, _| T::lit(s[order[j]])),
        v: DMatrix::from_fn(cols, k, |i, j| T::lit(v[(i, order[j])])),
    })
}

/// Moore-Penrose pseudo-inverse treating singular values at or below `tol`
/// as zero. Also returns the number of singular values kept.
pub fn pseudo_inverse<T: Real>(m: &DMatrix<T>, tol: T) -> Option<(DMatrix<T>, usize)> {
    let svd = thin_svd(m)?;
    let mut kept = 0;
    let mut pinv = DMatrix::<T>::zeros(m.ncols(), m.nrows());
    for k in 0..svd.s.len() {
        if svd.s[k] > tol {
            kept += 1;
            let inv = T::one() / svd.s[k];
            pinv += svd.v.column(k) * svd.u.column(k).transpose() * inv;
        }
    }
    Some((pinv, kept))
}
