//! Dense linear-algebra helpers shared by solvers and diagnostics.

use nalgebra::{DMatrix, DVector};
use ndarray::ArrayView2;

use crate::error::{Error, Result};

/// Condition-number cutoff for normal-equation / least-squares solves.
pub const MAX_CONDITION: f64 = 1e12;

/// Gather `cols` of an ndarray design into an nalgebra matrix (n × k).
pub fn gather_columns(x: &ArrayView2<f64>, cols: &[usize]) -> DMatrix<f64> {
    let n = x.nrows();
    DMatrix::from_fn(n, cols.len(), |i, j| x[(i, cols[j])])
}

/// Least squares min ‖a·beta − y‖₂ via QR, guarding against rank deficiency.
///
/// Returns the coefficients and the residual sum of squares. Rank deficiency
/// is detected from the ratio of extreme |R| diagonal entries, which bounds
/// the condition number of `a` from below.
pub fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let k = a.ncols();
    if k == 0 {
        let rss = y.dot(y);
        return Ok((DVector::zeros(0), rss));
    }
    if a.nrows() < k {
        return Err(Error::RankDeficient(Some(format!(
            "{} rows < {} columns",
            a.nrows(),
            k
        ))));
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let mut dmin = f64::INFINITY;
    let mut dmax: f64 = 0.0;
    for i in 0..k {
        let d = r[(i, i)].abs();
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    if dmin == 0.0 || dmax / dmin >= MAX_CONDITION {
        return Err(Error::RankDeficient(Some(format!(
            "R diagonal ratio {:.3e}",
            if dmin == 0.0 {
                f64::INFINITY
            } else {
                dmax / dmin
            }
        ))));
    }
    let qty = qr.q().transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient(Some("upper-triangular solve failed".into())))?;
    let resid = y - a * &beta;
    Ok((beta, resid.dot(&resid)))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 1 {
        return a[(0, 0)];
    }
    let eig = a.clone().symmetric_eigen();
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Symmetric inverse square root A^{-1/2} of a positive-definite matrix.
pub fn inverse_sqrt(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let eig = a.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = max_ev * (n as f64) * f64::EPSILON;
    let mut inv_sqrt = DVector::zeros(n);
    for i in 0..n {
        let ev = eig.eigenvalues[i];
        if ev <= cutoff {
            return Err(Error::RankDeficient(Some(
                "matrix is singular; no inverse square root".into(),
            )));
        }
        inv_sqrt[i] = 1.0 / ev.sqrt();
    }
    let u = &eig.eigenvectors;
    Ok(u * DMatrix::from_diagonal(&inv_sqrt) * u.transpose())
}
