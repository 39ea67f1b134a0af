//! Ordinary least squares on a selected column set.

use nalgebra::DVector;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{CoefficientVector, InclusionVector};

/// Least-squares coefficients on exactly the selected columns, zeros
/// elsewhere. No intercept is added; include a constant column in the
/// selection if one is wanted, or use [`ols_with_intercept`].
pub fn ols_fit(d: &Dataset, gamma: &InclusionVector) -> Result<CoefficientVector> {
    if gamma.p() != d.p() {
        return Err(Error::DimensionMismatch(format!(
            "gamma has p = {}, dataset has p = {}",
            gamma.p(),
            d.p()
        )));
    }
    let cols = gamma.support();
    if cols.is_empty() {
        return Err(Error::InvalidArgument(
            "ols_fit needs at least one selected column".into(),
        ));
    }
    let a = linalg::gather_columns(&d.x().view(), &cols);
    let y = DVector::from_iterator(d.n(), d.y().iter().copied());
    let (coef, _rss) = linalg::least_squares(&a, &y)?;
    let mut values = vec![0.0; d.p()];
    for (idx, &j) in cols.iter().enumerate() {
        values[j] = coef[idx];
    }
    CoefficientVector::new(values, 0.0, "ols")
}

/// Least squares on the selected columns plus an unpenalized intercept.
/// Returns the dense coefficient vector (intercept split out) and the
/// residual sum of squares. An empty selection fits the intercept alone.
pub fn ols_with_intercept(d: &Dataset, gamma: &InclusionVector) -> Result<(CoefficientVector, f64)> {
    if gamma.p() != d.p() {
        return Err(Error::DimensionMismatch(format!(
            "gamma has p = {}, dataset has p = {}",
            gamma.p(),
            d.p()
        )));
    }
    let cols = gamma.support();
    let n = d.n();
    let mut a = nalgebra::DMatrix::from_element(n, cols.len() + 1, 1.0);
    for (idx, &j) in cols.iter().enumerate() {
        for i in 0..n {
            a[(i, idx + 1)] = d.x()[(i, j)];
        }
    }
    let y = DVector::from_iterator(n, d.y().iter().copied());
    let (coef, rss) = linalg::least_squares(&a, &y)?;
    let mut values = vec![0.0; d.p()];
    for (idx, &j) in cols.iter().enumerate() {
        values[j] = coef[idx + 1];
    }
    Ok((CoefficientVector::new(values, coef[0], "ols")?, rss))
}
