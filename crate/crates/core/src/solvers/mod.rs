//! Per-subset estimation primitives: coordinate-descent Lasso and its
//! regularization path, GIC scoring and selection, ordinary least squares,
//! and logistic fits (IRLS maximum likelihood and ℓ₁-penalized).

mod gic;
mod lasso;
mod least_squares;
mod logistic;

pub use gic::{gic_score, gic_score_logistic, gic_select, gic_select_logistic};
pub use lasso::{lambda_max, lasso_cd, lasso_path, KKT_TOL};
pub use least_squares::{ols_fit, ols_with_intercept};
pub use logistic::{logistic_irls, logistic_lasso, logistic_lasso_path, logistic_lambda_max};
pub(crate) use logistic::logistic_refit_with_intercept;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CoefficientVector, InclusionVector};

/// Configuration for the Lasso solvers.
///
/// With `standardize_internally` set (the default) the solver centers the
/// response, centers and scales each column to unit variance, solves on that
/// scale and maps coefficients back, which amounts to fitting an unpenalized
/// intercept. With it unset the stated objective is solved verbatim on the
/// data as given, with no intercept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LassoConfig {
    /// Strictly descending positive λ grid; `None` means the automatic grid
    /// of 100 points log-spaced from λ_max down to 0.001·λ_max.
    pub lambda_grid: Option<Vec<f64>>,
    /// Convergence threshold on the maximum coordinate change per sweep.
    pub tol: f64,
    /// Maximum number of full coordinate sweeps.
    pub max_iter: usize,
    pub standardize_internally: bool,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            lambda_grid: None,
            tol: 1e-7,
            max_iter: 10_000,
            standardize_internally: true,
        }
    }
}

impl LassoConfig {
    /// Raw-objective configuration: no centering, no scaling, no intercept.
    pub fn raw() -> Self {
        Self {
            standardize_internally: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol <= 0.0 {
            return Err(Error::InvalidArgument("lasso tol must be positive".into()));
        }
        if let Some(grid) = &self.lambda_grid {
            if grid.is_empty() {
                return Err(Error::InvalidArgument("empty lambda grid".into()));
            }
            for w in grid.windows(2) {
                if w[1] >= w[0] {
                    return Err(Error::InvalidArgument(
                        "lambda grid must be strictly descending".into(),
                    ));
                }
            }
            if grid.iter().any(|&l| l < 0.0 || !l.is_finite()) {
                return Err(Error::InvalidArgument(
                    "lambda grid entries must be nonnegative and finite".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Number of points in the automatic λ grid.
pub const AUTO_GRID_LEN: usize = 100;
/// Ratio of the smallest automatic grid point to λ_max.
pub const AUTO_GRID_FLOOR: f64 = 1e-3;

/// GIC penalty weight: score = n·ln(RSS/n) + λ·|model|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GicPenalty {
    /// λ = 2(ln p + ln ln p)
    Ric,
    /// λ = 2 ln p + ln n
    Ebic,
    /// λ = ln n
    Bic,
    Custom(f64),
}

impl GicPenalty {
    pub fn lambda(&self, n: usize, p: usize) -> f64 {
        let (n, p) = (n as f64, p as f64);
        match self {
            GicPenalty::Ric => 2.0 * (p.ln() + p.ln().ln()),
            GicPenalty::Ebic => 2.0 * p.ln() + n.ln(),
            GicPenalty::Bic => n.ln(),
            GicPenalty::Custom(l) => *l,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GicConfig {
    pub penalty: GicPenalty,
}

impl Default for GicConfig {
    fn default() -> Self {
        Self {
            penalty: GicPenalty::Bic,
        }
    }
}

impl GicConfig {
    pub fn validate(&self) -> Result<()> {
        if let GicPenalty::Custom(l) = self.penalty {
            if !(l > 0.0) {
                return Err(Error::InvalidArgument(
                    "custom GIC penalty must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Outcome of a single model fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub beta: CoefficientVector,
    pub gamma: InclusionVector,
    /// Final value of the solver's objective, on the scale it solved.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    /// A fit of the empty model (all coefficients zero).
    pub fn empty(p: usize, method: &str, objective: f64) -> Self {
        Self {
            beta: CoefficientVector::zeros(p, method),
            gamma: InclusionVector::empty(p),
            objective,
            iterations: 0,
            converged: true,
        }
    }
}
