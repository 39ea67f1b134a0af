//! Logistic regression: IRLS maximum likelihood on a fixed column set and
//! ℓ₁-penalized fits by proximal Newton (quadratic approximation with a
//! weighted coordinate-descent inner loop).
//!
//! The penalized objective is (1/n)·NLL(b, β) + λ‖β‖₁ with an always
//! unpenalized intercept b. Losses are reported as mean negative
//! log-likelihood.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};

use super::lasso::WorkingProblem;
use super::{FitResult, LassoConfig, AUTO_GRID_FLOOR, AUTO_GRID_LEN};
use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{CoefficientVector, InclusionVector};

/// Stationarity tolerance of returned penalized fits.
pub const LOGISTIC_STATIONARITY_TOL: f64 = 1e-5;
/// Coefficient magnitude beyond which a non-stationary fit is treated as
/// complete separation.
const SEPARATION_BOUND: f64 = 1e3;
const WEIGHT_FLOOR: f64 = 1e-5;
const MAX_OUTER: usize = 100;

fn sigmoid(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

/// ln(1 + e^eta), stable for large |eta|.
fn softplus(eta: f64) -> f64 {
    eta.max(0.0) + (-eta.abs()).exp().ln_1p()
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

fn check_classification(d: &Dataset) -> Result<()> {
    if d.task() != Task::Classification {
        return Err(Error::InvalidArgument(
            "logistic solvers require a classification dataset".into(),
        ));
    }
    Ok(())
}

struct IrlsOutcome {
    coef: DVector<f64>,
    mean_nll: f64,
    iterations: usize,
    converged: bool,
}

fn mean_nll(eta: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let n = y.len() as f64;
    eta.iter()
        .zip(y.iter())
        .map(|(&e, &yi)| softplus(e) - yi * e)
        .sum::<f64>()
        / n
}

/// Newton/IRLS with step halving on a fixed design matrix.
///
/// `eta_cap`, when set, stops early once the fitted linear predictor
/// saturates beyond it while the score is still above tolerance — a fast
/// separation detector for model scoring, where a diverging candidate only
/// needs to be recognized, not chased.
fn irls_on_matrix(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    tol: f64,
    max_iter: usize,
    eta_cap: Option<f64>,
) -> Result<IrlsOutcome> {
    let n = a.nrows();
    let k = a.ncols();
    let nf = n as f64;
    let mut coef = DVector::<f64>::zeros(k);
    let mut eta = DVector::<f64>::zeros(n);
    let mut nll = mean_nll(&eta, y);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        let mu = eta.map(sigmoid);
        let score = a.transpose() * (y - &mu) / nf;
        if score.amax() < tol {
            converged = true;
            break;
        }
        if let Some(cap) = eta_cap {
            if eta.amax() > cap {
                break;
            }
        }
        // weighted Hessian AᵀWA/n with floored weights
        let mut h = DMatrix::<f64>::zeros(k, k);
        for i in 0..n {
            let w = (mu[i] * (1.0 - mu[i])).max(1e-10);
            for r in 0..k {
                let ar = a[(i, r)] * w;
                for c in r..k {
                    h[(r, c)] += ar * a[(i, c)];
                }
            }
        }
        h /= nf;
        for r in 0..k {
            for c in 0..r {
                h[(r, c)] = h[(c, r)];
            }
        }
        let chol = h
            .cholesky()
            .ok_or_else(|| Error::RankDeficient(Some("singular logistic Hessian".into())))?;
        let delta = chol.solve(&score);
        // step halving keeps the loss nonincreasing, cap 30 halvings
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=30 {
            let cand = &coef + &delta * t;
            let eta_cand = a * &cand;
            let nll_cand = mean_nll(&eta_cand, y);
            if nll_cand <= nll + 1e-14 {
                coef = cand;
                eta = eta_cand;
                nll = nll_cand;
                accepted = true;
                break;
            }
            t /= 2.0;
        }
        iterations += 1;
        if !accepted {
            break;
        }
        if coef.amax() > SEPARATION_BOUND {
            // complete separation: coefficients diverge while the score
            // stays nonzero
            let mu = eta.map(sigmoid);
            let score = a.transpose() * (y - &mu) / nf;
            if score.amax() >= tol {
                break;
            }
        }
    }
    Ok(IrlsOutcome {
        coef,
        mean_nll: nll,
        iterations,
        converged,
    })
}

/// Logistic maximum likelihood on exactly the selected columns (no implicit
/// intercept; include a constant column if one is wanted). Non-convergence
/// (including detected separation) is flagged, not an error.
pub fn logistic_irls(
    d: &Dataset,
    gamma: &InclusionVector,
    tol: f64,
    max_iter: usize,
) -> Result<FitResult> {
    check_classification(d)?;
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
            "logistic_irls needs at least one selected column".into(),
        ));
    }
    let a = linalg::gather_columns(&d.x().view(), &cols);
    let y = DVector::from_iterator(d.n(), d.y().iter().copied());
    let out = irls_on_matrix(&a, &y, tol, max_iter, None)?;
    let mut values = vec![0.0; d.p()];
    for (idx, &j) in cols.iter().enumerate() {
        values[j] = out.coef[idx];
    }
    Ok(FitResult {
        beta: CoefficientVector::new(values, 0.0, "logistic_irls")?,
        gamma: gamma.clone(),
        objective: out.mean_nll,
        iterations: out.iterations,
        converged: out.converged,
    })
}

/// Mean NLL of the IRLS fit on [1 | X_γ] and whether it converged; used for
/// deviance-based scoring. Fitted predictors saturating past ±30 with a
/// nonzero score are treated as separation (not converged).
pub(crate) fn logistic_nll_fit_with_intercept(
    d: &Dataset,
    gamma: &InclusionVector,
) -> Result<(f64, bool)> {
    check_classification(d)?;
    let cols = gamma.support();
    let n = d.n();
    let mut a = DMatrix::from_element(n, cols.len() + 1, 1.0);
    for (idx, &j) in cols.iter().enumerate() {
        for i in 0..n {
            a[(i, idx + 1)] = d.x()[(i, j)];
        }
    }
    let y = DVector::from_iterator(n, d.y().iter().copied());
    let out = irls_on_matrix(&a, &y, 1e-8, 25, Some(30.0))?;
    Ok((out.mean_nll, out.converged))
}

/// Logistic refit on the selected columns plus an unpenalized intercept,
/// for the post-selection estimation step.
pub(crate) fn logistic_refit_with_intercept(
    d: &Dataset,
    gamma: &InclusionVector,
    tol: f64,
    max_iter: usize,
) -> Result<(CoefficientVector, bool)> {
    check_classification(d)?;
    let cols = gamma.support();
    let n = d.n();
    let mut a = DMatrix::from_element(n, cols.len() + 1, 1.0);
    for (idx, &j) in cols.iter().enumerate() {
        for i in 0..n {
            a[(i, idx + 1)] = d.x()[(i, j)];
        }
    }
    let y = DVector::from_iterator(n, d.y().iter().copied());
    let out = irls_on_matrix(&a, &y, tol, max_iter, None)?;
    let mut values = vec![0.0; d.p()];
    for (idx, &j) in cols.iter().enumerate() {
        values[j] = out.coef[idx + 1];
    }
    Ok((
        CoefficientVector::new(values, out.coef[0], "logistic_irls")?,
        out.converged,
    ))
}

struct LogisticCdState {
    /// Column-major working design, for slice iteration in the hot loops.
    x_cols: Vec<Vec<f64>>,
    y: Vec<f64>,
    beta: Vec<f64>,
    intercept: f64,
    n: usize,
    p: usize,
}

impl LogisticCdState {
    fn new(x: &Array2<f64>, y: &Array1<f64>, intercept: f64) -> Self {
        let (n, p) = x.dim();
        let x_cols: Vec<Vec<f64>> = x.columns().into_iter().map(|c| c.to_vec()).collect();
        Self {
            x_cols,
            y: y.to_vec(),
            beta: vec![0.0; p],
            intercept,
            n,
            p,
        }
    }

    fn eta(&self) -> Vec<f64> {
        let mut eta = vec![self.intercept; self.n];
        for j in 0..self.p {
            let bj = self.beta[j];
            if bj != 0.0 {
                for (e, x) in eta.iter_mut().zip(&self.x_cols[j]) {
                    *e += x * bj;
                }
            }
        }
        eta
    }

    /// Max stationarity violation of the penalized objective.
    fn stationarity(&self, lambda: f64) -> f64 {
        let eta = self.eta();
        let nf = self.n as f64;
        let resid: Vec<f64> = eta
            .iter()
            .zip(&self.y)
            .map(|(e, y)| sigmoid(*e) - y)
            .collect();
        let mut worst = (resid.iter().sum::<f64>() / nf).abs();
        for j in 0..self.p {
            let g: f64 = self.x_cols[j]
                .iter()
                .zip(&resid)
                .map(|(x, r)| x * r)
                .sum::<f64>()
                / nf;
            let r = if self.beta[j] == 0.0 {
                (g.abs() - lambda).max(0.0)
            } else {
                (g + lambda * self.beta[j].signum()).abs()
            };
            worst = worst.max(r);
        }
        worst
    }

    fn penalized_nll(&self, lambda: f64) -> f64 {
        let eta = self.eta();
        let nf = self.n as f64;
        let nll: f64 = eta
            .iter()
            .zip(&self.y)
            .map(|(e, y)| softplus(*e) - y * e)
            .sum::<f64>()
            / nf;
        nll + lambda * self.beta.iter().map(|b| b.abs()).sum::<f64>()
    }

    /// One quadratic-approximation step: weighted CD on the working response.
    fn proximal_newton_step(&mut self, lambda: f64, tol: f64, max_sweeps: usize) {
        let nf = self.n as f64;
        let eta = self.eta();
        let mut w = vec![0.0; self.n];
        let mut r = vec![0.0; self.n];
        for i in 0..self.n {
            let mu = sigmoid(eta[i]);
            w[i] = (mu * (1.0 - mu)).max(WEIGHT_FLOOR);
            r[i] = (self.y[i] - mu) / w[i];
        }
        let wsum: f64 = w.iter().sum();
        let gw_diag: Vec<f64> = self
            .x_cols
            .iter()
            .map(|col| {
                col.iter()
                    .zip(&w)
                    .map(|(x, wi)| wi * x * x)
                    .sum::<f64>()
                    / nf
            })
            .collect();

        let sweep = |state: &mut LogisticCdState, r: &mut [f64], coords: &[usize]| -> f64 {
            let mut max_delta: f64;
            // unpenalized intercept
            let db: f64 = w.iter().zip(r.iter()).map(|(wi, ri)| wi * ri).sum::<f64>() / wsum;
            state.intercept += db;
            for ri in r.iter_mut() {
                *ri -= db;
            }
            max_delta = db.abs();
            for &j in coords {
                let dj = gw_diag[j];
                if dj <= 0.0 {
                    continue;
                }
                let col = &state.x_cols[j];
                let num: f64 = col
                    .iter()
                    .zip(w.iter().zip(r.iter()))
                    .map(|(x, (wi, ri))| wi * x * ri)
                    .sum::<f64>()
                    / nf
                    + dj * state.beta[j];
                let new = soft_threshold(num, lambda) / dj;
                let old = state.beta[j];
                if new != old {
                    let delta = new - old;
                    for (ri, x) in r.iter_mut().zip(col) {
                        *ri -= x * delta;
                    }
                    state.beta[j] = new;
                    max_delta = max_delta.max(delta.abs());
                }
            }
            max_delta
        };

        let all: Vec<usize> = (0..self.p).collect();
        let mut sweeps = 0;
        loop {
            let delta_full = sweep(self, &mut r, &all);
            sweeps += 1;
            if delta_full < tol || sweeps >= max_sweeps {
                break;
            }
            // converge on the active set before the next full pass
            loop {
                let active: Vec<usize> = (0..self.p).filter(|&j| self.beta[j] != 0.0).collect();
                if active.is_empty() {
                    break;
                }
                let delta = sweep(self, &mut r, &active);
                sweeps += 1;
                if delta < tol || sweeps >= max_sweeps {
                    break;
                }
            }
            if sweeps >= max_sweeps {
                break;
            }
        }
    }
}

/// λ above which the ℓ₁-penalized logistic fit is intercept-only:
/// max_j |(1/n)x_jᵀ(y − ȳ)| on the working design.
pub fn logistic_lambda_max(d: &Dataset, cfg: &LassoConfig) -> Result<f64> {
    check_classification(d)?;
    let work = WorkingProblem::build(d, cfg.standardize_internally)?;
    let nf = d.n() as f64;
    let ybar = d.y().sum() / nf;
    let centered: Array1<f64> = d.y().mapv(|v| v - ybar);
    Ok(work
        .x
        .columns()
        .into_iter()
        .map(|c| (c.dot(&centered) / nf).abs())
        .fold(0.0, f64::max))
}

/// Fitted predictors beyond this are numerically saturated probabilities;
/// a non-stationary fit out there is (quasi-)separated and not worth chasing.
const ETA_SATURATION: f64 = 30.0;

fn logistic_fit_at(
    state: &mut LogisticCdState,
    work: &WorkingProblem,
    lambda: f64,
    cfg: &LassoConfig,
) -> Result<(FitResult, bool)> {
    let mut outer = 0;
    let mut converged = false;
    let mut saturated = false;
    while outer < MAX_OUTER {
        if state.stationarity(lambda) <= LOGISTIC_STATIONARITY_TOL {
            converged = true;
            break;
        }
        let before = (state.beta.clone(), state.intercept, state.penalized_nll(lambda));
        state.proximal_newton_step(lambda, cfg.tol, 1000);
        // guard against a bad quadratic model far from the optimum
        let mut halvings = 0;
        while state.penalized_nll(lambda) > before.2 + 1e-12 && halvings < 10 {
            for (b, prev) in state.beta.iter_mut().zip(&before.0) {
                *b = (*b + prev) / 2.0;
            }
            state.intercept = (state.intercept + before.1) / 2.0;
            halvings += 1;
        }
        outer += 1;
        let max_eta = state.eta().iter().fold(0.0_f64, |m, e| m.max(e.abs()));
        let max_coef = state
            .beta
            .iter()
            .fold(state.intercept.abs(), |m, b| m.max(b.abs()));
        if (max_coef > SEPARATION_BOUND || max_eta > ETA_SATURATION)
            && state.stationarity(lambda) > LOGISTIC_STATIONARITY_TOL
        {
            saturated = true;
            break;
        }
    }
    if !converged {
        converged = state.stationarity(lambda) <= LOGISTIC_STATIONARITY_TOL;
    }
    let (values, intercept_adj) = work.map_back(&state.beta);
    let intercept = state.intercept + intercept_adj;
    let gamma = InclusionVector::from_nonzeros(&values);
    let result = FitResult {
        beta: CoefficientVector::new(values, intercept, "logistic_lasso")?,
        gamma,
        objective: state.penalized_nll(lambda),
        iterations: outer,
        converged,
    };
    Ok((result, saturated))
}

fn build_logistic_state(d: &Dataset, cfg: &LassoConfig) -> Result<(LogisticCdState, WorkingProblem)> {
    check_classification(d)?;
    cfg.validate()?;
    let mut work = WorkingProblem::build(d, cfg.standardize_internally)?;
    // the response is a label, not a residual target: never center it
    work.y = d.y().clone();
    work.y_mean = 0.0;
    let nf = d.n() as f64;
    let ybar = (d.y().sum() / nf).clamp(1e-12, 1.0 - 1e-12);
    let state = LogisticCdState::new(&work.x, d.y(), (ybar / (1.0 - ybar)).ln());
    Ok((state, work))
}

/// ℓ₁-penalized logistic regression at one penalty value.
pub fn logistic_lasso(d: &Dataset, lambda: f64, cfg: &LassoConfig) -> Result<FitResult> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be a finite nonnegative number, got {lambda}"
        )));
    }
    let (mut state, work) = build_logistic_state(d, cfg)?;
    Ok(logistic_fit_at(&mut state, &work, lambda, cfg)?.0)
}

/// Fraction of the null deviance beyond which the path stops: the fit is
/// numerically saturated and smaller penalties only chase separation.
const MAX_DEV_RATIO: f64 = 0.999;

/// Warm-started ℓ₁-penalized logistic path over a descending λ grid. The
/// path stops early once a fit saturates — explains more than 99.9% of the
/// null deviance or diverges into quasi-separation — since every smaller
/// penalty would only overfit further.
pub fn logistic_lasso_path(d: &Dataset, cfg: &LassoConfig) -> Result<Vec<FitResult>> {
    let (mut state, work) = build_logistic_state(d, cfg)?;
    let grid: Vec<f64> = match &cfg.lambda_grid {
        Some(g) => g.clone(),
        None => {
            let lmax = logistic_lambda_max(d, cfg)?;
            if lmax <= 0.0 {
                vec![0.0]
            } else {
                (0..AUTO_GRID_LEN)
                    .map(|k| lmax * AUTO_GRID_FLOOR.powf(k as f64 / (AUTO_GRID_LEN as f64 - 1.0)))
                    .collect()
            }
        }
    };
    let ybar = (state.y.iter().sum::<f64>() / state.n as f64).clamp(1e-12, 1.0 - 1e-12);
    let null_nll = -(ybar * ybar.ln() + (1.0 - ybar) * (1.0 - ybar).ln());
    let mut out = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        let (fit, saturated) = logistic_fit_at(&mut state, &work, lambda, cfg)?;
        out.push(fit);
        let nll = state.penalized_nll(0.0);
        if saturated || nll < (1.0 - MAX_DEV_RATIO) * null_nll {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    fn logistic_dataset(n: usize, p: usize, beta: &[f64], seed: u64) -> Dataset {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
        let y = Array1::from_shape_fn(n, |i| {
            let eta: f64 = (0..p).map(|j| x[(i, j)] * beta[j]).sum();
            if rng.random_bool(sigmoid(eta)) {
                1.0
            } else {
                0.0
            }
        });
        Dataset::from_parts(x, y, Task::Classification).unwrap()
    }

    #[test]
    fn intercept_only_balanced_is_zero() {
        let x = array![[1.0], [1.0], [1.0], [1.0]];
        let y = array![0.0, 1.0, 0.0, 1.0];
        let d = Dataset::from_parts(x, y, Task::Classification).unwrap();
        let gamma = InclusionVector::from_support(1, &[0]).unwrap();
        let fit = logistic_irls(&d, &gamma, 1e-8, 50).unwrap();
        assert!(fit.converged);
        assert_abs_diff_eq!(fit.beta.values[0], 0.0, epsilon = 1e-8);
    }

    // Analytic MLE of the intercept-only model: logit of the success rate.
    #[test]
    fn intercept_only_75_percent_is_log3() {
        let x = Array2::from_elem((8, 1), 1.0);
        let y = array![1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        let d = Dataset::from_parts(x, y, Task::Classification).unwrap();
        let gamma = InclusionVector::from_support(1, &[0]).unwrap();
        let fit = logistic_irls(&d, &gamma, 1e-10, 100).unwrap();
        assert!(fit.converged);
        assert_abs_diff_eq!(fit.beta.values[0], 3f64.ln(), epsilon = 1e-8);
    }

    #[test]
    fn separable_data_flags_non_convergence() {
        // small feature scale keeps the score visibly nonzero while the
        // coefficient runs past the separation bound
        let x = array![[-0.002], [-0.001], [0.001], [0.002]];
        let y = array![0.0, 0.0, 1.0, 1.0];
        let d = Dataset::from_parts(x, y, Task::Classification).unwrap();
        let gamma = InclusionVector::from_support(1, &[0]).unwrap();
        let fit = logistic_irls(&d, &gamma, 1e-10, 200).unwrap();
        assert!(!fit.converged);
        assert!(fit.beta.values[0].abs() > SEPARATION_BOUND);
    }

    // Subgradient-at-zero oracle: λ at or above λ_max keeps β empty.
    #[test]
    fn lambda_max_gives_intercept_only() {
        let d = logistic_dataset(120, 6, &[1.5, 0.0, -1.0, 0.0, 0.0, 0.0], 3);
        let cfg = LassoConfig::default();
        let lmax = logistic_lambda_max(&d, &cfg).unwrap();
        let fit = logistic_lasso(&d, lmax * 1.0001, &cfg).unwrap();
        assert!(fit.gamma.is_empty_model());
        assert!(fit.converged);
        // intercept approximates the base-rate logit
        let ybar = d.y().sum() / d.n() as f64;
        assert_abs_diff_eq!(fit.beta.intercept, (ybar / (1.0 - ybar)).ln(), epsilon = 1e-3);
    }

    // Gradient oracle: stationarity of the penalized objective at the fit.
    #[test]
    fn stationarity_residual_small() {
        let d = logistic_dataset(200, 10, &[2.0, -1.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 7);
        let cfg = LassoConfig::default();
        let lmax = logistic_lambda_max(&d, &cfg).unwrap();
        let lambda = lmax * 0.2;
        let fit = logistic_lasso(&d, lambda, &cfg).unwrap();
        assert!(fit.converged);
        // recompute stationarity on the working scale independently
        let work = WorkingProblem::build(&d, true).unwrap();
        let nf = d.n() as f64;
        let scaled_beta: Vec<f64> = fit
            .beta
            .values
            .iter()
            .zip(&work.col_scales)
            .map(|(b, s)| b * s)
            .collect();
        let intercept_work = fit.beta.intercept
            + fit
                .beta
                .values
                .iter()
                .zip(&work.col_means)
                .map(|(b, m)| b * m)
                .sum::<f64>();
        let mut worst = 0.0_f64;
        let eta: Vec<f64> = (0..d.n())
            .map(|i| {
                intercept_work
                    + (0..d.p())
                        .map(|j| work.x[(i, j)] * scaled_beta[j])
                        .sum::<f64>()
            })
            .collect();
        let resid: Vec<f64> = (0..d.n()).map(|i| sigmoid(eta[i]) - d.y()[i]).collect();
        worst = worst.max((resid.iter().sum::<f64>() / nf).abs());
        for j in 0..d.p() {
            let g: f64 = (0..d.n()).map(|i| work.x[(i, j)] * resid[i]).sum::<f64>() / nf;
            let r = if scaled_beta[j] == 0.0 {
                (g.abs() - lambda).max(0.0)
            } else {
                (g + lambda * scaled_beta[j].signum()).abs()
            };
            worst = worst.max(r);
        }
        assert!(
            worst <= LOGISTIC_STATIONARITY_TOL * 1.01,
            "stationarity {worst}"
        );
    }

    // Unpenalized-MLE oracle: λ = 0 matches IRLS on all columns.
    #[test]
    fn lambda_zero_matches_irls() {
        let d = logistic_dataset(300, 4, &[1.0, -0.5, 0.25, 0.0], 11);
        let cfg = LassoConfig::default();
        let fit = logistic_lasso(&d, 0.0, &cfg).unwrap();
        assert!(fit.converged);
        // IRLS on [1 | X]
        let (irls, conv) = logistic_refit_with_intercept(
            &d,
            &InclusionVector::from_support(4, &[0, 1, 2, 3]).unwrap(),
            1e-10,
            100,
        )
        .unwrap();
        assert!(conv);
        for j in 0..4 {
            assert_abs_diff_eq!(fit.beta.values[j], irls.values[j], epsilon = 1e-4);
        }
        assert_abs_diff_eq!(fit.beta.intercept, irls.intercept, epsilon = 1e-4);
    }

    #[test]
    fn path_has_expected_shape() {
        let d = logistic_dataset(150, 5, &[2.0, 0.0, -1.0, 0.0, 0.0], 13);
        let path = logistic_lasso_path(&d, &LassoConfig::default()).unwrap();
        assert_eq!(path.len(), AUTO_GRID_LEN);
        assert!(path[0].gamma.is_empty_model());
        // the smallest penalty should keep the strong features active
        let last = path.last().unwrap();
        assert!(last.gamma.contains(0));
        assert!(last.gamma.contains(2));
    }

    #[test]
    fn regression_task_rejected() {
        let x = array![[1.0], [2.0]];
        let y = array![0.5, 1.5];
        let d = Dataset::from_parts(x, y, Task::Regression).unwrap();
        assert!(logistic_lasso(&d, 0.1, &LassoConfig::default()).is_err());
        assert!(logistic_irls(
            &d,
            &InclusionVector::from_support(1, &[0]).unwrap(),
            1e-8,
            10
        )
        .is_err());
    }
}
