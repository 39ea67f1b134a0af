//! Cyclic coordinate descent for the Lasso objective
//! (1/n)‖y − Xβ‖₂² + λ‖β‖₁,
//! using covariance updates: inner products Xᵀy/n and the needed columns of
//! the Gram matrix XᵀX/n are cached, so a sweep costs O(p·a) for `a` active
//! features, plus O(n·p) whenever a new feature activates. The Gram cache is
//! shared across a warm-started regularization path.

use ndarray::{Array1, Array2};

use super::{FitResult, LassoConfig, AUTO_GRID_FLOOR, AUTO_GRID_LEN};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::{CoefficientVector, InclusionVector};

/// Tolerance on the KKT stationarity residual of returned solutions.
pub const KKT_TOL: f64 = 1e-6;

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// The data the solver actually operates on, plus the affine map back.
pub(crate) struct WorkingProblem {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub col_means: Vec<f64>,
    pub col_scales: Vec<f64>,
    pub y_mean: f64,
}

impl WorkingProblem {
    pub fn build(d: &Dataset, standardize: bool) -> Result<Self> {
        if d.x().iter().any(|v| !v.is_finite()) || d.y().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData("design or response".into()));
        }
        let n = d.n() as f64;
        let p = d.p();
        if !standardize {
            return Ok(Self {
                x: d.x().clone(),
                y: d.y().clone(),
                col_means: vec![0.0; p],
                col_scales: vec![1.0; p],
                y_mean: 0.0,
            });
        }
        let mut x = d.x().clone();
        let mut col_means = Vec::with_capacity(p);
        let mut col_scales = Vec::with_capacity(p);
        for mut col in x.columns_mut() {
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            // Zero-variance columns stay centered at zero and can never
            // activate; scale 1 avoids dividing by zero.
            let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
            col.mapv_inplace(|v| (v - mean) / scale);
            col_means.push(mean);
            col_scales.push(scale);
        }
        let y_mean = d.y().sum() / n;
        let y = d.y().mapv(|v| v - y_mean);
        Ok(Self {
            x,
            y,
            col_means,
            col_scales,
            y_mean,
        })
    }

    /// Map working-scale coefficients to the raw scale with intercept.
    pub fn map_back(&self, beta: &[f64]) -> (Vec<f64>, f64) {
        let values: Vec<f64> = beta
            .iter()
            .zip(&self.col_scales)
            .map(|(b, s)| b / s)
            .collect();
        let intercept = self.y_mean
            - values
                .iter()
                .zip(&self.col_means)
                .map(|(b, m)| b * m)
                .sum::<f64>();
        (values, intercept)
    }
}

pub(crate) struct CdEngine {
    n: usize,
    p: usize,
    x: Array2<f64>,
    /// Xᵀy / n.
    xty: Vec<f64>,
    /// Diagonal of XᵀX / n.
    gram_diag: Vec<f64>,
    /// Columns of XᵀX / n, materialized on first activation.
    gram_cols: Vec<Option<Vec<f64>>>,
    /// yᵀy / n.
    y_ss: f64,
}

impl CdEngine {
    pub fn new(x: Array2<f64>, y: &Array1<f64>) -> Self {
        let (n, p) = x.dim();
        let nf = n as f64;
        let xty: Vec<f64> = x.columns().into_iter().map(|c| c.dot(y) / nf).collect();
        let gram_diag: Vec<f64> = x.columns().into_iter().map(|c| c.dot(&c) / nf).collect();
        let y_ss = y.dot(y) / nf;
        Self {
            n,
            p,
            x,
            xty,
            gram_diag,
            gram_cols: vec![None; p],
            y_ss,
        }
    }

    fn ensure_gram(&mut self, j: usize) {
        if self.gram_cols[j].is_none() {
            let nf = self.n as f64;
            let col_j = self.x.column(j);
            let col: Vec<f64> = self
                .x
                .columns()
                .into_iter()
                .map(|c| c.dot(&col_j) / nf)
                .collect();
            self.gram_cols[j] = Some(col);
        }
    }

    /// Correlation-form gradient (Xᵀy − XᵀXβ)/n at `beta`, for all coords.
    /// `active` must list the nonzero coordinates of `beta` in ascending
    /// order; their Gram columns must already be materialized.
    fn gradient(&self, beta: &[f64], active: &[usize]) -> Vec<f64> {
        let mut grad = self.xty.clone();
        for &k in active {
            let gk = self.gram_cols[k].as_ref().expect("gram column cached");
            let bk = beta[k];
            for (gj, gkj) in grad.iter_mut().zip(gk) {
                *gj -= gkj * bk;
            }
        }
        grad
    }

    /// Maximum KKT stationarity violation of `beta` for penalty `lambda`.
    pub fn kkt_residual(&self, beta: &[f64], active: &[usize], lambda: f64) -> f64 {
        let grad = self.gradient(beta, active);
        let mut worst = 0.0_f64;
        for j in 0..self.p {
            let g2 = 2.0 * grad[j];
            let r = if beta[j] == 0.0 {
                (g2.abs() - lambda).max(0.0)
            } else {
                (g2 - lambda * beta[j].signum()).abs()
            };
            worst = worst.max(r);
        }
        worst
    }

    /// RSS/n at `beta`: yᵀy/n − Σ_j β_j (xty_j + grad_j); clamped at zero.
    pub fn rss_over_n(&self, beta: &[f64], active: &[usize]) -> f64 {
        let grad = self.gradient(beta, active);
        let mut rss = self.y_ss;
        for &j in active {
            rss -= beta[j] * (self.xty[j] + grad[j]);
        }
        rss.max(0.0)
    }

    pub fn objective(&self, beta: &[f64], active: &[usize], lambda: f64) -> f64 {
        let l1: f64 = active.iter().map(|&j| beta[j].abs()).sum();
        self.rss_over_n(beta, active) + lambda * l1
    }

    /// Run coordinate descent at a single λ, warm-starting from `beta`.
    ///
    /// Returns (sweeps, converged). `converged` reflects the coordinate-change
    /// criterion; sweeps continue past it until the KKT residual is within
    /// `KKT_TOL` or the sweep budget is exhausted.
    pub fn solve(
        &mut self,
        lambda: f64,
        beta: &mut [f64],
        active: &mut Vec<usize>,
        tol: f64,
        max_iter: usize,
        mut sweep_observer: Option<&mut dyn FnMut(&CdEngine, &[f64], &[usize])>,
    ) -> (usize, bool) {
        let half_lambda = lambda / 2.0;
        let mut sweeps = 0;
        let mut converged = false;
        while sweeps < max_iter {
            let mut max_delta = 0.0_f64;
            for j in 0..self.p {
                let dj = self.gram_diag[j];
                if dj <= 0.0 {
                    continue;
                }
                // partial-residual correlation for coordinate j
                let mut dot = 0.0;
                for &k in active.iter() {
                    let gk = self.gram_cols[k].as_ref().expect("gram column cached");
                    dot += gk[j] * beta[k];
                }
                let z = self.xty[j] - dot + dj * beta[j];
                let new = soft_threshold(z, half_lambda) / dj;
                let old = beta[j];
                if new != old {
                    if new != 0.0 {
                        self.ensure_gram(j);
                    }
                    if old == 0.0 && new != 0.0 {
                        let pos = active.partition_point(|&k| k < j);
                        active.insert(pos, j);
                    } else if old != 0.0 && new == 0.0 {
                        let pos = active.partition_point(|&k| k < j);
                        active.remove(pos);
                    }
                    beta[j] = new;
                    max_delta = max_delta.max((new - old).abs());
                }
            }
            sweeps += 1;
            if let Some(obs) = sweep_observer.as_deref_mut() {
                obs(self, beta, active);
            }
            if max_delta < tol {
                converged = true;
                if self.kkt_residual(beta, active, lambda) <= KKT_TOL {
                    break;
                }
            }
        }
        (sweeps, converged)
    }
}

/// λ_max of the configured working problem: the smallest penalty for which
/// the all-zero solution is optimal, max_j |(2/n)x_jᵀy| (on centered data
/// when standardizing).
pub fn lambda_max(d: &Dataset, cfg: &LassoConfig) -> Result<f64> {
    let work = WorkingProblem::build(d, cfg.standardize_internally)?;
    let nf = d.n() as f64;
    Ok(work
        .x
        .columns()
        .into_iter()
        .map(|c| (2.0 * c.dot(&work.y) / nf).abs())
        .fold(0.0, f64::max))
}

pub(crate) fn auto_grid(lmax: f64) -> Vec<f64> {
    if lmax <= 0.0 {
        return vec![0.0];
    }
    (0..AUTO_GRID_LEN)
        .map(|k| lmax * AUTO_GRID_FLOOR.powf(k as f64 / (AUTO_GRID_LEN as f64 - 1.0)))
        .collect()
}

fn fit_from_working(
    engine: &CdEngine,
    work: &WorkingProblem,
    beta: &[f64],
    active: &[usize],
    lambda: f64,
    iterations: usize,
    converged: bool,
) -> Result<FitResult> {
    let (values, intercept) = work.map_back(beta);
    let gamma = InclusionVector::from_nonzeros(&values);
    let beta_out = CoefficientVector::new(values, intercept, "lasso")?;
    Ok(FitResult {
        beta: beta_out,
        gamma,
        objective: engine.objective(beta, active, lambda),
        iterations,
        converged,
    })
}

/// Solve the Lasso at one penalty value.
pub fn lasso_cd(d: &Dataset, lambda: f64, cfg: &LassoConfig) -> Result<FitResult> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be a finite nonnegative number, got {lambda}"
        )));
    }
    cfg.validate()?;
    let work = WorkingProblem::build(d, cfg.standardize_internally)?;
    let mut engine = CdEngine::new(work.x.clone(), &work.y);
    let mut beta = vec![0.0; d.p()];
    let mut active = Vec::new();
    let (iters, converged) = engine.solve(lambda, &mut beta, &mut active, cfg.tol, cfg.max_iter, None);
    fit_from_working(&engine, &work, &beta, &active, lambda, iters, converged)
}

/// Solve the Lasso along a descending λ grid with warm starts.
pub fn lasso_path(d: &Dataset, cfg: &LassoConfig) -> Result<Vec<FitResult>> {
    cfg.validate()?;
    let work = WorkingProblem::build(d, cfg.standardize_internally)?;
    let grid: Vec<f64> = match &cfg.lambda_grid {
        Some(g) => g.clone(),
        None => {
            let nf = d.n() as f64;
            let lmax = work
                .x
                .columns()
                .into_iter()
                .map(|c| (2.0 * c.dot(&work.y) / nf).abs())
                .fold(0.0, f64::max);
            auto_grid(lmax)
        }
    };
    let mut engine = CdEngine::new(work.x.clone(), &work.y);
    let mut beta = vec![0.0; d.p()];
    let mut active = Vec::new();
    let mut out = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        let (iters, converged) =
            engine.solve(lambda, &mut beta, &mut active, cfg.tol, cfg.max_iter, None);
        out.push(fit_from_working(
            &engine, &work, &beta, &active, lambda, iters, converged,
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Task;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    fn random_dataset(n: usize, p: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
        let y = Array1::from_shape_fn(n, |_| rng.sample::<f64, _>(StandardNormal));
        Dataset::from_parts(x, y, Task::Regression).unwrap()
    }

    // Independent KKT oracle working directly on raw data.
    fn kkt_oracle(d: &Dataset, beta: &CoefficientVector, lambda: f64) -> f64 {
        let n = d.n() as f64;
        let mut resid = Vec::with_capacity(d.n());
        for i in 0..d.n() {
            let row: Vec<f64> = d.x().row(i).to_vec();
            resid.push(d.y()[i] - beta.predict_row(&row));
        }
        let mut worst = 0.0_f64;
        for j in 0..d.p() {
            let g: f64 = 2.0 / n
                * d.x()
                    .column(j)
                    .iter()
                    .zip(&resid)
                    .map(|(x, r)| x * r)
                    .sum::<f64>();
            let r = if beta.values[j] == 0.0 {
                (g.abs() - lambda).max(0.0)
            } else {
                (g - lambda * beta.values[j].signum()).abs()
            };
            worst = worst.max(r);
        }
        worst
    }

    #[test]
    fn lambda_at_or_above_max_gives_zero() {
        let d = random_dataset(40, 6, 1);
        let cfg = LassoConfig::raw();
        let lmax = lambda_max(&d, &cfg).unwrap();
        for factor in [1.0, 1.5] {
            let fit = lasso_cd(&d, lmax * factor, &cfg).unwrap();
            assert!(fit.gamma.is_empty_model(), "factor {factor}");
            assert!(fit.converged);
        }
    }

    // Orthogonal design with mean-zero columns: the solution is the
    // soft-threshold of z_j = x_jᵀy/n at λ/2.
    #[test]
    fn orthogonal_design_matches_soft_threshold() {
        let n = 8;
        // columns: scaled rows of an 8×8 Hadamard-like construction, mutually
        // orthogonal with ‖x_j‖² = n and zero mean
        let h: [[f64; 8]; 3] = [
            [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0],
            [1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0],
        ];
        let x = Array2::from_shape_fn((n, 3), |(i, j)| h[j][i]);
        let y = array![2.0, -1.0, 0.5, 3.0, -2.0, 1.0, 0.0, -0.5];
        let d = Dataset::from_parts(x.clone(), y.clone(), Task::Regression).unwrap();
        let lambda = 0.8;
        let fit = lasso_cd(&d, lambda, &LassoConfig::raw()).unwrap();
        for j in 0..3 {
            let z = x.column(j).dot(&y) / n as f64;
            let expect = soft_threshold(z, lambda / 2.0);
            assert_abs_diff_eq!(fit.beta.values[j], expect, epsilon = 1e-8);
        }
    }

    #[test]
    fn kkt_residual_small_on_random_instances() {
        for seed in 0..20 {
            let d = random_dataset(50, 20, seed);
            let cfg = LassoConfig::raw();
            let lmax = lambda_max(&d, &cfg).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(1000 + seed);
            let lambda = lmax * rng.random_range(0.01..0.99);
            let fit = lasso_cd(&d, lambda, &cfg).unwrap();
            assert!(fit.converged);
            let r = kkt_oracle(&d, &fit.beta, lambda);
            assert!(r <= KKT_TOL, "seed {seed}: KKT residual {r}");
        }
    }

    // Internal standardization must equal: build the working problem
    // explicitly, solve the raw objective there, and map coefficients back.
    #[test]
    fn internal_standardization_matches_explicit() {
        let d = random_dataset(60, 8, 3);
        let lambda = 0.3;
        let internal = lasso_cd(&d, lambda, &LassoConfig::default()).unwrap();
        let work = WorkingProblem::build(&d, true).unwrap();
        let wd = Dataset::from_parts(work.x.clone(), work.y.clone(), Task::Regression).unwrap();
        let on_working = lasso_cd(&wd, lambda, &LassoConfig::raw()).unwrap();
        // the working fit satisfies KKT on the scale it solved
        let r = kkt_oracle(&wd, &on_working.beta, lambda);
        assert!(r <= KKT_TOL, "KKT residual {r}");
        let (values, intercept) = work.map_back(&on_working.beta.values);
        for j in 0..d.p() {
            assert_abs_diff_eq!(internal.beta.values[j], values[j], epsilon = 1e-10);
        }
        assert_abs_diff_eq!(internal.beta.intercept, intercept, epsilon = 1e-10);
    }

    #[test]
    fn path_warm_start_matches_cold_start() {
        let d = random_dataset(50, 10, 7);
        let cfg = LassoConfig::default();
        let path = lasso_path(&d, &cfg).unwrap();
        assert_eq!(path.len(), AUTO_GRID_LEN);
        let lmax = lambda_max(&d, &cfg).unwrap();
        let grid = auto_grid(lmax);
        for idx in [5usize, 40, 99] {
            let cold = lasso_cd(&d, grid[idx], &cfg).unwrap();
            for j in 0..d.p() {
                assert_abs_diff_eq!(
                    path[idx].beta.values[j],
                    cold.beta.values[j],
                    epsilon = 1e-5
                );
            }
        }
    }

    #[test]
    fn path_first_point_is_empty_and_descending() {
        let d = random_dataset(30, 5, 11);
        let path = lasso_path(&d, &LassoConfig::default()).unwrap();
        assert!(path[0].gamma.is_empty_model());
        assert_eq!(path.len(), 100);
    }

    #[test]
    fn objective_nonincreasing_across_sweeps() {
        let d = random_dataset(40, 12, 5);
        let work = WorkingProblem::build(&d, true).unwrap();
        let mut engine = CdEngine::new(work.x.clone(), &work.y);
        let mut beta = vec![0.0; d.p()];
        let mut active = Vec::new();
        let lambda = 0.2;
        let mut trace: Vec<f64> = Vec::new();
        let mut observer = |e: &CdEngine, b: &[f64], a: &[usize]| {
            trace.push(e.objective(b, a, lambda));
        };
        engine.solve(lambda, &mut beta, &mut active, 1e-7, 10_000, Some(&mut observer));
        assert!(trace.len() >= 2);
        for w in trace.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-12,
                "objective rose: {} -> {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = random_dataset(10, 3, 0);
        assert!(lasso_cd(&d, -0.1, &LassoConfig::default()).is_err());
        assert!(lasso_cd(&d, f64::NAN, &LassoConfig::default()).is_err());
        let x = array![[1.0, 2.0], [f64::NAN, 0.0]];
        let y = array![1.0, 2.0];
        let bad = Dataset::from_parts(x, y, Task::Regression).unwrap();
        assert!(matches!(
            lasso_cd(&bad, 0.1, &LassoConfig::default()),
            Err(Error::NonFiniteData(_))
        ));
    }

    #[test]
    fn gamma_matches_nonzero_coefficients() {
        let d = random_dataset(50, 8, 9);
        let cfg = LassoConfig::default();
        let lmax = lambda_max(&d, &cfg).unwrap();
        let fit = lasso_cd(&d, lmax * 0.3, &cfg).unwrap();
        assert_eq!(fit.gamma, fit.beta.support());
    }
}
