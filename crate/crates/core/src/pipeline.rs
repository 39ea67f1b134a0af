//! Orchestration of the distributed estimators over a partition plan.
//!
//! The main method ("message") selects a support on every subset, votes the
//! supports into the median model, refits each subset on the voted support
//! and averages the refitted coefficients, while a ledger accounts for the
//! simulated communication. Comparators: the same selector + refit on the
//! full data, per-subset selection with coefficient averaging, per-subset
//! selection combined by geometric median, and bootstrap-intersection
//! selection (Bolasso).
//!
//! Subset work runs on the rayon pool; per-subset seeds are derived from the
//! run seed and the subset id, and results are folded in subset order, so
//! every output is a deterministic function of (data, config, plan)
//! regardless of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::aggregation::{
    average_coefficients, geometric_median, intersect_models, median_model, GEOMEDIAN_MAX_ITER,
    GEOMEDIAN_TOL,
};
use crate::dataset::{random_partition, Dataset, PartitionPlan, Task};
use crate::error::{Error, Result};
use crate::model::{CoefficientVector, InclusionVector};
use crate::seeding::derive_seed;
use crate::solvers::{
    gic_select, gic_select_logistic, lasso_cd, lasso_path, logistic_lasso, logistic_lasso_path,
    ols_with_intercept, FitResult, GicConfig, LassoConfig,
};

const IRLS_TOL: f64 = 1e-8;
const IRLS_MAX_ITER: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Message,
    FullData,
    Averaging,
    GeometricMedian,
    Bolasso,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Method::Message => "message",
            Method::FullData => "full_data",
            Method::Averaging => "averaging",
            Method::GeometricMedian => "geometric_median",
            Method::Bolasso => "bolasso",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "message" => Ok(Method::Message),
            "full_data" | "full" => Ok(Method::FullData),
            "averaging" => Ok(Method::Averaging),
            "geometric_median" | "median" => Ok(Method::GeometricMedian),
            "bolasso" => Ok(Method::Bolasso),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

/// How each unit of data selects its support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SelectorConfig {
    /// Lasso path, then GIC over the distinct supports plus the empty model.
    LassoGic {
        #[serde(default)]
        gic: GicConfig,
        #[serde(default)]
        lasso: LassoConfig,
    },
    /// A single Lasso fit at a fixed penalty.
    LassoFixed {
        lambda: f64,
        #[serde(default)]
        lasso: LassoConfig,
    },
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig::LassoGic {
            gic: GicConfig::default(),
            lasso: LassoConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodConfig {
    pub method: Method,
    pub selector: SelectorConfig,
    pub m: usize,
    pub bolasso_b: usize,
    pub seed: u64,
    /// Refit with an unpenalized intercept (the default).
    pub intercept: bool,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            method: Method::Message,
            selector: SelectorConfig::default(),
            m: 1,
            bolasso_b: 32,
            seed: 0,
            intercept: true,
        }
    }
}

impl MethodConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        if self.bolasso_b < 1 {
            return Err(Error::InvalidArgument("bolasso_b must be at least 1".into()));
        }
        match &self.selector {
            SelectorConfig::LassoGic { gic, lasso } => {
                gic.validate()?;
                lasso.validate()
            }
            SelectorConfig::LassoFixed { lambda, lasso } => {
                if !(*lambda >= 0.0) || !lambda.is_finite() {
                    return Err(Error::InvalidArgument(
                        "fixed lambda must be finite and nonnegative".into(),
                    ));
                }
                lasso.validate()
            }
        }
    }
}

/// Simulated communication account for one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommLedger {
    pub uplink_bits: u64,
    pub downlink_bits: u64,
    pub uplink_floats: u64,
    pub rounds: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: Method,
    pub m: usize,
    pub p: usize,
    pub beta: CoefficientVector,
    pub gamma: InclusionVector,
    pub ledger: CommLedger,
    /// Seconds spent in the run.
    pub wall_time: f64,
    /// Per-unit selection outcomes (per subset, or per bootstrap draw).
    pub per_subset: Vec<FitResult>,
    /// Refitted coefficient vectors that enter the combine step.
    pub refits: Vec<CoefficientVector>,
    /// Degenerate-outcome markers, e.g. "empty_median_model".
    pub flags: Vec<String>,
}

/// Ledger implied by the method and the recorded dimensions; the stored
/// ledger of every result equals this by construction.
pub fn communication_cost(result: &MethodResult) -> CommLedger {
    ledger_for(result.method, result.m, result.p, result.gamma.count())
}

fn ledger_for(method: Method, m: usize, p: usize, selected: usize) -> CommLedger {
    let (m64, p64, s64) = (m as u64, p as u64, selected as u64);
    match method {
        Method::Message => CommLedger {
            uplink_bits: m64 * p64,
            downlink_bits: m64 * p64,
            uplink_floats: m64 * s64,
            rounds: 2,
        },
        Method::Averaging | Method::GeometricMedian => CommLedger {
            uplink_bits: 0,
            downlink_bits: 0,
            uplink_floats: m64 * p64,
            rounds: 1,
        },
        Method::FullData | Method::Bolasso => CommLedger::default(),
    }
}

/// Select a support on one unit of data with the configured selector.
pub(crate) fn select_support(d: &Dataset, selector: &SelectorConfig) -> Result<FitResult> {
    match selector {
        SelectorConfig::LassoFixed { lambda, lasso } => match d.task() {
            Task::Regression => lasso_cd(d, *lambda, lasso),
            Task::Classification => logistic_lasso(d, *lambda, lasso),
        },
        SelectorConfig::LassoGic { gic, lasso } => {
            let path = match d.task() {
                Task::Regression => lasso_path(d, lasso)?,
                Task::Classification => logistic_lasso_path(d, lasso)?,
            };
            let mut candidates: Vec<InclusionVector> = Vec::with_capacity(path.len() + 1);
            let mut seen = std::collections::HashSet::new();
            candidates.push(InclusionVector::empty(d.p()));
            seen.insert(candidates[0].clone());
            for fit in &path {
                if seen.insert(fit.gamma.clone()) {
                    candidates.push(fit.gamma.clone());
                }
            }
            let chosen = match d.task() {
                Task::Regression => gic_select(d, &candidates, gic)?,
                Task::Classification => gic_select_logistic(d, &candidates, gic)?,
            };
            if chosen.is_empty_model() {
                return Ok(FitResult::empty(d.p(), "selector", f64::NAN));
            }
            let fit = path
                .iter()
                .find(|f| f.gamma == chosen)
                .expect("chosen support came from the path");
            Ok(fit.clone())
        }
    }
}

/// Refit the coefficients on a fixed support, with intercept per config.
fn refit(d: &Dataset, gamma: &InclusionVector, cfg: &MethodConfig) -> Result<(CoefficientVector, bool)> {
    if gamma.is_empty_model() {
        // degenerate but valid: zero vector (callers flag it)
        return Ok((CoefficientVector::zeros(d.p(), "refit"), true));
    }
    match d.task() {
        Task::Regression => {
            let fit = if cfg.intercept {
                ols_with_intercept(d, gamma)?.0
            } else {
                crate::solvers::ols_fit(d, gamma)?
            };
            Ok((fit, true))
        }
        Task::Classification => {
            if cfg.intercept {
                crate::solvers::logistic_refit_with_intercept(d, gamma, IRLS_TOL, IRLS_MAX_ITER)
            } else {
                let fit = crate::solvers::logistic_irls(d, gamma, IRLS_TOL, IRLS_MAX_ITER)?;
                let converged = fit.converged;
                Ok((fit.beta, converged))
            }
        }
    }
}

fn validate_plan(d: &Dataset, cfg: &MethodConfig, plan: &PartitionPlan) -> Result<()> {
    cfg.validate()?;
    if plan.m != cfg.m {
        return Err(Error::InvalidArgument(format!(
            "partition has m = {}, config has m = {}",
            plan.m, cfg.m
        )));
    }
    if plan.n() != d.n() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} rows, dataset has {}",
            plan.n(),
            d.n()
        )));
    }
    Ok(())
}

fn subset_datasets(d: &Dataset, plan: &PartitionPlan) -> Vec<Dataset> {
    (0..plan.m)
        .map(|i| d.select_rows(&plan.subset_indices(i)))
        .collect()
}

/// First error in subset order, for deterministic error reporting.
fn collect_in_order<T>(results: Vec<std::result::Result<T, (usize, Error)>>) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(results.len());
    let mut first_err: Option<(usize, Error)> = None;
    for r in results {
        match r {
            Ok(v) => out.push(v),
            Err((i, e)) => {
                if first_err.as_ref().map_or(true, |(fi, _)| i < *fi) {
                    first_err = Some((i, e));
                }
            }
        }
    }
    match first_err {
        None => Ok(out),
        Some((subset, e)) => Err(Error::SubsetFailure {
            subset,
            reason: e.to_string(),
        }),
    }
}

/// The median-selection subset-aggregation estimator (Algorithm "message"):
/// per-subset selection, median-model vote, per-subset refit on the voted
/// support, coefficient averaging.
pub fn run_message(d: &Dataset, cfg: &MethodConfig, plan: &PartitionPlan) -> Result<MethodResult> {
    let start = Instant::now();
    validate_plan(d, cfg, plan)?;
    let subsets = subset_datasets(d, plan);

    let selections: Vec<_> = subsets
        .par_iter()
        .enumerate()
        .map(|(i, sd)| select_support(sd, &cfg.selector).map_err(|e| (i, e)))
        .collect();
    let selections = collect_in_order(selections)?;

    let gammas: Vec<InclusionVector> = selections.iter().map(|f| f.gamma.clone()).collect();
    let gamma = median_model(&gammas)?;

    let mut flags = Vec::new();
    let (beta, refits) = if gamma.is_empty_model() {
        flags.push("empty_median_model".to_string());
        (CoefficientVector::zeros(d.p(), "message"), Vec::new())
    } else {
        for (i, sd) in subsets.iter().enumerate() {
            if sd.task() == Task::Regression && sd.n() <= gamma.count() + 1 {
                return Err(Error::SubsetFailure {
                    subset: i,
                    reason: format!(
                        "subset size {} too small to refit {} features",
                        sd.n(),
                        gamma.count()
                    ),
                });
            }
        }
        let refit_results: Vec<_> = subsets
            .par_iter()
            .enumerate()
            .map(|(i, sd)| {
                refit(sd, &gamma, cfg)
                    .map(|(b, conv)| (b.with_subset(i), conv))
                    .map_err(|e| (i, e))
            })
            .collect();
        let refit_results = collect_in_order(refit_results)?;
        for (i, (_, converged)) in refit_results.iter().enumerate() {
            if !converged {
                flags.push(format!("subset_{i}_refit_not_converged"));
            }
        }
        let refits: Vec<CoefficientVector> =
            refit_results.into_iter().map(|(b, _)| b).collect();
        let mut beta = average_coefficients(&refits)?;
        beta.method = "message".to_string();
        (beta, refits)
    };

    Ok(MethodResult {
        method: Method::Message,
        m: cfg.m,
        p: d.p(),
        ledger: ledger_for(Method::Message, cfg.m, d.p(), gamma.count()),
        beta,
        gamma,
        wall_time: start.elapsed().as_secs_f64(),
        per_subset: selections,
        refits,
        flags,
    })
}

/// Selector + refit on the undivided dataset.
pub fn run_full_data(d: &Dataset, cfg: &MethodConfig) -> Result<MethodResult> {
    let start = Instant::now();
    cfg.validate()?;
    let selection = select_support(d, &cfg.selector)?;
    let gamma = selection.gamma.clone();
    let mut flags = Vec::new();
    let (mut beta, refits) = if gamma.is_empty_model() {
        flags.push("empty_selection".to_string());
        (CoefficientVector::zeros(d.p(), "full_data"), Vec::new())
    } else {
        let (b, converged) = refit(d, &gamma, cfg)?;
        if !converged {
            flags.push("refit_not_converged".to_string());
        }
        (b.clone(), vec![b])
    };
    beta.method = "full_data".to_string();
    Ok(MethodResult {
        method: Method::FullData,
        m: 1,
        p: d.p(),
        beta,
        gamma,
        ledger: CommLedger::default(),
        wall_time: start.elapsed().as_secs_f64(),
        per_subset: vec![selection],
        refits,
        flags,
    })
}

/// Per-subset selection and refit on each subset's own support, then
/// coefficient averaging; the reported support is the nonzero set of the
/// averaged vector.
pub fn run_averaging(d: &Dataset, cfg: &MethodConfig, plan: &PartitionPlan) -> Result<MethodResult> {
    run_subset_combine(d, cfg, plan, Method::Averaging)
}

/// Per-subset selection and refit, combined by the geometric median.
pub fn run_geometric_median(
    d: &Dataset,
    cfg: &MethodConfig,
    plan: &PartitionPlan,
) -> Result<MethodResult> {
    run_subset_combine(d, cfg, plan, Method::GeometricMedian)
}

fn run_subset_combine(
    d: &Dataset,
    cfg: &MethodConfig,
    plan: &PartitionPlan,
    method: Method,
) -> Result<MethodResult> {
    let start = Instant::now();
    validate_plan(d, cfg, plan)?;
    let subsets = subset_datasets(d, plan);
    let per_subset: Vec<_> = subsets
        .par_iter()
        .enumerate()
        .map(|(i, sd)| {
            let selection = select_support(sd, &cfg.selector).map_err(|e| (i, e))?;
            let (refitted, converged) = refit(sd, &selection.gamma, cfg).map_err(|e| (i, e))?;
            Ok((selection, refitted.with_subset(i), converged))
        })
        .collect();
    let per_subset = collect_in_order(per_subset)?;

    let mut flags = Vec::new();
    for (i, (_, _, converged)) in per_subset.iter().enumerate() {
        if !converged {
            flags.push(format!("subset_{i}_refit_not_converged"));
        }
    }
    let selections: Vec<FitResult> = per_subset.iter().map(|(s, _, _)| s.clone()).collect();
    let refits: Vec<CoefficientVector> =
        per_subset.into_iter().map(|(_, b, _)| b).collect();
    let mut beta = match method {
        Method::Averaging => average_coefficients(&refits)?,
        Method::GeometricMedian => geometric_median(&refits, GEOMEDIAN_TOL, GEOMEDIAN_MAX_ITER)?,
        _ => unreachable!("run_subset_combine only handles subset comparators"),
    };
    beta.method = method.to_string();
    let gamma = beta.support();
    Ok(MethodResult {
        method,
        m: cfg.m,
        p: d.p(),
        ledger: ledger_for(method, cfg.m, d.p(), gamma.count()),
        beta,
        gamma,
        wall_time: start.elapsed().as_secs_f64(),
        per_subset: selections,
        refits,
        flags,
    })
}

/// Seeded bootstrap resample indices (size n, with replacement).
pub fn bootstrap_indices(n: usize, b: usize, seed: u64) -> Vec<Vec<usize>> {
    use rand::{Rng, SeedableRng};
    (0..b)
        .map(|draw| {
            let mut rng =
                rand_chacha::ChaCha12Rng::seed_from_u64(derive_seed(seed, &[0xB007, draw as u64]));
            (0..n).map(|_| rng.random_range(0..n)).collect()
        })
        .collect()
}

/// Bolasso: selection on seeded bootstrap resamples of the full data,
/// support intersection, refit on the full data.
pub fn run_bolasso(d: &Dataset, cfg: &MethodConfig) -> Result<MethodResult> {
    let resamples = bootstrap_indices(d.n(), cfg.bolasso_b, cfg.seed);
    run_bolasso_with_resamples(d, cfg, &resamples)
}

/// Bolasso on explicit resample index sets (exposed for deterministic tests).
pub fn run_bolasso_with_resamples(
    d: &Dataset,
    cfg: &MethodConfig,
    resamples: &[Vec<usize>],
) -> Result<MethodResult> {
    let start = Instant::now();
    cfg.validate()?;
    if resamples.is_empty() {
        return Err(Error::InvalidArgument("no bootstrap resamples".into()));
    }
    let selections: Vec<_> = resamples
        .par_iter()
        .enumerate()
        .map(|(i, rows)| {
            let dd = d.select_rows(rows);
            select_support(&dd, &cfg.selector).map_err(|e| (i, e))
        })
        .collect();
    let selections = collect_in_order(selections)?;
    let gammas: Vec<InclusionVector> = selections.iter().map(|f| f.gamma.clone()).collect();
    let gamma = intersect_models(&gammas)?;

    let mut flags = Vec::new();
    let (mut beta, refits) = if gamma.is_empty_model() {
        flags.push("empty_intersection".to_string());
        (CoefficientVector::zeros(d.p(), "bolasso"), Vec::new())
    } else {
        let (b, converged) = refit(d, &gamma, cfg)?;
        if !converged {
            flags.push("refit_not_converged".to_string());
        }
        (b.clone(), vec![b])
    };
    beta.method = "bolasso".to_string();
    Ok(MethodResult {
        method: Method::Bolasso,
        m: 1,
        p: d.p(),
        beta,
        gamma,
        ledger: CommLedger::default(),
        wall_time: start.elapsed().as_secs_f64(),
        per_subset: selections,
        refits,
        flags,
    })
}

/// Dispatch a configured method over a dataset, partitioning as needed.
pub fn run_method(d: &Dataset, cfg: &MethodConfig, plan: Option<&PartitionPlan>) -> Result<MethodResult> {
    match cfg.method {
        Method::FullData => run_full_data(d, cfg),
        Method::Bolasso => run_bolasso(d, cfg),
        method => {
            let owned;
            let plan = match plan {
                Some(p) => p,
                None => {
                    owned = random_partition(d.n(), cfg.m, derive_seed(cfg.seed, &[0x504C]))?;
                    &owned
                }
            };
            match method {
                Method::Message => run_message(d, cfg, plan),
                Method::Averaging => run_averaging(d, cfg, plan),
                Method::GeometricMedian => run_geometric_median(d, cfg, plan),
                _ => unreachable!(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, SyntheticCase, SyntheticConfig};
    use approx::assert_abs_diff_eq;
    use ndarray::{Array1, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    fn noiseless_dataset(n: usize, p: usize, support: &[usize]) -> (Dataset, Vec<f64>) {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let x = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
        let mut beta = vec![0.0; p];
        for (k, &j) in support.iter().enumerate() {
            beta[j] = if k % 2 == 0 { 3.0 } else { -2.0 };
        }
        let y = Array1::from_shape_fn(n, |i| {
            (0..p).map(|j| x[(i, j)] * beta[j]).sum::<f64>()
        });
        (
            Dataset::from_parts(x, y, Task::Regression).unwrap(),
            beta,
        )
    }

    fn message_cfg(m: usize) -> MethodConfig {
        MethodConfig {
            method: Method::Message,
            m,
            seed: 5,
            ..MethodConfig::default()
        }
    }

    // Exact-interpolation oracle: noiseless strong signal is recovered
    // exactly and the averaged refit reproduces β to 1e-6.
    #[test]
    fn noiseless_recovery() {
        let (d, beta_true) = noiseless_dataset(2000, 50, &[3, 17, 40]);
        let cfg = message_cfg(5);
        let plan = random_partition(d.n(), 5, 7).unwrap();
        let result = run_message(&d, &cfg, &plan).unwrap();
        assert_eq!(result.gamma.support(), vec![3, 17, 40]);
        for j in 0..50 {
            assert!(
                (result.beta.values[j] - beta_true[j]).abs() <= 1e-6,
                "coefficient {j}: {} vs {}",
                result.beta.values[j],
                beta_true[j]
            );
        }
        assert!(result.flags.is_empty());
    }

    #[test]
    fn message_m1_equals_full_data() {
        let (d, _) = noiseless_dataset(300, 20, &[2, 9]);
        let cfg = message_cfg(1);
        let plan = random_partition(d.n(), 1, 3).unwrap();
        let msg = run_message(&d, &cfg, &plan).unwrap();
        let full = run_full_data(
            &d,
            &MethodConfig {
                method: Method::FullData,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(msg.gamma, full.gamma);
        for j in 0..d.p() {
            assert_abs_diff_eq!(msg.beta.values[j], full.beta.values[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn determinism_across_pool_sizes() {
        let cfg = SyntheticConfig {
            n: 600,
            p: 30,
            s: 3,
            rho: 0.0,
            case: SyntheticCase::Case1,
            seed: 33,
        };
        let (d, _) = generate_synthetic(&cfg).unwrap();
        let mcfg = message_cfg(6);
        let plan = random_partition(d.n(), 6, 21).unwrap();
        let run_in_pool = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run_message(&d, &mcfg, &plan).unwrap())
        };
        let a = run_in_pool(1);
        let b = run_in_pool(4);
        // bit-identical up to wall time
        assert_eq!(a.beta, b.beta);
        assert_eq!(a.gamma, b.gamma);
        assert_eq!(a.ledger, b.ledger);
        assert_eq!(a.per_subset, b.per_subset);
        assert_eq!(a.refits, b.refits);
        assert_eq!(a.flags, b.flags);
    }

    #[test]
    fn ledger_formulas() {
        let (d, _) = noiseless_dataset(500, 25, &[1, 5, 6]);
        let cfg = message_cfg(5);
        let plan = random_partition(d.n(), 5, 9).unwrap();
        let msg = run_message(&d, &cfg, &plan).unwrap();
        let k = msg.gamma.count() as u64;
        assert_eq!(msg.ledger.uplink_bits, 5 * 25);
        assert_eq!(msg.ledger.downlink_bits, 5 * 25);
        assert_eq!(msg.ledger.uplink_floats, 5 * k);
        assert_eq!(msg.ledger.rounds, 2);
        assert_eq!(communication_cost(&msg), msg.ledger);

        let avg = run_averaging(
            &d,
            &MethodConfig {
                method: Method::Averaging,
                ..cfg.clone()
            },
            &plan,
        )
        .unwrap();
        assert_eq!(avg.ledger.uplink_floats, 5 * 25);
        assert_eq!(avg.ledger.rounds, 1);
        assert_eq!(avg.ledger.uplink_bits, 0);
        assert_eq!(communication_cost(&avg), avg.ledger);

        let full = run_full_data(
            &d,
            &MethodConfig {
                method: Method::FullData,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(full.ledger, CommLedger::default());
    }

    #[test]
    fn message_gamma_is_median_of_recorded_selections() {
        let cfg = SyntheticConfig {
            n: 800,
            p: 40,
            s: 4,
            rho: 0.3,
            case: SyntheticCase::Case1,
            seed: 77,
        };
        let (d, _) = generate_synthetic(&cfg).unwrap();
        let mcfg = message_cfg(4);
        let plan = random_partition(d.n(), 4, 13).unwrap();
        let result = run_message(&d, &mcfg, &plan).unwrap();
        let gammas: Vec<InclusionVector> =
            result.per_subset.iter().map(|f| f.gamma.clone()).collect();
        assert_eq!(median_model(&gammas).unwrap(), result.gamma);
        // support of the averaged refit lies inside the voted support
        for j in 0..d.p() {
            if result.beta.values[j] != 0.0 {
                assert!(result.gamma.contains(j));
            }
        }
    }

    #[test]
    fn averaging_reports_support_union_inflation() {
        // two subsets selecting different single features → averaged support
        // is their union
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let n = 400;
        let x = Array2::from_shape_fn((n, 2), |_| rng.sample::<f64, _>(StandardNormal));
        // subset split by parity of the row index via a fixed plan
        let mut assignment = vec![0usize; n];
        for (i, a) in assignment.iter_mut().enumerate() {
            *a = i % 2;
        }
        let plan = PartitionPlan {
            m: 2,
            assignment,
            seed: 0,
        };
        // response: feature 0 matters on even rows, feature 1 on odd rows
        let y = Array1::from_shape_fn(n, |i| {
            if i % 2 == 0 {
                5.0 * x[(i, 0)]
            } else {
                5.0 * x[(i, 1)]
            }
        });
        let d = Dataset::from_parts(x, y, Task::Regression).unwrap();
        let cfg = MethodConfig {
            method: Method::Averaging,
            m: 2,
            ..MethodConfig::default()
        };
        let result = run_averaging(&d, &cfg, &plan).unwrap();
        assert_eq!(result.gamma.support(), vec![0, 1], "support union");
    }

    #[test]
    fn bolasso_identical_resamples_reduce_to_single_selection() {
        let (d, _) = noiseless_dataset(200, 10, &[2, 7]);
        let cfg = MethodConfig {
            method: Method::Bolasso,
            bolasso_b: 4,
            ..MethodConfig::default()
        };
        let rows: Vec<usize> = (0..d.n()).collect();
        let resamples = vec![rows.clone(), rows.clone(), rows.clone(), rows];
        let result = run_bolasso_with_resamples(&d, &cfg, &resamples).unwrap();
        let single = run_full_data(
            &d,
            &MethodConfig {
                method: Method::FullData,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(result.gamma, single.gamma);
        assert_eq!(result.ledger, CommLedger::default());
    }

    #[test]
    fn bolasso_noiseless_recovers_support() {
        let (d, _) = noiseless_dataset(400, 15, &[1, 8, 12]);
        let cfg = MethodConfig {
            method: Method::Bolasso,
            bolasso_b: 8,
            seed: 3,
            ..MethodConfig::default()
        };
        let result = run_bolasso(&d, &cfg).unwrap();
        assert_eq!(result.gamma.support(), vec![1, 8, 12]);
    }

    #[test]
    fn geometric_median_single_subset_is_that_fit() {
        let (d, _) = noiseless_dataset(150, 8, &[0, 4]);
        let cfg = MethodConfig {
            method: Method::GeometricMedian,
            m: 1,
            ..MethodConfig::default()
        };
        let plan = random_partition(d.n(), 1, 0).unwrap();
        let gm = run_geometric_median(&d, &cfg, &plan).unwrap();
        assert_eq!(gm.refits.len(), 1);
        for j in 0..d.p() {
            assert_abs_diff_eq!(gm.beta.values[j], gm.refits[0].values[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn refit_too_small_subset_names_it() {
        let (d, _) = noiseless_dataset(12, 8, &[0, 1, 2, 3]);
        let cfg = message_cfg(6); // subsets of 2 rows, |γ| likely ≥ 1
        let plan = random_partition(d.n(), 6, 2).unwrap();
        match run_message(&d, &cfg, &plan) {
            Err(Error::SubsetFailure { .. }) => {}
            Ok(r) => assert!(
                r.gamma.count() == 0,
                "tiny subsets must either error or select nothing"
            ),
            Err(other) => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn plan_mismatch_rejected() {
        let (d, _) = noiseless_dataset(100, 5, &[0]);
        let cfg = message_cfg(3);
        let plan = random_partition(d.n(), 4, 2).unwrap();
        assert!(run_message(&d, &cfg, &plan).is_err());
    }
}
