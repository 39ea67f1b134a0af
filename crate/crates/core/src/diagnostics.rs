//! Computable design-condition diagnostics: column-norm and support-Gram
//! eigenvalue bounds, the strong irrepresentable statistic, the sparse Riesz
//! constant by exhaustive enumeration, and the elliptical preconditioner for
//! p > n designs.
//!
//! All Gram quantities are on the /n scale so values are comparable across
//! subset sizes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;

/// Largest subset count enumerated by [`check_a4`].
pub const ENUMERATION_BOUND: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// max_j ‖x_j‖²/n.
    pub v1_hat: f64,
    /// Smallest eigenvalue of the support Gram matrix X_SᵀX_S/n.
    pub v2_hat: f64,
    /// ‖X_{Sᶜ}ᵀX_S(X_SᵀX_S)⁻¹ sign(β_S)‖∞.
    pub irrepresentable_stat: f64,
    /// 1 − irrepresentable_stat.
    pub eta_hat: f64,
    /// inf over |π| ≤ s of λ_min(X_πᵀX_π/n), when computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparse_riesz_rho: Option<f64>,
    pub per_subset: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_id: Option<usize>,
    pub support: Vec<usize>,
}

fn validate_support(d: &Dataset, support: &[usize]) -> Result<()> {
    if support.is_empty() {
        return Err(Error::InvalidArgument("empty support".into()));
    }
    if support.len() > d.n() {
        return Err(Error::InvalidArgument(format!(
            "support size {} exceeds n = {}",
            support.len(),
            d.n()
        )));
    }
    if support.iter().any(|&j| j >= d.p()) {
        return Err(Error::InvalidArgument("support index out of range".into()));
    }
    Ok(())
}

fn support_gram(d: &Dataset, support: &[usize]) -> DMatrix<f64> {
    let xs = linalg::gather_columns(&d.x().view(), support);
    xs.transpose() * &xs
}

/// Consistency-condition estimates: (max column norm², min support-Gram
/// eigenvalue), both on the /n scale.
pub fn check_a1(d: &Dataset, support: &[usize]) -> Result<(f64, f64)> {
    validate_support(d, support)?;
    let n = d.n() as f64;
    let v1 = d
        .x()
        .columns()
        .into_iter()
        .map(|c| c.dot(&c) / n)
        .fold(0.0, f64::max);
    let gram = support_gram(d, support) / n;
    let v2 = linalg::min_eigenvalue(&gram);
    Ok((v1, v2))
}

/// The strong irrepresentable statistic
/// max over j ∉ S of |x_jᵀ X_S (X_SᵀX_S)⁻¹ sign(β_S)|.
pub fn check_a3(d: &Dataset, support: &[usize], signs: &[f64]) -> Result<f64> {
    validate_support(d, support)?;
    if signs.len() != support.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} signs for a support of size {}",
            signs.len(),
            support.len()
        )));
    }
    if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
        return Err(Error::InvalidArgument("signs must be ±1".into()));
    }
    let gram = support_gram(d, support);
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::RankDeficient(Some("singular support Gram matrix".into())))?;
    let w = chol.solve(&DVector::from_column_slice(signs));
    let xs = linalg::gather_columns(&d.x().view(), support);
    let v = xs * w; // X_S (X_SᵀX_S)⁻¹ sign
    let in_support = |j: usize| support.contains(&j);
    let mut stat = 0.0_f64;
    for j in 0..d.p() {
        if in_support(j) {
            continue;
        }
        let dot: f64 = d
            .x()
            .column(j)
            .iter()
            .zip(v.iter())
            .map(|(a, b)| a * b)
            .sum();
        stat = stat.max(dot.abs());
    }
    Ok(stat)
}

/// Number of subsets of sizes 1..=s from p items, saturating at the bound.
fn enumeration_count(p: usize, s: usize) -> u128 {
    let mut total: u128 = 0;
    for k in 1..=s {
        let mut c: u128 = 1;
        for i in 0..k {
            c = c.saturating_mul((p - i) as u128) / (i as u128 + 1);
            if c > ENUMERATION_BOUND {
                return u128::MAX;
            }
        }
        total = total.saturating_add(c);
        if total > ENUMERATION_BOUND {
            return u128::MAX;
        }
    }
    total
}

fn for_each_combination(p: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance to the next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + p - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Sparse Riesz constant: minimum over all column subsets π with |π| ≤ s of
/// λ_min(X_πᵀX_π/n), by exhaustive enumeration.
pub fn check_a4(d: &Dataset, s: usize) -> Result<f64> {
    if s < 1 || s > d.p() {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ s ≤ p, got s = {s}, p = {}",
            d.p()
        )));
    }
    let count = enumeration_count(d.p(), s);
    if count > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound { count });
    }
    let n = d.n() as f64;
    let p = d.p();
    // Full Gram: bounded sizes only, since C(p,2) ≤ bound implies p ≤ ~1415.
    let gram: DMatrix<f64> = if s >= 2 {
        let x = linalg::gather_columns(&d.x().view(), &(0..p).collect::<Vec<_>>());
        (x.transpose() * &x) / n
    } else {
        DMatrix::from_fn(p, 1, |j, _| d.x().column(j).dot(&d.x().column(j)) / n)
    };
    let mut rho = f64::INFINITY;
    for k in 1..=s {
        for_each_combination(p, k, |subset| {
            let lam = if k == 1 {
                if s >= 2 {
                    gram[(subset[0], subset[0])]
                } else {
                    gram[(subset[0], 0)]
                }
            } else {
                let sub = DMatrix::from_fn(k, k, |a, b| gram[(subset[a], subset[b])]);
                linalg::min_eigenvalue(&sub)
            };
            rho = rho.min(lam);
        });
    }
    Ok(rho)
}

/// Elliptical preconditioner for p > n designs: premultiply X and y by
/// (XXᵀ/p)^{-1/2}, after which X̃X̃ᵀ = p·Iₙ.
pub fn precondition_elliptical(d: &Dataset) -> Result<Dataset> {
    let (n, p) = (d.n(), d.p());
    if p <= n {
        return Err(Error::InvalidArgument(format!(
            "preconditioning requires p > n, got n = {n}, p = {p}"
        )));
    }
    let x = linalg::gather_columns(&d.x().view(), &(0..p).collect::<Vec<_>>());
    let a = (&x * x.transpose()) / p as f64;
    let inv_sqrt = linalg::inverse_sqrt(&a)?;
    let xt = &inv_sqrt * &x;
    let y = DVector::from_iterator(n, d.y().iter().copied());
    let yt = &inv_sqrt * y;
    let x_nd = ndarray::Array2::from_shape_fn((n, p), |(i, j)| xt[(i, j)]);
    let y_nd = ndarray::Array1::from_shape_fn(n, |i| yt[i]);
    Dataset::new(
        x_nd,
        y_nd,
        d.column_names().to_vec(),
        d.response_name(),
        d.task(),
    )
}

/// Assemble a full condition report for one dataset.
pub fn condition_report(
    d: &Dataset,
    support: &[usize],
    signs: &[f64],
    riesz_s: Option<usize>,
    per_subset: bool,
    subset_id: Option<usize>,
) -> Result<ConditionReport> {
    let (v1_hat, v2_hat) = check_a1(d, support)?;
    let irrepresentable_stat = check_a3(d, support, signs)?;
    let sparse_riesz_rho = match riesz_s {
        Some(s) => Some(check_a4(d, s)?),
        None => None,
    };
    Ok(ConditionReport {
        v1_hat,
        v2_hat,
        irrepresentable_stat,
        eta_hat: 1.0 - irrepresentable_stat,
        sparse_riesz_rho,
        per_subset,
        subset_id,
        support: support.to_vec(),
    })
}

/// One unit of diagnostic output: the full data or one subset. Numerical
/// failures downgrade to warnings with `report: None`; diagnostics never
/// hard-fail on the data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticEntry {
    pub scope: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_id: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ConditionReport>,
    pub warnings: Vec<String>,
}

fn entry_for(
    d: &Dataset,
    support: &[usize],
    signs: &[f64],
    riesz_s: Option<usize>,
    scope: &str,
    subset_id: Option<usize>,
) -> DiagnosticEntry {
    let mut warnings = Vec::new();
    let per_subset = subset_id.is_some();
    let core = check_a1(d, support).and_then(|(v1, v2)| {
        let stat = check_a3(d, support, signs)?;
        Ok((v1, v2, stat))
    });
    let report = match core {
        Err(e) => {
            warnings.push(format!("{scope}: {e}"));
            None
        }
        Ok((v1_hat, v2_hat, irrepresentable_stat)) => {
            if irrepresentable_stat >= 1.0 {
                warnings.push(format!(
                    "{scope}: irrepresentable statistic {irrepresentable_stat:.4} ≥ 1; Lasso sign \
                     consistency is not supported on this design"
                ));
            }
            if v2_hat < 1e-6 {
                warnings.push(format!(
                    "{scope}: support Gram minimum eigenvalue {v2_hat:.3e} is numerically zero"
                ));
            }
            let sparse_riesz_rho = match riesz_s {
                None => None,
                Some(s) => match check_a4(d, s) {
                    Ok(rho) => Some(rho),
                    Err(e) => {
                        warnings.push(format!("{scope}: sparse Riesz check skipped: {e}"));
                        None
                    }
                },
            };
            Some(ConditionReport {
                v1_hat,
                v2_hat,
                irrepresentable_stat,
                eta_hat: 1.0 - irrepresentable_stat,
                sparse_riesz_rho,
                per_subset,
                subset_id,
                support: support.to_vec(),
            })
        }
    };
    DiagnosticEntry {
        scope: scope.to_string(),
        subset_id,
        report,
        warnings,
    }
}

/// Diagnostics for the full data and, when `m > 1`, each subset of a seeded
/// partition. Without an explicit support, the default Lasso+GIC selector
/// picks one on the full data; coefficient signs come from the refit.
pub fn condition_report_entries(
    d: &Dataset,
    support: Option<Vec<usize>>,
    m: usize,
    seed: u64,
    riesz_s: Option<usize>,
) -> Result<Vec<DiagnosticEntry>> {
    let support = match support {
        Some(s) => {
            if s.iter().any(|&j| j >= d.p()) {
                return Err(Error::InvalidArgument(
                    "support index out of range".into(),
                ));
            }
            s
        }
        None => {
            let selection =
                crate::pipeline::select_support(d, &crate::pipeline::SelectorConfig::default())?;
            selection.gamma.support()
        }
    };
    if support.is_empty() {
        return Ok(vec![DiagnosticEntry {
            scope: "full".into(),
            subset_id: None,
            report: None,
            warnings: vec!["selector chose the empty model; nothing to diagnose".into()],
        }]);
    }
    let gamma = crate::model::InclusionVector::from_support(d.p(), &support)?;
    let signs: Vec<f64> = match refit_signs(d, &gamma) {
        Ok(s) => s,
        Err(_) => vec![1.0; support.len()],
    };
    let riesz_s = riesz_s.or(Some(support.len()));
    let mut entries = vec![entry_for(d, &support, &signs, riesz_s, "full", None)];
    if m > 1 {
        let plan = crate::dataset::random_partition(d.n(), m, seed)?;
        for i in 0..m {
            let sub = d.select_rows(&plan.subset_indices(i));
            entries.push(entry_for(
                &sub,
                &support,
                &signs,
                riesz_s,
                "subset",
                Some(i),
            ));
        }
    }
    Ok(entries)
}

fn refit_signs(d: &Dataset, gamma: &crate::model::InclusionVector) -> Result<Vec<f64>> {
    use crate::dataset::Task;
    let beta = match d.task() {
        Task::Regression => crate::solvers::ols_with_intercept(d, gamma)?.0,
        Task::Classification => {
            crate::solvers::logistic_refit_with_intercept(d, gamma, 1e-8, 100)?.0
        }
    };
    Ok(gamma
        .support()
        .iter()
        .map(|&j| if beta.values[j] < 0.0 { -1.0 } else { 1.0 })
        .collect())
}
