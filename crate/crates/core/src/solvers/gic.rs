//! Generalized information criterion scoring and selection over candidate
//! supports.
//!
//! The regression score profiles the noise variance out:
//! n·ln(RSS_γ/n) + λ_GIC·|γ|, with RSS from the OLS fit on the selected
//! columns plus an unpenalized intercept (not counted in |γ|). A fit with
//! RSS = 0 scores −∞ so noiseless models are always preferred. For
//! classification the analogous score replaces n·ln(RSS/n) with the logistic
//! deviance of the IRLS maximum-likelihood fit.

use super::logistic::logistic_nll_fit_with_intercept;
use super::{ols_with_intercept, GicConfig};
use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::model::InclusionVector;

/// Relative threshold below which an RSS counts as exactly zero: residuals
/// of a noiseless interpolation are rounding noise (‖r‖²/‖y − ȳ‖² around
/// machine-epsilon squared), and comparing logs of such noise is
/// meaningless.
const RSS_ZERO_REL: f64 = 1e-20;

/// GIC score of one candidate support on a regression dataset.
pub fn gic_score(d: &Dataset, gamma: &InclusionVector, cfg: &GicConfig) -> Result<f64> {
    cfg.validate()?;
    let n = d.n() as f64;
    let (_, rss) = ols_with_intercept(d, gamma)?;
    let lambda = cfg.penalty.lambda(d.n(), d.p());
    let ybar = d.y().sum() / n;
    let yss: f64 = d.y().iter().map(|v| (v - ybar).powi(2)).sum();
    if rss <= RSS_ZERO_REL * yss.max(f64::MIN_POSITIVE) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(n * (rss / n).ln() + lambda * gamma.count() as f64)
}

/// Deviance-based GIC score for classification datasets. A candidate whose
/// maximum-likelihood fit does not exist or converge (separation) is
/// unscoreable and reports a rank-deficiency error, mirroring the
/// regression requirement that X_γ have full rank.
pub fn gic_score_logistic(d: &Dataset, gamma: &InclusionVector, cfg: &GicConfig) -> Result<f64> {
    cfg.validate()?;
    if d.task() != Task::Classification {
        return Err(Error::InvalidArgument(
            "gic_score_logistic requires a classification dataset".into(),
        ));
    }
    let n = d.n() as f64;
    let lambda = cfg.penalty.lambda(d.n(), d.p());
    let (mean_nll, converged) = logistic_nll_fit_with_intercept(d, gamma)?;
    if !converged {
        return Err(Error::RankDeficient(Some(
            "logistic MLE did not converge (possible separation)".into(),
        )));
    }
    Ok(2.0 * n * mean_nll + lambda * gamma.count() as f64)
}

/// Argmin over candidates by (score, |γ|, lexicographic bits).
///
/// Candidates are visited smallest-first, so `fit_floor` — a lower bound on
/// the fit term of every candidate (the fit of the union support, minus a
/// rounding slack) — lets large candidates be skipped once
/// `fit_floor + penalty·|γ|` strictly exceeds the best score seen: their
/// true score cannot win or tie.
fn select_by<F>(
    candidates: &[InclusionVector],
    penalty: f64,
    fit_floor: Option<f64>,
    mut score_of: F,
) -> Result<InclusionVector>
where
    F: FnMut(&InclusionVector) -> Result<f64>,
{
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("empty candidate list".into()));
    }
    let mut order: Vec<&InclusionVector> = candidates.iter().collect();
    order.sort_by(|a, b| (a.count(), *a).cmp(&(b.count(), *b)));
    let mut best: Option<(f64, usize, &InclusionVector)> = None;
    let mut scored_any = false;
    for gamma in order {
        if let (Some(floor), Some((bs, _, _))) = (fit_floor, &best) {
            if floor + penalty * gamma.count() as f64 > *bs {
                continue;
            }
        }
        let score = match score_of(gamma) {
            Ok(s) if !s.is_nan() => s,
            Ok(_) => continue,
            Err(Error::RankDeficient(_)) => continue,
            Err(e) => return Err(e),
        };
        scored_any = true;
        let key = (score, gamma.count(), gamma);
        let better = match &best {
            None => true,
            // ties break toward smaller |γ|, then lexicographically
            Some((bs, bc, bg)) => match score.total_cmp(bs) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => (key.1, key.2) < (*bc, *bg),
            },
        };
        if better {
            best = Some((score, gamma.count(), gamma));
        }
    }
    if !scored_any {
        return Err(Error::NoCandidate(
            "all candidate supports are rank deficient".into(),
        ));
    }
    Ok(best.expect("scored at least one candidate").2.clone())
}

fn union_support(candidates: &[InclusionVector]) -> Option<InclusionVector> {
    let p = candidates.first()?.p();
    let mut bits = vec![false; p];
    for g in candidates {
        if g.p() != p {
            return None;
        }
        for j in 0..p {
            if g.contains(j) {
                bits[j] = true;
            }
        }
    }
    Some(InclusionVector::from_bits(bits))
}

/// Argmin of [`gic_score`] over the candidates. Rank-deficient candidates
/// are skipped; it is an error if none can be scored.
pub fn gic_select(
    d: &Dataset,
    candidates: &[InclusionVector],
    cfg: &GicConfig,
) -> Result<InclusionVector> {
    let penalty = cfg.penalty.lambda(d.n(), d.p());
    let n = d.n() as f64;
    // fit term of any candidate is at least that of the union support
    let fit_floor = union_support(candidates)
        .and_then(|u| ols_with_intercept(d, &u).ok())
        .and_then(|(_, rss)| {
            (rss > 0.0).then(|| {
                let fit = n * (rss / n).ln();
                fit - fit.abs() * 1e-9 - 1e-9
            })
        });
    select_by(candidates, penalty, fit_floor, |g| gic_score(d, g, cfg))
}

/// Argmin of [`gic_score_logistic`] over the candidates.
pub fn gic_select_logistic(
    d: &Dataset,
    candidates: &[InclusionVector],
    cfg: &GicConfig,
) -> Result<InclusionVector> {
    let penalty = cfg.penalty.lambda(d.n(), d.p());
    let n = d.n() as f64;
    // deviance is nonnegative, so 0 is always a valid floor; the converged
    // union fit gives a tighter one
    let fit_floor = match union_support(candidates)
        .and_then(|u| logistic_nll_fit_with_intercept(d, &u).ok())
    {
        Some((mean_nll, true)) => {
            let fit = 2.0 * n * mean_nll;
            Some((fit - fit.abs() * 1e-6 - 1e-9).max(-1e-9))
        }
        _ => Some(-1e-9),
    };
    select_by(candidates, penalty, fit_floor, |g| {
        gic_score_logistic(d, g, cfg)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::GicPenalty;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array1, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    fn strong_signal(n: usize, p: usize) -> (Dataset, InclusionVector) {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let x = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
        let y = Array1::from_shape_fn(n, |i| {
            5.0 * x[(i, 0)] - 4.0 * x[(i, 2)] + 0.1 * rng.sample::<f64, _>(StandardNormal)
        });
        let d = Dataset::from_parts(x, y, Task::Regression).unwrap();
        let s = InclusionVector::from_support(p, &[0, 2]).unwrap();
        (d, s)
    }

    #[test]
    fn empty_model_scores_log_variance() {
        let x = array![[1.0], [2.0], [3.0], [4.0]];
        let y = array![1.0, 3.0, 2.0, 6.0];
        let d = Dataset::from_parts(x, y.clone(), Task::Regression).unwrap();
        let score = gic_score(&d, &InclusionVector::empty(1), &GicConfig::default()).unwrap();
        let n = 4.0;
        let mean = y.sum() / n;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert_abs_diff_eq!(score, n * var.ln(), epsilon = 1e-10);
    }

    #[test]
    fn noiseless_support_scores_negative_infinity() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let x = Array2::from_shape_fn((20, 4), |_| rng.sample::<f64, _>(StandardNormal));
        let y = Array1::from_shape_fn(20, |i| 2.0 * x[(i, 1)]);
        let d = Dataset::from_parts(x, y, Task::Regression).unwrap();
        let s = InclusionVector::from_support(4, &[1]).unwrap();
        let score = gic_score(&d, &s, &GicConfig::default()).unwrap();
        assert_eq!(score, f64::NEG_INFINITY);
    }

    // Exhaustive score comparison: on strong-signal data the true support
    // beats the empty model.
    #[test]
    fn selects_true_support_over_empty() {
        let (d, s) = strong_signal(100, 6);
        let candidates = vec![InclusionVector::empty(6), s.clone()];
        let score_empty = gic_score(&d, &candidates[0], &GicConfig::default()).unwrap();
        let score_s = gic_score(&d, &s, &GicConfig::default()).unwrap();
        assert!(score_s < score_empty);
        let chosen = gic_select(&d, &candidates, &GicConfig::default()).unwrap();
        assert_eq!(chosen, s);
    }

    #[test]
    fn single_candidate_returned() {
        let (d, s) = strong_signal(50, 6);
        let chosen = gic_select(&d, std::slice::from_ref(&s), &GicConfig::default()).unwrap();
        assert_eq!(chosen, s);
    }

    #[test]
    fn huge_custom_penalty_selects_empty_model() {
        let (d, s) = strong_signal(50, 6);
        let cfg = GicConfig {
            penalty: GicPenalty::Custom(1e12),
        };
        let candidates = vec![s, InclusionVector::empty(6)];
        let chosen = gic_select(&d, &candidates, &cfg).unwrap();
        assert!(chosen.is_empty_model());
    }

    #[test]
    fn selection_invariant_to_candidate_order() {
        let (d, s) = strong_signal(80, 6);
        let c1 = InclusionVector::from_support(6, &[0]).unwrap();
        let c2 = InclusionVector::from_support(6, &[0, 2, 4]).unwrap();
        let mut candidates = vec![InclusionVector::empty(6), c1, s, c2];
        let a = gic_select(&d, &candidates, &GicConfig::default()).unwrap();
        candidates.reverse();
        let b = gic_select(&d, &candidates, &GicConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rank_deficient_candidates_skipped_or_fatal() {
        let x = array![[1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]];
        let y = array![1.0, 2.0, 3.5, 4.0];
        let d = Dataset::from_parts(x, y, Task::Regression).unwrap();
        let dup = InclusionVector::from_support(2, &[0, 1]).unwrap();
        // the duplicated pair is skipped, singleton wins
        let single = InclusionVector::from_support(2, &[0]).unwrap();
        let chosen =
            gic_select(&d, &[dup.clone(), single.clone()], &GicConfig::default()).unwrap();
        assert_eq!(chosen, single);
        // all candidates rank deficient → error
        assert!(matches!(
            gic_select(&d, &[dup], &GicConfig::default()),
            Err(Error::NoCandidate(_))
        ));
    }
}
