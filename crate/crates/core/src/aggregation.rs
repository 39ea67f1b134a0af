//! Combining rules over per-subset models: the median model (coordinatewise
//! majority vote), coefficient averaging, the geometric median of estimates,
//! and bootstrap-support intersection.

use crate::error::{Error, Result};
use crate::model::{CoefficientVector, InclusionVector};

pub const GEOMEDIAN_TOL: f64 = 1e-9;
pub const GEOMEDIAN_MAX_ITER: usize = 10_000;

fn check_equal_lengths(lens: impl Iterator<Item = usize>, what: &str) -> Result<usize> {
    let mut len = None;
    for l in lens {
        match len {
            None => len = Some(l),
            Some(expect) if expect != l => {
                return Err(Error::DimensionMismatch(format!(
                    "{what} have mixed lengths {expect} and {l}"
                )))
            }
            _ => {}
        }
    }
    len.ok_or_else(|| Error::InvalidArgument(format!("empty list of {what}")))
}

/// The median model: include feature j iff a strict majority of the inputs
/// include it (an exact tie at m/2 excludes). This is an argmin of
/// Σᵢ‖γ − γ⁽ⁱ⁾‖₁ over {0,1}^p.
pub fn median_model(gammas: &[InclusionVector]) -> Result<InclusionVector> {
    let p = check_equal_lengths(gammas.iter().map(|g| g.p()), "inclusion vectors")?;
    let m = gammas.len();
    let mut out = InclusionVector::empty(p);
    for j in 0..p {
        let votes = gammas.iter().filter(|g| g.contains(j)).count();
        out.set(j, 2 * votes > m);
    }
    Ok(out)
}

/// Coordinatewise arithmetic mean of coefficient vectors (and intercepts).
pub fn average_coefficients(betas: &[CoefficientVector]) -> Result<CoefficientVector> {
    let p = check_equal_lengths(betas.iter().map(|b| b.p()), "coefficient vectors")?;
    let m = betas.len() as f64;
    let mut values = vec![0.0; p];
    let mut intercept = 0.0;
    for b in betas {
        for (acc, v) in values.iter_mut().zip(&b.values) {
            *acc += v;
        }
        intercept += b.intercept;
    }
    for v in values.iter_mut() {
        *v /= m;
    }
    CoefficientVector::new(values, intercept / m, "average")
}

/// Geometric median of the coefficient vectors (jointly over intercept and
/// coefficients): the minimizer of Σᵢ‖z − βᵢ‖₂.
///
/// Points that are collinear (including the 1-D case) reduce exactly to the
/// one-dimensional median: the middle point for odd m, the midpoint of the
/// two central points for even m. Otherwise Weiszfeld iteration runs with the
/// Vardi–Zhang correction when an iterate coincides with a data point, and
/// stops when the step is below `tol`.
pub fn geometric_median(
    betas: &[CoefficientVector],
    tol: f64,
    max_iter: usize,
) -> Result<CoefficientVector> {
    let p = check_equal_lengths(betas.iter().map(|b| b.p()), "coefficient vectors")?;
    let points: Vec<Vec<f64>> = betas
        .iter()
        .map(|b| {
            let mut v = Vec::with_capacity(p + 1);
            v.push(b.intercept);
            v.extend_from_slice(&b.values);
            v
        })
        .collect();
    let z = geometric_median_points(&points, tol, max_iter);
    CoefficientVector::new(z[1..].to_vec(), z[0], "geometric_median")
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn geometric_median_points(points: &[Vec<f64>], tol: f64, max_iter: usize) -> Vec<f64> {
    let m = points.len();
    let d = points[0].len();
    if m == 1 {
        return points[0].clone();
    }
    let mut center = vec![0.0; d];
    for pt in points {
        for (c, v) in center.iter_mut().zip(pt) {
            *c += v;
        }
    }
    for c in center.iter_mut() {
        *c /= m as f64;
    }

    // Collinearity: project on the direction of the farthest point from the
    // center; if every orthogonal residual vanishes, reduce to a 1-D median
    // over the original points (kept exact).
    let deviations: Vec<Vec<f64>> = points
        .iter()
        .map(|pt| pt.iter().zip(&center).map(|(v, c)| v - c).collect())
        .collect();
    let norms: Vec<f64> = deviations.iter().map(|q| norm(q)).collect();
    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    if max_norm == 0.0 {
        // all points identical
        return points[0].clone();
    }
    let lead = norms
        .iter()
        .position(|&n| n == max_norm)
        .expect("max norm attained");
    let dir: Vec<f64> = deviations[lead].iter().map(|v| v / max_norm).collect();
    let projections: Vec<f64> = deviations
        .iter()
        .map(|q| q.iter().zip(&dir).map(|(a, b)| a * b).sum())
        .collect();
    let collinear = deviations.iter().zip(&projections).all(|(q, t)| {
        let resid2: f64 = q
            .iter()
            .zip(&dir)
            .map(|(qi, ui)| (qi - t * ui).powi(2))
            .sum();
        resid2.sqrt() <= 1e-10 * max_norm
    });
    if collinear {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| projections[a].total_cmp(&projections[b]));
        if m % 2 == 1 {
            return points[order[m / 2]].clone();
        }
        let lo = &points[order[m / 2 - 1]];
        let hi = &points[order[m / 2]];
        return lo.iter().zip(hi).map(|(a, b)| (a + b) / 2.0).collect();
    }

    // Weiszfeld with the Vardi–Zhang anchor correction.
    let mut z = center;
    for _ in 0..max_iter {
        let mut weight_sum = 0.0;
        let mut weighted = vec![0.0; d];
        let mut pull = vec![0.0; d]; // Σ (x_i − z)/d_i over non-coincident
        let mut multiplicity = 0usize;
        for pt in points {
            let dist_i = dist(pt, &z);
            if dist_i < 1e-12 {
                multiplicity += 1;
                continue;
            }
            let w = 1.0 / dist_i;
            weight_sum += w;
            for k in 0..d {
                weighted[k] += pt[k] * w;
                pull[k] += (pt[k] - z[k]) * w;
            }
        }
        if weight_sum == 0.0 {
            break; // every point coincides with z
        }
        let t: Vec<f64> = weighted.iter().map(|v| v / weight_sum).collect();
        let next = if multiplicity == 0 {
            t
        } else {
            let r = norm(&pull);
            if r <= multiplicity as f64 {
                break; // z itself is the median
            }
            let shrink = (multiplicity as f64 / r).min(1.0);
            t.iter()
                .zip(&z)
                .map(|(ti, zi)| (1.0 - shrink) * ti + shrink * zi)
                .collect()
        };
        let step = dist(&next, &z);
        z = next;
        if step < tol {
            break;
        }
    }
    z
}

/// Intersection of supports: include j iff every input includes it.
pub fn intersect_models(gammas: &[InclusionVector]) -> Result<InclusionVector> {
    let p = check_equal_lengths(gammas.iter().map(|g| g.p()), "inclusion vectors")?;
    let mut out = InclusionVector::empty(p);
    for j in 0..p {
        out.set(j, gammas.iter().all(|g| g.contains(j)));
    }
    Ok(out)
}
