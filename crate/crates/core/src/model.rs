//! Fitted-model building blocks: feature inclusion indicators and dense
//! coefficient vectors with provenance.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A 0/1 feature-inclusion indicator over `p` features.
///
/// Serialized as `{"p": N, "support": [j, ...]}` with sorted indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InclusionVector {
    bits: Vec<bool>,
}

impl InclusionVector {
    pub fn empty(p: usize) -> Self {
        Self {
            bits: vec![false; p],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_support(p: usize, support: &[usize]) -> Result<Self> {
        let mut bits = vec![false; p];
        for &j in support {
            if j >= p {
                return Err(Error::InvalidArgument(format!(
                    "support index {j} out of range for p={p}"
                )));
            }
            bits[j] = true;
        }
        Ok(Self { bits })
    }

    /// Indicator of the nonzero entries of a coefficient slice.
    pub fn from_nonzeros(values: &[f64]) -> Self {
        Self {
            bits: values.iter().map(|&v| v != 0.0).collect(),
        }
    }

    pub fn p(&self) -> usize {
        self.bits.len()
    }

    /// Number of included features, |γ|.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty_model(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    pub fn contains(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn set(&mut self, j: usize, included: bool) {
        self.bits[j] = included;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn support(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(j, &b)| b.then_some(j))
            .collect()
    }

    /// Sum of Hamming distances to each vector in `others`.
    pub fn hamming_sum(&self, others: &[InclusionVector]) -> usize {
        others
            .iter()
            .map(|g| {
                self.bits
                    .iter()
                    .zip(&g.bits)
                    .filter(|(a, b)| a != b)
                    .count()
            })
            .sum()
    }
}

#[derive(Serialize, Deserialize)]
struct InclusionRepr {
    p: usize,
    support: Vec<usize>,
}

impl Serialize for InclusionVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        InclusionRepr {
            p: self.p(),
            support: self.support(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for InclusionVector {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = InclusionRepr::deserialize(deserializer)?;
        InclusionVector::from_support(repr.p, &repr.support)
            .map_err(|e| serde::de::Error::custom(e.to_string()))
    }
}

/// Dense coefficient vector over all `p` features (zeros off-support), with
/// an unpenalized intercept and provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub values: Vec<f64>,
    #[serde(default)]
    pub intercept: f64,
    /// Provenance tag, e.g. "lasso", "ols", "message".
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_id: Option<usize>,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>, intercept: f64, method: impl Into<String>) -> Result<Self> {
        if !intercept.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData(
                "coefficient vector has non-finite entries".into(),
            ));
        }
        Ok(Self {
            values,
            intercept,
            method: method.into(),
            subset_id: None,
        })
    }

    pub fn zeros(p: usize, method: impl Into<String>) -> Self {
        Self {
            values: vec![0.0; p],
            intercept: 0.0,
            method: method.into(),
            subset_id: None,
        }
    }

    pub fn with_subset(mut self, subset_id: usize) -> Self {
        self.subset_id = Some(subset_id);
        self
    }

    pub fn p(&self) -> usize {
        self.values.len()
    }

    pub fn support(&self) -> InclusionVector {
        InclusionVector::from_nonzeros(&self.values)
    }

    /// Linear predictor `intercept + x · values` for one row.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept
            + row
                .iter()
                .zip(&self.values)
                .map(|(x, b)| x * b)
                .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_round_trip() {
        let g = InclusionVector::from_support(5, &[0, 3]).unwrap();
        assert_eq!(g.support(), vec![0, 3]);
        assert_eq!(g.count(), 2);
        assert!(g.contains(3));
        assert!(!g.contains(1));
    }

    #[test]
    fn out_of_range_support_rejected() {
        assert!(InclusionVector::from_support(3, &[3]).is_err());
    }

    #[test]
    fn serde_uses_support_form() {
        let g = InclusionVector::from_support(4, &[1, 2]).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"p":4,"support":[1,2]}"#);
        let back: InclusionVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn non_finite_coefficients_rejected() {
        assert!(CoefficientVector::new(vec![1.0, f64::NAN], 0.0, "t").is_err());
        assert!(CoefficientVector::new(vec![1.0], f64::INFINITY, "t").is_err());
    }

    #[test]
    fn hamming_sum_counts_disagreements() {
        let a = InclusionVector::from_bits(vec![true, false]);
        let b = InclusionVector::from_bits(vec![true, true]);
        let c = InclusionVector::from_bits(vec![false, false]);
        assert_eq!(a.hamming_sum(&[b, c]), 2);
    }
}
