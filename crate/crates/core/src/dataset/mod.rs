//! Data representation: design matrix + response, CSV ingestion with
//! categorical recoding, synthetic generation, partitioning, train/test
//! splitting and standardization.

mod csv_io;
mod synthetic;

pub use csv_io::{load_csv, save_csv};
pub use synthetic::{generate_synthetic, generate_synthetic_split};

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CoefficientVector;
use crate::seeding;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Regression,
    Classification,
}

/// An n×p design matrix with response vector and column metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    x: Array2<f64>,
    y: Array1<f64>,
    column_names: Vec<String>,
    response_name: String,
    task: Task,
}

impl Dataset {
    pub fn new(
        x: Array2<f64>,
        y: Array1<f64>,
        column_names: Vec<String>,
        response_name: impl Into<String>,
        task: Task,
    ) -> Result<Self> {
        let (n, p) = x.dim();
        if n < 1 || p < 1 {
            return Err(Error::DimensionMismatch(format!(
                "need n ≥ 1 and p ≥ 1, got {n}×{p}"
            )));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "y has length {} but x has {} rows",
                y.len(),
                n
            )));
        }
        if column_names.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} column names for {} columns",
                column_names.len(),
                p
            )));
        }
        if task == Task::Classification && y.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::InvalidArgument(
                "classification response must be 0/1".into(),
            ));
        }
        Ok(Self {
            x,
            y,
            column_names,
            response_name: response_name.into(),
            task,
        })
    }

    /// Construct with generated column names ("x1".."xp", response "y").
    pub fn from_parts(x: Array2<f64>, y: Array1<f64>, task: Task) -> Result<Self> {
        let names = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
        Self::new(x, y, names, "y", task)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn task(&self) -> Task {
        self.task
    }

    /// Rows `rows` of this dataset, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let x = self.x.select(Axis(0), rows);
        let y = self.y.select(Axis(0), rows);
        Dataset {
            x,
            y,
            column_names: self.column_names.clone(),
            response_name: self.response_name.clone(),
            task: self.task,
        }
    }

    /// Content digest covering values, names and task.
    pub fn digest(&self) -> u64 {
        let mut h = seeding::digest_f64s(0x44415441, self.x.iter().copied());
        h = seeding::digest_f64s(h, self.y.iter().copied());
        h = seeding::digest_strs(h, self.column_names.iter().map(|s| s.as_str()));
        h = seeding::digest_strs(h, [self.response_name.as_str()]);
        seeding::splitmix64(h ^ if self.task == Task::Regression { 0 } else { 1 })
    }
}

/// Noise families used by the synthetic generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFamily {
    Gaussian { sigma: f64 },
    StudentT { df: f64 },
    Logistic,
}

/// True coefficients and support behind a synthetic dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub beta: Vec<f64>,
    /// Sorted indices of the nonzero coefficients.
    pub support: Vec<usize>,
    pub s: usize,
    /// Noise variance, when the family has one.
    pub sigma2: Option<f64>,
    pub noise: NoiseFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticCase {
    /// Linear model, Gaussian noise with σ = 2.
    Case1,
    /// Linear model, Student-t noise with 3 degrees of freedom.
    Case2,
    /// Logistic model.
    Case3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    /// Common pairwise correlation of the features (compound symmetry).
    pub rho: f64,
    pub case: SyntheticCase,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument("need n ≥ 2".into()));
        }
        if self.p < 1 {
            return Err(Error::InvalidArgument("need p ≥ 1".into()));
        }
        if self.s > self.p {
            return Err(Error::InvalidArgument(format!(
                "s = {} exceeds p = {}",
                self.s, self.p
            )));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidArgument(format!(
                "rho must lie in [0, 1), got {}",
                self.rho
            )));
        }
        Ok(())
    }
}

/// Assignment of rows to `m` subsets: a seeded shuffle dealt round-robin, so
/// subset sizes differ by at most one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub m: usize,
    /// `assignment[i]` is the subset id of row i.
    pub assignment: Vec<usize>,
    pub seed: u64,
}

impl PartitionPlan {
    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Row indices of subset `i`, in original row order.
    pub fn subset_indices(&self, i: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(row, &sid)| (sid == i).then_some(row))
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.m];
        for &sid in &self.assignment {
            sizes[sid] += 1;
        }
        sizes
    }
}

/// Randomly partition `n` rows into `m` subsets of near-equal size.
/// Deterministic in `(n, m, seed)`.
pub fn random_partition(n: usize, m: usize, seed: u64) -> Result<PartitionPlan> {
    if m < 1 || m > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ m ≤ n, got m = {m}, n = {n}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut assignment = vec![0usize; n];
    for (k, &row) in order.iter().enumerate() {
        assignment[row] = k % m;
    }
    Ok(PartitionPlan {
        m,
        assignment,
        seed,
    })
}

/// Split into the first `n_train` rows (file order) and the remainder.
pub fn split_train_test(d: &Dataset, n_train: usize) -> Result<(Dataset, Dataset)> {
    let n = d.n();
    if n_train < 1 || n_train >= n {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ n_train < n, got n_train = {n_train}, n = {n}"
        )));
    }
    let train_rows: Vec<usize> = (0..n_train).collect();
    let test_rows: Vec<usize> = (n_train..n).collect();
    Ok((d.select_rows(&train_rows), d.select_rows(&test_rows)))
}

/// Column means and sample standard deviations used to standardize a design,
/// sufficient to map fitted coefficients back to the raw scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub means: Vec<f64>,
    /// Sample standard deviations (n−1 denominator).
    pub sds: Vec<f64>,
}

impl ScalingRecord {
    /// Map coefficients fitted on the standardized design back to raw scale.
    pub fn unscale(&self, beta: &CoefficientVector) -> CoefficientVector {
        let values: Vec<f64> = beta
            .values
            .iter()
            .zip(&self.sds)
            .map(|(b, sd)| b / sd)
            .collect();
        let intercept = beta.intercept
            - beta
                .values
                .iter()
                .zip(self.means.iter().zip(&self.sds))
                .map(|(b, (m, sd))| b * m / sd)
                .sum::<f64>();
        CoefficientVector {
            values,
            intercept,
            method: beta.method.clone(),
            subset_id: beta.subset_id,
        }
    }
}

/// Center each column to mean 0 and scale to sample standard deviation 1.
pub fn standardize(d: &Dataset) -> Result<(Dataset, ScalingRecord)> {
    let n = d.n();
    let mut x = d.x.clone();
    let mut means = Vec::with_capacity(d.p());
    let mut sds = Vec::with_capacity(d.p());
    for (j, mut col) in x.axis_iter_mut(Axis(1)).enumerate() {
        let mean = col.sum() / n as f64;
        let ss: f64 = col.iter().map(|v| (v - mean).powi(2)).sum();
        if n < 2 || ss == 0.0 {
            return Err(Error::ConstantColumn(d.column_names[j].clone()));
        }
        let sd = (ss / (n as f64 - 1.0)).sqrt();
        col.mapv_inplace(|v| (v - mean) / sd);
        means.push(mean);
        sds.push(sd);
    }
    let out = Dataset {
        x,
        y: d.y.clone(),
        column_names: d.column_names.clone(),
        response_name: d.response_name.clone(),
        task: d.task,
    };
    Ok((out, ScalingRecord { means, sds }))
}
