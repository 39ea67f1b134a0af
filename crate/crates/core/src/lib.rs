//! Distributed sparse regression and classification by median-model subset
//! aggregation: partition the data, select features on every subset via a
//! Lasso path tuned by a generalized information criterion, vote the
//! per-subset supports into the median model, refit each subset on the voted
//! support and average the coefficients. Comparator methods (full-data
//! inference, coefficient averaging, geometric-median combination, bootstrap
//! Lasso), a seeded synthetic benchmark generator, design-condition
//! diagnostics and a paired Monte Carlo harness round out the library.

pub mod aggregation;
pub mod dataset;
pub mod diagnostics;
pub mod error;
mod linalg;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod seeding;
pub mod solvers;

pub use dataset::{
    generate_synthetic, generate_synthetic_split, load_csv, random_partition, save_csv,
    split_train_test, standardize, Dataset, GroundTruth, NoiseFamily, PartitionPlan,
    ScalingRecord, SyntheticCase, SyntheticConfig, Task,
};
pub use diagnostics::{
    check_a1, check_a3, check_a4, condition_report, condition_report_entries,
    precondition_elliptical, ConditionReport, DiagnosticEntry,
};
pub use error::{Error, ErrorCategory, Result};
pub use metrics::{
    monte_carlo, score_replicate, summarize, BenchmarkReport, MethodSpec, MonteCarloSpec,
    ReplicateOutcome, ReplicateScore, SummaryRow,
};
pub use model::{CoefficientVector, InclusionVector};
pub use pipeline::{
    communication_cost, run_averaging, run_bolasso, run_bolasso_with_resamples, run_full_data,
    run_geometric_median, run_message, run_method, CommLedger, Method, MethodConfig, MethodResult,
    SelectorConfig,
};
pub use solvers::{FitResult, GicConfig, GicPenalty, LassoConfig};
