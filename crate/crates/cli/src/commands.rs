use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use message_core::{
    condition_report_entries, load_csv, monte_carlo, precondition_elliptical, run_method,
    BenchmarkReport, Dataset, Error, GicConfig, GicPenalty, LassoConfig, Method, MethodConfig,
    MethodResult, MethodSpec, MonteCarloSpec, Result, SelectorConfig, SyntheticCase,
    SyntheticConfig,
};

use crate::svg::{line_chart, Series};

/// Resolve the worker-thread count: flag, then MESSAGE_THREADS, then auto.
fn init_threads(flag: usize) -> Result<()> {
    let n = if flag > 0 {
        flag
    } else {
        std::env::var("MESSAGE_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0)
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn ensure_out_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.display().to_string(),
        source: e,
    })
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>> {
    raw.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse {what} entry '{s}'")))
        })
        .collect()
}

/// Apply a `key=value` override to a JSON document along a dotted path.
fn apply_override(doc: &mut serde_json::Value, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::InvalidArgument(format!("override '{spec}' is not key=value")))?;
    let parsed: serde_json::Value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut cursor = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if i + 1 == parts.len() {
            cursor
                .as_object_mut()
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("override path '{path}' is not an object"))
                })?
                .insert(part.to_string(), parsed.clone());
        } else {
            let obj = cursor.as_object_mut().ok_or_else(|| {
                Error::InvalidArgument(format!("override path '{path}' is not an object"))
            })?;
            cursor = obj
                .entry(part.to_string())
                .or_insert_with(|| serde_json::Value::Object(Default::default()));
        }
    }
    Ok(())
}

fn gic_from_flag(raw: &str) -> Result<GicConfig> {
    let penalty = match raw {
        "ric" => GicPenalty::Ric,
        "ebic" => GicPenalty::Ebic,
        "bic" => GicPenalty::Bic,
        other => match other.strip_prefix("custom=") {
            Some(v) => GicPenalty::Custom(v.parse().map_err(|_| {
                Error::InvalidArgument(format!("cannot parse custom GIC penalty '{v}'"))
            })?),
            None => {
                return Err(Error::InvalidArgument(format!(
                    "unknown GIC penalty '{other}' (expected ric|ebic|bic|custom=VAL)"
                )))
            }
        },
    };
    Ok(GicConfig { penalty })
}

// ---------------------------------------------------------------------------
// fit

#[derive(Args)]
pub struct FitArgs {
    /// Input CSV (header row required)
    #[arg(long)]
    data: PathBuf,
    /// Response column name
    #[arg(long)]
    response: String,
    /// Comma-separated categorical columns (dummy-coded on load)
    #[arg(long, default_value = "")]
    categorical: String,
    /// Method configuration JSON (defaults apply when absent)
    #[arg(long)]
    config: Option<PathBuf>,
    /// key=value overrides on the configuration (dotted paths)
    #[arg(long = "set")]
    overrides: Vec<String>,
    /// Method: message|full_data|averaging|geometric_median|bolasso
    #[arg(long)]
    method: Option<String>,
    /// Number of subsets
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Bootstrap draws for bolasso
    #[arg(long)]
    bolasso_b: Option<usize>,
    /// Use a fixed-λ Lasso selector instead of the Lasso+GIC path
    #[arg(long)]
    lambda: Option<f64>,
    /// GIC penalty: ric|ebic|bic|custom=VAL
    #[arg(long)]
    gic: Option<String>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = auto; MESSAGE_THREADS overrides the default)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn build_method_config(args: &FitArgs) -> Result<MethodConfig> {
    let mut doc: serde_json::Value = match &args.config {
        Some(path) => {
            let raw = fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            serde_json::from_str(&raw)?
        }
        None => serde_json::to_value(MethodConfig::default())?,
    };
    for of in &args.overrides {
        apply_override(&mut doc, of)?;
    }
    let mut cfg: MethodConfig = serde_json::from_value(doc)?;
    if let Some(m) = &args.method {
        cfg.method = m.parse()?;
    }
    if let Some(m) = args.m {
        cfg.m = m;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(b) = args.bolasso_b {
        cfg.bolasso_b = b;
    }
    if let Some(lambda) = args.lambda {
        cfg.selector = SelectorConfig::LassoFixed {
            lambda,
            lasso: LassoConfig::default(),
        };
    }
    if let Some(gic) = &args.gic {
        cfg.selector = SelectorConfig::LassoGic {
            gic: gic_from_flag(gic)?,
            lasso: LassoConfig::default(),
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn human_summary(d: &Dataset, result: &MethodResult) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "method: {}\nrows: {}  features: {}  subsets: {}\n",
        result.method,
        d.n(),
        d.p(),
        result.m
    ));
    out.push_str(&format!(
        "selected {} feature(s)\n",
        result.gamma.count()
    ));
    out.push_str(&format!("  intercept: {:.6}\n", result.beta.intercept));
    for j in result.gamma.support() {
        out.push_str(&format!(
            "  {}: {:.6}\n",
            d.column_names()[j],
            result.beta.values[j]
        ));
    }
    out.push_str(&format!(
        "communication: {} bits up, {} bits down, {} floats up, {} round(s)\n",
        result.ledger.uplink_bits,
        result.ledger.downlink_bits,
        result.ledger.uplink_floats,
        result.ledger.rounds
    ));
    out.push_str(&format!("wall time: {:.3} s\n", result.wall_time));
    if !result.flags.is_empty() {
        out.push_str(&format!("flags: {}\n", result.flags.join(", ")));
    }
    out
}

pub fn fit(args: FitArgs) -> Result<()> {
    init_threads(args.threads)?;
    let cfg = build_method_config(&args)?;
    let categorical: Vec<String> = args
        .categorical
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().to_string())
        .collect();
    let d = load_csv(&args.data, &args.response, &categorical)?;
    let result = run_method(&d, &cfg, None)?;
    ensure_out_dir(&args.out)?;
    write_file(
        &args.out.join("result.json"),
        &serde_json::to_string_pretty(&result)?,
    )?;
    let summary = human_summary(&d, &result);
    write_file(&args.out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate / bench

#[derive(Args)]
pub struct SimulateArgs {
    /// Model case: 1 = Gaussian noise, 2 = t₃ noise, 3 = logistic
    #[arg(long)]
    case: u8,
    /// Common pairwise feature correlation
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    /// Monte Carlo replicates per grid point
    #[arg(long)]
    reps: Option<usize>,
    /// Preset scale: desk (p=100, subset 200) or paper (p=1000, subset 400)
    #[arg(long, default_value = "desk")]
    scale: String,
    /// Override the sample-size grid, e.g. 1000,2000,4000
    #[arg(long)]
    n_grid: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// Fixed subset size (m = n / subset_size)
    #[arg(long)]
    subset_size: Option<usize>,
    /// Held-out test rows per replicate
    #[arg(long)]
    test_n: Option<usize>,
    /// Comma-separated methods to run
    #[arg(long, default_value = "message,full_data,averaging,geometric_median,bolasso")]
    methods: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run replicates in parallel (turn off for clean per-method timings)
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    parallel_replicates: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

pub fn build_simulate_spec(args: &SimulateArgs) -> Result<MonteCarloSpec> {
    let case = match args.case {
        1 => SyntheticCase::Case1,
        2 => SyntheticCase::Case2,
        3 => SyntheticCase::Case3,
        other => {
            return Err(Error::InvalidArgument(format!(
                "case must be 1, 2 or 3, got {other}"
            )))
        }
    };
    let (p, subset, reps, n_grid): (usize, usize, usize, Vec<usize>) = match args.scale.as_str() {
        "desk" => (100, 200, 20, vec![1000, 2000, 4000]),
        "paper" => (1000, 400, 200, vec![2000, 4000, 6000, 8000, 10000]),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown scale '{other}' (expected desk|paper)"
            )))
        }
    };
    let p = args.p.unwrap_or(p);
    let s = args.s.unwrap_or(3);
    let subset_size = args.subset_size.unwrap_or(subset);
    let reps = args.reps.unwrap_or(reps);
    let n_grid = match &args.n_grid {
        Some(raw) => parse_list::<usize>(raw, "n-grid")?,
        None => n_grid,
    };
    if n_grid.is_empty() {
        return Err(Error::InvalidArgument("empty n grid".into()));
    }
    let methods: Vec<MethodSpec> = parse_list::<String>(&args.methods, "methods")?
        .iter()
        .map(|name| name.parse::<Method>().map(MethodSpec::new))
        .collect::<Result<_>>()?;
    let grid = n_grid
        .into_iter()
        .map(|n| SyntheticConfig {
            n,
            p,
            s,
            rho: args.rho,
            case,
            seed: 0,
        })
        .collect();
    Ok(MonteCarloSpec {
        grid,
        methods,
        subset_size,
        reps,
        base_seed: args.seed,
        test_n: args.test_n.unwrap_or(0),
        parallel_replicates: args.parallel_replicates,
    })
}

fn metric_series<F>(report: &BenchmarkReport, get: F) -> Vec<Series>
where
    F: Fn(&message_core::SummaryRow) -> Option<f64>,
{
    let mut series: Vec<Series> = Vec::new();
    for row in &report.summary {
        let Some(y) = get(row) else { continue };
        let name = row.method.to_string();
        let x = row.n as f64;
        match series.iter_mut().find(|s| s.name == name) {
            Some(s) => s.points.push((x, y)),
            None => series.push(Series {
                name,
                points: vec![(x, y)],
            }),
        }
    }
    series
}

fn write_report_outputs(report: &BenchmarkReport, out: &Path) -> Result<()> {
    ensure_out_dir(out)?;
    write_file(&out.join("report.json"), &report.deterministic_json()?)?;
    write_file(&out.join("report.csv"), &report.to_tidy_csv())?;

    let charts: [(&str, &str, Box<dyn Fn(&message_core::SummaryRow) -> Option<f64>>); 4] = [
        (
            "coef_mse.svg",
            "coefficient MSE",
            Box::new(|r| Some(r.coef_mse.mean)),
        ),
        (
            "recovery.svg",
            "exact recovery rate",
            Box::new(|r| Some(r.recovery_rate)),
        ),
        (
            "walltime.svg",
            "wall time (s)",
            Box::new(|r| Some(r.wall_time.mean)),
        ),
        (
            "accuracy.svg",
            "test accuracy",
            Box::new(|r| r.accuracy.as_ref().map(|a| a.mean)),
        ),
    ];
    for (file, label, get) in charts {
        let series = metric_series(report, get);
        if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
            continue;
        }
        write_file(
            &out.join(file),
            &line_chart(label, "sample size n", label, &series),
        )?;
    }
    Ok(())
}

fn print_summary_table(report: &BenchmarkReport) {
    println!(
        "{:<8} {:<18} {:>10} {:>12} {:>10} {:>10}",
        "n", "method", "recovery", "coef_mse", "|support|", "time (s)"
    );
    for row in &report.summary {
        println!(
            "{:<8} {:<18} {:>10.3} {:>12.6} {:>10.2} {:>10.4}",
            row.n,
            row.method.to_string(),
            row.recovery_rate,
            row.coef_mse.mean,
            row.support_size.mean,
            row.wall_time.mean
        );
    }
    if report.partial {
        eprintln!("warning: some replicates failed; report is partial");
    }
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    init_threads(args.threads)?;
    let out = args.out.clone();
    let spec = build_simulate_spec(&args)?;
    let report = monte_carlo(&spec)?;
    write_report_outputs(&report, &out)?;
    print_summary_table(&report);
    Ok(())
}

#[derive(Args)]
pub struct BenchArgs {
    /// Monte Carlo spec JSON (grid, methods, subset_size, reps, base_seed, …)
    #[arg(long)]
    config: PathBuf,
    /// key=value overrides on the spec (dotted paths)
    #[arg(long = "set")]
    overrides: Vec<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

pub fn bench(args: BenchArgs) -> Result<()> {
    init_threads(args.threads)?;
    let raw = fs::read_to_string(&args.config).map_err(|e| Error::Io {
        path: args.config.display().to_string(),
        source: e,
    })?;
    let mut doc: serde_json::Value = serde_json::from_str(&raw)?;
    for of in &args.overrides {
        apply_override(&mut doc, of)?;
    }
    let spec: MonteCarloSpec = serde_json::from_value(doc)?;
    let report = monte_carlo(&spec)?;
    write_report_outputs(&report, &args.out)?;
    print_summary_table(&report);
    Ok(())
}

#[derive(Args)]
pub struct ReportArgs {
    /// Existing report JSON (as written by simulate/bench)
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

pub fn report(args: ReportArgs) -> Result<()> {
    let raw = fs::read_to_string(&args.report).map_err(|e| Error::Io {
        path: args.report.display().to_string(),
        source: e,
    })?;
    let report: BenchmarkReport = serde_json::from_str(&raw)?;
    write_report_outputs(&report, &args.out)?;
    print_summary_table(&report);
    Ok(())
}

// ---------------------------------------------------------------------------
// diagnose

#[derive(Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    response: String,
    #[arg(long, default_value = "")]
    categorical: String,
    /// Explicit support indices (comma separated); default: select via the
    /// Lasso+GIC path on the full data
    #[arg(long)]
    support: Option<String>,
    /// Also report per subset with this partition count
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply the elliptical preconditioner (requires p > n) first
    #[arg(long, default_value_t = false)]
    precondition: bool,
    /// Sparsity level for the sparse-Riesz enumeration (default |support|)
    #[arg(long)]
    riesz_s: Option<usize>,
    /// Output file for the JSON report (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

pub fn diagnose(args: DiagnoseArgs) -> Result<()> {
    init_threads(args.threads)?;
    let categorical: Vec<String> = args
        .categorical
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().to_string())
        .collect();
    let loaded = load_csv(&args.data, &args.response, &categorical)?;
    let d = if args.precondition {
        precondition_elliptical(&loaded)?
    } else {
        loaded
    };
    let support: Option<Vec<usize>> = match &args.support {
        Some(raw) => Some(parse_list(raw, "support")?),
        None => None,
    };
    let entries = condition_report_entries(&d, support, args.m, args.seed, args.riesz_s)?;
    for entry in &entries {
        for w in &entry.warnings {
            eprintln!("warning: {w}");
        }
    }
    let json = serde_json::to_string_pretty(&entries)?;
    match &args.out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    ensure_out_dir(parent)?;
                }
            }
            write_file(path, &json)?
        }
        None => println!("{json}"),
    }
    Ok(())
}
