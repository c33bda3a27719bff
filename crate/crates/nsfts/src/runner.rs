//! Benchmark execution: every method x dataset cell is evaluated
//! independently, traces are written per cell, and the merged reports are
//! written once at the end.
//!
//! Cells are independent, so with the `parallel` feature (on by default)
//! they run on a rayon pool sized by [`RunOptions::workers`]; the sequential
//! path is always available and produces byte-identical output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eval::{evaluate, Evaluation, MethodConfig, MetricReport};
use crate::manifest::{BenchPlan, PlannedMethod};

/// Execution knobs for a benchmark run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Worker threads for cell execution. `None` uses the available
    /// parallelism; `Some(1)` forces the sequential path.
    pub workers: Option<usize>,
    /// Per-cell trace files are written unless switched off.
    pub write_traces: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            workers: None,
            write_traces: true,
        }
    }
}

/// Metrics plus bookkeeping for one successful cell.
#[derive(Debug, Clone)]
pub struct CellMetrics {
    pub report: MetricReport,
    pub fallbacks: usize,
    pub retrains: usize,
}

/// Outcome of one method x dataset cell.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub dataset: String,
    pub method: String,
    pub seed: u64,
    pub params_hash: String,
    pub outcome: std::result::Result<CellMetrics, String>,
}

/// Outcome of a whole benchmark run.
#[derive(Debug)]
pub struct BenchSummary {
    pub cells: Vec<CellResult>,
    pub output: PathBuf,
    pub failed: usize,
}

struct CellSpec<'a> {
    dataset_index: usize,
    method_index: usize,
    plan: &'a BenchPlan,
    trace_dir: Option<&'a Path>,
}

fn execute_cell(spec: &CellSpec) -> CellResult {
    let plan = spec.plan;
    let dataset = &plan.datasets[spec.dataset_index];
    let planned = &plan.methods[spec.method_index];
    let seed = plan.dataset_seeds[spec.dataset_index];
    let params_hash = params_hash(planned);
    let outcome = evaluate(&dataset.values, &planned.config, planned.split)
        .and_then(|evaluation| {
            if let Some(dir) = spec.trace_dir {
                write_trace(dir, &dataset.name, planned.method.name(), &evaluation)?;
            }
            Ok(CellMetrics {
                report: evaluation.report,
                fallbacks: evaluation.fallback_count,
                retrains: evaluation.retrain_count,
            })
        })
        .map_err(|e| e.to_string());
    CellResult {
        dataset: dataset.name.clone(),
        method: planned.method.name().to_string(),
        seed,
        params_hash,
        outcome,
    }
}

/// Run every cell one after another, in dataset-major order.
pub fn run_cells_sequential(plan: &BenchPlan, trace_dir: Option<&Path>) -> Vec<CellResult> {
    cell_specs(plan, trace_dir)
        .iter()
        .map(execute_cell)
        .collect()
}

/// Run every cell on a rayon pool. Results come back in the same
/// dataset-major order as the sequential path.
#[cfg(feature = "parallel")]
pub fn run_cells_parallel(
    plan: &BenchPlan,
    trace_dir: Option<&Path>,
    workers: Option<usize>,
) -> Result<Vec<CellResult>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidManifest(format!("cannot build worker pool: {e}")))?;
    let specs = cell_specs(plan, trace_dir);
    Ok(pool.install(|| specs.par_iter().map(execute_cell).collect()))
}

fn cell_specs<'a>(plan: &'a BenchPlan, trace_dir: Option<&'a Path>) -> Vec<CellSpec<'a>> {
    (0..plan.datasets.len())
        .flat_map(|dataset_index| {
            (0..plan.methods.len()).map(move |method_index| CellSpec {
                dataset_index,
                method_index,
                plan,
                trace_dir,
            })
        })
        .collect()
}

/// Execute a full benchmark: run all cells, then merge `report.csv`,
/// `cells.csv` and `report.json` into the plan's output directory. A failing
/// cell is recorded and reported but never interrupts the other cells.
pub fn run_bench(plan: &BenchPlan, options: &RunOptions) -> Result<BenchSummary> {
    std::fs::create_dir_all(&plan.output).map_err(|source| Error::FileWrite {
        path: plan.output.clone(),
        source,
    })?;
    let trace_dir = plan.output.join("trace");
    let trace_dir = if options.write_traces {
        std::fs::create_dir_all(&trace_dir).map_err(|source| Error::FileWrite {
            path: trace_dir.clone(),
            source,
        })?;
        Some(trace_dir)
    } else {
        None
    };

    #[cfg(feature = "parallel")]
    let cells = if options.workers == Some(1) {
        run_cells_sequential(plan, trace_dir.as_deref())
    } else {
        run_cells_parallel(plan, trace_dir.as_deref(), options.workers)?
    };
    #[cfg(not(feature = "parallel"))]
    let cells = run_cells_sequential(plan, trace_dir.as_deref());

    write_wide_report(&plan.output.join("report.csv"), plan, &cells)?;
    write_cells_csv(&plan.output.join("cells.csv"), &cells)?;
    write_json_report(&plan.output.join("report.json"), plan, &cells)?;

    let failed = cells.iter().filter(|c| c.outcome.is_err()).count();
    Ok(BenchSummary {
        cells,
        output: plan.output.clone(),
        failed,
    })
}

/// Stable digest of everything that shapes a cell's numbers.
fn params_hash(planned: &PlannedMethod) -> String {
    let cfg: &MethodConfig = &planned.config;
    let canonical = format!(
        "method={};sets={};padding={};mode={:?};normalize={};residual_window={};\
         sigma_squared={};memory_window={};refresh_interval={};ensemble_size={};split={}",
        planned.method.name(),
        cfg.fts.set_count,
        cfg.fts.padding,
        cfg.fts.universe_mode,
        cfg.fts.normalize,
        cfg.residual_window,
        cfg.sigma_squared,
        cfg.policy.memory_window,
        cfg.policy.refresh_interval,
        cfg.ensemble_size,
        planned.split,
    );
    let digest = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|source| Error::FileWrite {
        path: path.to_path_buf(),
        source,
    })
}

fn write_trace(dir: &Path, dataset: &str, method: &str, evaluation: &Evaluation) -> Result<()> {
    let mut out = String::from("t,y,yhat,eps,delta_min,delta_max,rho_max\n");
    for row in &evaluation.trace {
        match &row.spread {
            Some(s) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    row.t,
                    row.actual,
                    row.predicted,
                    row.residual,
                    s.displacement_min,
                    s.displacement_max,
                    s.widening_max
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},,,",
                    row.t, row.actual, row.predicted, row.residual
                );
            }
        }
    }
    write_file(&dir.join(format!("{dataset}_{method}.csv")), &out)
}

/// Wide layout: one row per dataset, one column group per metric, one column
/// per method inside each group.
fn write_wide_report(path: &Path, plan: &BenchPlan, cells: &[CellResult]) -> Result<()> {
    let methods: Vec<&str> = plan.methods.iter().map(|m| m.method.name()).collect();
    let mut out = String::from("dataset");
    for metric in ["rmse", "mape_pct", "u1", "u2"] {
        for method in &methods {
            let _ = write!(out, ",{metric}_{}", method.replace('-', "_"));
        }
    }
    out.push('\n');
    let method_count = plan.methods.len();
    for (di, dataset) in plan.datasets.iter().enumerate() {
        let _ = write!(out, "{}", dataset.name);
        let row = &cells[di * method_count..(di + 1) * method_count];
        for metric in 0..4 {
            for cell in row {
                match &cell.outcome {
                    Ok(m) => {
                        let value = match metric {
                            0 => m.report.rmse,
                            1 => m.report.mape_pct,
                            2 => m.report.u1,
                            _ => m.report.u2,
                        };
                        let _ = write!(out, ",{value:.6}");
                    }
                    Err(_) => out.push(','),
                }
            }
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Long layout: one row per cell, full-precision values.
fn write_cells_csv(path: &Path, cells: &[CellResult]) -> Result<()> {
    let mut out = String::from("dataset,method,rmse,mape_pct,u1,u2,n,skipped,seed,params_hash\n");
    for cell in cells {
        match &cell.outcome {
            Ok(m) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    cell.dataset,
                    cell.method,
                    m.report.rmse,
                    m.report.mape_pct,
                    m.report.u1,
                    m.report.u2,
                    m.report.n,
                    m.report.skipped,
                    cell.seed,
                    cell.params_hash
                );
            }
            Err(_) => {
                let _ = writeln!(
                    out,
                    "{},{},,,,,,,{},{}",
                    cell.dataset, cell.method, cell.seed, cell.params_hash
                );
            }
        }
    }
    write_file(path, &out)
}

fn write_json_report(path: &Path, plan: &BenchPlan, cells: &[CellResult]) -> Result<()> {
    use serde::Serialize;

    #[derive(Serialize)]
    struct JsonCell<'a> {
        method: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        rmse: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        mape_pct: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        u1: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        u2: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        skipped: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        fallbacks: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        retrains: Option<usize>,
        seed: u64,
        params_hash: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<&'a str>,
    }

    #[derive(Serialize)]
    struct JsonDataset<'a> {
        name: &'a str,
        cells: Vec<JsonCell<'a>>,
    }

    #[derive(Serialize)]
    struct JsonReport<'a> {
        version: u32,
        methods: Vec<&'a str>,
        datasets: Vec<JsonDataset<'a>>,
    }

    let method_count = plan.methods.len();
    let report = JsonReport {
        version: 1,
        methods: plan.methods.iter().map(|m| m.method.name()).collect(),
        datasets: plan
            .datasets
            .iter()
            .enumerate()
            .map(|(di, dataset)| JsonDataset {
                name: &dataset.name,
                cells: cells[di * method_count..(di + 1) * method_count]
                    .iter()
                    .map(|cell| match &cell.outcome {
                        Ok(m) => JsonCell {
                            method: &cell.method,
                            rmse: Some(m.report.rmse),
                            mape_pct: Some(m.report.mape_pct),
                            u1: Some(m.report.u1),
                            u2: Some(m.report.u2),
                            n: Some(m.report.n),
                            skipped: Some(m.report.skipped),
                            fallbacks: Some(m.fallbacks),
                            retrains: Some(m.retrains),
                            seed: cell.seed,
                            params_hash: &cell.params_hash,
                            error: None,
                        },
                        Err(e) => JsonCell {
                            method: &cell.method,
                            rmse: None,
                            mape_pct: None,
                            u1: None,
                            u2: None,
                            n: None,
                            skipped: None,
                            fallbacks: None,
                            retrains: None,
                            seed: cell.seed,
                            params_hash: &cell.params_hash,
                            error: Some(e),
                        },
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write_file(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::{Manifest, Overrides};
    use std::io::Write;

    fn plan_in(dir: &Path, manifest_text: &str) -> BenchPlan {
        let path = dir.join("bench.toml");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(manifest_text.as_bytes()).unwrap();
        Manifest::load(&path)
            .unwrap()
            .resolve(dir, &Overrides::default())
            .unwrap()
    }

    const SMALL: &str = r#"
version = 1
output = "out"

[defaults]
seed = 11
sets = 9
residual_window = 5
memory_window = 40
refresh_interval = 10
split = 0.6

[[datasets]]
name = "stationary"
kind = "stationary"
length = 300

[[datasets]]
name = "drifting"
kind = "incremental-mean"
length = 300

[[methods]]
name = "nsfts"

[[methods]]
name = "time-variant"

[[methods]]
name = "static-fts"
"#;

    #[test]
    fn bench_writes_all_reports_and_traces() {
        let dir = tempfile::tempdir().unwrap();
        let plan = plan_in(dir.path(), SMALL);
        let summary = run_bench(&plan, &RunOptions::default()).unwrap();
        assert_eq!(summary.cells.len(), 6);
        assert_eq!(summary.failed, 0);
        let out = dir.path().join("out");
        assert!(out.join("report.csv").exists());
        assert!(out.join("cells.csv").exists());
        assert!(out.join("report.json").exists());
        assert!(out.join("trace").join("stationary_nsfts.csv").exists());
        assert!(out.join("trace").join("drifting_static-fts.csv").exists());
        let wide = std::fs::read_to_string(out.join("report.csv")).unwrap();
        assert!(wide.starts_with("dataset,rmse_nsfts,rmse_time_variant,rmse_static_fts"));
        assert_eq!(wide.lines().count(), 3);
    }

    #[test]
    fn sequential_and_parallel_agree_byte_for_byte() {
        let dir = tempfile::tempdir().unwrap();
        let plan = plan_in(dir.path(), SMALL);
        let seq = run_cells_sequential(&plan, None);
        #[cfg(feature = "parallel")]
        {
            let par = run_cells_parallel(&plan, None, Some(2)).unwrap();
            assert_eq!(seq.len(), par.len());
            for (a, b) in seq.iter().zip(&par) {
                assert_eq!(a.dataset, b.dataset);
                assert_eq!(a.method, b.method);
                let (ma, mb) = (a.outcome.as_ref().unwrap(), b.outcome.as_ref().unwrap());
                assert_eq!(ma.report, mb.report);
            }
        }
        assert_eq!(seq.len(), 6);
    }

    #[test]
    fn failing_cell_is_isolated() {
        let dir = tempfile::tempdir().unwrap();
        // 120-point series: time-variant needs more than memory_window = 150,
        // so that method fails while the others complete.
        let text = r#"
version = 1
output = "out"

[defaults]
seed = 3
sets = 7
residual_window = 4
memory_window = 150
refresh_interval = 10
split = 0.6

[[datasets]]
name = "short"
kind = "stationary"
length = 120

[[methods]]
name = "time-variant"

[[methods]]
name = "static-fts"
"#;
        let plan = plan_in(dir.path(), text);
        let summary = run_bench(&plan, &RunOptions::default()).unwrap();
        assert_eq!(summary.failed, 1);
        assert!(summary.cells[0].outcome.is_err());
        assert!(summary.cells[1].outcome.is_ok());
        let cells_csv = std::fs::read_to_string(dir.path().join("out").join("cells.csv")).unwrap();
        assert_eq!(cells_csv.lines().count(), 3);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let plan = plan_in(dir.path(), SMALL);
        run_bench(&plan, &RunOptions::default()).unwrap();
        let out = dir.path().join("out");
        let first: Vec<String> = ["report.csv", "cells.csv", "report.json"]
            .iter()
            .map(|f| std::fs::read_to_string(out.join(f)).unwrap())
            .collect();
        run_bench(&plan, &RunOptions::default()).unwrap();
        let second: Vec<String> = ["report.csv", "cells.csv", "report.json"]
            .iter()
            .map(|f| std::fs::read_to_string(out.join(f)).unwrap())
            .collect();
        assert_eq!(first, second);
    }
}
