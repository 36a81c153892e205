//! Benchmark harness: run width-restricted solves over instance files and
//! emit rows plus per-configuration means.
//!
//! Rows come out in deterministic (instance, width, repetition) order no
//! matter how many worker threads run the solves, and every returned
//! partition is re-validated before its row is accepted.

use crate::blocks::{enumerate_blocks, BlockSet};
use crate::instance::{parse_instance, Instance, GENERATOR_RNG_NAME};
use crate::solver::{build_dd, validate_partition, SolveConfig, SolveError};
use serde_json::{json, Value};
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

/// Fixed schema of the CSV output.
pub const CSV_HEADER: &str = "instance,n,sigma,width,value,elapsed_ms,blocks,max_layer";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Suite configuration.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Instance files or directories of instance files.
    pub inputs: Vec<PathBuf>,
    /// Layer width bounds to run, e.g. `[10, 100, 1000]`.
    pub widths: Vec<usize>,
    pub repetitions: usize,
    /// Per-solve wall-clock limit; expired solves yield a row without a value.
    pub time_limit: Option<Duration>,
    pub format: OutputFormat,
    /// Worker threads for instance-level fan-out.
    pub jobs: usize,
}

/// One benchmark measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub sigma: usize,
    pub width: usize,
    /// `None` when the per-solve time limit expired.
    pub value: Option<usize>,
    pub elapsed_ms: f64,
    pub blocks: usize,
    pub max_layer: usize,
    pub validated: bool,
}

/// Mean value over all rows of one (n, sigma, distribution, width) group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryGroup {
    pub n: usize,
    pub sigma: usize,
    /// Distribution tag parsed from the instance id ("linear", "skewed",
    /// or "-" when the id carries no tag).
    pub dist: String,
    pub width: usize,
    pub mean_value: f64,
    pub rows: usize,
}

/// Everything a suite run produces.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<SummaryGroup>,
    /// Files that failed to parse, with the reason; non-empty means the
    /// run should exit nonzero after reporting.
    pub skipped: Vec<(PathBuf, String)>,
}

#[derive(Debug)]
pub enum BenchError {
    /// No instance file could be loaded at all.
    NoInstances,
    Io { path: PathBuf, error: io::Error },
    /// A solver partition failed re-validation; the run is aborted.
    ValidationFailed {
        instance: String,
        width: usize,
        violation: String,
    },
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::NoInstances => write!(f, "no instances found"),
            BenchError::Io { path, error } => write!(f, "{}: {error}", path.display()),
            BenchError::ValidationFailed {
                instance,
                width,
                violation,
            } => write!(
                f,
                "partition validation failed for instance {instance} at width {width}: {violation}"
            ),
        }
    }
}

impl std::error::Error for BenchError {}

fn instance_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn distribution_tag(id: &str) -> &'static str {
    if id.contains("skewed") {
        "skewed"
    } else if id.contains("linear") {
        "linear"
    } else {
        "-"
    }
}

/// Expands files and directories into a sorted list of candidate files.
fn collect_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, BenchError> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = std::fs::read_dir(input).map_err(|error| BenchError::Io {
                path: input.clone(),
                error,
            })?;
            let mut dir_files: Vec<PathBuf> = entries
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.is_file())
                .collect();
            dir_files.sort();
            files.extend(dir_files);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

/// Runs every (instance, width, repetition) combination and aggregates
/// group means. Unparseable files are skipped and reported; a partition
/// that fails validation aborts the whole run.
pub fn run_suite(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    assert!(!config.widths.is_empty(), "widths must be non-empty");
    assert!(config.repetitions >= 1, "repetitions must be at least 1");

    let files = collect_files(&config.inputs)?;
    let mut loaded: Vec<(String, Instance)> = Vec::new();
    let mut skipped: Vec<(PathBuf, String)> = Vec::new();
    for path in files {
        match std::fs::read_to_string(&path) {
            Ok(text) => match parse_instance(&text) {
                Ok(inst) => loaded.push((instance_id(&path), inst)),
                Err(err) => skipped.push((path, err.to_string())),
            },
            Err(err) => skipped.push((path, err.to_string())),
        }
    }
    if loaded.is_empty() {
        return Err(BenchError::NoInstances);
    }

    let blocks: Vec<OnceLock<BlockSet>> = (0..loaded.len()).map(|_| OnceLock::new()).collect();
    let tasks = loaded.len() * config.widths.len() * config.repetitions;
    let results: Vec<OnceLock<Result<BenchRow, BenchError>>> =
        (0..tasks).map(|_| OnceLock::new()).collect();

    let run_task = |task: usize| {
        let rep_stride = config.repetitions;
        let width_stride = config.widths.len() * rep_stride;
        let inst_idx = task / width_stride;
        let width = config.widths[(task % width_stride) / rep_stride];
        let (id, inst) = &loaded[inst_idx];
        let block_set = blocks[inst_idx].get_or_init(|| enumerate_blocks(inst));
        let solve_config = SolveConfig {
            deadline: config.time_limit.map(|limit| Instant::now() + limit),
            ..SolveConfig::restricted(width)
        };
        let started = Instant::now();
        let outcome = match build_dd(inst, block_set, &solve_config) {
            Ok(result) => match validate_partition(inst, &result.partition) {
                Ok(()) => Ok(BenchRow {
                    instance: id.clone(),
                    n: inst.n(),
                    sigma: inst.sigma(),
                    width,
                    value: Some(result.value),
                    elapsed_ms: result.stats.elapsed.as_secs_f64() * 1000.0,
                    blocks: result.stats.blocks_count,
                    max_layer: result.stats.max_layer_width,
                    validated: true,
                }),
                Err(violation) => Err(BenchError::ValidationFailed {
                    instance: id.clone(),
                    width,
                    violation: violation.to_string(),
                }),
            },
            Err(SolveError::TimedOut) => Ok(BenchRow {
                instance: id.clone(),
                n: inst.n(),
                sigma: inst.sigma(),
                width,
                value: None,
                elapsed_ms: started.elapsed().as_secs_f64() * 1000.0,
                blocks: block_set.len(),
                max_layer: 0,
                validated: true,
            }),
            Err(SolveError::ResourceLimit { .. }) => {
                unreachable!("bench solves run without a node budget")
            }
        };
        results[task].set(outcome).expect("task ran twice");
    };

    let workers = config.jobs.max(1).min(tasks.max(1));
    if workers <= 1 {
        for task in 0..tasks {
            run_task(task);
        }
    } else {
        let cursor = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let task = cursor.fetch_add(1, Ordering::Relaxed);
                    if task >= tasks {
                        break;
                    }
                    run_task(task);
                });
            }
        });
    }

    let mut rows = Vec::with_capacity(tasks);
    for slot in results {
        rows.push(slot.into_inner().expect("all tasks completed")?);
    }

    let summary = summarize(&rows);
    Ok(BenchReport {
        rows,
        summary,
        skipped,
    })
}

/// Group means over rows that produced a value, keyed by
/// (n, sigma, distribution, width).
pub fn summarize(rows: &[BenchRow]) -> Vec<SummaryGroup> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(usize, usize, String, usize), Vec<usize>> = BTreeMap::new();
    for row in rows {
        if let Some(value) = row.value {
            groups
                .entry((
                    row.n,
                    row.sigma,
                    distribution_tag(&row.instance).to_string(),
                    row.width,
                ))
                .or_default()
                .push(value);
        }
    }
    groups
        .into_iter()
        .map(|((n, sigma, dist, width), values)| SummaryGroup {
            n,
            sigma,
            dist,
            width,
            mean_value: values.iter().sum::<usize>() as f64 / values.len() as f64,
            rows: values.len(),
        })
        .collect()
}

fn csv_row(row: &BenchRow) -> String {
    format!(
        "{},{},{},{},{},{:.3},{},{}",
        row.instance,
        row.n,
        row.sigma,
        row.width,
        row.value.map(|v| v.to_string()).unwrap_or_default(),
        row.elapsed_ms,
        row.blocks,
        row.max_layer
    )
}

/// Writes the rows in the fixed CSV schema.
pub fn write_csv<W: Write + ?Sized>(report: &BenchReport, out: &mut W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in &report.rows {
        writeln!(out, "{}", csv_row(row))?;
    }
    Ok(())
}

fn row_json(row: &BenchRow) -> Value {
    json!({
        "instance": row.instance,
        "n": row.n,
        "sigma": row.sigma,
        "width": row.width,
        "value": row.value,
        "elapsed_ms": row.elapsed_ms,
        "blocks": row.blocks,
        "max_layer": row.max_layer,
        "validated": row.validated,
    })
}

/// JSON form of the whole report: rows, summary groups and generator
/// metadata.
pub fn report_json(report: &BenchReport) -> Value {
    json!({
        "rows": report.rows.iter().map(row_json).collect::<Vec<_>>(),
        "summary": report
            .summary
            .iter()
            .map(|g| {
                json!({
                    "n": g.n,
                    "sigma": g.sigma,
                    "dist": g.dist,
                    "width": g.width,
                    "mean_value": g.mean_value,
                    "rows": g.rows,
                })
            })
            .collect::<Vec<_>>(),
        "generator_rng": GENERATOR_RNG_NAME,
    })
}

pub fn write_json<W: Write + ?Sized>(report: &BenchReport, out: &mut W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, &report_json(report))?;
    writeln!(out)
}
