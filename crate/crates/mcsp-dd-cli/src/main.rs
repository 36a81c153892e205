//! Command-line front end for the decision-diagram MCSP solver.
//!
//! Subcommands: `solve` (exact or width-restricted diagram), `generate`
//! (seeded random instances), `oracle` (exhaustive reference solver) and
//! `bench` (batch runs with CSV/JSON output).
//!
//! Exit codes: 0 success, 2 bad input or flags, 3 solver resource limit,
//! 4 oracle budget exhausted. `MCSP_DD_LOG=info|debug` enables progress
//! diagnostics on stderr.

use clap::{Parser, Subcommand, ValueEnum};
use mcsp_dd::bench::{run_suite, write_csv, write_json, BenchConfig, BenchError, OutputFormat};
use mcsp_dd::{
    brute_force, build_dd, enumerate_blocks, generate_instance, parse_instance, Distribution,
    GeneratorConfig, Instance, OracleError, SolveConfig, MAX_ALPHABET_SIZE,
};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Duration;

const EXIT_OK: u8 = 0;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_RESOURCE_LIMIT: u8 = 3;
const EXIT_ORACLE_BUDGET: u8 = 4;

fn log_level() -> u8 {
    static LEVEL: OnceLock<u8> = OnceLock::new();
    *LEVEL.get_or_init(|| match std::env::var("MCSP_DD_LOG").as_deref() {
        Ok("debug") => 2,
        Ok("info") => 1,
        _ => 0,
    })
}

fn log_info(msg: impl FnOnce() -> String) {
    if log_level() >= 1 {
        eprintln!("[mcsp-dd] {}", msg());
    }
}

fn log_debug(msg: impl FnOnce() -> String) {
    if log_level() >= 2 {
        eprintln!("[mcsp-dd] {}", msg());
    }
}

#[derive(Parser)]
#[command(name = "mcsp-dd", version, about = "Minimum common string partition solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug)]
struct Width(Option<usize>);

fn parse_width(s: &str) -> Result<Width, String> {
    if s == "exact" {
        return Ok(Width(None));
    }
    match s.parse::<usize>() {
        Ok(w) if w >= 1 => Ok(Width(Some(w))),
        _ => Err(format!("expected a positive integer or \"exact\", got {s:?}")),
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistArg {
    Linear,
    Skewed,
}

impl From<DistArg> for Distribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Linear => Distribution::Linear,
            DistArg::Skewed => Distribution::Skewed,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and print the partition size.
    Solve {
        /// Instance file: two lines, one string per line.
        path: PathBuf,
        /// Layer width bound, or "exact" for the unrestricted diagram.
        #[arg(long, default_value = "exact", value_parser = parse_width)]
        width: Width,
        /// Print the full result (value, partition, stats) as JSON.
        #[arg(long)]
        json: bool,
        /// Collect per-layer construction statistics.
        #[arg(long)]
        stats: bool,
        /// Fail with exit code 3 after creating this many nodes.
        #[arg(long)]
        node_budget: Option<usize>,
        /// Human-readable output instead of the bare value.
        #[arg(long)]
        pretty: bool,
    },
    /// Write a random related-pair instance file.
    Generate {
        /// String length.
        #[arg(long)]
        n: usize,
        /// Alphabet size.
        #[arg(long)]
        sigma: usize,
        /// Symbol distribution.
        #[arg(long, value_enum, default_value_t = DistArg::Linear)]
        dist: DistArg,
        /// Generator seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve a small instance exhaustively (reference solver).
    Oracle {
        path: PathBuf,
        /// Fail with exit code 4 after exploring this many search nodes.
        #[arg(long)]
        node_budget: Option<usize>,
        /// Print the full result as JSON.
        #[arg(long)]
        json: bool,
        /// Human-readable output instead of the bare value.
        #[arg(long)]
        pretty: bool,
    },
    /// Run solver configurations over instance files and emit a table.
    Bench {
        /// Instance files or directories.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Comma-separated layer width bounds.
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        widths: Vec<usize>,
        /// Worker threads across instances.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Solves per (instance, width) pair.
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        /// Per-solve time limit in seconds; expired solves get an empty value.
        #[arg(long)]
        time_limit: Option<f64>,
    },
}

fn read_instance(path: &PathBuf) -> Result<Instance, u8> {
    let text = std::fs::read_to_string(path).map_err(|err| {
        eprintln!("error: {}: {err}", path.display());
        EXIT_BAD_INPUT
    })?;
    parse_instance(&text).map_err(|err| {
        eprintln!("error: {}: {err}", path.display());
        EXIT_BAD_INPUT
    })
}

fn cmd_solve(
    path: PathBuf,
    width: Width,
    json: bool,
    stats: bool,
    node_budget: Option<usize>,
    pretty: bool,
) -> u8 {
    let instance = match read_instance(&path) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    let blocks = enumerate_blocks(&instance);
    log_info(|| {
        format!(
            "solving {} (n={}, {} blocks, width={:?})",
            path.display(),
            instance.n(),
            blocks.len(),
            width.0
        )
    });
    let config = SolveConfig {
        width: width.0,
        collect_stats: stats,
        node_budget,
        deadline: None,
    };
    let result = match build_dd(&instance, &blocks, &config) {
        Ok(result) => result,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_RESOURCE_LIMIT;
        }
    };
    log_debug(|| {
        format!(
            "layers={} max_width={} nodes={} elapsed={:?}",
            result.stats.layers,
            result.stats.max_layer_width,
            result.stats.nodes_created,
            result.stats.elapsed
        )
    });
    if json {
        println!("{}", result.to_json());
    } else if pretty {
        println!("value: {}", result.value);
        for piece in &result.partition.pieces {
            let text = &instance.s1()[piece.start1..piece.end1()];
            println!(
                "  {}  s1[{}..{}]  s2[{}..{}]",
                String::from_utf8_lossy(text),
                piece.start1,
                piece.end1(),
                piece.start2,
                piece.end2()
            );
        }
    } else {
        println!("{}", result.value);
    }
    if stats && !json {
        eprintln!(
            "stats: layers={} max_layer_width={} nodes_created={} blocks={} elapsed_ms={:.3}",
            result.stats.layers,
            result.stats.max_layer_width,
            result.stats.nodes_created,
            result.stats.blocks_count,
            result.stats.elapsed.as_secs_f64() * 1000.0
        );
    }
    EXIT_OK
}

fn cmd_generate(
    n: usize,
    sigma: usize,
    dist: DistArg,
    seed: u64,
    output: Option<PathBuf>,
) -> u8 {
    if n < 1 {
        eprintln!("error: --n must be at least 1");
        return EXIT_BAD_INPUT;
    }
    if !(1..=MAX_ALPHABET_SIZE).contains(&sigma) {
        eprintln!("error: --sigma must be in 1..={MAX_ALPHABET_SIZE}");
        return EXIT_BAD_INPUT;
    }
    let instance = generate_instance(&GeneratorConfig {
        n,
        alphabet_size: sigma,
        distribution: dist.into(),
        seed,
    });
    let text = instance.to_text();
    match output {
        Some(path) => {
            if let Err(err) = std::fs::write(&path, &text) {
                eprintln!("error: {}: {err}", path.display());
                return EXIT_BAD_INPUT;
            }
            log_info(|| format!("wrote {} (n={n}, sigma={sigma}, seed={seed})", path.display()));
        }
        None => print!("{text}"),
    }
    EXIT_OK
}

fn cmd_oracle(path: PathBuf, node_budget: Option<usize>, json: bool, pretty: bool) -> u8 {
    let instance = match read_instance(&path) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    let result = match brute_force(&instance, node_budget) {
        Ok(result) => result,
        Err(err @ OracleError::BudgetExceeded { .. }) => {
            eprintln!("error: {err}");
            return EXIT_ORACLE_BUDGET;
        }
    };
    if json {
        println!("{}", result.to_json(instance.n()));
    } else if pretty {
        println!("value: {}", result.value);
        println!("nodes explored: {}", result.nodes_explored);
        for piece in &result.partition.pieces {
            let text = &instance.s1()[piece.start1..piece.end1()];
            println!(
                "  {}  s1[{}..{}]  s2[{}..{}]",
                String::from_utf8_lossy(text),
                piece.start1,
                piece.end1(),
                piece.start2,
                piece.end2()
            );
        }
    } else {
        println!("{}", result.value);
    }
    EXIT_OK
}

fn cmd_bench(
    paths: Vec<PathBuf>,
    widths: Vec<usize>,
    jobs: usize,
    format: FormatArg,
    output: Option<PathBuf>,
    repetitions: usize,
    time_limit: Option<f64>,
) -> u8 {
    if widths.is_empty() || widths.iter().any(|&w| w < 1) {
        eprintln!("error: --widths must be a non-empty list of positive integers");
        return EXIT_BAD_INPUT;
    }
    if repetitions < 1 {
        eprintln!("error: --repetitions must be at least 1");
        return EXIT_BAD_INPUT;
    }
    let config = BenchConfig {
        inputs: paths,
        widths,
        repetitions,
        time_limit: time_limit.map(Duration::from_secs_f64),
        format: match format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        },
        jobs: jobs.max(1),
    };
    log_info(|| format!("bench: widths={:?} jobs={}", config.widths, config.jobs));
    let report = match run_suite(&config) {
        Ok(report) => report,
        Err(err @ (BenchError::NoInstances | BenchError::Io { .. })) => {
            eprintln!("error: {err}");
            return EXIT_BAD_INPUT;
        }
        Err(err @ BenchError::ValidationFailed { .. }) => {
            eprintln!("error: {err}");
            return 1;
        }
    };

    let write_report = |out: &mut dyn Write| match config.format {
        OutputFormat::Csv => write_csv(&report, out),
        OutputFormat::Json => write_json(&report, out),
    };
    let written = match &output {
        Some(path) => std::fs::File::create(path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
            .and_then(|mut f| write_report(&mut f)),
        None => write_report(&mut std::io::stdout().lock()),
    };
    if let Err(err) = written {
        eprintln!("error: {err}");
        return EXIT_BAD_INPUT;
    }

    if matches!(config.format, OutputFormat::Csv) {
        for group in &report.summary {
            eprintln!(
                "summary: n={} sigma={} dist={} width={} mean_value={:.3} rows={}",
                group.n, group.sigma, group.dist, group.width, group.mean_value, group.rows
            );
        }
    }
    for (path, reason) in &report.skipped {
        eprintln!("skipped: {}: {reason}", path.display());
    }
    if report.skipped.is_empty() {
        EXIT_OK
    } else {
        EXIT_BAD_INPUT
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve {
            path,
            width,
            json,
            stats,
            node_budget,
            pretty,
        } => cmd_solve(path, width, json, stats, node_budget, pretty),
        Command::Generate {
            n,
            sigma,
            dist,
            seed,
            output,
        } => cmd_generate(n, sigma, dist, seed, output),
        Command::Oracle {
            path,
            node_budget,
            json,
            pretty,
        } => cmd_oracle(path, node_budget, json, pretty),
        Command::Bench {
            paths,
            widths,
            jobs,
            format,
            output,
            repetitions,
            time_limit,
        } => cmd_bench(paths, widths, jobs, format, output, repetitions, time_limit),
    };
    ExitCode::from(code)
}
