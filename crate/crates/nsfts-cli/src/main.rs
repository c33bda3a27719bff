//! Command-line front end: manifest-driven benchmarks, adaptive streaming
//! forecasts with checkpointing, and synthetic series generation.
//!
//! Exit codes: 0 on success, 1 on validation errors (bad arguments,
//! unreadable inputs, malformed manifests or checkpoints), 2 when at least
//! one benchmark cell failed at runtime.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nsfts::drift::{generate, load_csv, ColumnSelector, DriftKind, DriftSpec};
use nsfts::error::Error;
use nsfts::fts::FtsParams;
use nsfts::manifest::{Manifest, Overrides};
use nsfts::nsfts::{NsftsModel, NsftsParams};
use nsfts::partition::UniverseMode;
use nsfts::runner::{run_bench, RunOptions};

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(
    name = "nsfts",
    about = "Adaptive fuzzy time series forecasting and drift benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every method x dataset cell of a benchmark manifest and write
    /// report.csv, cells.csv, report.json and per-cell traces.
    Bench(BenchArgs),
    /// Train once on a series, then stream an input file through the
    /// adaptive model, printing one forecast row per observation.
    Forecast(ForecastArgs),
    /// Generate a synthetic concept-drift series as CSV.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark manifest (TOML).
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory; overrides the manifest's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the manifest's default seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for cell execution (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Skip writing per-cell trace files.
    #[arg(long)]
    no_traces: bool,
    #[command(flatten)]
    model_flags: ModelFlags,
}

#[derive(Args)]
struct ModelFlags {
    /// Use the raw activation-weighted sum instead of dividing by the total
    /// activation when defuzzifying.
    #[arg(long)]
    no_normalize: bool,
    /// Feed the residual variance instead of its standard deviation into the
    /// adaptation.
    #[arg(long)]
    sigma_squared: bool,
    /// Estimate universe bounds by scaling each bound by its own magnitude
    /// (requires strictly positive data) instead of padding the data range.
    #[arg(long)]
    paper_exact_universe: bool,
}

#[derive(Args)]
struct ForecastArgs {
    /// Training series (CSV). Mutually exclusive with --resume.
    #[arg(long, conflicts_with = "resume", required_unless_present = "resume")]
    train: Option<PathBuf>,
    /// Resume from a model checkpoint written by --checkpoint.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Observations to stream through the model (CSV).
    #[arg(long)]
    input: PathBuf,
    /// Write the final model state to this file.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Number of fuzzy sets.
    #[arg(long, default_value_t = 35)]
    sets: usize,
    /// Residual window length.
    #[arg(long, default_value_t = 10)]
    residual_window: usize,
    /// Universe padding fraction.
    #[arg(long, default_value_t = 0.2)]
    padding: f64,
    /// Column holding the values, by index or by header name.
    #[arg(long, default_value = "0")]
    column: String,
    /// Input files carry a header row.
    #[arg(long)]
    has_header: bool,
    #[command(flatten)]
    model_flags: ModelFlags,
}

#[derive(Args)]
struct GenerateArgs {
    /// Drift shape: stationary, stationary-blip, sudden-variance,
    /// sudden-mean, sudden-mean-variance, incremental-mean,
    /// incremental-variance, incremental-mean-variance.
    #[arg(long)]
    kind: String,
    /// Series length.
    #[arg(long, default_value_t = 1000)]
    length: usize,
    /// Generator seed.
    #[arg(long)]
    seed: u64,
    /// Baseline mean.
    #[arg(long, default_value_t = 10.0)]
    mean: f64,
    /// Baseline standard deviation.
    #[arg(long, default_value_t = 1.0)]
    stdev: f64,
    /// Drift size: mean shifts in stdev units, variance drifts as a
    /// multiplier (default depends on the kind).
    #[arg(long)]
    magnitude: Option<f64>,
    /// Fraction of the series at which the drift starts.
    #[arg(long, default_value_t = 0.5)]
    onset: f64,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(args) => cmd_bench(args),
        Command::Forecast(args) => cmd_forecast(args),
        Command::Generate(args) => cmd_generate(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, Error> {
    let manifest = Manifest::load(&args.manifest)?;
    let base_dir = args
        .manifest
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let overrides = Overrides {
        seed: args.seed,
        no_normalize: args.model_flags.no_normalize,
        sigma_squared: args.model_flags.sigma_squared,
        paper_exact_universe: args.model_flags.paper_exact_universe,
    };
    let mut plan = manifest.resolve(&base_dir, &overrides)?;
    if let Some(out) = args.out {
        plan.output = out;
    }
    let options = RunOptions {
        workers: args.workers,
        write_traces: !args.no_traces,
    };
    let summary = run_bench(&plan, &options)?;
    for cell in &summary.cells {
        match &cell.outcome {
            Ok(m) => println!(
                "{} / {}: rmse {:.6}  mape% {:.4}  u1 {:.6}  u2 {:.4}  (n={}, skipped={})",
                cell.dataset,
                cell.method,
                m.report.rmse,
                m.report.mape_pct,
                m.report.u1,
                m.report.u2,
                m.report.n,
                m.report.skipped
            ),
            Err(e) => println!("{} / {}: FAILED: {e}", cell.dataset, cell.method),
        }
    }
    println!("reports written to {}", summary.output.display());
    if summary.failed > 0 {
        eprintln!("error: {} cell(s) failed", summary.failed);
        Ok(ExitCode::from(EXIT_RUNTIME))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn parse_column(text: &str) -> ColumnSelector {
    match text.parse::<usize>() {
        Ok(index) => ColumnSelector::Index(index),
        Err(_) => ColumnSelector::Name(text.to_string()),
    }
}

fn cmd_forecast(args: ForecastArgs) -> Result<ExitCode, Error> {
    let column = parse_column(&args.column);
    let mut model = match (&args.train, &args.resume) {
        (Some(train_path), None) => {
            let training = load_csv(train_path, &column, args.has_header)?;
            let params = NsftsParams {
                fts: FtsParams {
                    set_count: args.sets,
                    padding: args.padding,
                    universe_mode: if args.model_flags.paper_exact_universe {
                        UniverseMode::PaperExact
                    } else {
                        UniverseMode::RangePad
                    },
                    normalize: !args.model_flags.no_normalize,
                },
                residual_window: args.residual_window,
                sigma_squared: args.model_flags.sigma_squared,
            };
            NsftsModel::train(&training.values, &params)?
        }
        (None, Some(resume_path)) => {
            let text = std::fs::read_to_string(resume_path).map_err(|source| Error::FileRead {
                path: resume_path.clone(),
                source,
            })?;
            NsftsModel::from_checkpoint(&text)?
        }
        _ => unreachable!("clap enforces exactly one of --train/--resume"),
    };

    // An input with no data rows is a valid (empty) stream.
    let values = match load_csv(&args.input, &column, args.has_header) {
        Ok(dataset) => dataset.values,
        Err(Error::EmptyDataset { .. }) => Vec::new(),
        Err(e) => return Err(e),
    };
    let forecasts = model.run_online(&values)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "t,y,forecast").ok();
    for (t, (y, f)) in values.iter().zip(&forecasts).enumerate() {
        writeln!(out, "{t},{y},{}", f.value).ok();
    }

    if let Some(path) = args.checkpoint {
        let text = model.to_checkpoint()?;
        std::fs::write(&path, text).map_err(|source| Error::FileWrite { path, source })?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_generate(args: GenerateArgs) -> Result<ExitCode, Error> {
    let kind: DriftKind = args.kind.parse()?;
    let mut spec = DriftSpec::new(kind, args.length, args.seed);
    spec.base_mean = args.mean;
    spec.base_stdev = args.stdev;
    if let Some(magnitude) = args.magnitude {
        spec.drift_magnitude = magnitude;
    }
    spec.drift_onset = args.onset;
    let dataset = generate(&spec)?;
    let mut body = String::with_capacity(dataset.values.len() * 20);
    for v in &dataset.values {
        body.push_str(&format!("{v}\n"));
    }
    match args.out {
        Some(path) => {
            std::fs::write(&path, body).map_err(|source| Error::FileWrite { path, source })?
        }
        None => print!("{body}"),
    }
    Ok(ExitCode::SUCCESS)
}
