//! Command-line driver: lazy predictions over a training CSV, plus the
//! benchmark, convergence, and saturation experiments.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use deodata::algorithm::{Algorithm, FittedClassifier};
use deodata::dataset::{load_queries_csv, CategoricalDataset, QueryEntry, TargetColumn};
use deodata::digits::{load_digits_path, DerivationConfig, PixelSelection};
use deodata::harness::{
    run_accuracy_experiment, run_convergence_sweep, run_saturation_check, write_text_file,
    SaturationUniverse,
};
use deodata::impurity::ImpurityMeasure;

/// Fixed default so fresh checkouts reproduce the published numbers.
const DEFAULT_SEED: u64 = 0xDE0_DA7A;

#[derive(Parser)]
#[command(
    name = "deodata",
    version,
    about = "Concurrent data predictors and decision-tree baselines for categorical data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict outcomes for one or more query entries
    Predict(PredictArgs),
    /// Run the accuracy benchmark on digit-derived categorical datasets
    Benchmark(BenchmarkArgs),
    /// Sweep accuracy against the per-outcome training size
    Converge(ConvergeArgs),
    /// Check predictor/tree agreement on a fully enumerated attribute universe
    Saturate(SaturateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct PredictArgs {
    /// Training data CSV
    #[arg(long)]
    train: PathBuf,
    /// Comma-separated query values (repeatable)
    #[arg(long)]
    query: Vec<String>,
    /// CSV file of query rows, one query per record
    #[arg(long)]
    query_file: Option<PathBuf>,
    /// Algorithm id, e.g. deodata_tbreak_delanga or decision_tree_id3
    #[arg(long, default_value = "deodata_tbreak_delanga")]
    algo: String,
    /// Impurity measure for the varsate family
    #[arg(long, default_value = "entropy")]
    impurity: String,
    /// Exponent base for the rasturnat family
    #[arg(long, default_value_t = 2.0)]
    base: f64,
    /// Enable the tie-break descent for plain deodata_delanga
    #[arg(long)]
    tie_break: bool,
    /// Target column of the training CSV: "last" or a 0-based index
    #[arg(long, default_value = "last")]
    target: String,
    /// Treat the first training record as a header
    #[arg(long)]
    header: bool,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Seed for the randomized baselines
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write records here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Raw digits CSV: 64 intensities 0-16 plus a label per row
    #[arg(long, default_value = "data/digits.csv")]
    digits: PathBuf,
    /// Digit labels kept in the experiment
    #[arg(long, default_value = "0,1,2,3", value_delimiter = ',')]
    outcomes: Vec<String>,
    /// Downscaled image side length
    #[arg(long, default_value_t = 6)]
    resolution: usize,
    /// Number of random pixels used as attributes
    #[arg(long, default_value_t = 6)]
    pixels: usize,
    /// Explicit flat pixel indices (overrides --pixels)
    #[arg(long, value_delimiter = ',')]
    pixel_indices: Vec<usize>,
    /// Intensity quantization levels
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Training rows drawn per outcome
    #[arg(long, default_value_t = 6)]
    per_outcome: usize,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Algorithm ids to run (default: the standard benchmark set)
    #[arg(long, value_delimiter = ',')]
    algos: Vec<String>,
    /// Run trials one at a time instead of in parallel
    #[arg(long)]
    sequential: bool,
    /// Base path of the result files
    #[arg(long, default_value = "benchmark_results")]
    out: PathBuf,
    /// Write only this format (default: both csv and json)
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Raw digits CSV: 64 intensities 0-16 plus a label per row
    #[arg(long, default_value = "data/digits.csv")]
    digits: PathBuf,
    /// Digit labels kept in the experiment
    #[arg(long, default_value = "0,1,7", value_delimiter = ',')]
    outcomes: Vec<String>,
    /// Downscaled image side length
    #[arg(long, default_value_t = 6)]
    resolution: usize,
    /// Number of random pixels used as attributes
    #[arg(long, default_value_t = 4)]
    pixels: usize,
    /// Explicit flat pixel indices (overrides --pixels)
    #[arg(long, value_delimiter = ',')]
    pixel_indices: Vec<usize>,
    /// Intensity quantization levels (2 = on/off pixels)
    #[arg(long, default_value_t = 2)]
    levels: usize,
    /// Per-outcome training sizes, strictly increasing
    #[arg(long, default_value = "1,2,4,8,16,32,64", value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 120)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Algorithm ids to run (default: the standard benchmark set)
    #[arg(long, value_delimiter = ',')]
    algos: Vec<String>,
    /// Run trials one at a time instead of in parallel
    #[arg(long)]
    sequential: bool,
    /// Base path of the result files
    #[arg(long, default_value = "convergence_results")]
    out: PathBuf,
    /// Write only this format (default: both csv and json)
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Args)]
struct SaturateArgs {
    /// Attribute cardinalities, e.g. 2,2,2
    #[arg(long, default_value = "2,2,2", value_delimiter = ',')]
    attrs: Vec<usize>,
    /// Number of distinct outcome symbols
    #[arg(long, default_value_t = 3)]
    outcome_count: usize,
    /// Probability mass on each combination's mode outcome (1 = point mass)
    #[arg(long, default_value_t = 1.0)]
    mode_mass: f64,
    /// Training replications per combination
    #[arg(long, default_value_t = 1)]
    replication: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "saturation_results")]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Predict(args) => cmd_predict(args),
        Command::Benchmark(args) => cmd_benchmark(args),
        Command::Converge(args) => cmd_converge(args),
        Command::Saturate(args) => cmd_saturate(args),
    }
}

/// Maps the family names plus parameter flags onto a concrete algorithm.
fn resolve_algorithm(args: &PredictArgs) -> Result<Algorithm> {
    let algorithm = match args.algo.as_str() {
        "deodata_delanga" => {
            if args.tie_break {
                Algorithm::DeodataTbreakDelanga
            } else {
                Algorithm::DeodataDelanga
            }
        }
        "deodata_varsate" => {
            Algorithm::DeodataVarsate(args.impurity.parse::<ImpurityMeasure>()?)
        }
        "deodata_rasturnat" => Algorithm::DeodataRasturnat(args.base),
        id => Algorithm::parse(id)?,
    };
    if let Algorithm::DeodataRasturnat(base) = algorithm {
        if !(base > 1.0) || !base.is_finite() {
            bail!("exponent base must be a finite number > 1, got {base}");
        }
    }
    Ok(algorithm)
}

fn parse_target(text: &str) -> Result<TargetColumn> {
    if text == "last" {
        return Ok(TargetColumn::Last);
    }
    let index: usize = text
        .parse()
        .with_context(|| format!("target must be \"last\" or a column index, got {text:?}"))?;
    Ok(TargetColumn::Index(index))
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let train = CategoricalDataset::load_csv_path(&args.train, parse_target(&args.target)?, args.header)
        .with_context(|| format!("loading training data from {}", args.train.display()))?;

    let mut queries: Vec<QueryEntry> = args
        .query
        .iter()
        .map(|q| QueryEntry::from_comma_list(q))
        .collect();
    if let Some(path) = &args.query_file {
        let file = std::fs::File::open(path)
            .with_context(|| format!("opening query file {}", path.display()))?;
        queries.extend(load_queries_csv(file, false)?);
    }
    if queries.is_empty() {
        bail!("no queries given; use --query or --query-file");
    }

    let algorithm = resolve_algorithm(&args)?;
    let mut rng = deodata::seeded_rng(args.seed);
    let fitted = FittedClassifier::fit(&algorithm, &train, &mut rng);

    let mut lines = Vec::new();
    for query in &queries {
        let data = fitted.predict(query, &mut rng)?;
        let line = match args.format {
            Some(OutputFormat::Json) => serde_json::json!({
                "prediction": data.prediction(),
                "likelihoods": data.entries,
                "tie_broken": data.tie_broken,
                "selected_level": data.selected_level,
            })
            .to_string(),
            _ => {
                let pairs: Vec<String> = data
                    .entries
                    .iter()
                    .map(|(outcome, score)| format!("{outcome}:{score}"))
                    .collect();
                format!(
                    "{}\t{}\ttie_broken={}\tlevel={}",
                    data.prediction(),
                    pairs.join(","),
                    data.tie_broken,
                    data.selected_level
                )
            }
        };
        lines.push(line);
    }

    let text = lines.join("\n") + "\n";
    match &args.out {
        Some(path) => write_text_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn benchmark_config(args: &BenchmarkArgs) -> DerivationConfig {
    let pixels = if args.pixel_indices.is_empty() {
        PixelSelection::Random { count: args.pixels }
    } else {
        PixelSelection::Fixed(args.pixel_indices.clone())
    };
    DerivationConfig {
        target_resolution: args.resolution,
        pixels,
        intensity_levels: args.levels,
        selected_outcomes: args.outcomes.clone(),
        per_outcome_train_count: args.per_outcome,
        trials: args.trials,
        seed: args.seed,
    }
}

fn benchmark_algorithms(ids: &[String]) -> Result<Vec<Algorithm>> {
    if ids.is_empty() {
        return Ok(Algorithm::benchmark_set());
    }
    ids.iter()
        .map(|id| Ok(Algorithm::parse(id)?))
        .collect()
}

/// Writes `<base>.csv` / `<base>.json` according to the format choice.
fn write_results(
    out: &Path,
    format: Option<OutputFormat>,
    csv_text: &str,
    json_text: &str,
) -> Result<()> {
    let write_csv = !matches!(format, Some(OutputFormat::Json));
    let write_json = !matches!(format, Some(OutputFormat::Csv));
    if write_csv {
        let path = out.with_extension("csv");
        write_text_file(&path, csv_text)?;
        eprintln!("wrote {}", path.display());
    }
    if write_json {
        let path = out.with_extension("json");
        write_text_file(&path, json_text)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<()> {
    let raw = load_digits_path(&args.digits)
        .with_context(|| format!("loading digits from {}", args.digits.display()))?;
    let config = benchmark_config(&args);
    let algorithms = benchmark_algorithms(&args.algos)?;
    let result = run_accuracy_experiment(&raw, &config, &algorithms, !args.sequential)?;
    print!("{}", result.render_table());
    write_results(
        &args.out,
        args.format,
        &result.to_csv_string()?,
        &result.to_json_string()?,
    )
}

fn cmd_converge(args: ConvergeArgs) -> Result<()> {
    let raw = load_digits_path(&args.digits)
        .with_context(|| format!("loading digits from {}", args.digits.display()))?;
    let pixels = if args.pixel_indices.is_empty() {
        PixelSelection::Random { count: args.pixels }
    } else {
        PixelSelection::Fixed(args.pixel_indices.clone())
    };
    let config = DerivationConfig {
        target_resolution: args.resolution,
        pixels,
        intensity_levels: args.levels,
        selected_outcomes: args.outcomes.clone(),
        // overwritten per size row
        per_outcome_train_count: 1,
        trials: args.trials,
        seed: args.seed,
    };
    let algorithms = benchmark_algorithms(&args.algos)?;
    let result = run_convergence_sweep(&raw, &config, &args.sizes, &algorithms, !args.sequential)?;
    print!("{}", result.render_table());
    write_results(
        &args.out,
        args.format,
        &result.to_csv_string()?,
        &result.to_json_string()?,
    )
}

fn cmd_saturate(args: SaturateArgs) -> Result<()> {
    let outcomes: Vec<String> = (0..args.outcome_count).map(|i| format!("t{i}")).collect();
    let universe = SaturationUniverse::with_round_robin_modes(&args.attrs, &outcomes, args.mode_mass)?;
    let mut rng = deodata::seeded_rng(args.seed);
    let report = run_saturation_check(&universe, args.replication, &mut rng)?;
    print!("{}", report.render_table());
    write_results(
        &args.out,
        args.format,
        &report.to_csv_string()?,
        &report.to_json_string()?,
    )
}
