//! Command-line front end for the `mixhp` library: simulate labeled
//! datasets, fit mixture models with the mle/spl/aspl strategies, score
//! models on held-out data, and run seeded benchmark comparisons.
//!
//! Exit codes are a stable contract: 0 on success, 1 for data or model
//! errors (unreadable files, malformed records, invalid parameters), 2 for
//! usage errors (bad flags or flag combinations).

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixhp::evaluate::{assign_clusters, benchmark, purity, test_loglik, BenchmarkConfig};
use mixhp::learn::{fit_with_strategy, AsplConfig, FitStrategy};
use mixhp::simulate::{simulate_mixture, SimConfig};
use mixhp::{AugmentMethod, EventSequence, MixtureModel};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "mixhp", version, about = "Mixtures of Hawkes processes: simulate, fit, evaluate, benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a labeled synthetic dataset from a preset or a model file.
    Simulate(SimulateArgs),
    /// Fit a mixture model to a dataset.
    Fit(FitArgs),
    /// Score a fitted model on a dataset.
    Evaluate(EvaluateArgs),
    /// Compare fitting strategies over seeded train/test trials.
    Benchmark(BenchmarkArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Generator preset (one of: k2c2, k3c5). Exactly one of --preset/--model.
    #[arg(long)]
    preset: Option<String>,
    /// Model file to draw from instead of a preset.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Number of sequences (defaults to the preset's size).
    #[arg(long)]
    n: Option<usize>,
    /// Observation window length (defaults to the preset's horizon).
    #[arg(long)]
    horizon: Option<f64>,
    /// RNG seed (defaults to the preset's seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Output JSONL path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Training dataset (JSONL).
    #[arg(long)]
    data: PathBuf,
    /// Fitting strategy.
    #[arg(long, value_parser = FitStrategy::from_str)]
    strategy: FitStrategy,
    /// Candidate generator for the adversarial loop (required iff --strategy aspl).
    #[arg(long, value_parser = parse_augment)]
    augment: Option<AugmentMethod>,
    /// Number of mixture components.
    #[arg(long)]
    k: usize,
    /// Exponential kernel decay rate (shared across components).
    #[arg(long)]
    beta: f64,
    /// Easiness regularizer weight for the adversarial loop.
    #[arg(long, default_value_t = 10.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output model file (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Optional fit report (JSON) with per-round diagnostics.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Metric {
    Loglike,
    Purity,
    Both,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Fitted model file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Dataset to score (JSONL).
    #[arg(long)]
    data: PathBuf,
    /// Which metric(s) to print. Purity needs a labeled dataset.
    #[arg(long, value_enum, default_value_t = Metric::Loglike)]
    metric: Metric,
    /// Optional CSV output (metric,value rows).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Generator preset for the dataset. Exactly one of --preset/--data.
    #[arg(long)]
    preset: Option<String>,
    /// Labeled dataset file instead of a preset.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Comma-separated strategies to compare.
    #[arg(long, value_delimiter = ',', value_parser = FitStrategy::from_str, default_value = "mle,spl,aspl")]
    methods: Vec<FitStrategy>,
    /// Number of mixture components (defaults to the preset's; required with --data).
    #[arg(long)]
    k: Option<usize>,
    /// Kernel decay (defaults to the preset's; required with --data).
    #[arg(long)]
    beta: Option<f64>,
    /// Easiness regularizer weight for the aspl rows.
    #[arg(long, default_value_t = 10.0)]
    alpha: f64,
    /// Candidate generator for the aspl rows.
    #[arg(long, value_parser = parse_augment, default_value = "superpose")]
    augment: AugmentMethod,
    /// Fraction of each trial's data used for training.
    #[arg(long, default_value_t = 0.5)]
    train_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path (aggregate rows; a table is printed either way).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_augment(s: &str) -> Result<AugmentMethod, String> {
    match s {
        "superpose" => Ok(AugmentMethod::Superpose),
        "stitch" => Ok(AugmentMethod::Stitch),
        other => Err(format!("unknown augment method `{other}` (expected superpose or stitch)")),
    }
}

/// Flag-combination violation: print like clap and exit 2.
fn usage_error(msg: &str) -> ! {
    eprintln!("error: {msg}\n\nFor more information, try '--help'.");
    std::process::exit(2);
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Fit(args) => run_fit(args),
        Command::Evaluate(args) => run_evaluate(args),
        Command::Benchmark(args) => run_benchmark(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run_simulate(args: SimulateArgs) -> mixhp::Result<()> {
    let base = match (&args.preset, &args.model) {
        (Some(name), None) => mixhp::io::preset(name)?,
        (None, Some(path)) => {
            let (model, _meta) = mixhp::io::read_model(path)?;
            SimConfig {
                model,
                n_sequences: 0, // overridden below; 0 forces the flag check
                horizon: 0.0,
                seed: 7,
                max_events: 1_000_000,
            }
        }
        _ => usage_error("simulate needs exactly one of --preset or --model"),
    };
    let n = match (args.n, args.preset.is_some()) {
        (Some(n), _) => n,
        (None, true) => base.n_sequences,
        (None, false) => usage_error("--n is required when simulating from --model"),
    };
    let horizon = match (args.horizon, args.preset.is_some()) {
        (Some(h), _) => h,
        (None, true) => base.horizon,
        (None, false) => usage_error("--horizon is required when simulating from --model"),
    };
    let seed = args.seed.unwrap_or(base.seed);

    if n == 0 {
        // Zero sequences is a legal request; the generator itself insists on
        // at least one, so write the empty dataset directly.
        mixhp::io::write_sequences(&args.out, &[], Some(&[]))?;
        println!("wrote 0 sequences to {}", args.out.display());
        return Ok(());
    }
    let config = SimConfig {
        n_sequences: n,
        horizon,
        seed,
        ..base
    };
    let data = simulate_mixture(&config)?;
    mixhp::io::write_sequences(&args.out, &data.sequences, Some(&data.labels))?;
    println!("wrote {} sequences to {}", data.sequences.len(), args.out.display());
    Ok(())
}

fn run_fit(args: FitArgs) -> mixhp::Result<()> {
    match (args.strategy, args.augment) {
        (FitStrategy::Aspl, None) => {
            usage_error("--strategy aspl requires --augment (superpose or stitch)")
        }
        (FitStrategy::Mle | FitStrategy::Spl, Some(_)) => {
            usage_error("--augment only applies to --strategy aspl")
        }
        _ => {}
    }
    let (sequences, _labels) = mixhp::io::read_sequences(&args.data, None)?;
    let mut cfg = AsplConfig::new(args.k, args.beta);
    cfg.alpha = args.alpha;
    cfg.seed = args.seed;
    if let Some(augment) = args.augment {
        cfg.augment = augment;
    }
    let (model, report) = fit_with_strategy(&sequences, args.strategy, &cfg)?;
    if !report.converged {
        log::warn!("fit stopped on an iteration cap, not convergence; the report records this");
    }
    let meta = serde_json::json!({
        "strategy": args.strategy.to_string(),
        "k": args.k,
        "beta": args.beta,
        "alpha": args.alpha,
        "augment": args.augment.map(|a| a.to_string()),
        "seed": args.seed,
        "data": args.data.display().to_string(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    mixhp::io::write_model(&args.out, &model, Some(meta))?;
    if let Some(report_path) = &args.report {
        let body = serde_json::to_string_pretty(&report).map_err(mixhp::Error::from)?;
        std::fs::write(report_path, body + "\n")?;
    }
    println!(
        "fitted {} model (K={}) on {} sequences -> {}{}",
        args.strategy,
        args.k,
        sequences.len(),
        args.out.display(),
        if report.converged { "" } else { " (hit iteration cap)" },
    );
    Ok(())
}

fn run_evaluate(args: EvaluateArgs) -> mixhp::Result<()> {
    let (model, _meta) = mixhp::io::read_model(&args.model)?;
    let (sequences, labels) = mixhp::io::read_sequences(&args.data, Some(model.num_types()))?;
    let mut lines = Vec::new();
    if matches!(args.metric, Metric::Loglike | Metric::Both) {
        let score = test_loglik(&model, &sequences)?;
        lines.push(("loglike", score.value));
    }
    if matches!(args.metric, Metric::Purity | Metric::Both) {
        let labels = labels.ok_or_else(|| {
            mixhp::Error::InvalidParams(format!(
                "purity needs labels, but {} has none",
                args.data.display()
            ))
        })?;
        let assignment = assign_clusters(&model, &sequences)?;
        lines.push(("purity", purity(&assignment, &labels)?));
    }
    for (name, value) in &lines {
        println!("{name} {value}");
    }
    if let Some(out) = &args.out {
        let mut csv = String::from("metric,value\n");
        for (name, value) in &lines {
            csv.push_str(&format!("{name},{value}\n"));
        }
        std::fs::write(out, csv)?;
    }
    Ok(())
}

fn run_benchmark(args: BenchmarkArgs) -> mixhp::Result<()> {
    let (sequences, labels, model_hint): (Vec<EventSequence>, Vec<usize>, Option<MixtureModel>) =
        match (&args.preset, &args.data) {
            (Some(name), None) => {
                let mut config = mixhp::io::preset(name)?;
                config.seed = args.seed;
                let data = simulate_mixture(&config)?;
                (data.sequences, data.labels, Some(config.model))
            }
            (None, Some(path)) => {
                let (sequences, labels) = mixhp::io::read_sequences(path, None)?;
                let labels = labels.ok_or_else(|| {
                    mixhp::Error::InvalidParams(format!(
                        "benchmark needs a labeled dataset, but {} has no labels",
                        path.display()
                    ))
                })?;
                (sequences, labels, None)
            }
            _ => usage_error("benchmark needs exactly one of --preset or --data"),
        };

    let k = match (args.k, &model_hint) {
        (Some(k), _) => k,
        (None, Some(model)) => model.num_components(),
        (None, None) => usage_error("--k is required with --data"),
    };
    let beta = match (args.beta, &model_hint) {
        (Some(b), _) => b,
        (None, Some(model)) => model.components[0].decay,
        (None, None) => usage_error("--beta is required with --data"),
    };

    let mut fit = AsplConfig::new(k, beta);
    fit.alpha = args.alpha;
    fit.augment = args.augment;
    let cfg = BenchmarkConfig {
        strategies: args.methods.clone(),
        trials: args.trials,
        train_fraction: args.train_fraction,
        fit,
        seed: args.seed,
    };
    let report = benchmark(&sequences, &labels, &cfg)?;
    print!("{}", mixhp::io::benchmark_table(&report));
    if let Some(out) = &args.out {
        std::fs::write(out, mixhp::io::benchmark_csv(&report))?;
    }
    Ok(())
}
