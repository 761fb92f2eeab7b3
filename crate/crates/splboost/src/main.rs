use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use splboost::data::{inject_noise, load_csv, synth_gaussian, write_csv, LabelColumn, NoiseSpec};
use splboost::experiment::{
    default_lambda_grid, rank_table, run_study, AlgorithmSpec, ExperimentSpec, NamedDataset, Protocol,
    DEFAULT_NOISE_LEVELS, DEFAULT_REPETITIONS, DEFAULT_ROUNDS_MAX,
};
use splboost::report;
use splboost_core::boost::{DEFAULT_WARM_LAMBDA, DEFAULT_WARM_ROUNDS};
use splboost_core::diagnostics::{
    loss_curve, margin_grid, objective_trajectory, rejected_samples, weight_curve, DEFAULT_GRID_LIMIT,
    DEFAULT_GRID_POINTS,
};
use splboost_core::{train, BoostConfig, SpRegularizer};

#[derive(Parser)]
#[command(name = "splboost", version, about = "AdaBoost with self-paced sample reweighting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model and write model.json and trace.tsv.
    Train(TrainArgs),
    /// Run the repeated noisy-label protocol and write records, summary and ranks.
    Study(StudyArgs),
    /// Write effective sample-weight and latent-loss curves as TSV.
    Curves(CurveArgs),
    /// Generate the two-Gaussian synthetic dataset as CSV.
    Synth(SynthArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Algo {
    Adaboost,
    Splboost,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Reg {
    Hard,
    Linear,
    Mixture,
    Polynomial,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Column holding the class label: zero-based index or header name.
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    label_column: String,
    /// Label value mapped to +1.
    #[arg(long, default_value = "1")]
    positive_label: String,
}

#[derive(Args, Clone)]
struct RegArgs {
    /// Mixture weighting gamma.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Polynomial soft weighting exponent t (> 1).
    #[arg(long = "t-param", default_value_t = 1.3)]
    t_param: f64,
}

#[derive(Args, Clone)]
struct BoostArgs {
    #[arg(long, default_value_t = DEFAULT_WARM_ROUNDS)]
    warm_rounds: usize,
    #[arg(long, default_value_t = DEFAULT_WARM_LAMBDA)]
    warm_lambda: f64,
    #[arg(long, default_value_t = 3)]
    max_depth: usize,
}

#[derive(Args)]
struct TrainArgs {
    /// CSV file, or `synth` for the synthetic Gaussian set.
    #[arg(long)]
    data: String,
    #[command(flatten)]
    data_args: DataArgs,
    #[arg(long, value_enum, default_value = "splboost")]
    algo: Algo,
    #[arg(long, value_enum, default_value = "hard")]
    regularizer: Reg,
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    #[command(flatten)]
    reg_args: RegArgs,
    #[arg(long, default_value_t = DEFAULT_ROUNDS_MAX)]
    rounds: usize,
    #[command(flatten)]
    boost: BoostArgs,
    /// Fraction of training labels to flip before training.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StudyArgs {
    /// CSV files and/or `synth`; repeat or comma-separate.
    #[arg(long, value_delimiter = ',', required = true)]
    data: Vec<String>,
    #[command(flatten)]
    data_args: DataArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["adaboost", "splboost"])]
    algo: Vec<Algo>,
    /// Regularizers to run for splboost.
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["hard"])]
    regularizer: Vec<Reg>,
    #[command(flatten)]
    reg_args: RegArgs,
    #[arg(long, value_delimiter = ',')]
    noise_levels: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    reps: usize,
    #[arg(long, default_value_t = 5)]
    cv_folds: usize,
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    /// Maximum number of rounds considered by cross-validation.
    #[arg(long, default_value_t = DEFAULT_ROUNDS_MAX)]
    rounds: usize,
    #[command(flatten)]
    boost: BoostArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Store wall-clock time per record (output is then not byte-reproducible).
    #[arg(long)]
    record_time: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["hard", "linear", "polynomial"])]
    regularizer: Vec<Reg>,
    #[arg(long, value_delimiter = ',', default_values = ["3"])]
    lambda: Vec<f64>,
    #[command(flatten)]
    reg_args: RegArgs,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
    #[arg(long, default_value_t = DEFAULT_GRID_LIMIT)]
    grid_limit: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    n_per_class: usize,
    /// Fraction of each class whose label is reversed.
    #[arg(long, default_value_t = 0.15)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the flipped row indices to this file.
    #[arg(long)]
    flipped_out: Option<PathBuf>,
}

fn regularizer(reg: Reg, lambda: f64, args: &RegArgs) -> Result<SpRegularizer> {
    Ok(match reg {
        Reg::Hard => SpRegularizer::hard(lambda)?,
        Reg::Linear => SpRegularizer::linear_soft(lambda)?,
        Reg::Mixture => SpRegularizer::mixture(lambda, args.gamma)?,
        Reg::Polynomial => SpRegularizer::polynomial_soft(lambda, args.t_param)?,
    })
}

fn reg_label(reg: &SpRegularizer) -> String {
    match reg.kind() {
        splboost_core::RegularizerKind::Mixture { gamma } => format!("mixture-g{gamma}"),
        splboost_core::RegularizerKind::PolynomialSoft { t } => format!("polynomial-t{t}"),
        _ => reg.name().to_owned(),
    }
}

fn base_config(rounds: usize, reg: Option<SpRegularizer>, boost: &BoostArgs) -> BoostConfig {
    let mut c = match reg {
        Some(r) => BoostConfig::splboost(rounds, r),
        None => BoostConfig::adaboost(rounds),
    }
    .with_max_depth(boost.max_depth);
    c.warm_start_rounds = boost.warm_rounds;
    c.warm_lambda = boost.warm_lambda;
    c
}

fn load_dataset(source: &str, args: &DataArgs, seed: u64) -> Result<NamedDataset> {
    if source == "synth" {
        let synth = synth_gaussian(100, 0.0, seed)?;
        return Ok(NamedDataset {
            id: "synth".into(),
            data: synth.data,
        });
    }
    let path = Path::new(source);
    let label_column = match args.label_column.parse::<i64>() {
        Ok(-1) => LabelColumn::Index(last_column(path)?),
        _ => LabelColumn::parse(&args.label_column),
    };
    let data = load_csv(path, &label_column, &args.positive_label)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| source.to_owned());
    Ok(NamedDataset { id, data })
}

fn last_column(path: &Path) -> Result<usize> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let width = first.split(',').count();
    if width < 2 {
        bail!("{}: need at least two columns", path.display());
    }
    Ok(width - 1)
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    fs::create_dir_all(&args.out)?;
    let (data, planted) = if args.data == "synth" {
        let s = synth_gaussian(100, 0.15, args.seed)?;
        (s.data, s.flipped)
    } else {
        (load_dataset(&args.data, &args.data_args, args.seed)?.data, Vec::new())
    };
    let (data, flipped) = if args.noise > 0.0 {
        let (noisy, f) = inject_noise(&data, NoiseSpec { rate: args.noise, seed: args.seed })?;
        (noisy, f)
    } else {
        (data, planted)
    };
    let reg = match args.algo {
        Algo::Adaboost => None,
        Algo::Splboost => Some(regularizer(args.regularizer, args.lambda, &args.reg_args)?),
    };
    let config = base_config(args.rounds, reg, &args.boost);
    let (model, trace) = train(&data, &config)?;
    report::write_model_json(args.out.join("model.json"), &model)?;
    report::write_trajectory_tsv(args.out.join("trace.tsv"), &objective_trajectory(&trace))?;
    println!("rounds: {}", model.len());
    println!("training error: {:.4}", model.error_rate(&data)?);
    if let Some(reg) = reg {
        let rejected = rejected_samples(&model, &data, &reg)?;
        report::write_indices_tsv(args.out.join("rejected.tsv"), "index", &rejected)?;
        println!("rejected samples: {}", rejected.len());
        if !flipped.is_empty() {
            let caught = flipped.iter().filter(|i| rejected.binary_search(i).is_ok()).count();
            println!("flipped samples rejected: {caught}/{}", flipped.len());
        }
    }
    Ok(())
}

fn cmd_study(args: StudyArgs) -> Result<()> {
    fs::create_dir_all(&args.out)?;
    let datasets = args
        .data
        .iter()
        .map(|s| load_dataset(s, &args.data_args, args.seed))
        .collect::<Result<Vec<_>>>()?;
    let mut algorithms = Vec::new();
    for algo in &args.algo {
        match algo {
            Algo::Adaboost => algorithms.push(AlgorithmSpec {
                name: "adaboost".into(),
                config: base_config(args.rounds, None, &args.boost),
            }),
            Algo::Splboost => {
                for &r in &args.regularizer {
                    // lambda is a placeholder; cross-validation picks it from the grid
                    let reg = regularizer(r, 1.0, &args.reg_args)?;
                    algorithms.push(AlgorithmSpec {
                        name: format!("splboost-{}", reg_label(&reg)),
                        config: base_config(args.rounds, Some(reg), &args.boost),
                    });
                }
            }
        }
    }
    let spec = ExperimentSpec {
        datasets,
        algorithms,
        noise_levels: args.noise_levels.unwrap_or_else(|| DEFAULT_NOISE_LEVELS.to_vec()),
        repetitions: args.reps,
        protocol: Protocol {
            train_fraction: 0.7,
            folds: args.cv_folds,
            lambda_grid: args.lambda_grid.unwrap_or_else(default_lambda_grid),
            rounds_max: args.rounds,
            record_time: args.record_time,
        },
        master_seed: args.seed,
        workers: args.workers,
    };
    let output = run_study(&spec)?;
    report::write_records_jsonl(args.out.join("records.jsonl"), &output.records)?;
    report::write_summary_tsv(args.out.join("summary.tsv"), &output.summary)?;
    if !output.failures.is_empty() {
        report::write_failures_jsonl(args.out.join("failures.jsonl"), &output.failures)?;
        eprintln!("{} cells failed; see failures.jsonl", output.failures.len());
    }
    match rank_table(&output.summary) {
        Ok(table) => {
            report::write_rank_tsv(args.out.join("ranks.tsv"), &table)?;
            if table.cells_skipped > 0 {
                eprintln!("warning: {} incomplete cells left out of ranks.tsv", table.cells_skipped);
            }
        }
        Err(e) => eprintln!("ranks.tsv not written: {e}"),
    }
    for row in &output.summary {
        println!(
            "{}\t{}\t{}\t{:.4}\t{:.4}\t{}",
            row.dataset, row.algorithm, row.noise, row.mean_err, row.std_err, row.n_reps
        );
    }
    Ok(())
}

fn cmd_curves(args: CurveArgs) -> Result<()> {
    fs::create_dir_all(&args.out)?;
    let grid = margin_grid(args.grid_limit, args.grid_points);
    report::write_curve_tsv(args.out.join("weight_adaboost.tsv"), "effective_weight", &weight_curve(None, &grid))?;
    report::write_curve_tsv(args.out.join("loss_exponential.tsv"), "latent_loss", &loss_curve(None, &grid))?;
    for &r in &args.regularizer {
        for &lambda in &args.lambda {
            let reg = regularizer(r, lambda, &args.reg_args)?;
            let stem = format!("{}_l{lambda}", reg_label(&reg));
            report::write_curve_tsv(
                args.out.join(format!("weight_{stem}.tsv")),
                "effective_weight",
                &weight_curve(Some(&reg), &grid),
            )?;
            report::write_curve_tsv(
                args.out.join(format!("loss_{stem}.tsv")),
                "latent_loss",
                &loss_curve(Some(&reg), &grid),
            )?;
        }
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let synth = synth_gaussian(args.n_per_class, args.noise, args.seed)?;
    write_csv(&synth.data, &args.out)?;
    if let Some(path) = &args.flipped_out {
        report::write_indices_tsv(path, "index", &synth.flipped)?;
    }
    println!("{} rows, {} flipped", synth.data.n_samples(), synth.flipped.len());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Train(a) => cmd_train(a),
        Command::Study(a) => cmd_study(a),
        Command::Curves(a) => cmd_curves(a),
        Command::Synth(a) => cmd_synth(a),
    }
}
