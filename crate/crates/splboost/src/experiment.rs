//! Cross-validation, single runs, repeated-trial studies and rank statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use splboost_core::{train, BoostConfig, Dataset, Ensemble, Error as CoreError};

use crate::data::{fold_indices, inject_noise, split_indices, NoiseSpec, SplitSpec};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

pub const DEFAULT_NOISE_LEVELS: [f64; 5] = [0.0, 0.05, 0.10, 0.20, 0.30];
pub const DEFAULT_REPETITIONS: usize = 10;
pub const DEFAULT_ROUNDS_MAX: usize = 200;

/// 11 evenly spaced values on `[1.0, 6.0]`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..11).map(|k| 1.0 + 0.5 * k as f64).collect()
}

/// A named training configuration. `config.rounds` is ignored in favour of
/// the experiment's `rounds_max`; for self-paced configurations the
/// regularizer's lambda is replaced by each grid value during selection.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub name: String,
    pub config: BoostConfig,
}

/// Knobs shared by every cell of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    pub train_fraction: f64,
    pub folds: usize,
    pub lambda_grid: Vec<f64>,
    pub rounds_max: usize,
    /// Store wall-clock seconds in each record (breaks byte-reproducibility).
    pub record_time: bool,
}

impl Default for Protocol {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            folds: 5,
            lambda_grid: default_lambda_grid(),
            rounds_max: DEFAULT_ROUNDS_MAX,
            record_time: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedDataset {
    pub id: String,
    pub data: Dataset,
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub datasets: Vec<NamedDataset>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub noise_levels: Vec<f64>,
    pub repetitions: usize,
    pub protocol: Protocol,
    pub master_seed: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub dataset: String,
    pub algorithm: String,
    pub noise: f64,
    pub repetition: usize,
    pub test_error: f64,
    pub chosen_lambda: Option<f64>,
    pub chosen_rounds: usize,
    pub wall_time: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvChoice {
    pub lambda: Option<f64>,
    pub rounds: usize,
    pub validation_error: f64,
}

impl CvChoice {
    /// `base` with the selected lambda and number of rounds.
    ///
    /// A self-paced run needs more rounds than its warm start, so a shorter
    /// selection is configured to just clear it; [`fit_choice`] truncates.
    pub fn configure(&self, base: &BoostConfig) -> Result<BoostConfig> {
        let floor = if base.regularizer.is_some() { base.warm_start_rounds + 1 } else { 1 };
        with_lambda(base, self.lambda, self.rounds.max(floor))
    }
}

/// Trains the model selected by cross-validation, returning exactly
/// `choice.rounds` stages and the configuration that produced them.
pub fn fit_choice(data: &Dataset, base: &BoostConfig, choice: &CvChoice) -> Result<(Ensemble, BoostConfig)> {
    let mut config = choice.configure(base)?;
    loop {
        match train(data, &config) {
            Ok((model, _)) => return Ok((model.truncated(choice.rounds), config)),
            Err(CoreError::AllRejected { round }) if round > choice.rounds + 1 => config.rounds = round - 1,
            Err(e) => return Err(e.into()),
        }
    }
}

fn with_lambda(config: &BoostConfig, lambda: Option<f64>, rounds: usize) -> Result<BoostConfig> {
    let mut c = config.clone();
    c.rounds = rounds;
    if let (Some(reg), Some(l)) = (c.regularizer, lambda) {
        c.regularizer = Some(reg.with_lambda(l)?);
    }
    Ok(c)
}

/// Validation error of every prefix length `1..=rounds_max`; `INFINITY`
/// marks prefixes a run could not reach because lambda rejected every sample.
fn staged_validation(train_set: &Dataset, valid: &Dataset, config: &BoostConfig) -> Result<Vec<f64>> {
    let mut errors = vec![f64::INFINITY; config.rounds];
    let mut cfg = config.clone();
    loop {
        match train(train_set, &cfg) {
            Ok((model, _)) => {
                for (slot, e) in errors.iter_mut().zip(model.staged_errors(valid)?) {
                    *slot = e;
                }
                return Ok(errors);
            }
            // Training is sequential, so the rounds before the failure are
            // exactly what a shorter run produces.
            Err(CoreError::AllRejected { round }) if round > 1 => {
                cfg.rounds = round - 1;
                if cfg.validate().is_err() {
                    return Ok(errors);
                }
            }
            Err(CoreError::AllRejected { .. }) => return Ok(errors),
            Err(e) => return Err(e.into()),
        }
    }
}

/// Jointly selects lambda and the number of rounds by k-fold CV on `data`.
///
/// Each lambda is trained once per fold to `rounds_max` and every prefix is
/// scored, including prefixes that end inside the warm start. Ties prefer the
/// smaller lambda, then fewer rounds.
pub fn cross_validate(data: &Dataset, algo: &AlgorithmSpec, protocol: &Protocol, seed: u64) -> Result<CvChoice> {
    let folds = fold_indices(
        data.n_samples(),
        &SplitSpec {
            train_fraction: protocol.train_fraction,
            folds: protocol.folds,
            seed,
        },
    )?;
    let self_paced = algo.config.regularizer.is_some();
    let lambdas: Vec<Option<f64>> = if self_paced {
        if protocol.lambda_grid.is_empty() {
            return Err(Error::Config("lambda grid is empty".into()));
        }
        let mut grid = protocol.lambda_grid.clone();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid.into_iter().map(Some).collect()
    } else {
        vec![None]
    };
    if self_paced && protocol.rounds_max <= algo.config.warm_start_rounds {
        return Err(Error::Config(format!(
            "rounds_max {} leaves no rounds after the warm start",
            protocol.rounds_max
        )));
    }

    let subsets: Vec<(Dataset, Dataset)> = folds
        .iter()
        .map(|f| Ok((data.subset(&f.train)?, data.subset(&f.validation)?)))
        .collect::<Result<_>>()?;

    let mut best: Option<CvChoice> = None;
    for lambda in lambdas {
        let cfg = with_lambda(&algo.config, lambda, protocol.rounds_max)?;
        let mut mean = vec![0.0; protocol.rounds_max];
        for (tr, va) in &subsets {
            for (m, e) in mean.iter_mut().zip(staged_validation(tr, va, &cfg)?) {
                *m += e / subsets.len() as f64;
            }
        }
        for (k, &err) in mean.iter().enumerate() {
            if err.is_finite() && best.map_or(true, |b| err < b.validation_error) {
                best = Some(CvChoice {
                    lambda,
                    rounds: k + 1,
                    validation_error: err,
                });
            }
        }
    }
    best.ok_or_else(|| Error::Config(format!("{}: no (lambda, rounds) pair survived cross-validation", algo.name)))
}

/// One cell of a study: split, corrupt the training labels, select
/// hyperparameters by CV on the noisy training set, retrain, and score on the
/// clean test set.
pub fn run_single(
    dataset: &NamedDataset,
    algo: &AlgorithmSpec,
    noise: f64,
    repetition: usize,
    seed: u64,
    protocol: &Protocol,
) -> Result<ResultRecord> {
    let start = Instant::now();
    let (train_idx, test_idx) = split_indices(
        dataset.data.n_samples(),
        &SplitSpec {
            train_fraction: protocol.train_fraction,
            folds: protocol.folds,
            seed: derive_seed(seed, &["split"]),
        },
    )?;
    let clean_train = dataset.data.subset(&train_idx)?;
    let test = dataset.data.subset(&test_idx)?;
    let (train_set, _) = inject_noise(
        &clean_train,
        NoiseSpec {
            rate: noise,
            seed: derive_seed(seed, &["noise"]),
        },
    )?;
    let choice = cross_validate(&train_set, algo, protocol, derive_seed(seed, &["folds"]))?;
    let (model, _) = fit_choice(&train_set, &algo.config, &choice)?;
    let test_error = model.error_rate(&test)?;
    Ok(ResultRecord {
        dataset: dataset.id.clone(),
        algorithm: algo.name.clone(),
        noise,
        repetition,
        test_error,
        chosen_lambda: choice.lambda,
        chosen_rounds: choice.rounds,
        wall_time: protocol.record_time.then(|| start.elapsed().as_secs_f64()),
        seed,
    })
}

/// Seed for one (dataset, noise, repetition) cell. Every algorithm in the cell
/// shares it, so algorithms are compared on identical splits and noise.
pub fn cell_seed(master: u64, dataset: &str, noise: f64, repetition: usize) -> u64 {
    derive_seed(master, &[dataset, &format!("{noise}"), &repetition.to_string()])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub dataset: String,
    pub algorithm: String,
    pub noise: f64,
    pub repetition: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub algorithm: String,
    pub noise: f64,
    pub mean_err: f64,
    /// Sample standard deviation (n - 1 denominator; 0 for a single run).
    pub std_err: f64,
    pub n_reps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutput {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<CellFailure>,
    pub summary: Vec<SummaryRow>,
}

fn validate_spec(spec: &ExperimentSpec) -> Result<()> {
    if spec.algorithms.is_empty() {
        return Err(Error::Config("no algorithms to run".into()));
    }
    if spec.datasets.is_empty() {
        return Err(Error::Config("no datasets to run".into()));
    }
    if spec.repetitions == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    if spec.noise_levels.iter().any(|r| !(0.0..=0.5).contains(r)) {
        return Err(Error::Config("noise levels must lie in [0, 0.5]".into()));
    }
    let names: BTreeSet<&str> = spec.algorithms.iter().map(|a| a.name.as_str()).collect();
    if names.len() != spec.algorithms.len() {
        return Err(Error::Config("algorithm names must be unique".into()));
    }
    Ok(())
}

/// Runs every (dataset, noise, repetition, algorithm) cell. Failed cells are
/// reported separately and the study carries on.
pub fn run_study(spec: &ExperimentSpec) -> Result<StudyOutput> {
    validate_spec(spec)?;
    let mut jobs = Vec::new();
    for dataset in &spec.datasets {
        for &noise in &spec.noise_levels {
            for rep in 0..spec.repetitions {
                for algo in &spec.algorithms {
                    jobs.push((dataset, noise, rep, algo));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<std::result::Result<ResultRecord, CellFailure>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(dataset, noise, rep, algo)| {
                let seed = cell_seed(spec.master_seed, &dataset.id, noise, rep);
                run_single(dataset, algo, noise, rep, seed, &spec.protocol).map_err(|e| CellFailure {
                    dataset: dataset.id.clone(),
                    algorithm: algo.name.clone(),
                    noise,
                    repetition: rep,
                    message: e.to_string(),
                })
            })
            .collect()
    });
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(f) => failures.push(f),
        }
    }
    records.sort_by(|a, b| {
        (&a.dataset, &a.algorithm)
            .cmp(&(&b.dataset, &b.algorithm))
            .then(a.noise.total_cmp(&b.noise))
            .then(a.repetition.cmp(&b.repetition))
    });
    failures.sort_by(|a, b| {
        (&a.dataset, &a.algorithm)
            .cmp(&(&b.dataset, &b.algorithm))
            .then(a.noise.total_cmp(&b.noise))
            .then(a.repetition.cmp(&b.repetition))
    });
    let summary = summarize(&records);
    Ok(StudyOutput {
        records,
        failures,
        summary,
    })
}

/// Mean and sample standard deviation of test error per
/// (dataset, algorithm, noise), in record order.
pub fn summarize(records: &[ResultRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, String, u64), Vec<f64>> = BTreeMap::new();
    for r in records {
        // noise levels are non-negative, so bit order matches numeric order
        groups
            .entry((r.dataset.clone(), r.algorithm.clone(), r.noise.to_bits()))
            .or_default()
            .push(r.test_error);
    }
    groups
        .into_iter()
        .map(|((dataset, algorithm, noise), errs)| {
            let n = errs.len() as f64;
            let mean = errs.iter().sum::<f64>() / n;
            let std = if errs.len() > 1 {
                (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                dataset,
                algorithm,
                noise: f64::from_bits(noise),
                mean_err: mean,
                std_err: std,
                n_reps: errs.len(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub algorithms: Vec<String>,
    /// `ratios[a][k]`: fraction of cells where algorithm `a` ranks within the top `k + 1`.
    pub ratios: Vec<Vec<f64>>,
    pub cells_used: usize,
    /// Cells missing at least one algorithm, left out of the ratios.
    pub cells_skipped: usize,
}

/// Ranks algorithms by mean test error within each (dataset, noise) cell and
/// reports top-n frequencies. Equal means share the better rank and the next
/// rank is skipped.
pub fn rank_table(summaries: &[SummaryRow]) -> Result<RankTable> {
    let algorithms: Vec<String> = summaries
        .iter()
        .map(|s| s.algorithm.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if algorithms.len() < 2 {
        return Err(Error::Config("rank statistics need at least two algorithms".into()));
    }
    let mut cells: BTreeMap<(String, u64), BTreeMap<&str, f64>> = BTreeMap::new();
    for s in summaries {
        cells
            .entry((s.dataset.clone(), s.noise.to_bits()))
            .or_default()
            .insert(s.algorithm.as_str(), s.mean_err);
    }
    let k = algorithms.len();
    let mut counts = vec![vec![0usize; k]; k];
    let mut used = 0;
    let mut skipped = 0;
    for errs in cells.values() {
        if errs.len() != k {
            skipped += 1;
            continue;
        }
        used += 1;
        for (a, name) in algorithms.iter().enumerate() {
            let mine = errs[name.as_str()];
            let rank = 1 + errs.values().filter(|&&e| e < mine).count();
            for c in &mut counts[a][rank - 1..] {
                *c += 1;
            }
        }
    }
    if used == 0 {
        return Err(Error::Config("no cell has results for every algorithm".into()));
    }
    let ratios = counts
        .into_iter()
        .map(|row| row.into_iter().map(|c| c as f64 / used as f64).collect())
        .collect();
    Ok(RankTable {
        algorithms,
        ratios,
        cells_used: used,
        cells_skipped: skipped,
    })
}
