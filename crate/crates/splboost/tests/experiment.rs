mod common;

use proptest::prelude::*;
use splboost::data::{synth_gaussian, NEGATIVE_COV, NEGATIVE_MEAN, POSITIVE_COV, POSITIVE_MEAN};
use splboost::experiment::{
    cell_seed, rank_table, run_single, run_study, summarize, AlgorithmSpec, ExperimentSpec, NamedDataset, Protocol,
    SummaryRow,
};
use splboost_core::{BoostConfig, Dataset, Label, SpRegularizer};

fn synth(n: usize, seed: u64) -> NamedDataset {
    NamedDataset {
        id: "synth".into(),
        data: synth_gaussian(n, 0.0, seed).unwrap().data,
    }
}

fn small_protocol() -> Protocol {
    Protocol {
        lambda_grid: vec![1.0, 2.0, 4.0],
        rounds_max: 20,
        ..Protocol::default()
    }
}

fn ada(rounds: usize) -> AlgorithmSpec {
    AlgorithmSpec {
        name: "adaboost".into(),
        config: BoostConfig::adaboost(rounds),
    }
}

fn spl(rounds: usize) -> AlgorithmSpec {
    AlgorithmSpec {
        name: "splboost-hard".into(),
        config: BoostConfig::splboost(rounds, SpRegularizer::hard(1.0).unwrap()),
    }
}

fn density(x: [f64; 2], mean: [f64; 2], cov: [f64; 4]) -> f64 {
    let det = cov[0] * cov[3] - cov[1] * cov[2];
    let d = [x[0] - mean[0], x[1] - mean[1]];
    let q = (cov[3] * d[0] * d[0] - (cov[1] + cov[2]) * d[0] * d[1] + cov[0] * d[1] * d[1]) / det;
    (-0.5 * q).exp() / det.sqrt()
}

/// Monte-Carlo error of the likelihood-ratio classifier on the two Gaussians.
fn bayes_error(n: usize) -> f64 {
    let data = synth_gaussian(n, 0.0, 12345).unwrap().data;
    let wrong = (0..data.n_samples())
        .filter(|&i| {
            let x = [data.value(i, 0), data.value(i, 1)];
            let positive = density(x, POSITIVE_MEAN, POSITIVE_COV) >= density(x, NEGATIVE_MEAN, NEGATIVE_COV);
            positive != (data.label(i) == Label::Positive)
        })
        .count();
    wrong as f64 / data.n_samples() as f64
}

#[test]
fn adaboost_on_clean_synthetic_data() {
    let bayes = bayes_error(50_000);
    assert!(bayes < 0.1, "bayes error {bayes}");
    let protocol = small_protocol();
    let mean: f64 = (0..5)
        .map(|rep| run_single(&synth(100, rep), &ada(20), 0.0, rep as usize, 1000 + rep, &protocol).unwrap().test_error)
        .sum::<f64>()
        / 5.0;
    assert!(mean <= 0.1, "mean test error {mean}, bayes {bayes}");
}

#[test]
fn run_single_is_deterministic() {
    let data = synth(60, 1);
    let protocol = small_protocol();
    let a = run_single(&data, &spl(20), 0.2, 0, 77, &protocol).unwrap();
    let b = run_single(&data, &spl(20), 0.2, 0, 77, &protocol).unwrap();
    assert_eq!(a, b);
    assert!(a.wall_time.is_none());
}

#[test]
fn huge_lambda_record_matches_adaboost() {
    let data = synth(60, 2);
    let protocol = Protocol {
        lambda_grid: vec![1e12],
        ..small_protocol()
    };
    let a = run_single(&data, &ada(20), 0.2, 3, 5, &protocol).unwrap();
    let s = run_single(&data, &spl(20), 0.2, 3, 5, &protocol).unwrap();
    assert_eq!(a.test_error, s.test_error);
    assert_eq!(a.chosen_rounds, s.chosen_rounds);
    assert_eq!(a.seed, s.seed);
    assert_eq!(s.chosen_lambda, Some(1e12));
}

#[test]
fn record_time_fills_wall_time() {
    let protocol = Protocol {
        record_time: true,
        ..small_protocol()
    };
    let r = run_single(&synth(30, 3), &ada(10), 0.0, 0, 1, &protocol).unwrap();
    assert!(r.wall_time.is_some_and(|t| t >= 0.0));
}

fn study_spec(datasets: Vec<NamedDataset>) -> ExperimentSpec {
    ExperimentSpec {
        datasets,
        algorithms: vec![ada(10), spl(10)],
        noise_levels: vec![0.0, 0.05, 0.1, 0.2, 0.3],
        repetitions: 10,
        protocol: Protocol {
            lambda_grid: vec![1.0, 2.5],
            rounds_max: 10,
            ..Protocol::default()
        },
        master_seed: 3,
        workers: 2,
    }
}

#[test]
fn study_counts_and_summary() {
    let spec = study_spec(vec![synth(30, 4)]);
    let out = run_study(&spec).unwrap();
    assert_eq!(out.records.len(), 100);
    assert!(out.failures.is_empty());
    assert_eq!(out.summary.len(), 10);
    for row in &out.summary {
        let errs: Vec<f64> = out
            .records
            .iter()
            .filter(|r| r.algorithm == row.algorithm && r.noise == row.noise)
            .map(|r| r.test_error)
            .collect();
        assert_eq!(errs.len(), row.n_reps);
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        assert!((mean - row.mean_err).abs() <= 1e-12);
    }
    for r in &out.records {
        assert!((0.0..=1.0).contains(&r.test_error));
        assert!(r.chosen_rounds >= 1 && r.chosen_rounds <= spec.protocol.rounds_max);
        match r.algorithm.as_str() {
            "adaboost" => assert!(r.chosen_lambda.is_none()),
            _ => assert!(spec.protocol.lambda_grid.contains(&r.chosen_lambda.unwrap())),
        }
        assert_eq!(r.seed, cell_seed(spec.master_seed, &r.dataset, r.noise, r.repetition));
    }
    assert_eq!(summarize(&out.records), out.summary);
}

#[test]
fn failed_cells_do_not_stop_the_study() {
    let tiny = NamedDataset {
        id: "tiny".into(),
        data: Dataset::from_rows(
            &[vec![0.0], vec![1.0], vec![2.0], vec![3.0], vec![4.0], vec![5.0]],
            vec![Label::Negative, Label::Negative, Label::Negative, Label::Positive, Label::Positive, Label::Positive],
        )
        .unwrap(),
    };
    let mut spec = study_spec(vec![synth(30, 5), tiny]);
    spec.noise_levels = vec![0.0];
    spec.repetitions = 2;
    let out = run_study(&spec).unwrap();
    assert_eq!(out.records.len(), 4);
    assert_eq!(out.failures.len(), 4);
    assert!(out.failures.iter().all(|f| f.dataset == "tiny"));
}

#[test]
fn study_is_independent_of_worker_count() {
    let mut spec = study_spec(vec![synth(30, 6)]);
    spec.repetitions = 2;
    let a = run_study(&spec).unwrap();
    spec.workers = 1;
    assert_eq!(run_study(&spec).unwrap(), a);
}

fn summary(dataset: &str, algorithm: &str, mean_err: f64) -> SummaryRow {
    SummaryRow {
        dataset: dataset.into(),
        algorithm: algorithm.into(),
        noise: 0.0,
        mean_err,
        std_err: 0.0,
        n_reps: 1,
    }
}

#[test]
fn rank_table_hand_example() {
    // ranks per cell: c1 a1 b2 c3 | c2 a3 b1 c2 | c3 a2 b2 c1 | c4 all 1
    let errors = [
        ("c1", [0.1, 0.2, 0.3]),
        ("c2", [0.3, 0.1, 0.2]),
        ("c3", [0.2, 0.2, 0.1]),
        ("c4", [0.1, 0.1, 0.1]),
    ];
    let rows: Vec<SummaryRow> = errors
        .iter()
        .flat_map(|(cell, e)| ["a", "b", "c"].iter().zip(e).map(|(alg, &err)| summary(cell, alg, err)))
        .collect();
    let table = rank_table(&rows).unwrap();
    assert_eq!(table.algorithms, ["a", "b", "c"]);
    assert_eq!(table.cells_used, 4);
    assert_eq!(table.ratios[0], [0.5, 0.75, 1.0]);
    assert_eq!(table.ratios[1], [0.5, 1.0, 1.0]);
    assert_eq!(table.ratios[2], [0.5, 0.75, 1.0]);
}

#[test]
fn rank_table_needs_two_algorithms() {
    assert!(rank_table(&[summary("d", "a", 0.1)]).is_err());
}

proptest! {
    #[test]
    fn top_n_ratios_are_monotone(errs in prop::collection::vec(prop::collection::vec(0u8..5, 4), 1..8)) {
        let rows: Vec<SummaryRow> = errs
            .iter()
            .enumerate()
            .flat_map(|(c, e)| {
                e.iter().enumerate().map(move |(a, &x)| summary(&format!("d{c}"), &format!("alg{a}"), f64::from(x) / 10.0))
            })
            .collect();
        let table = rank_table(&rows).unwrap();
        for r in &table.ratios {
            prop_assert!(r.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(*r.last().unwrap(), 1.0);
        }
        let best_count: f64 = table.ratios.iter().map(|r| r[0]).sum();
        prop_assert!(best_count >= 1.0 - 1e-12);
    }
}
