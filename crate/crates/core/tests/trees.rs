mod common;

use common::{random_dataset, Rng};
use proptest::prelude::*;
use splboost_core::tree::{enumerate_stumps, fit_tree, fit_tree_with, weighted_error};
use splboost_core::{Dataset, Label, SplitCriterion, TreeParams, WeakLearner};

#[test]
fn four_point_stump_by_enumeration() {
    use Label::{Negative as N, Positive as P};
    let data = Dataset::from_rows(&[[1.0], [2.0], [3.0], [4.0]], vec![N, N, P, P]).unwrap();
    let w = [0.25; 4];
    // the three candidate thresholds, best orientation each
    let errs: Vec<f64> = [1.5, 2.5, 3.5]
        .iter()
        .map(|&t| {
            let a = weighted_error(&WeakLearner::stump(0, t, N, P), &data, &w).unwrap();
            let b = weighted_error(&WeakLearner::stump(0, t, P, N), &data, &w).unwrap();
            a.min(b)
        })
        .collect();
    assert_eq!(errs, [0.25, 0.0, 0.25]);
    let fitted = fit_tree(&data, &w, 1).unwrap();
    assert_eq!(fitted, WeakLearner::stump(0, 2.5, N, P));
}

#[test]
fn depth_one_misclassification_fit_is_best_stump() {
    let mut rng = Rng::new(11);
    let params = TreeParams {
        max_depth: 1,
        criterion: SplitCriterion::Misclassification,
    };
    for trial in 0..200 {
        let data = random_dataset(&mut rng, 20, 1 + trial % 3, 0.25);
        let w: Vec<f64> = (0..20)
            .map(|_| if rng.uniform() < 0.15 { 0.0 } else { rng.uniform() })
            .collect();
        let fitted = fit_tree_with(&data, &w, &params).unwrap();
        let fit_err = weighted_error(&fitted, &data, &w).unwrap();
        let best = enumerate_stumps(&data)
            .iter()
            .map(|s| weighted_error(s, &data, &w).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(fit_err <= best + 1e-12, "trial {trial}: {fit_err} > {best}");
    }
}

#[test]
fn gini_stump_never_worse_than_chance() {
    let mut rng = Rng::new(12);
    for _ in 0..100 {
        let data = random_dataset(&mut rng, 30, 2, 0.3);
        let w: Vec<f64> = (0..30).map(|_| rng.uniform()).collect();
        for depth in 1..=3 {
            let e = weighted_error(&fit_tree(&data, &w, depth).unwrap(), &data, &w).unwrap();
            assert!(e <= 0.5);
        }
    }
}

#[test]
fn fit_is_invariant_to_row_order() {
    let mut rng = Rng::new(13);
    for _ in 0..50 {
        let data = random_dataset(&mut rng, 25, 3, 0.2);
        let w: Vec<f64> = (0..25).map(|_| rng.range(0.1, 1.0)).collect();
        let mut perm: Vec<usize> = (0..25).collect();
        for i in (1..25).rev() {
            perm.swap(i, rng.below(i + 1));
        }
        let shuffled = data.subset(&perm).unwrap();
        let sw: Vec<f64> = perm.iter().map(|&i| w[i]).collect();
        for depth in 1..=3 {
            assert_eq!(
                fit_tree(&data, &w, depth).unwrap(),
                fit_tree(&shuffled, &sw, depth).unwrap()
            );
        }
    }
}

#[test]
fn leaves_are_signed_and_splits_valid() {
    let mut rng = Rng::new(14);
    let data = random_dataset(&mut rng, 60, 4, 0.1);
    let tree = fit_tree(&data, &vec![1.0; 60], 3).unwrap();
    fn walk(node: &splboost_core::TreeNode, d: usize) {
        if let splboost_core::TreeNode::Split { feature, threshold, left, right } = node {
            assert!(*feature < d && threshold.is_finite());
            walk(left, d);
            walk(right, d);
        }
    }
    walk(tree.root(), 4);
    assert!(tree.depth() <= 3);
}

proptest! {
    #[test]
    fn weighted_error_ignores_positive_scaling(seed in 0u64..1000, scale in 1e-6f64..1e6) {
        let mut rng = Rng::new(seed);
        let data = random_dataset(&mut rng, 15, 2, 0.2);
        let w: Vec<f64> = (0..15).map(|_| rng.range(0.01, 1.0)).collect();
        let scaled: Vec<f64> = w.iter().map(|x| x * scale).collect();
        let tree = fit_tree(&data, &w, 2).unwrap();
        let a = weighted_error(&tree, &data, &w).unwrap();
        let b = weighted_error(&tree, &data, &scaled).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }
}
