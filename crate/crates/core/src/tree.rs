//! Weighted binary classification trees used as boosting weak learners.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SplitCriterion {
    #[default]
    Gini,
    /// Weighted misclassification; makes a depth-1 fit the exact best stump.
    Misclassification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeParams {
    pub max_depth: usize,
    pub criterion: SplitCriterion,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: DEFAULT_MAX_DEPTH,
            criterion: SplitCriterion::Gini,
        }
    }
}

impl TreeParams {
    pub fn with_depth(max_depth: usize) -> Self {
        Self {
            max_depth,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TreeNode {
    Leaf(Label),
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    fn predict(&self, x: &[f64]) -> Label {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf(label) => return *label,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn max_feature(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf(_) => None,
            TreeNode::Split {
                feature,
                left,
                right,
                ..
            } => Some(
                (*feature)
                    .max(left.max_feature().unwrap_or(0))
                    .max(right.max_feature().unwrap_or(0)),
            ),
        }
    }

    fn negate(&mut self) {
        match self {
            TreeNode::Leaf(label) => *label = label.flipped(),
            TreeNode::Split { left, right, .. } => {
                left.negate();
                right.negate();
            }
        }
    }
}

/// Axis-aligned decision tree predicting in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeakLearner {
    root: TreeNode,
    max_depth: usize,
}

impl WeakLearner {
    pub fn constant(label: Label) -> Self {
        Self {
            root: TreeNode::Leaf(label),
            max_depth: 1,
        }
    }

    pub fn stump(feature: usize, threshold: f64, left: Label, right: Label) -> Self {
        Self {
            root: TreeNode::Split {
                feature,
                threshold,
                left: Box::new(TreeNode::Leaf(left)),
                right: Box::new(TreeNode::Leaf(right)),
            },
            max_depth: 1,
        }
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Smallest feature count this learner can be evaluated on.
    pub fn required_features(&self) -> usize {
        self.root.max_feature().map_or(0, |f| f + 1)
    }

    /// Panics if `x` is shorter than [`required_features`](Self::required_features).
    #[inline]
    pub fn predict(&self, x: &[f64]) -> Label {
        self.root.predict(x)
    }

    pub fn predict_all(&self, data: &Dataset) -> Vec<Label> {
        data.rows().map(|x| self.predict(x)).collect()
    }

    /// The learner with every leaf label reversed.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.root.negate();
        out
    }
}

/// Row indices sorted by each feature column, computed once per dataset and
/// reused across boosting rounds.
#[derive(Debug, Clone)]
pub struct SortedColumns {
    order: Vec<Vec<usize>>,
}

impl SortedColumns {
    pub fn new(data: &Dataset) -> Self {
        let order = (0..data.n_features())
            .map(|j| {
                let mut idx: Vec<usize> = (0..data.n_samples()).collect();
                // stable: equal values keep ascending row order
                idx.sort_by(|&a, &b| data.value(a, j).total_cmp(&data.value(b, j)));
                idx
            })
            .collect();
        Self { order }
    }
}

/// Fits a Gini tree of depth at most `max_depth` on non-negative sample weights.
pub fn fit_tree(data: &Dataset, weights: &[f64], max_depth: usize) -> Result<WeakLearner> {
    let sorted = SortedColumns::new(data);
    fit_tree_sorted(data, &sorted, weights, &TreeParams::with_depth(max_depth))
}

pub fn fit_tree_with(data: &Dataset, weights: &[f64], params: &TreeParams) -> Result<WeakLearner> {
    let sorted = SortedColumns::new(data);
    fit_tree_sorted(data, &sorted, weights, params)
}

/// Greedy top-down induction. Zero-weight rows are routed down the tree but
/// contribute to neither impurity, thresholds nor leaf majorities.
pub fn fit_tree_sorted(
    data: &Dataset,
    sorted: &SortedColumns,
    weights: &[f64],
    params: &TreeParams,
) -> Result<WeakLearner> {
    let n = data.n_samples();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if weights.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    if params.max_depth == 0 {
        return Err(Error::InvalidParameter(format!(
            "max_depth must be positive, got {}",
            params.max_depth
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "sample weights must be finite and non-negative, got {w}"
        )));
    }
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }

    let mut builder = Builder {
        data,
        sorted,
        weights,
        params,
        in_node: vec![false; n],
        tolerance: 1e-12 * total,
    };
    let members: Vec<usize> = (0..n).collect();
    let root = builder.grow(&members, 0);
    Ok(WeakLearner {
        root,
        max_depth: params.max_depth,
    })
}

struct Builder<'a> {
    data: &'a Dataset,
    sorted: &'a SortedColumns,
    weights: &'a [f64],
    params: &'a TreeParams,
    in_node: Vec<bool>,
    tolerance: f64,
}

#[derive(Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl Builder<'_> {
    fn grow(&mut self, members: &[usize], depth: usize) -> TreeNode {
        let (pos, neg) = class_weights(self.data, self.weights, members);
        let leaf = TreeNode::Leaf(if pos >= neg {
            Label::Positive
        } else {
            Label::Negative
        });
        if depth >= self.params.max_depth || pos == 0.0 || neg == 0.0 {
            return leaf;
        }
        let parent = self.impurity(pos, neg);
        let Some(best) = self.best_split(members, parent) else {
            return leaf;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = members
            .iter()
            .partition(|&&i| self.data.value(i, best.feature) <= best.threshold);
        TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(self.grow(&left, depth + 1)),
            right: Box::new(self.grow(&right, depth + 1)),
        }
    }

    fn impurity(&self, pos: f64, neg: f64) -> f64 {
        match self.params.criterion {
            SplitCriterion::Gini => {
                let total = pos + neg;
                if total > 0.0 {
                    2.0 * pos * neg / total
                } else {
                    0.0
                }
            }
            SplitCriterion::Misclassification => pos.min(neg),
        }
    }

    /// Lowest-impurity split that improves on the parent; ties go to the lowest
    /// feature index, then the lowest threshold.
    fn best_split(&mut self, members: &[usize], parent: f64) -> Option<Candidate> {
        for &i in members {
            self.in_node[i] = true;
        }
        let (total_pos, total_neg) = class_weights(self.data, self.weights, members);
        let mut best: Option<Candidate> = None;
        let mut best_impurity = parent - self.tolerance;

        for (feature, order) in self.sorted.order.iter().enumerate() {
            let mut left_pos = 0.0;
            let mut left_neg = 0.0;
            let mut prev: Option<f64> = None;
            for &i in order {
                let w = self.weights[i];
                if !self.in_node[i] || w == 0.0 {
                    continue;
                }
                let x = self.data.value(i, feature);
                if let Some(p) = prev {
                    if x > p {
                        let impurity = self.impurity(left_pos, left_neg)
                            + self.impurity(total_pos - left_pos, total_neg - left_neg);
                        if impurity < best_impurity {
                            best_impurity = impurity - self.tolerance;
                            best = Some(Candidate {
                                feature,
                                threshold: midpoint(p, x),
                                impurity,
                            });
                        }
                    }
                }
                match self.data.label(i) {
                    Label::Positive => left_pos += w,
                    Label::Negative => left_neg += w,
                }
                prev = Some(x);
            }
        }

        for &i in members {
            self.in_node[i] = false;
        }
        debug_assert!(best.map_or(true, |b| b.impurity <= parent));
        best
    }
}

fn class_weights(data: &Dataset, weights: &[f64], members: &[usize]) -> (f64, f64) {
    members.iter().fold((0.0, 0.0), |(pos, neg), &i| match data.label(i) {
        Label::Positive => (pos + weights[i], neg),
        Label::Negative => (pos, neg + weights[i]),
    })
}

/// Threshold strictly separating `lo < hi` under the `<=` routing rule.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid < hi {
        mid
    } else {
        lo
    }
}

/// Normalized weighted misclassification rate of `learner` on `data`.
pub fn weighted_error(learner: &WeakLearner, data: &Dataset, weights: &[f64]) -> Result<f64> {
    if weights.len() != data.n_samples() {
        return Err(Error::LengthMismatch {
            expected: data.n_samples(),
            found: weights.len(),
        });
    }
    if learner.required_features() > data.n_features() {
        return Err(Error::DimensionMismatch {
            expected: learner.required_features(),
            found: data.n_features(),
        });
    }
    let mut total = 0.0;
    let mut wrong = 0.0;
    for (i, x) in data.rows().enumerate() {
        total += weights[i];
        if learner.predict(x) != data.label(i) {
            wrong += weights[i];
        }
    }
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    Ok(wrong / total)
}

/// Every depth-1 stump over (feature, midpoint threshold, left label), followed
/// by the two constant classifiers.
pub fn enumerate_stumps(data: &Dataset) -> Vec<WeakLearner> {
    let mut out = Vec::new();
    for feature in 0..data.n_features() {
        let mut values: Vec<f64> = (0..data.n_samples()).map(|i| data.value(i, feature)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let threshold = midpoint(pair[0], pair[1]);
            for left in [Label::Negative, Label::Positive] {
                out.push(WeakLearner::stump(feature, threshold, left, left.flipped()));
            }
        }
    }
    out.push(WeakLearner::constant(Label::Positive));
    out.push(WeakLearner::constant(Label::Negative));
    out
}
