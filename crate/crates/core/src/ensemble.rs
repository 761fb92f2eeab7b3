use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::tree::WeakLearner;

/// Scores are clamped to `[-DEFAULT_SCORE_CLAMP, DEFAULT_SCORE_CLAMP]` before
/// being exponentiated into losses.
pub const DEFAULT_SCORE_CLAMP: f64 = 50.0;

/// `y * F(x)` for a single sample.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Margin(pub f64);

impl Margin {
    pub fn new(label: Label, score: f64) -> Self {
        Margin(label.value() * score)
    }

    /// Exponential loss `exp(-margin)` with the margin clamped to `[-clamp, clamp]`.
    #[inline]
    pub fn exp_loss(self, clamp: f64) -> f64 {
        libm::exp(-self.0.clamp(-clamp, clamp))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Stage {
    pub alpha: f64,
    pub learner: WeakLearner,
}

/// Additive model `F(x) = sum_t alpha_t f_t(x)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ensemble {
    stages: Vec<Stage>,
    n_features: usize,
    warm_rounds: usize,
}

impl Ensemble {
    pub fn new(n_features: usize) -> Self {
        Self {
            stages: Vec::new(),
            n_features,
            warm_rounds: 0,
        }
    }

    pub fn push(&mut self, alpha: f64, learner: WeakLearner) -> Result<()> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("stage weight must be finite, got {alpha}")));
        }
        if learner.required_features() > self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: learner.required_features(),
            });
        }
        self.stages.push(Stage { alpha, learner });
        Ok(())
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Number of leading stages trained under the warm-start lambda.
    pub fn warm_rounds(&self) -> usize {
        self.warm_rounds
    }

    pub(crate) fn set_warm_rounds(&mut self, warm_rounds: usize) {
        self.warm_rounds = warm_rounds;
    }

    /// The first `rounds` stages as a standalone model.
    pub fn truncated(&self, rounds: usize) -> Self {
        let rounds = rounds.min(self.stages.len());
        Self {
            stages: self.stages[..rounds].to_vec(),
            n_features: self.n_features,
            warm_rounds: self.warm_rounds.min(rounds),
        }
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found,
            });
        }
        Ok(())
    }

    pub fn predict_score(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.score_unchecked(x))
    }

    #[inline]
    fn score_unchecked(&self, x: &[f64]) -> f64 {
        self.stages
            .iter()
            .map(|s| s.alpha * s.learner.predict(x).value())
            .sum()
    }

    /// `sign(F(x))`, with a zero score predicting +1.
    pub fn predict_label(&self, x: &[f64]) -> Result<Label> {
        self.predict_score(x).map(Label::from_score)
    }

    pub fn scores(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.check_dim(data.n_features())?;
        Ok(data.rows().map(|x| self.score_unchecked(x)).collect())
    }

    pub fn margins(&self, data: &Dataset) -> Result<Vec<Margin>> {
        let scores = self.scores(data)?;
        Ok(scores
            .into_iter()
            .zip(data.labels())
            .map(|(s, &y)| Margin::new(y, s))
            .collect())
    }

    /// Per-sample exponential losses `exp(-y_i F(x_i))` under the default clamp.
    pub fn exp_losses(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.exp_losses_with_clamp(data, DEFAULT_SCORE_CLAMP)
    }

    pub fn exp_losses_with_clamp(&self, data: &Dataset, clamp: f64) -> Result<Vec<f64>> {
        Ok(self
            .margins(data)?
            .into_iter()
            .map(|m| m.exp_loss(clamp))
            .collect())
    }

    /// Misclassification rate of every prefix: element `k` is the error of the
    /// first `k + 1` stages.
    pub fn staged_errors(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.check_dim(data.n_features())?;
        let n = data.n_samples() as f64;
        let mut scores = vec![0.0; data.n_samples()];
        let mut out = Vec::with_capacity(self.stages.len());
        for stage in &self.stages {
            let mut wrong = 0usize;
            for (i, x) in data.rows().enumerate() {
                scores[i] += stage.alpha * stage.learner.predict(x).value();
                if Label::from_score(scores[i]) != data.label(i) {
                    wrong += 1;
                }
            }
            out.push(wrong as f64 / n);
        }
        Ok(out)
    }

    /// Misclassification rate of the full model.
    pub fn error_rate(&self, data: &Dataset) -> Result<f64> {
        let scores = self.scores(data)?;
        let wrong = scores
            .iter()
            .zip(data.labels())
            .filter(|(s, y)| Label::from_score(**s) != **y)
            .count();
        Ok(wrong as f64 / data.n_samples() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Label::{Negative as N, Positive as P};

    fn model(stages: &[(f64, WeakLearner)], d: usize) -> Ensemble {
        let mut e = Ensemble::new(d);
        for (a, l) in stages {
            e.push(*a, l.clone()).unwrap();
        }
        e
    }

    #[test]
    fn scores_are_linear_combinations() {
        let one = model(&[(1.0, WeakLearner::constant(P))], 2);
        assert_eq!(one.predict_score(&[0.3, -1.0]).unwrap(), 1.0);
        let two = model(
            &[(1.0, WeakLearner::constant(P)), (0.5, WeakLearner::constant(N))],
            2,
        );
        assert_eq!(two.predict_score(&[7.0, 7.0]).unwrap(), 0.5);
        assert_eq!(two.predict_label(&[7.0, 7.0]).unwrap(), P);
    }

    #[test]
    fn label_follows_sign_with_zero_tie_positive() {
        let neg = model(&[(0.2, WeakLearner::constant(N))], 1);
        assert_eq!(neg.predict_label(&[0.0]).unwrap(), N);
        let tie = model(
            &[(0.5, WeakLearner::constant(P)), (0.5, WeakLearner::constant(N))],
            1,
        );
        assert_eq!(tie.predict_score(&[0.0]).unwrap(), 0.0);
        assert_eq!(tie.predict_label(&[0.0]).unwrap(), P);
    }

    #[test]
    fn dimension_mismatch() {
        let e = model(&[(1.0, WeakLearner::constant(P))], 3);
        assert_eq!(
            e.predict_score(&[1.0, 2.0]).unwrap_err(),
            Error::DimensionMismatch { expected: 3, found: 2 }
        );
    }

    #[test]
    fn exp_losses_examples() {
        let data = Dataset::from_rows(&[[0.0], [1.0]], alloc::vec![N, P]).unwrap();
        let empty = Ensemble::new(1);
        assert_eq!(empty.exp_losses(&data).unwrap(), [1.0, 1.0]);

        // stump predicts -1 on x <= 0.5, +1 otherwise: correct on both rows
        let stump = WeakLearner::stump(0, 0.5, N, P);
        let right = model(&[(core::f64::consts::LN_2, stump.clone())], 1);
        for l in right.exp_losses(&data).unwrap() {
            assert!((l - 0.5).abs() < 1e-15);
        }
        let wrong = model(&[(core::f64::consts::LN_2, stump.negated())], 1);
        for l in wrong.exp_losses(&data).unwrap() {
            assert!((l - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn clamp_keeps_losses_finite() {
        let data = Dataset::from_rows(&[[0.0]], alloc::vec![P]).unwrap();
        let e = model(&[(1e6, WeakLearner::constant(N))], 1);
        let l = e.exp_losses(&data).unwrap()[0];
        assert!(l.is_finite());
        assert!((l - libm::exp(50.0)).abs() / l < 1e-15);
        assert_eq!(e.exp_losses_with_clamp(&data, 1.0).unwrap()[0], libm::exp(1.0));
    }

    #[test]
    fn rejects_non_finite_alpha() {
        let mut e = Ensemble::new(1);
        assert!(e.push(f64::INFINITY, WeakLearner::constant(P)).is_err());
    }

    #[test]
    fn staged_errors_track_prefixes() {
        let data = Dataset::from_rows(&[[0.0], [1.0]], alloc::vec![N, P]).unwrap();
        let e = model(
            &[
                (1.0, WeakLearner::constant(P)),
                (2.0, WeakLearner::stump(0, 0.5, N, P)),
            ],
            1,
        );
        assert_eq!(e.staged_errors(&data).unwrap(), [0.5, 0.0]);
        assert_eq!(e.truncated(1).error_rate(&data).unwrap(), 0.5);
    }
}
