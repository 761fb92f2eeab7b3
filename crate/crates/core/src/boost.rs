//! AdaBoost and its self-paced variant.
//!
//! Each outer round fits a weak learner on the normalized products `v_i w_i`,
//! sets `alpha = 0.5 ln((1 - err) / err)`, recomputes the latent weights `v`
//! from losses that include the new stage, and finally applies the usual
//! AdaBoost update `w_i <- w_i exp(-alpha y_i f(x_i))`. With no regularizer `v`
//! stays at one and the loop is plain discrete AdaBoost.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, log, sqrt};

use crate::dataset::{Dataset, Label};
use crate::ensemble::{Ensemble, Margin, DEFAULT_SCORE_CLAMP};
use crate::error::{Error, Result};
use crate::regularizer::SpRegularizer;
use crate::tree::{enumerate_stumps, fit_tree_sorted, SortedColumns, TreeParams, WeakLearner};

pub const DEFAULT_WARM_ROUNDS: usize = 3;
pub const DEFAULT_WARM_LAMBDA: f64 = 1e6;
pub const DEFAULT_ERR_FLOOR: f64 = 1e-10;
/// Max-norm change in `v` below which the inner iteration stops early.
pub const INNER_TOLERANCE: f64 = 1e-8;

/// How each round's weak learner is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LearnerSearch {
    /// Greedy weighted tree induction.
    Tree(TreeParams),
    /// Exact search over every stump and both constant classifiers.
    ExhaustiveStumps,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoostConfig {
    pub rounds: usize,
    /// `None` trains plain AdaBoost.
    pub regularizer: Option<SpRegularizer>,
    pub warm_start_rounds: usize,
    pub warm_lambda: f64,
    pub inner_steps: usize,
    pub learner: LearnerSearch,
    pub err_floor: f64,
    pub score_clamp: f64,
}

impl BoostConfig {
    pub fn adaboost(rounds: usize) -> Self {
        Self {
            rounds,
            regularizer: None,
            warm_start_rounds: DEFAULT_WARM_ROUNDS,
            warm_lambda: DEFAULT_WARM_LAMBDA,
            inner_steps: 1,
            learner: LearnerSearch::Tree(TreeParams::default()),
            err_floor: DEFAULT_ERR_FLOOR,
            score_clamp: DEFAULT_SCORE_CLAMP,
        }
    }

    pub fn splboost(rounds: usize, regularizer: SpRegularizer) -> Self {
        Self {
            regularizer: Some(regularizer),
            ..Self::adaboost(rounds)
        }
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.learner = LearnerSearch::Tree(TreeParams {
            max_depth,
            ..match self.learner {
                LearnerSearch::Tree(p) => p,
                LearnerSearch::ExhaustiveStumps => TreeParams::default(),
            }
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidParameter(msg));
        if self.rounds == 0 {
            return bad("rounds must be positive".into());
        }
        if self.regularizer.is_some() && self.warm_start_rounds >= self.rounds {
            return bad(format!(
                "warm-start rounds ({}) must be fewer than total rounds ({})",
                self.warm_start_rounds, self.rounds
            ));
        }
        if !(self.warm_lambda.is_finite() && self.warm_lambda > 0.0) {
            return bad(format!("warm lambda must be positive, got {}", self.warm_lambda));
        }
        if self.inner_steps == 0 {
            return bad("inner steps must be positive".into());
        }
        if !(self.err_floor > 0.0 && self.err_floor < 0.5) {
            return bad(format!("err floor must lie in (0, 0.5), got {}", self.err_floor));
        }
        if self.score_clamp.is_nan() || self.score_clamp <= 0.0 {
            return bad(format!("score clamp must be positive, got {}", self.score_clamp));
        }
        if let LearnerSearch::Tree(p) = self.learner {
            if p.max_depth == 0 {
                return bad("max depth must be positive".into());
            }
        }
        Ok(())
    }
}

/// What happened in one outer round.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: usize,
    pub warm: bool,
    /// Weighted error after any sign flip, before clamping.
    pub raw_err: f64,
    pub err: f64,
    pub flipped: bool,
    pub alpha: f64,
    pub inner_steps: usize,
    /// `sum v_i w_i exp(-alpha y_i f_i) / sum v_i w_i` with the weights the
    /// learner was fitted on.
    pub descent_ratio: f64,
    /// Latent weights after this round's update.
    pub v: Vec<f64>,
    /// During warm-start rounds, the weights the configured lambda would give.
    pub v_configured: Option<Vec<f64>>,
    /// `sum_i F(l_i)` under the configured regularizer (plain exponential loss
    /// for AdaBoost).
    pub latent_objective: f64,
    pub zero_weight_count: usize,
}

impl RoundRecord {
    /// AdaBoost's per-round contraction `2 sqrt(err (1 - err))`.
    pub fn descent_bound(&self) -> f64 {
        2.0 * sqrt(self.err * (1.0 - self.err))
    }

    /// True when the raw error fell outside `[floor, 1 - floor]`.
    pub fn err_clamped(&self) -> bool {
        self.err != self.raw_err
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainTrace {
    pub rounds: Vec<RoundRecord>,
}

impl TrainTrace {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }
}

/// Clamps a weighted error into `[floor, 1 - floor]`.
#[inline]
pub fn clamp_err(err: f64, floor: f64) -> f64 {
    err.clamp(floor, 1.0 - floor)
}

/// Exact minimizer of `(1 - err) e^{-alpha} + err e^{alpha}`.
#[inline]
pub fn compute_alpha(err: f64) -> f64 {
    debug_assert!(err > 0.0 && err < 1.0, "err must be clamped first");
    0.5 * log((1.0 - err) / err)
}

/// Element-wise closed-form latent weights.
pub fn update_v(reg: &SpRegularizer, losses: &[f64]) -> Result<Vec<f64>> {
    losses.iter().map(|&l| reg.latent_weight(l)).collect()
}

/// `w_i <- w_i exp(-alpha y_i f(x_i))`, renormalized to sum to one.
pub fn update_w(w: &[f64], alpha: f64, learner: &WeakLearner, data: &Dataset) -> Result<Vec<f64>> {
    if w.len() != data.n_samples() {
        return Err(Error::LengthMismatch {
            expected: data.n_samples(),
            found: w.len(),
        });
    }
    let preds = learner.predict_all(data);
    reweight(w, alpha, &preds, data.labels(), 0)
}

fn reweight(w: &[f64], alpha: f64, preds: &[Label], labels: &[Label], round: usize) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = w
        .iter()
        .zip(preds.iter().zip(labels))
        .map(|(&wi, (f, y))| wi * exp(-alpha * y.value() * f.value()))
        .collect();
    let total: f64 = out.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NonFiniteWeights { round });
    }
    for x in &mut out {
        *x /= total;
    }
    Ok(out)
}

/// Sum of latent losses, or of raw exponential losses without a regularizer.
pub fn latent_objective(reg: Option<&SpRegularizer>, losses: &[f64]) -> Result<f64> {
    match reg {
        Some(r) => losses.iter().map(|&l| r.latent_loss(l)).sum(),
        None => Ok(losses.iter().sum()),
    }
}

enum Searcher {
    Tree {
        sorted: SortedColumns,
        params: TreeParams,
    },
    Stumps {
        stumps: Vec<WeakLearner>,
        /// `correct[s][i]`: stump `s` classifies row `i` correctly.
        correct: Vec<Vec<bool>>,
    },
}

impl Searcher {
    fn new(data: &Dataset, search: &LearnerSearch) -> Self {
        match search {
            LearnerSearch::Tree(params) => Searcher::Tree {
                sorted: SortedColumns::new(data),
                params: *params,
            },
            LearnerSearch::ExhaustiveStumps => {
                let stumps = enumerate_stumps(data);
                let correct = stumps
                    .iter()
                    .map(|s| {
                        data.rows()
                            .zip(data.labels())
                            .map(|(x, &y)| s.predict(x) == y)
                            .collect()
                    })
                    .collect();
                Searcher::Stumps { stumps, correct }
            }
        }
    }

    fn fit(&self, data: &Dataset, weights: &[f64]) -> Result<WeakLearner> {
        match self {
            Searcher::Tree { sorted, params } => fit_tree_sorted(data, sorted, weights, params),
            Searcher::Stumps { stumps, correct } => {
                // Both signs of every stump are present, so the lowest error is
                // also the lowest exact exponential loss.
                let mut best = 0;
                let mut best_err = f64::INFINITY;
                for (s, ok) in correct.iter().enumerate() {
                    let err: f64 = ok
                        .iter()
                        .zip(weights)
                        .filter(|(c, _)| !**c)
                        .map(|(_, w)| *w)
                        .sum();
                    if err < best_err {
                        best_err = err;
                        best = s;
                    }
                }
                Ok(stumps[best].clone())
            }
        }
    }
}

struct Step {
    learner: WeakLearner,
    preds: Vec<Label>,
    raw_err: f64,
    err: f64,
    flipped: bool,
    alpha: f64,
    descent_ratio: f64,
}

/// Runs `config.rounds` outer rounds and returns the model with its trace.
pub fn train(data: &Dataset, config: &BoostConfig) -> Result<(Ensemble, TrainTrace)> {
    config.validate()?;
    let n = data.n_samples();
    let labels = data.labels();
    let searcher = Searcher::new(data, &config.learner);

    let mut w = vec![1.0 / n as f64; n];
    let mut v = vec![1.0; n];
    let mut scores = vec![0.0; n];
    let mut ensemble = Ensemble::new(data.n_features());
    let mut trace = TrainTrace::default();
    let mut fit_weights = vec![0.0; n];
    let mut losses = vec![1.0; n];

    for round in 1..=config.rounds {
        let warm = config.regularizer.is_some() && round <= config.warm_start_rounds;
        let active = match config.regularizer {
            Some(r) if warm => Some(r.with_lambda(config.warm_lambda)?),
            other => other,
        };

        let mut step: Option<Step> = None;
        let mut inner_done = 0;
        while inner_done < config.inner_steps {
            for i in 0..n {
                fit_weights[i] = v[i] * w[i];
            }
            let total: f64 = fit_weights.iter().sum();
            if !total.is_finite() {
                return Err(Error::NonFiniteWeights { round });
            }
            if total.is_nan() || total <= 0.0 {
                return Err(Error::AllRejected { round });
            }
            for x in &mut fit_weights {
                *x /= total;
            }

            let (learner, preds, raw_err, flipped) =
                orient(searcher.fit(data, &fit_weights)?, data, &fit_weights);
            let err = clamp_err(raw_err, config.err_floor);
            let alpha = compute_alpha(err);
            let descent_ratio: f64 = fit_weights
                .iter()
                .zip(preds.iter().zip(labels))
                .map(|(&fw, (f, y))| fw * exp(-alpha * y.value() * f.value()))
                .sum();

            for i in 0..n {
                let margin = Margin::new(labels[i], scores[i] + alpha * preds[i].value());
                losses[i] = margin.exp_loss(config.score_clamp);
            }
            let new_v = match &active {
                Some(r) => update_v(r, &losses)?,
                None => vec![1.0; n],
            };
            let delta = new_v
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            v = new_v;
            inner_done += 1;
            step = Some(Step {
                learner,
                preds,
                raw_err,
                err,
                flipped,
                alpha,
                descent_ratio,
            });
            if delta < INNER_TOLERANCE {
                break;
            }
        }
        let step = step.expect("at least one inner step runs");

        for (score, pred) in scores.iter_mut().zip(&step.preds) {
            *score += step.alpha * pred.value();
        }
        w = reweight(&w, step.alpha, &step.preds, labels, round)?;
        ensemble.push(step.alpha, step.learner)?;

        let latent = latent_objective(config.regularizer.as_ref(), &losses)?;
        let v_configured = match (warm, &config.regularizer) {
            (true, Some(r)) => Some(update_v(r, &losses)?),
            _ => None,
        };
        trace.rounds.push(RoundRecord {
            round,
            warm,
            raw_err: step.raw_err,
            err: step.err,
            flipped: step.flipped,
            alpha: step.alpha,
            inner_steps: inner_done,
            descent_ratio: step.descent_ratio,
            zero_weight_count: v.iter().filter(|&&x| x == 0.0).count(),
            v: v.clone(),
            v_configured,
            latent_objective: latent,
        });
    }

    if config.regularizer.is_some() {
        ensemble.set_warm_rounds(config.warm_start_rounds.min(config.rounds));
    }
    Ok((ensemble, trace))
}

/// Negates a learner whose weighted error exceeds one half.
fn orient(learner: WeakLearner, data: &Dataset, weights: &[f64]) -> (WeakLearner, Vec<Label>, f64, bool) {
    let mut preds = learner.predict_all(data);
    let err = wrong_weight(&preds, data.labels(), weights);
    if err <= 0.5 {
        return (learner, preds, err, false);
    }
    for p in &mut preds {
        *p = p.flipped();
    }
    let err = wrong_weight(&preds, data.labels(), weights);
    (learner.negated(), preds, err, true)
}

fn wrong_weight(preds: &[Label], labels: &[Label], weights: &[f64]) -> f64 {
    preds
        .iter()
        .zip(labels)
        .zip(weights)
        .filter(|((p, y), _)| p != y)
        .map(|(_, w)| *w)
        .sum()
}
