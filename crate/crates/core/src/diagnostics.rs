//! Curves and reports derived from regularizers, traces and trained models.

use alloc::vec::Vec;

use crate::boost::TrainTrace;
use crate::dataset::Dataset;
use crate::ensemble::{Ensemble, Margin, DEFAULT_SCORE_CLAMP};
use crate::error::Result;
use crate::regularizer::SpRegularizer;

pub const DEFAULT_GRID_POINTS: usize = 601;
pub const DEFAULT_GRID_LIMIT: f64 = 3.0;

/// `points` evenly spaced margins on `[-limit, limit]`.
pub fn margin_grid(limit: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => {
            let step = 2.0 * limit / (points - 1) as f64;
            (0..points).map(|k| -limit + k as f64 * step).collect()
        }
    }
}

pub fn default_margin_grid() -> Vec<f64> {
    margin_grid(DEFAULT_GRID_LIMIT, DEFAULT_GRID_POINTS)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub margin: f64,
    pub value: f64,
}

/// Effective sample weight `v*(exp(-m)) * exp(-m)` for each margin `m`;
/// without a regularizer this is AdaBoost's `exp(-m)`.
pub fn weight_curve(reg: Option<&SpRegularizer>, margins: &[f64]) -> Vec<CurvePoint> {
    margins
        .iter()
        .map(|&m| {
            let loss = Margin(m).exp_loss(DEFAULT_SCORE_CLAMP);
            let v = reg.map_or(1.0, |r| r.weight_unchecked(loss));
            CurvePoint {
                margin: m,
                value: v * loss,
            }
        })
        .collect()
}

/// Latent loss `F(exp(-m))` for each margin; the exponential loss itself
/// without a regularizer.
pub fn loss_curve(reg: Option<&SpRegularizer>, margins: &[f64]) -> Vec<CurvePoint> {
    margins
        .iter()
        .map(|&m| {
            let loss = Margin(m).exp_loss(DEFAULT_SCORE_CLAMP);
            CurvePoint {
                margin: m,
                value: reg.map_or(loss, |r| r.latent_loss_unchecked(loss)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub round: usize,
    pub latent_objective: f64,
    pub err: f64,
    pub alpha: f64,
    pub zero_weight_count: usize,
}

pub fn objective_trajectory(trace: &TrainTrace) -> Vec<TrajectoryRow> {
    trace
        .rounds
        .iter()
        .map(|r| TrajectoryRow {
            round: r.round,
            latent_objective: r.latent_objective,
            err: r.err,
            alpha: r.alpha,
            zero_weight_count: r.zero_weight_count,
        })
        .collect()
}

/// Indices of samples whose latent weight is zero under the model's losses.
pub fn rejected_samples(ensemble: &Ensemble, data: &Dataset, reg: &SpRegularizer) -> Result<Vec<usize>> {
    let losses = ensemble.exp_losses(data)?;
    let mut out = Vec::new();
    for (i, l) in losses.into_iter().enumerate() {
        if reg.latent_weight(l)? == 0.0 {
            out.push(i);
        }
    }
    Ok(out)
}
