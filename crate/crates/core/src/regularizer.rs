//! Self-paced regularizers and their closed-form latent-weight solutions.
//!
//! For a fixed loss `l`, each regularizer `f(v; lambda)` defines the optimal
//! latent weight `v*(lambda; l) = argmin_{v in [0,1]} v * l + f(v; lambda)`.
//! The latent loss is the antiderivative `F(l) = int_0^l v*(lambda; s) ds`;
//! it is concave, starts at 0 and becomes constant once `v*` reaches zero.

use alloc::format;

use libm::{pow, sqrt};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RegularizerKind {
    /// Negative l1 penalty `-lambda * v`; binary weights.
    Hard,
    /// `lambda * (v^2 / 2 - v)`; weights decay linearly with the loss.
    LinearSoft,
    /// `gamma^2 / (v + gamma / lambda)`; hard at both ends, soft in between.
    Mixture { gamma: f64 },
    /// `lambda * (v^t / t - v)` with `t > 1`.
    PolynomialSoft { t: f64 },
}

/// A self-paced regularizer together with its age parameter `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpRegularizer {
    kind: RegularizerKind,
    lambda: f64,
}

impl SpRegularizer {
    pub fn new(kind: RegularizerKind, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        match kind {
            RegularizerKind::Mixture { gamma } if !(gamma.is_finite() && gamma > 0.0) => {
                return Err(Error::InvalidParameter(format!(
                    "mixture gamma must be positive and finite, got {gamma}"
                )));
            }
            RegularizerKind::PolynomialSoft { t } if !(t.is_finite() && t > 1.0) => {
                return Err(Error::InvalidParameter(format!(
                    "polynomial exponent t must exceed 1, got {t}"
                )));
            }
            _ => {}
        }
        Ok(Self { kind, lambda })
    }

    pub fn hard(lambda: f64) -> Result<Self> {
        Self::new(RegularizerKind::Hard, lambda)
    }

    pub fn linear_soft(lambda: f64) -> Result<Self> {
        Self::new(RegularizerKind::LinearSoft, lambda)
    }

    pub fn mixture(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(RegularizerKind::Mixture { gamma }, lambda)
    }

    pub fn polynomial_soft(lambda: f64, t: f64) -> Result<Self> {
        Self::new(RegularizerKind::PolynomialSoft { t }, lambda)
    }

    #[inline]
    pub fn kind(&self) -> RegularizerKind {
        self.kind
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Same regularizer with a different age parameter.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.kind, lambda)
    }

    /// Short lowercase name used in file names and reports.
    pub fn name(&self) -> &'static str {
        match self.kind {
            RegularizerKind::Hard => "hard",
            RegularizerKind::LinearSoft => "linear",
            RegularizerKind::Mixture { .. } => "mixture",
            RegularizerKind::PolynomialSoft { .. } => "polynomial",
        }
    }

    /// Loss at and beyond which the latent weight is zero.
    ///
    /// Mixture weighting thresholds on `lambda^2`, the others on `lambda`.
    pub fn zero_weight_threshold(&self) -> f64 {
        match self.kind {
            RegularizerKind::Mixture { .. } => self.lambda * self.lambda,
            _ => self.lambda,
        }
    }

    /// The penalty term `f(v; lambda)` minimized jointly with `v * loss`.
    pub fn penalty(&self, v: f64) -> f64 {
        let lambda = self.lambda;
        match self.kind {
            RegularizerKind::Hard => -lambda * v,
            RegularizerKind::LinearSoft => lambda * (0.5 * v * v - v),
            RegularizerKind::Mixture { gamma } => gamma * gamma / (v + gamma / lambda),
            RegularizerKind::PolynomialSoft { t } => lambda * (pow(v, t) / t - v),
        }
    }

    /// Closed-form optimal latent weight `v*(lambda; loss)` in `[0, 1]`.
    pub fn latent_weight(&self, loss: f64) -> Result<f64> {
        check_loss(loss)?;
        Ok(self.weight_unchecked(loss))
    }

    pub(crate) fn weight_unchecked(&self, loss: f64) -> f64 {
        let lambda = self.lambda;
        match self.kind {
            RegularizerKind::Hard => {
                if loss < lambda {
                    1.0
                } else {
                    0.0
                }
            }
            RegularizerKind::LinearSoft => {
                if loss < lambda {
                    1.0 - loss / lambda
                } else {
                    0.0
                }
            }
            RegularizerKind::Mixture { gamma } => {
                let lower = mixture_lower(lambda, gamma);
                if loss <= lower {
                    1.0
                } else if loss >= lambda * lambda {
                    0.0
                } else {
                    // Clamped: rounding can push the expression a hair past 1
                    // right above the lower breakpoint.
                    (gamma * (1.0 / sqrt(loss) - 1.0 / lambda)).clamp(0.0, 1.0)
                }
            }
            RegularizerKind::PolynomialSoft { t } => {
                if loss < lambda {
                    pow(1.0 - loss / lambda, 1.0 / (t - 1.0))
                } else {
                    0.0
                }
            }
        }
    }

    /// Latent loss `F(loss) = int_0^loss v*(lambda; s) ds`.
    pub fn latent_loss(&self, loss: f64) -> Result<f64> {
        check_loss(loss)?;
        Ok(self.latent_loss_unchecked(loss))
    }

    pub(crate) fn latent_loss_unchecked(&self, loss: f64) -> f64 {
        let lambda = self.lambda;
        match self.kind {
            RegularizerKind::Hard => loss.min(lambda),
            RegularizerKind::LinearSoft => {
                let l = loss.min(lambda);
                l - l * l / (2.0 * lambda)
            }
            RegularizerKind::Mixture { gamma } => {
                let lower = mixture_lower(lambda, gamma);
                if loss <= lower {
                    return loss;
                }
                let l = loss.min(lambda * lambda);
                lower + 2.0 * gamma * (sqrt(l) - sqrt(lower)) - gamma * (l - lower) / lambda
            }
            RegularizerKind::PolynomialSoft { t } => {
                let l = loss.min(lambda);
                let p = t / (t - 1.0);
                lambda / p * (1.0 - pow(1.0 - l / lambda, p))
            }
        }
    }

    /// Brute-force minimizer of `v * loss + penalty(v)` over the grid
    /// `{0, step, 2 step, ..., 1}`. Independent of the closed forms; ties keep
    /// the smallest `v`.
    pub fn oracle_weight(&self, loss: f64, grid_step: f64) -> Result<f64> {
        check_loss(loss)?;
        if !(grid_step > 0.0 && grid_step <= 0.01) {
            return Err(Error::InvalidParameter(format!(
                "grid step must lie in (0, 0.01], got {grid_step}"
            )));
        }
        let steps = libm::ceil(1.0 / grid_step) as usize;
        let mut best_v = 0.0;
        let mut best = self.penalty(0.0);
        for k in 1..=steps {
            let v = (k as f64 * grid_step).min(1.0);
            let objective = v * loss + self.penalty(v);
            if objective < best {
                best = objective;
                best_v = v;
            }
        }
        Ok(best_v)
    }
}

/// Lower Mixture breakpoint `(lambda * gamma / (lambda + gamma))^2`.
#[inline]
fn mixture_lower(lambda: f64, gamma: f64) -> f64 {
    let r = lambda * gamma / (lambda + gamma);
    r * r
}

#[inline]
fn check_loss(loss: f64) -> Result<()> {
    if loss.is_finite() && loss >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidLoss(loss))
    }
}
