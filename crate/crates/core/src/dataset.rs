use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A binary class label, encoded as -1 / +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    /// Sign convention used by every prediction: a score of exactly 0 maps to +1.
    #[inline]
    pub fn from_score(score: f64) -> Self {
        if score >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    #[inline]
    pub fn flipped(self) -> Self {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }
}

/// Dense feature matrix (row-major) with one ±1 label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<Label>,
    n_features: usize,
}

impl Dataset {
    /// Builds a dataset from a row-major feature buffer of `labels.len() * n_features` values.
    pub fn new(features: Vec<f64>, n_features: usize, labels: Vec<Label>) -> Result<Self> {
        if labels.is_empty() || n_features == 0 {
            return Err(Error::EmptyDataset);
        }
        let expected = labels.len() * n_features;
        if features.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: features.len(),
            });
        }
        if let Some(pos) = features.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteFeature {
                row: pos / n_features,
                column: pos % n_features,
            });
        }
        Ok(Self {
            features,
            labels,
            n_features,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], labels: Vec<Label>) -> Result<Self> {
        let n_features = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                found: labels.len(),
            });
        }
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n_features {
                return Err(Error::DimensionMismatch {
                    expected: n_features,
                    found: row.len(),
                });
            }
            features.extend_from_slice(row);
        }
        Self::new(features, n_features, labels)
    }

    #[inline]
    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.features[i * self.n_features + j]
    }

    #[inline]
    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.n_features)
    }

    /// Same features with a replacement label vector.
    pub fn with_labels(&self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.n_samples() {
            return Err(Error::LengthMismatch {
                expected: self.n_samples(),
                found: labels.len(),
            });
        }
        Ok(Self {
            features: self.features.clone(),
            labels,
            n_features: self.n_features,
        })
    }

    /// Rows selected by `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n_samples() {
                return Err(Error::InvalidParameter(alloc::format!(
                    "row index {i} out of range for {} samples",
                    self.n_samples()
                )));
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::new(features, self.n_features, labels)
    }
}
