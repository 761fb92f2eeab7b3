//! Dataset ingestion, synthetic data, label noise and resampling.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use splboost_core::{Dataset, Label};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Which CSV column carries the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// Numeric strings select by zero-based index, anything else by header name.
    pub fn parse(s: &str) -> Self {
        s.parse().map_or_else(|_| LabelColumn::Name(s.to_owned()), LabelColumn::Index)
    }
}

/// Reads a comma-separated file with an optional header row.
///
/// The first row is a header when the label column is given by name, or when
/// any of its non-label fields fails to parse as a number. `positive_label`
/// maps to +1, the other label value to -1.
pub fn load_csv(path: impl AsRef<Path>, label_column: &LabelColumn, positive_label: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| Error::Csv {
            path: path.to_owned(),
            source,
        })?;
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|source| Error::Csv {
            path: path.to_owned(),
            source,
        })?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        records.push(record);
    }
    let format = |row: usize, message: String| Error::Format {
        path: path.to_owned(),
        row,
        message,
    };
    let Some(first) = records.first() else {
        return Err(Error::Dataset {
            path: path.to_owned(),
            message: "file is empty".into(),
        });
    };
    let width = first.len();
    if width < 2 {
        return Err(format(1, "need at least one feature column and a label column".into()));
    }

    let (label_idx, has_header) = match label_column {
        LabelColumn::Name(name) => {
            let idx = first
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| format(1, format!("no column named {name:?} in header")))?;
            (idx, true)
        }
        LabelColumn::Index(idx) => {
            if *idx >= width {
                return Err(format(1, format!("label column {idx} out of range for {width} columns")));
            }
            let header = first
                .iter()
                .enumerate()
                .any(|(j, f)| j != *idx && f.parse::<f64>().is_err());
            (*idx, header)
        }
    };

    let body = if has_header { &records[1..] } else { &records[..] };
    if body.is_empty() {
        return Err(Error::Dataset {
            path: path.to_owned(),
            message: "no data rows".into(),
        });
    }
    let row_offset = if has_header { 2 } else { 1 };
    let mut features = Vec::with_capacity(body.len() * (width - 1));
    let mut raw_labels = Vec::with_capacity(body.len());
    let mut distinct = BTreeSet::new();
    for (k, record) in body.iter().enumerate() {
        let row = k + row_offset;
        if record.len() != width {
            return Err(format(row, format!("expected {width} fields, found {}", record.len())));
        }
        for (j, field) in record.iter().enumerate() {
            if j == label_idx {
                continue;
            }
            let value: f64 = field
                .parse()
                .map_err(|_| format(row, format!("column {j}: non-numeric feature {field:?}")))?;
            if !value.is_finite() {
                return Err(format(row, format!("column {j}: non-finite feature {field:?}")));
            }
            features.push(value);
        }
        let label = &record[label_idx];
        distinct.insert(label.to_owned());
        if distinct.len() > 2 {
            let values: Vec<_> = distinct.iter().cloned().collect();
            return Err(format(row, format!("label column has more than two values: {values:?}")));
        }
        raw_labels.push(label == positive_label);
    }
    if distinct.len() != 2 {
        return Err(Error::Dataset {
            path: path.to_owned(),
            message: format!("label column must have exactly two values, found {distinct:?}"),
        });
    }
    if !distinct.contains(positive_label) {
        return Err(Error::Dataset {
            path: path.to_owned(),
            message: format!("positive label {positive_label:?} not among {distinct:?}"),
        });
    }
    let labels = raw_labels
        .into_iter()
        .map(|p| if p { Label::Positive } else { Label::Negative })
        .collect();
    Ok(Dataset::new(features, width - 1, labels)?)
}

/// Writes features as `x1..xd` columns and the label as `1` / `-1`.
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        let header: Vec<String> = (1..=data.n_features()).map(|j| format!("x{j}")).collect();
        writeln!(out, "{},label", header.join(","))?;
        for (i, row) in data.rows().enumerate() {
            for x in row {
                write!(out, "{x},")?;
            }
            writeln!(out, "{}", if data.label(i) == Label::Positive { 1 } else { -1 })?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(a: &[f64], d: usize) -> Result<Vec<f64>> {
    if a.len() != d * d {
        return Err(Error::Config(format!("expected a {d}x{d} matrix")));
    }
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * d + k] * l[j * d + k]).sum();
            if i == j {
                let diag = a[i * d + i] - s;
                if diag.is_nan() || diag <= 0.0 {
                    return Err(Error::Config("matrix is not positive definite".into()));
                }
                l[i * d + i] = diag.sqrt();
            } else {
                l[i * d + j] = (a[i * d + j] - s) / l[j * d + j];
            }
        }
    }
    Ok(l)
}

pub const POSITIVE_MEAN: [f64; 2] = [2.0, -2.0];
pub const POSITIVE_COV: [f64; 4] = [2.5, 1.5, 1.5, 5.0];
pub const NEGATIVE_MEAN: [f64; 2] = [-2.0, 2.0];
pub const NEGATIVE_COV: [f64; 4] = [2.3, -0.7, -0.7, 2.3];

#[derive(Debug, Clone)]
pub struct SynthData {
    pub data: Dataset,
    /// Rows whose label was reversed, ascending.
    pub flipped: Vec<usize>,
}

/// Two-class 2-D Gaussian data: `n_per_class` positives (rows `0..n`) then
/// `n_per_class` negatives, with `round(flip_rate * n_per_class)` labels
/// reversed inside each class.
pub fn synth_gaussian(n_per_class: usize, flip_rate: f64, seed: u64) -> Result<SynthData> {
    if n_per_class == 0 {
        return Err(Error::Config("n_per_class must be positive".into()));
    }
    if !(0.0..=0.5).contains(&flip_rate) {
        return Err(Error::Config(format!("flip rate must lie in [0, 0.5], got {flip_rate}")));
    }
    let mut rng = Rng::new(seed);
    let mut features = Vec::with_capacity(4 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for (label, mean, cov) in [
        (Label::Positive, POSITIVE_MEAN, POSITIVE_COV),
        (Label::Negative, NEGATIVE_MEAN, NEGATIVE_COV),
    ] {
        let l = cholesky(&cov, 2)?;
        for _ in 0..n_per_class {
            let z0 = rng.standard_normal();
            let z1 = rng.standard_normal();
            features.push(mean[0] + l[0] * z0);
            features.push(mean[1] + l[2] * z0 + l[3] * z1);
            labels.push(label);
        }
    }
    let per_class = (flip_rate * n_per_class as f64).round() as usize;
    let mut flipped = Vec::with_capacity(2 * per_class);
    for class in 0..2 {
        let offset = class * n_per_class;
        for i in rng.sample_indices(n_per_class, per_class) {
            labels[offset + i] = labels[offset + i].flipped();
            flipped.push(offset + i);
        }
    }
    Ok(SynthData {
        data: Dataset::new(features, 2, labels)?,
        flipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub rate: f64,
    pub seed: u64,
}

/// Reverses exactly `round(rate * n)` labels chosen uniformly without
/// replacement. Returns the noisy copy and the flipped rows (ascending).
pub fn inject_noise(data: &Dataset, spec: NoiseSpec) -> Result<(Dataset, Vec<usize>)> {
    if !(0.0..=0.5).contains(&spec.rate) {
        return Err(Error::Config(format!("noise rate must lie in [0, 0.5], got {}", spec.rate)));
    }
    let n = data.n_samples();
    let k = (spec.rate * n as f64).round() as usize;
    let flipped = Rng::new(spec.seed).sample_indices(n, k);
    let mut labels = data.labels().to_vec();
    for &i in &flipped {
        labels[i] = labels[i].flipped();
    }
    Ok((data.with_labels(labels)?, flipped))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub folds: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            folds: 5,
            seed: 0,
        }
    }
}

/// Shuffled `(train, test)` row indices; train takes the first
/// `round(train_fraction * n)` positions.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    let n_train = (spec.train_fraction * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::Config(format!(
            "train fraction {} leaves an empty partition of {n} rows",
            spec.train_fraction
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    Rng::new(spec.seed).shuffle(&mut idx);
    let test = idx.split_off(n_train);
    Ok((idx, test))
}

pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(data.n_samples(), spec)?;
    Ok((data.subset(&train)?, data.subset(&test)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Partitions shuffled indices into `folds` contiguous groups whose sizes
/// differ by at most one (the first `n % folds` groups are larger).
pub fn fold_indices(n: usize, spec: &SplitSpec) -> Result<Vec<Fold>> {
    if spec.folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {}", spec.folds)));
    }
    if n < spec.folds {
        return Err(Error::Config(format!("{n} rows cannot fill {} folds", spec.folds)));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    Rng::new(spec.seed).shuffle(&mut idx);
    let base = n / spec.folds;
    let extra = n % spec.folds;
    let mut out = Vec::with_capacity(spec.folds);
    let mut start = 0;
    for k in 0..spec.folds {
        let len = base + usize::from(k < extra);
        let mut validation = idx[start..start + len].to_vec();
        validation.sort_unstable();
        let mut train: Vec<usize> = idx[..start].iter().chain(&idx[start + len..]).copied().collect();
        train.sort_unstable();
        out.push(Fold { train, validation });
        start += len;
    }
    Ok(out)
}

pub fn folds(data: &Dataset, spec: &SplitSpec) -> Result<Vec<Fold>> {
    fold_indices(data.n_samples(), spec)
}
