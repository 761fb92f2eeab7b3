//! TSV and JSON Lines writers. Every file uses LF line endings; reals are
//! written in scientific notation with ten significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use splboost_core::diagnostics::{CurvePoint, TrajectoryRow};
use splboost_core::Ensemble;

use crate::error::{Error, Result};
use crate::experiment::{CellFailure, RankTable, ResultRecord, SummaryRow};

pub fn num(x: f64) -> String {
    format!("{x:.9e}")
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)
        .and_then(|()| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_curve_tsv(path: impl AsRef<Path>, value_column: &str, points: &[CurvePoint]) -> Result<()> {
    write_file(path.as_ref(), |out| {
        writeln!(out, "margin\t{value_column}")?;
        for p in points {
            writeln!(out, "{}\t{}", num(p.margin), num(p.value))?;
        }
        Ok(())
    })
}

pub fn write_trajectory_tsv(path: impl AsRef<Path>, rows: &[TrajectoryRow]) -> Result<()> {
    write_file(path.as_ref(), |out| {
        writeln!(out, "round\tlatent_objective\terr\talpha\tzero_weight_count")?;
        for r in rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.round,
                num(r.latent_objective),
                num(r.err),
                num(r.alpha),
                r.zero_weight_count
            )?;
        }
        Ok(())
    })
}

pub fn write_indices_tsv(path: impl AsRef<Path>, column: &str, indices: &[usize]) -> Result<()> {
    write_file(path.as_ref(), |out| {
        writeln!(out, "{column}")?;
        for i in indices {
            writeln!(out, "{i}")?;
        }
        Ok(())
    })
}

pub fn write_summary_tsv(path: impl AsRef<Path>, rows: &[SummaryRow]) -> Result<()> {
    write_file(path.as_ref(), |out| {
        writeln!(out, "dataset\talgorithm\tnoise\tmean_err\tstd_err\tn_reps")?;
        for r in rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.dataset,
                r.algorithm,
                r.noise,
                num(r.mean_err),
                num(r.std_err),
                r.n_reps
            )?;
        }
        Ok(())
    })
}

pub fn write_rank_tsv(path: impl AsRef<Path>, table: &RankTable) -> Result<()> {
    write_file(path.as_ref(), |out| {
        let tops: Vec<String> = (1..=table.algorithms.len()).map(|k| format!("top{k}")).collect();
        writeln!(out, "algorithm\t{}", tops.join("\t"))?;
        for (name, row) in table.algorithms.iter().zip(&table.ratios) {
            let cols: Vec<String> = row.iter().map(|&r| num(r)).collect();
            writeln!(out, "{name}\t{}", cols.join("\t"))?;
        }
        Ok(())
    })
}

fn write_jsonl<T: serde::Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut lines = Vec::with_capacity(items.len());
    for item in items {
        lines.push(serde_json::to_string(item)?);
    }
    write_file(path, |out| {
        for line in &lines {
            writeln!(out, "{line}")?;
        }
        Ok(())
    })
}

pub fn write_records_jsonl(path: impl AsRef<Path>, records: &[ResultRecord]) -> Result<()> {
    write_jsonl(path.as_ref(), records)
}

pub fn write_failures_jsonl(path: impl AsRef<Path>, failures: &[CellFailure]) -> Result<()> {
    write_jsonl(path.as_ref(), failures)
}

pub fn read_records_jsonl(path: impl AsRef<Path>) -> Result<Vec<ResultRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

pub fn write_model_json(path: impl AsRef<Path>, model: &Ensemble) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(model)?;
    write_file(path, |out| writeln!(out, "{text}"))
}

pub fn read_model_json(path: impl AsRef<Path>) -> Result<Ensemble> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
