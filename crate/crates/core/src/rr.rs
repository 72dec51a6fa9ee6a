//! Plain-text series and RR-interval ingestion, and the two-group entropy
//! comparison.
//!
//! Input files hold one number per line. Blank lines and lines starting with
//! `#` are skipped; everything else must parse as a finite float.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::entropy::{shannon_entropy, LogBase};
use crate::error::{Error, Result};
use crate::ordinal::{embed, TimeSeries};
use crate::stats::{mann_whitney_u, TestResult};
use crate::ties::Strategy;

/// Parses the one-value-per-line format. `path` is only used in messages.
pub fn parse_series(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { path: path.to_path_buf(), line: i + 1, message };
        let v: f64 = line.parse().map_err(|_| parse_err(format!("not a number: {line:?}")))?;
        if !v.is_finite() {
            return Err(parse_err(format!("not finite: {line:?}")));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Parse { path: path.to_path_buf(), line: 0, message: "file holds no values".into() });
    }
    Ok(values)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Reads a series file.
pub fn read_series(path: impl AsRef<Path>) -> Result<TimeSeries> {
    let path = path.as_ref();
    TimeSeries::new(parse_series(&read_text(path)?, path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalUnit {
    Seconds,
    Milliseconds,
}

/// A recording of RR intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct RRSeries {
    pub intervals: Vec<f64>,
    /// Guessed from magnitude: a median above 10 is taken as milliseconds.
    pub unit: IntervalUnit,
    pub source: String,
    pub group: String,
}

impl RRSeries {
    pub fn to_series(&self) -> TimeSeries {
        TimeSeries::new(self.intervals.clone()).expect("validated on read")
    }
}

/// Reads an RR-interval file; all intervals must be positive.
pub fn read_rr_file(path: impl AsRef<Path>, group: &str) -> Result<RRSeries> {
    let path = path.as_ref();
    let intervals = parse_series(&read_text(path)?, path)?;
    if let Some(i) = intervals.iter().position(|&v| v <= 0.0) {
        return Err(Error::InvalidSeries(format!(
            "{}: interval {} is not positive ({})",
            path.display(),
            i + 1,
            intervals[i]
        )));
    }
    let mut sorted = intervals.clone();
    sorted.sort_by(f64::total_cmp);
    let unit = if sorted[sorted.len() / 2] > 10.0 { IntervalUnit::Milliseconds } else { IntervalUnit::Seconds };
    Ok(RRSeries { intervals, unit, source: path.display().to_string(), group: group.to_string() })
}

/// Regular files of a directory, sorted by path.
pub fn list_series_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let io = |source| Error::Io { path: dir.to_path_buf(), source };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let entry = entry.map_err(io)?;
        if entry.file_type().map_err(io)?.is_file() {
            files.push(entry.path());
        }
    }
    if files.is_empty() {
        return Err(Error::NoInputFiles(dir.to_path_buf()));
    }
    files.sort();
    Ok(files)
}

/// A labelled set of recordings.
#[derive(Debug, Clone)]
pub struct Group {
    pub label: String,
    pub files: Vec<PathBuf>,
}

/// Estimated entropy of one file, or the reason the strategy failed.
#[derive(Debug, Clone, PartialEq)]
pub struct FileEntropy {
    pub file: PathBuf,
    pub group: String,
    pub m: usize,
    pub strategy: String,
    pub entropy: std::result::Result<f64, String>,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub entries: Vec<FileEntropy>,
    pub test: TestResult,
}

impl CompareReport {
    /// Writes `file,group,m,strategy,h_hat,status`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["file", "group", "m", "strategy", "h_hat", "status"])?;
        for e in &self.entries {
            let (h, status) = match &e.entropy {
                Ok(h) => (crate::experiment::format_float(*h), "ok".to_string()),
                Err(msg) => (String::new(), msg.clone()),
            };
            w.write_record([e.file.display().to_string(), e.group.clone(), e.m.to_string(), e.strategy.clone(), h, status])?;
        }
        w.flush().map_err(|source| Error::Io { path: PathBuf::from("<csv>"), source })?;
        Ok(())
    }
}

/// Permutation entropy (nats) of every file under `strategy`, followed by a
/// Mann–Whitney test between the two groups.
///
/// Unreadable files abort the comparison; estimator failures are recorded per
/// file. Every file uses the same strategy seed, so identical recordings give
/// identical entropies.
pub fn group_compare(group_a: &Group, group_b: &Group, m: usize, strategy: &Strategy) -> Result<CompareReport> {
    strategy.validate()?;
    for g in [group_a, group_b] {
        if g.files.is_empty() {
            return Err(Error::EmptyInput("a comparison group has no files"));
        }
    }
    let jobs: Vec<(&Path, &str)> = group_a
        .files
        .iter()
        .map(|f| (f.as_path(), group_a.label.as_str()))
        .chain(group_b.files.iter().map(|f| (f.as_path(), group_b.label.as_str())))
        .collect();
    let entries = jobs
        .par_iter()
        .map(|&(file, group)| {
            let rr = read_rr_file(file, group)?;
            let entropy = embed(&rr.to_series(), m, 1)
                .and_then(|w| strategy.apply(&w))
                .and_then(|d| shannon_entropy(&d, LogBase::Natural))
                .map(|h| h.entropy)
                .map_err(|e| e.to_string());
            Ok(FileEntropy {
                file: file.to_path_buf(),
                group: group.to_string(),
                m,
                strategy: strategy.name.to_string(),
                entropy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let successes = |label: &str| -> Vec<f64> {
        entries
            .iter()
            .filter(|e| e.group == label)
            .filter_map(|e| e.entropy.as_ref().ok().copied())
            .collect()
    };
    let (a, b) = (successes(&group_a.label), successes(&group_b.label));
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("a comparison group produced no entropy estimate"));
    }
    let test = mann_whitney_u(&a, &b)?;
    Ok(CompareReport { entries, test })
}
