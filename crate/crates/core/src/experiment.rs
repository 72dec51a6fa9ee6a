//! The strategy-comparison sweep.
//!
//! For every `(map, n)` the orbit is generated once. Its uncoarsened windows
//! give the reference entropy; the coarsened copy is fed to every strategy at
//! every dimension. Each `(map, n, m, strategy)` cell becomes one
//! [`SweepRecord`], and [`aggregate`] reduces records to MSE and bias per bin.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::entropy::{shannon_entropy, EntropyResult, LogBase};
use crate::error::{Error, Result};
use crate::maps::{coarsen, default_catalog, generate, repeated_ratio, MapSpec, Truncation};
use crate::ordinal::{check_dimension, embed, TimeSeries};
use crate::ties::{complete_cases, BayesMode, Strategy, StrategyName};

/// Which entropy value the records carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyScale {
    /// Divided by the log of the strategy's alphabet size.
    #[default]
    Normalized,
    /// Raw entropy in nats.
    Nats,
}

impl EntropyScale {
    fn pick(self, h: &EntropyResult) -> f64 {
        match self {
            EntropyScale::Normalized => h.normalized,
            EntropyScale::Nats => h.entropy,
        }
    }
}

/// Bin edges for the entropy-level grouping.
#[derive(Debug, Clone, PartialEq)]
pub enum EntropyBins {
    /// Empirical quantiles of `h_true`, e.g. 4 for quartiles.
    Quantiles(usize),
    Edges(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub maps: Vec<MapSpec>,
    pub lengths: Vec<usize>,
    pub dimensions: Vec<usize>,
    pub strategies: Vec<StrategyName>,
    pub master_seed: u64,
    pub decimals: u32,
    pub truncation: Truncation,
    pub bayes_mode: BayesMode,
    pub scale: EntropyScale,
    pub ratio_bins: Vec<f64>,
    pub entropy_bins: EntropyBins,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            maps: default_catalog(),
            lengths: vec![5000, 10_000, 30_000, 90_000],
            dimensions: vec![3, 4, 5, 6],
            strategies: StrategyName::ALL.to_vec(),
            master_seed: 0,
            decimals: 1,
            truncation: Truncation::TowardZero,
            bayes_mode: BayesMode::ExpectedCount,
            scale: EntropyScale::Normalized,
            ratio_bins: decile_edges(),
            entropy_bins: EntropyBins::Quantiles(4),
        }
    }
}

pub fn decile_edges() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Err(Error::Config(format!("sweep needs at least one {what}")));
        if self.maps.is_empty() {
            return empty("map");
        }
        if self.lengths.is_empty() {
            return empty("length");
        }
        if self.dimensions.is_empty() {
            return empty("dimension");
        }
        if self.strategies.is_empty() {
            return empty("strategy");
        }
        if self.lengths.contains(&0) {
            return Err(Error::Config("series lengths must be positive".into()));
        }
        for &m in &self.dimensions {
            check_dimension(m)?;
        }
        for spec in &self.maps {
            spec.validate()?;
        }
        check_edges(&self.ratio_bins)?;
        match &self.entropy_bins {
            EntropyBins::Quantiles(0) => Err(Error::Config("quantile count must be positive".into())),
            EntropyBins::Quantiles(_) => Ok(()),
            EntropyBins::Edges(e) => check_edges(e),
        }
    }

    pub fn cell_count(&self) -> usize {
        self.maps.len() * self.lengths.len() * self.dimensions.len() * self.strategies.len()
    }
}

fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges.windows(2).any(|w| w[0] >= w[1]) || edges.iter().any(|e| !e.is_finite()) {
        return Err(Error::Config(format!("bin edges must be finite and strictly increasing: {edges:?}")));
    }
    Ok(())
}

/// One grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub map: String,
    pub n: usize,
    pub m: usize,
    pub strategy: StrategyName,
    pub h_true: Option<f64>,
    pub h_hat: Option<f64>,
    pub repeated_ratio: Option<f64>,
    /// Seed handed to sampled strategies.
    pub seed: Option<u64>,
    /// `"ok"` or the failure message.
    pub status: String,
}

impl SweepRecord {
    pub fn is_ok(&self) -> bool {
        self.h_true.is_some() && self.h_hat.is_some()
    }

    /// `h_hat - h_true`.
    pub fn error(&self) -> Option<f64> {
        Some(self.h_hat? - self.h_true?)
    }

    pub fn squared_error(&self) -> Option<f64> {
        self.error().map(|e| e * e)
    }
}

/// Seed for cell `index`, decorrelated from neighbouring cells (SplitMix64
/// finaliser over the mixed pair).
pub fn cell_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Reference entropy of an uncoarsened orbit: rank mapping over its tie-free
/// windows (all of them, for a well-behaved chaotic orbit).
fn reference_entropy(orbit: &TimeSeries, m: usize, scale: EntropyScale) -> Result<f64> {
    let windows = embed(orbit, m, 1)?;
    let dist = complete_cases(&windows)?;
    Ok(scale.pick(&shannon_entropy(&dist, LogBase::Natural)?))
}

/// Runs every cell of the grid. Cells are computed in parallel per
/// `(map, n)`; the output is ordered by cell index and does not depend on
/// scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let units: Vec<(usize, usize)> = (0..config.maps.len())
        .flat_map(|i| (0..config.lengths.len()).map(move |j| (i, j)))
        .collect();
    let per_unit: Vec<Vec<SweepRecord>> =
        units.par_iter().map(|&(map_idx, n_idx)| run_unit(config, map_idx, n_idx)).collect();
    Ok(per_unit.into_iter().flatten().collect())
}

fn run_unit(config: &SweepConfig, map_idx: usize, n_idx: usize) -> Vec<SweepRecord> {
    let spec = &config.maps[map_idx];
    let n = config.lengths[n_idx];
    let orbit = generate(spec, n);
    let coarse = orbit.as_ref().map(|o| coarsen(o, config.decimals, config.truncation));
    let mut out = Vec::with_capacity(config.dimensions.len() * config.strategies.len());
    for (m_idx, &m) in config.dimensions.iter().enumerate() {
        let h_true = orbit.as_ref().map_err(|e| e.to_string()).and_then(|o| {
            reference_entropy(o, m, config.scale).map_err(|e| format!("reference entropy: {e}"))
        });
        let windows = coarse
            .as_ref()
            .map_err(|e| e.to_string())
            .and_then(|c| embed(c, m, 1).map_err(|e| e.to_string()));
        let ratio = windows.as_ref().ok().and_then(|w| repeated_ratio(w).ok());
        for (s_idx, &name) in config.strategies.iter().enumerate() {
            let cell = ((map_idx * config.lengths.len() + n_idx) * config.dimensions.len() + m_idx)
                * config.strategies.len()
                + s_idx;
            let mut strategy = Strategy::new(name).with_bayes_mode(config.bayes_mode);
            let seed = strategy.is_sampled().then(|| cell_seed(config.master_seed, cell as u64));
            if let Some(seed) = seed {
                strategy = strategy.with_seed(seed);
            }
            let estimate = windows.clone().and_then(|w| {
                strategy
                    .apply(&w)
                    .and_then(|d| shannon_entropy(&d, LogBase::Natural))
                    .map(|h| config.scale.pick(&h))
                    .map_err(|e| e.to_string())
            });
            let status = match (&h_true, &estimate) {
                (Ok(_), Ok(_)) => "ok".to_string(),
                (Err(e), _) | (Ok(_), Err(e)) => e.clone(),
            };
            out.push(SweepRecord {
                map: spec.name.clone(),
                n,
                m,
                strategy: name,
                h_true: h_true.as_ref().ok().copied(),
                h_hat: estimate.ok(),
                repeated_ratio: ratio,
                seed,
                status,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupKind {
    RepeatedRatio,
    EntropyLevel,
}

impl GroupKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupKind::RepeatedRatio => "repeated_ratio",
            GroupKind::EntropyLevel => "entropy_level",
        }
    }
}

/// How records are binned before averaging.
#[derive(Debug, Clone, PartialEq)]
pub enum Grouping {
    RepeatedRatio(Vec<f64>),
    EntropyLevel(EntropyBins),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub group_kind: GroupKind,
    pub bin_low: f64,
    pub bin_high: f64,
    pub m: usize,
    pub strategy: StrategyName,
    pub mse: f64,
    pub bias: f64,
    pub count: usize,
}

/// Quantile edges of the reference entropies, one value per `(map, n, m)`.
pub fn entropy_quantile_edges(records: &[SweepRecord], k: usize) -> Result<Vec<f64>> {
    let mut seen = BTreeMap::new();
    for r in records {
        if let Some(h) = r.h_true {
            seen.insert((r.map.as_str(), r.n, r.m), h);
        }
    }
    let mut values: Vec<f64> = seen.into_values().collect();
    if values.is_empty() {
        return Err(Error::EmptyInput("no record with a reference entropy"));
    }
    values.sort_by(f64::total_cmp);
    let quantile = |q: f64| {
        let pos = q * (values.len() - 1) as f64;
        let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
        values[lo] + (values[hi] - values[lo]) * (pos - lo as f64)
    };
    let mut edges: Vec<f64> = (0..=k).map(|i| quantile(i as f64 / k as f64)).collect();
    edges.dedup();
    if edges.len() < 2 {
        edges.push(edges[0] + f64::EPSILON.max(edges[0].abs() * f64::EPSILON));
    }
    Ok(edges)
}

/// Bin index for `x`; bins are half-open except the last, which is closed.
/// Values outside the edges fall into the nearest end bin.
fn bin_of(edges: &[f64], x: f64) -> usize {
    let bins = edges.len() - 1;
    edges[1..bins].partition_point(|&e| e <= x)
}

/// MSE and bias per `(bin, m, strategy)`, skipping failed cells.
pub fn aggregate(records: &[SweepRecord], grouping: &Grouping) -> Result<Vec<AggregateRow>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no sweep records"));
    }
    let (kind, edges) = match grouping {
        Grouping::RepeatedRatio(edges) => (GroupKind::RepeatedRatio, edges.clone()),
        Grouping::EntropyLevel(EntropyBins::Edges(edges)) => (GroupKind::EntropyLevel, edges.clone()),
        Grouping::EntropyLevel(EntropyBins::Quantiles(k)) => {
            (GroupKind::EntropyLevel, entropy_quantile_edges(records, *k)?)
        }
    };
    check_edges(&edges)?;
    let mut acc: BTreeMap<(usize, usize, StrategyName), (f64, f64, usize)> = BTreeMap::new();
    for r in records {
        let (Some(err), Some(h_true)) = (r.error(), r.h_true) else { continue };
        let key_value = match kind {
            GroupKind::RepeatedRatio => match r.repeated_ratio {
                Some(v) => v,
                None => continue,
            },
            GroupKind::EntropyLevel => h_true,
        };
        let slot = acc.entry((bin_of(&edges, key_value), r.m, r.strategy)).or_insert((0.0, 0.0, 0));
        slot.0 += err;
        slot.1 += err * err;
        slot.2 += 1;
    }
    if acc.is_empty() {
        return Err(Error::EmptyInput("no successful sweep records"));
    }
    Ok(acc
        .into_iter()
        .map(|((bin, m, strategy), (sum, sum_sq, count))| AggregateRow {
            group_kind: kind,
            bin_low: edges[bin],
            bin_high: edges[bin + 1],
            m,
            strategy,
            mse: sum_sq / count as f64,
            bias: sum / count as f64,
            count,
        })
        .collect())
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn flush<W: Write>(w: &mut csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|source| Error::Io { path: PathBuf::from("<csv>"), source })
}

/// Writes `map,n,m,strategy,h_true,h_hat,error,sq_error,repeated_ratio,seed,status`.
pub fn write_records<W: Write>(out: W, records: &[SweepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "map", "n", "m", "strategy", "h_true", "h_hat", "error", "sq_error", "repeated_ratio", "seed", "status",
    ])?;
    for r in records {
        w.write_record([
            r.map.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.strategy.to_string(),
            opt(r.h_true),
            opt(r.h_hat),
            opt(r.error()),
            opt(r.squared_error()),
            opt(r.repeated_ratio),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.status.clone(),
        ])?;
    }
    flush(&mut w)
}

/// Writes `group_kind,bin_low,bin_high,m,strategy,mse,bias,count`.
pub fn write_aggregate<W: Write>(out: W, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group_kind", "bin_low", "bin_high", "m", "strategy", "mse", "bias", "count"])?;
    for r in rows {
        w.write_record([
            r.group_kind.as_str().to_string(),
            format_float(r.bin_low),
            format_float(r.bin_high),
            r.m.to_string(),
            r.strategy.to_string(),
            format_float(r.mse),
            format_float(r.bias),
            r.count.to_string(),
        ])?;
    }
    flush(&mut w)
}
