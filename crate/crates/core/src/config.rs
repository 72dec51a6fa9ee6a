//! TOML map catalogs and sweep configurations.
//!
//! A catalog file is a list of `[[map]]` tables:
//!
//! ```toml
//! [[map]]
//! name = "logistic"          # a built-in map
//! params = { r = 3.99 }      # optional, defaults fill the rest
//! initial = [0.2]            # optional for catalog maps
//! burn_in = 500              # optional, default 1000
//! observable = 0             # optional, state coordinate to record
//!
//! [[map]]
//! name = "quadratic"
//! kind = "polynomial"        # x' = sum c_k x^k
//! coefficients = [0.0, 3.9, -3.9]
//! initial = [0.3]
//!
//! [[map]]
//! name = "tent"
//! kind = "piecewise-linear"
//! knots = [[0.0, 0.0], [0.5, 1.0], [1.0, 0.0]]
//! initial = [0.2137]
//! ```
//!
//! A sweep configuration uses the same `[[map]]` tables plus a `[sweep]`
//! table; every key in it is optional:
//!
//! ```toml
//! [sweep]
//! lengths = [5000, 10000, 30000, 90000]
//! dimensions = [3, 4, 5, 6]
//! strategies = ["chrono-ext", "rank-ext", "complete-cases",
//!               "time-ordered", "random-imp", "bayes-imp"]
//! master_seed = 0
//! decimals = 1
//! truncation = "toward-zero"   # or "nearest"
//! bayes_mode = "expected"      # or "sampled"
//! scale = "normalized"         # or "nats"
//! ratio_bins = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
//! entropy_quantiles = 4        # or entropy_bins = [..edges..]
//! catalog = "auto"             # "default", "none" or "auto"
//! ```
//!
//! With `catalog = "auto"` the built-in catalog is used only when the file
//! has no `[[map]]` table; `"default"` always prepends it.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::experiment::{EntropyBins, EntropyScale, SweepConfig};
use crate::maps::{default_catalog, MapKind, MapSpec, Truncation, DEFAULT_BURN_IN};
use crate::ties::StrategyName;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    name: String,
    kind: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    coefficients: Option<Vec<f64>>,
    knots: Option<Vec<(f64, f64)>>,
    initial: Option<Vec<f64>>,
    burn_in: Option<usize>,
    observable: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    lengths: Option<Vec<usize>>,
    dimensions: Option<Vec<usize>>,
    strategies: Option<Vec<String>>,
    master_seed: Option<u64>,
    decimals: Option<u32>,
    truncation: Option<String>,
    bayes_mode: Option<String>,
    scale: Option<String>,
    ratio_bins: Option<Vec<f64>>,
    entropy_bins: Option<Vec<f64>>,
    entropy_quantiles: Option<usize>,
    catalog: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    map: Vec<RawMap>,
    sweep: Option<RawSweep>,
}

fn parse_file(text: &str) -> Result<RawFile> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

impl RawMap {
    fn into_spec(self) -> Result<MapSpec> {
        let invalid = |reason: String| Error::InvalidMapSpec { map: self.name.clone(), reason };
        let builtin = matches!(self.kind.as_deref(), None | Some("builtin"));
        if !builtin && !self.params.is_empty() {
            return Err(invalid("params only apply to built-in maps".into()));
        }
        if self.coefficients.is_some() && self.kind.as_deref() != Some("polynomial") {
            return Err(invalid("coefficients need kind = \"polynomial\"".into()));
        }
        if self.knots.is_some() && self.kind.as_deref() != Some("piecewise-linear") {
            return Err(invalid("knots need kind = \"piecewise-linear\"".into()));
        }
        let kind = match self.kind.as_deref() {
            None | Some("builtin") => MapKind::builtin(&self.name, &self.params)?,
            Some("polynomial") => MapKind::Polynomial {
                coefficients: self.coefficients.clone().ok_or_else(|| invalid("missing coefficients".into()))?,
            },
            Some("piecewise-linear") => MapKind::PiecewiseLinear {
                knots: self.knots.clone().ok_or_else(|| invalid("missing knots".into()))?,
            },
            Some(other) => return Err(invalid(format!("unknown kind {other:?}"))),
        };
        let initial = match self.initial.clone() {
            Some(init) => init,
            None if builtin => default_catalog()
                .into_iter()
                .find(|s| s.name == self.name)
                .map(|s| s.initial)
                .ok_or_else(|| invalid("no default initial state, give `initial`".into()))?,
            None => return Err(invalid("missing initial state".into())),
        };
        let spec = MapSpec::new(self.name.clone(), kind, initial)?.with_burn_in(self.burn_in.unwrap_or(DEFAULT_BURN_IN));
        match self.observable {
            Some(o) => spec.with_observable(o),
            None => Ok(spec),
        }
    }
}

/// Parses a catalog document. A `[sweep]` table, if present, is ignored.
pub fn parse_catalog(text: &str) -> Result<Vec<MapSpec>> {
    let raw = parse_file(text)?;
    if raw.map.is_empty() {
        return Err(Error::Config("catalog has no [[map]] entries".into()));
    }
    raw.map.into_iter().map(RawMap::into_spec).collect()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Vec<MapSpec>> {
    parse_catalog(&read(path.as_ref())?)
}

fn parse_named<T: std::str::FromStr<Err = Error>>(value: Option<String>, default: T) -> Result<T> {
    value.map_or(Ok(default), |v| v.parse())
}

impl SweepConfig {
    /// Parses a sweep configuration; absent keys keep [`SweepConfig::default`].
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw = parse_file(text)?;
        let sweep = raw.sweep.unwrap_or_default();
        let defaults = SweepConfig::default();

        let user: Vec<MapSpec> = raw.map.into_iter().map(RawMap::into_spec).collect::<Result<_>>()?;
        let maps = match sweep.catalog.as_deref().unwrap_or("auto") {
            "auto" if user.is_empty() => defaults.maps,
            "auto" | "none" => user,
            "default" => defaults.maps.into_iter().chain(user).collect(),
            other => return Err(Error::Config(format!("catalog must be auto, default or none, not {other:?}"))),
        };
        let strategies = match sweep.strategies {
            Some(names) => names.iter().map(|s| s.parse()).collect::<Result<Vec<StrategyName>>>()?,
            None => defaults.strategies,
        };
        let truncation = match sweep.truncation.as_deref() {
            None | Some("toward-zero") => Truncation::TowardZero,
            Some("nearest") => Truncation::Nearest,
            Some(other) => return Err(Error::Config(format!("unknown truncation {other:?}"))),
        };
        let scale = match sweep.scale.as_deref() {
            None | Some("normalized") => EntropyScale::Normalized,
            Some("nats") => EntropyScale::Nats,
            Some(other) => return Err(Error::Config(format!("unknown scale {other:?}"))),
        };
        let entropy_bins = match (sweep.entropy_bins, sweep.entropy_quantiles) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give entropy_bins or entropy_quantiles, not both".into()))
            }
            (Some(edges), None) => EntropyBins::Edges(edges),
            (None, Some(k)) => EntropyBins::Quantiles(k),
            (None, None) => defaults.entropy_bins,
        };
        let config = SweepConfig {
            maps,
            lengths: sweep.lengths.unwrap_or(defaults.lengths),
            dimensions: sweep.dimensions.unwrap_or(defaults.dimensions),
            strategies,
            master_seed: sweep.master_seed.unwrap_or(defaults.master_seed),
            decimals: sweep.decimals.unwrap_or(defaults.decimals),
            truncation,
            bayes_mode: parse_named(sweep.bayes_mode, defaults.bayes_mode)?,
            scale,
            ratio_bins: sweep.ratio_bins.unwrap_or(defaults.ratio_bins),
            entropy_bins,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&read(path.as_ref())?)
    }
}
