//! Chaotic map catalog, orbit generation and decimal coarsening.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ordinal::{slice_has_ties, TimeSeries, Window};

/// Default number of discarded transient iterations.
pub const DEFAULT_BURN_IN: usize = 1000;

/// The iteration rule of a map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    /// `x' = r x (1 - x)`
    Logistic { r: f64 },
    /// `x' = x / w` on `[0, w)`, `(1 - x) / (1 - w)` on `[w, 1]`
    SkewTent { w: f64 },
    /// `x' = a sin(pi x)`
    Sine { a: f64 },
    /// `x' = a x (1 - x^2)`
    Cubic { a: f64 },
    /// `x' = a x exp(-x)`
    Ricker { a: f64 },
    /// `x' = 1 - a sqrt|x|`
    Cusp { a: f64 },
    /// `x' = 1 - a x^2 + y, y' = b x`
    Henon { a: f64, b: f64 },
    /// `x' = 1 - a |x| + y, y' = b x`
    Lozi { a: f64, b: f64 },
    /// `x' = a x (1 - y), y' = x`
    DelayedLogistic { a: f64 },
    /// `x' = x^2 - y^2 + a x + b y, y' = 2 x y + c x + d y`
    Tinkerbell { a: f64, b: f64, c: f64, d: f64 },
    /// `x' = a x - y^2, y' = b y + x y`
    Burgers { a: f64, b: f64 },
    /// `x' = 1 - y + |x|, y' = x`
    Gingerbreadman,
    /// `x' = 1 + u (x cos t - y sin t), y' = u (x sin t + y cos t)` with
    /// `t = 0.4 - 6 / (1 + x^2 + y^2)`
    Ikeda { u: f64 },
    /// `x' = y, y' = -b x + d y - y^3`
    HolmesCubic { b: f64, d: f64 },
    /// `x' = sum_k c_k x^k`
    Polynomial { coefficients: Vec<f64> },
    /// Linear interpolation through `(x, y)` knots sorted by `x`; constant
    /// extrapolation outside the knot range.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl MapKind {
    /// Builds a built-in map from its catalog name, filling absent parameters
    /// with the catalog defaults.
    pub fn builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let mut p = Params { map: name, given: params, used: Vec::new() };
        let kind = match name {
            "logistic" => MapKind::Logistic { r: p.get("r", 4.0) },
            "skew-tent" => MapKind::SkewTent { w: p.get("w", 0.1847) },
            "sine" => MapKind::Sine { a: p.get("a", 1.0) },
            "cubic" => MapKind::Cubic { a: p.get("a", 3.0) },
            "ricker" => MapKind::Ricker { a: p.get("a", 20.0) },
            "cusp" => MapKind::Cusp { a: p.get("a", 2.0) },
            "henon" => MapKind::Henon { a: p.get("a", 1.4), b: p.get("b", 0.3) },
            "lozi" => MapKind::Lozi { a: p.get("a", 1.7), b: p.get("b", 0.5) },
            "delayed-logistic" => MapKind::DelayedLogistic { a: p.get("a", 2.27) },
            "tinkerbell" => MapKind::Tinkerbell {
                a: p.get("a", 0.9),
                b: p.get("b", -0.6013),
                c: p.get("c", 2.0),
                d: p.get("d", 0.5),
            },
            "burgers" => MapKind::Burgers { a: p.get("a", 0.75), b: p.get("b", 1.75) },
            "gingerbreadman" => MapKind::Gingerbreadman,
            "ikeda" => MapKind::Ikeda { u: p.get("u", 0.9) },
            "holmes-cubic" => MapKind::HolmesCubic { b: p.get("b", 0.2), d: p.get("d", 2.77) },
            _ => return Err(Error::UnknownMap(name.to_string())),
        };
        p.finish()?;
        if let MapKind::SkewTent { w } = kind {
            if !(w > 0.0 && w < 1.0) {
                return Err(Error::InvalidMapSpec { map: name.into(), reason: "w must lie in (0, 1)".into() });
            }
        }
        Ok(kind)
    }

    /// State dimension.
    pub fn dimension(&self) -> usize {
        match self {
            MapKind::Henon { .. }
            | MapKind::Lozi { .. }
            | MapKind::DelayedLogistic { .. }
            | MapKind::Tinkerbell { .. }
            | MapKind::Burgers { .. }
            | MapKind::Gingerbreadman
            | MapKind::Ikeda { .. }
            | MapKind::HolmesCubic { .. } => 2,
            _ => 1,
        }
    }

    /// Advances `state` by one iteration.
    pub fn step(&self, state: &mut [f64]) {
        match *self {
            MapKind::Logistic { r } => state[0] = r * state[0] * (1.0 - state[0]),
            MapKind::SkewTent { w } => {
                let x = state[0];
                state[0] = if x < w { x / w } else { (1.0 - x) / (1.0 - w) };
            }
            MapKind::Sine { a } => state[0] = a * (PI * state[0]).sin(),
            MapKind::Cubic { a } => state[0] = a * state[0] * (1.0 - state[0] * state[0]),
            MapKind::Ricker { a } => state[0] = a * state[0] * (-state[0]).exp(),
            MapKind::Cusp { a } => state[0] = 1.0 - a * state[0].abs().sqrt(),
            MapKind::Henon { a, b } => {
                let (x, y) = (state[0], state[1]);
                state[0] = 1.0 - a * x * x + y;
                state[1] = b * x;
            }
            MapKind::Lozi { a, b } => {
                let (x, y) = (state[0], state[1]);
                state[0] = 1.0 - a * x.abs() + y;
                state[1] = b * x;
            }
            MapKind::DelayedLogistic { a } => {
                let (x, y) = (state[0], state[1]);
                state[0] = a * x * (1.0 - y);
                state[1] = x;
            }
            MapKind::Tinkerbell { a, b, c, d } => {
                let (x, y) = (state[0], state[1]);
                state[0] = x * x - y * y + a * x + b * y;
                state[1] = 2.0 * x * y + c * x + d * y;
            }
            MapKind::Burgers { a, b } => {
                let (x, y) = (state[0], state[1]);
                state[0] = a * x - y * y;
                state[1] = b * y + x * y;
            }
            MapKind::Gingerbreadman => {
                let (x, y) = (state[0], state[1]);
                state[0] = 1.0 - y + x.abs();
                state[1] = x;
            }
            MapKind::Ikeda { u } => {
                let (x, y) = (state[0], state[1]);
                let t = 0.4 - 6.0 / (1.0 + x * x + y * y);
                let (sin, cos) = t.sin_cos();
                state[0] = 1.0 + u * (x * cos - y * sin);
                state[1] = u * (x * sin + y * cos);
            }
            MapKind::HolmesCubic { b, d } => {
                let (x, y) = (state[0], state[1]);
                state[0] = y;
                state[1] = -b * x + d * y - y * y * y;
            }
            MapKind::Polynomial { ref coefficients } => {
                let x = state[0];
                state[0] = coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c);
            }
            MapKind::PiecewiseLinear { ref knots } => state[0] = interpolate(knots, state[0]),
        }
    }
}

fn interpolate(knots: &[(f64, f64)], x: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = knots.partition_point(|k| k.0 <= x);
    let (x0, y0) = knots[i - 1];
    let (x1, y1) = knots[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

struct Params<'a> {
    map: &'a str,
    given: &'a BTreeMap<String, f64>,
    used: Vec<&'static str>,
}

impl Params<'_> {
    fn get(&mut self, key: &'static str, default: f64) -> f64 {
        self.used.push(key);
        self.given.get(key).copied().unwrap_or(default)
    }

    fn finish(self) -> Result<()> {
        if let Some(extra) = self.given.keys().find(|k| !self.used.contains(&k.as_str())) {
            return Err(Error::InvalidMapSpec {
                map: self.map.to_string(),
                reason: format!("unknown parameter {extra:?}"),
            });
        }
        if let Some((k, v)) = self.given.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidMapSpec {
                map: self.map.to_string(),
                reason: format!("parameter {k} = {v} is not finite"),
            });
        }
        Ok(())
    }
}

/// A named map with its starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    pub name: String,
    pub kind: MapKind,
    pub initial: Vec<f64>,
    pub burn_in: usize,
    /// State coordinate reported as the series.
    pub observable: usize,
}

impl MapSpec {
    pub fn new(name: impl Into<String>, kind: MapKind, initial: Vec<f64>) -> Result<Self> {
        let spec = Self { name: name.into(), kind, initial, burn_in: DEFAULT_BURN_IN, observable: 0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_observable(mut self, observable: usize) -> Result<Self> {
        self.observable = observable;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidMapSpec { map: self.name.clone(), reason };
        let dim = self.kind.dimension();
        if self.initial.len() != dim {
            return Err(invalid(format!("expected {dim} initial values, got {}", self.initial.len())));
        }
        if self.initial.iter().any(|v| !v.is_finite()) {
            return Err(invalid("initial state must be finite".into()));
        }
        if self.observable >= dim {
            return Err(invalid(format!("observable {} out of range for a {dim}-d map", self.observable)));
        }
        match &self.kind {
            MapKind::Polynomial { coefficients } if coefficients.is_empty() => {
                Err(invalid("polynomial needs at least one coefficient".into()))
            }
            MapKind::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    Err(invalid("piecewise-linear map needs at least two knots".into()))
                } else if knots.windows(2).any(|k| k[0].0 >= k[1].0) {
                    Err(invalid("knots must have strictly increasing x".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// The built-in catalog with literature-standard parameters and starting
/// points.
///
/// The Gingerbreadman map is available through [`MapKind::builtin`] but is not
/// part of the catalog: its orbits repeat values exactly, so the uncoarsened
/// series already contains tied windows.
pub fn default_catalog() -> Vec<MapSpec> {
    let none = BTreeMap::new();
    let entries: [(&str, &[f64]); 13] = [
        ("logistic", &[0.1]),
        ("skew-tent", &[0.1]),
        ("sine", &[0.1]),
        ("cubic", &[0.1]),
        ("ricker", &[0.1]),
        ("cusp", &[0.5]),
        ("henon", &[0.0, 0.0]),
        ("lozi", &[-0.1, 0.1]),
        ("delayed-logistic", &[0.001, 0.001]),
        ("tinkerbell", &[-0.72, -0.64]),
        ("burgers", &[-0.1, 0.1]),
        ("ikeda", &[0.0, 0.0]),
        ("holmes-cubic", &[1.6, 0.0]),
    ];
    entries
        .iter()
        .map(|(name, init)| {
            let kind = MapKind::builtin(name, &none).expect("catalog entry");
            MapSpec::new(*name, kind, init.to_vec()).expect("catalog entry")
        })
        .collect()
}

/// Iterates the map, drops `burn_in` states and returns the next `n`
/// observations, starting with the state reached after the burn-in.
pub fn generate(spec: &MapSpec, n: usize) -> Result<TimeSeries> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptyInput("requested orbit length is zero"));
    }
    let mut state = spec.initial.clone();
    let diverged = |iteration| Error::OrbitDiverged { map: spec.name.clone(), iteration };
    for iteration in 1..=spec.burn_in {
        spec.kind.step(&mut state);
        if state.iter().any(|v| !v.is_finite()) {
            return Err(diverged(iteration));
        }
    }
    let mut out = Vec::with_capacity(n);
    out.push(state[spec.observable]);
    for iteration in spec.burn_in + 1..spec.burn_in + n {
        spec.kind.step(&mut state);
        if state.iter().any(|v| !v.is_finite()) {
            return Err(diverged(iteration));
        }
        out.push(state[spec.observable]);
    }
    TimeSeries::new(out)
}

/// How values are snapped to the decimal grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// Toward zero.
    #[default]
    TowardZero,
    /// To the nearest grid value, halves away from zero.
    Nearest,
}

/// Keeps `decimals` digits after the point, dropping the rest toward zero.
pub fn truncate_decimals(series: &TimeSeries, decimals: u32) -> TimeSeries {
    coarsen(series, decimals, Truncation::TowardZero)
}

/// Snaps every value onto the grid `k / 10^decimals`.
///
/// Grid values are always computed as `k as f64 / 10^d`, and the result is the
/// grid value with the largest `|k|` not exceeding `|x|` (toward zero), so that
/// coarsening an already coarse series returns it unchanged.
pub fn coarsen(series: &TimeSeries, decimals: u32, mode: Truncation) -> TimeSeries {
    let scale = 10f64.powi(decimals as i32);
    let values = series
        .values()
        .iter()
        .map(|&x| {
            let mag = x.abs();
            let k = match mode {
                Truncation::TowardZero => {
                    let mut k = (mag * scale).trunc();
                    if k / scale > mag {
                        k -= 1.0;
                    } else if (k + 1.0) / scale <= mag {
                        k += 1.0;
                    }
                    k
                }
                Truncation::Nearest => (mag * scale).round(),
            };
            (k / scale).copysign(x)
        })
        .map(|v| if v == 0.0 { 0.0 } else { v })
        .collect();
    TimeSeries::new(values).expect("finite input stays finite")
}

/// Share of windows that contain tied values.
pub fn repeated_ratio(windows: &[Window]) -> Result<f64> {
    if windows.is_empty() {
        return Err(Error::EmptyInput("no windows"));
    }
    let tied = windows.iter().filter(|w| slice_has_ties(w.values())).count();
    Ok(tied as f64 / windows.len() as f64)
}
