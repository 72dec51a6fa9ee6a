//! Embedding and the two tie-free symbol mappings.
//!
//! A window `(x_t, ..., x_{t+m-1})` can be read two ways. The *rank* mapping
//! writes down, in time order, the rank of every sample. The *chronological*
//! mapping lists time indexes sorted by amplitude. For tie-free windows the two
//! codes are inverse permutations of each other. Symbols are 1-based.

use std::cmp::Ordering;
use std::fmt;

use arrayvec::ArrayVec;

use crate::error::{Error, Result};

/// Largest supported embedding dimension. Keeps every code entry a single digit.
pub const MAX_DIMENSION: usize = 9;

pub(crate) type Code = ArrayVec<u8, MAX_DIMENSION>;

/// A finite, non-empty real-valued series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries("series is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!("sample {i} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// An embedded vector of `m` samples together with its start index.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    start: usize,
    values: ArrayVec<f64, MAX_DIMENSION>,
}

impl Window {
    /// Builds a free-standing window, mostly useful for tests and examples.
    pub fn new(start: usize, values: &[f64]) -> Result<Self> {
        check_dimension(values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries("window holds a non-finite value".into()));
        }
        Ok(Self { start, values: values.iter().copied().collect() })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }
}

pub(crate) fn check_dimension(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidDimension { m, reason: "must be at least 2" });
    }
    if m > MAX_DIMENSION {
        return Err(Error::InvalidDimension { m, reason: "exceeds the supported maximum of 9" });
    }
    Ok(())
}

/// Which alphabet a [`Symbol`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Permutation,
    ChronologicalExtended,
    RankExtended,
}

impl SymbolKind {
    pub fn name(self) -> &'static str {
        match self {
            SymbolKind::Permutation => "permutation",
            SymbolKind::ChronologicalExtended => "chrono-ext",
            SymbolKind::RankExtended => "rank-ext",
        }
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SymbolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "permutation" | "regular" => Ok(SymbolKind::Permutation),
            "chrono-ext" | "chronological-extended" => Ok(SymbolKind::ChronologicalExtended),
            "rank-ext" | "rank-extended" => Ok(SymbolKind::RankExtended),
            other => Err(Error::Config(format!("unknown alphabet {other:?}"))),
        }
    }
}

/// An m-length codeword with entries in `1..=m`.
///
/// Ordering is lexicographic on the code, which for single-digit entries is the
/// same as comparing the printed forms (`123 < 132 < 213 ...`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    kind: SymbolKind,
    code: Code,
}

impl Symbol {
    /// Validates `code` against the invariants of `kind`.
    pub fn new(kind: SymbolKind, code: &[u8]) -> Result<Self> {
        check_dimension(code.len()).map_err(|e| Error::InvalidSymbol(e.to_string()))?;
        let m = code.len() as u8;
        if code.iter().any(|&c| c == 0 || c > m) {
            return Err(Error::InvalidSymbol(format!("{code:?}: entries must lie in 1..={m}")));
        }
        let ok = match kind {
            SymbolKind::Permutation => {
                let mut seen = [false; MAX_DIMENSION + 1];
                code.iter().all(|&c| !std::mem::replace(&mut seen[c as usize], true))
            }
            SymbolKind::RankExtended => is_min_rank_code(code),
            SymbolKind::ChronologicalExtended => is_chronological_code(code),
        };
        if !ok {
            return Err(Error::InvalidSymbol(format!("{code:?} is not a valid {kind} symbol")));
        }
        Ok(Self { kind, code: code.iter().copied().collect() })
    }

    /// Parses the compact digit form, e.g. `"231"`.
    pub fn from_digits(kind: SymbolKind, digits: &str) -> Result<Self> {
        let code = digits
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect::<Option<Vec<u8>>>()
            .ok_or_else(|| Error::InvalidSymbol(format!("{digits:?} is not a digit string")))?;
        Self::new(kind, &code)
    }

    pub(crate) fn from_code_unchecked(kind: SymbolKind, code: Code) -> Self {
        Self { kind, code }
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn code(&self) -> &[u8] {
        &self.code
    }

    pub fn dimension(&self) -> usize {
        self.code.len()
    }

    /// Group inverse of a permutation symbol; `None` for extended kinds.
    pub fn inverse(&self) -> Option<Symbol> {
        if self.kind != SymbolKind::Permutation {
            return None;
        }
        let mut inv: Code = std::iter::repeat(0).take(self.code.len()).collect();
        for (pos, &c) in self.code.iter().enumerate() {
            inv[c as usize - 1] = pos as u8 + 1;
        }
        Some(Symbol { kind: self.kind, code: inv })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.code {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

// r appears only if exactly r-1 entries are strictly smaller.
fn is_min_rank_code(code: &[u8]) -> bool {
    code.iter().all(|&r| code.iter().filter(|&&s| s < r).count() == r as usize - 1)
}

// Runs of equal entries are tie groups labelled by their smallest index; the
// remaining indexes must be distributable to groups whose label precedes them.
fn is_chronological_code(code: &[u8]) -> bool {
    let m = code.len();
    let mut groups: Vec<(u8, usize)> = Vec::new();
    for &c in code {
        match groups.last_mut() {
            Some((label, size)) if *label == c => *size += 1,
            _ => {
                if groups.iter().any(|&(l, _)| l == c) {
                    return false;
                }
                groups.push((c, 1));
            }
        }
    }
    let mut demand = vec![0usize; m + 1];
    for &(label, size) in &groups {
        demand[label as usize] = size;
    }
    let mut surplus: isize = 0;
    for e in (1..=m).rev() {
        if demand[e] == 0 {
            surplus += 1;
        } else {
            surplus -= demand[e] as isize - 1;
            if surplus < 0 {
                return false;
            }
        }
    }
    surplus == 0
}

/// Splits `series` into its `T - (m-1)*delay` embedded windows.
pub fn embed(series: &TimeSeries, m: usize, delay: usize) -> Result<Vec<Window>> {
    check_dimension(m)?;
    if delay == 0 {
        return Err(Error::InvalidDelay(delay));
    }
    let span = (m - 1) * delay + 1;
    let values = series.values();
    if values.len() < span {
        return Err(Error::InsufficientLength { len: values.len(), m, delay });
    }
    Ok((0..=values.len() - span)
        .map(|start| Window {
            start,
            values: (0..m).map(|k| values[start + k * delay]).collect(),
        })
        .collect())
}

pub(crate) fn min_rank_code(values: &[f64]) -> Code {
    values
        .iter()
        .map(|x| 1 + values.iter().filter(|y| *y < x).count() as u8)
        .collect()
}

/// `1 + #{k : x_k < x_n}` for every position; tied samples share the lowest
/// rank of their group. Without ties this is the usual rank.
pub fn min_ranks(window: &Window) -> Vec<u8> {
    min_rank_code(&window.values).to_vec()
}

pub(crate) fn slice_has_ties(values: &[f64]) -> bool {
    values.iter().enumerate().any(|(i, x)| values[i + 1..].contains(x))
}

/// True when two samples of the window are exactly equal.
pub fn has_ties(window: &Window) -> bool {
    slice_has_ties(&window.values)
}

/// Positions sorted by value, ties kept in time order.
pub(crate) fn stable_argsort(values: &[f64]) -> Code {
    let mut idx: Code = (0..values.len() as u8).collect();
    idx.sort_by(|&i, &j| {
        values[i as usize].partial_cmp(&values[j as usize]).unwrap_or(Ordering::Equal)
    });
    idx
}

/// Rank permutation of a tie-free window.
pub fn map_rank(window: &Window) -> Result<Symbol> {
    if has_ties(window) {
        return Err(Error::TiesPresent { start: window.start });
    }
    Ok(Symbol::from_code_unchecked(SymbolKind::Permutation, min_rank_code(&window.values)))
}

/// Time indexes of a tie-free window listed by increasing amplitude.
pub fn map_chronological(window: &Window) -> Result<Symbol> {
    if has_ties(window) {
        return Err(Error::TiesPresent { start: window.start });
    }
    let code = stable_argsort(&window.values).iter().map(|i| i + 1).collect();
    Ok(Symbol::from_code_unchecked(SymbolKind::Permutation, code))
}
