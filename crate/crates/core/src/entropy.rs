//! Symbol count tables and Shannon entropy over them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ordinal::{check_dimension, Symbol, SymbolKind};
use crate::ties::alphabet_size;

/// Counts of observed symbols, possibly fractional.
///
/// Counts live in a `BTreeMap` so that every iteration, and therefore every
/// floating-point sum over the table, happens in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDistribution {
    kind: SymbolKind,
    dimension: usize,
    counts: BTreeMap<Symbol, f64>,
    total: f64,
    windows_seen: usize,
    windows_retained: usize,
}

impl SymbolDistribution {
    pub fn new(kind: SymbolKind, dimension: usize) -> Result<Self> {
        check_dimension(dimension)?;
        Ok(Self {
            kind,
            dimension,
            counts: BTreeMap::new(),
            total: 0.0,
            windows_seen: 0,
            windows_retained: 0,
        })
    }

    /// Adds `weight` to `symbol`. Zero weights are ignored.
    ///
    /// # Panics
    /// If the symbol belongs to another alphabet or dimension, or the weight is
    /// negative or not finite.
    pub fn add(&mut self, symbol: Symbol, weight: f64) {
        assert_eq!(symbol.kind(), self.kind, "symbol alphabet mismatch");
        assert_eq!(symbol.dimension(), self.dimension, "symbol dimension mismatch");
        assert!(weight.is_finite() && weight >= 0.0, "invalid weight {weight}");
        if weight == 0.0 {
            return;
        }
        *self.counts.entry(symbol).or_insert(0.0) += weight;
        self.total += weight;
    }

    pub(crate) fn set_window_counts(&mut self, seen: usize, retained: usize) {
        self.windows_seen = seen;
        self.windows_retained = retained;
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Sum of all counts; the normalising denominator.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Windows offered to the strategy.
    pub fn windows_seen(&self) -> usize {
        self.windows_seen
    }

    /// Windows that contributed to the counts.
    pub fn windows_retained(&self) -> usize {
        self.windows_retained
    }

    pub fn counts(&self) -> &BTreeMap<Symbol, f64> {
        &self.counts
    }

    pub fn count(&self, symbol: &Symbol) -> f64 {
        self.counts.get(symbol).copied().unwrap_or(0.0)
    }

    pub fn probability(&self, symbol: &Symbol) -> f64 {
        if self.total == 0.0 {
            0.0
        } else {
            self.count(symbol) / self.total
        }
    }

    /// `(symbol, p)` pairs in symbol order.
    pub fn probabilities(&self) -> impl Iterator<Item = (&Symbol, f64)> + '_ {
        self.counts.iter().map(move |(s, c)| (s, c / self.total))
    }

    /// Number of symbols with a positive count.
    pub fn observed(&self) -> usize {
        self.counts.values().filter(|&&c| c > 0.0).count()
    }

    /// Adds the counts of `other` into `self`.
    pub fn merge(&mut self, other: &SymbolDistribution) -> Result<()> {
        if other.kind != self.kind {
            return Err(Error::IncompatibleDistributions("different alphabets"));
        }
        if other.dimension != self.dimension {
            return Err(Error::IncompatibleDistributions("different dimensions"));
        }
        for (s, &c) in &other.counts {
            *self.counts.entry(s.clone()).or_insert(0.0) += c;
        }
        self.total += other.total;
        self.windows_seen += other.windows_seen;
        self.windows_retained += other.windows_retained;
        Ok(())
    }

    /// Relabels permutation symbols by their inverse, turning rank-mapping
    /// codes into chronological-index codes. Extended alphabets are returned
    /// unchanged.
    pub fn to_chronological(&self) -> SymbolDistribution {
        if self.kind != SymbolKind::Permutation {
            return self.clone();
        }
        let counts = self
            .counts
            .iter()
            .map(|(s, &c)| (s.inverse().expect("permutation symbol"), c))
            .collect();
        SymbolDistribution { counts, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    fn ln_base(self) -> f64 {
        match self {
            LogBase::Natural => 1.0,
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::Ten => std::f64::consts::LN_10,
        }
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "natural" | "nat" => Ok(LogBase::Natural),
            "2" | "bits" => Ok(LogBase::Two),
            "10" => Ok(LogBase::Ten),
            other => Err(Error::Config(format!("unknown log base {other:?}"))),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Natural => "e",
            LogBase::Two => "2",
            LogBase::Ten => "10",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyResult {
    /// Entropy in the requested base.
    pub entropy: f64,
    /// Entropy divided by the log of the alphabet size, in `[0, 1]`.
    pub normalized: f64,
    pub dimension: usize,
    pub kind: SymbolKind,
    pub missing_patterns: u64,
    pub log_base: LogBase,
}

/// `H = -sum p log p` with `0 log 0 = 0`.
pub fn shannon_entropy(dist: &SymbolDistribution, base: LogBase) -> Result<EntropyResult> {
    if dist.total <= 0.0 {
        return Err(Error::EmptyDistribution);
    }
    let nats = dist
        .counts
        .values()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / dist.total;
            -p * p.ln()
        })
        .sum::<f64>()
        .max(0.0);
    let size = alphabet_size(dist.kind, dist.dimension)? as f64;
    Ok(EntropyResult {
        entropy: nats / base.ln_base(),
        normalized: (nats / size.ln()).clamp(0.0, 1.0),
        dimension: dist.dimension,
        kind: dist.kind,
        missing_patterns: missing_patterns(dist),
        log_base: base,
    })
}

/// Symbols of the alphabet that were never observed.
pub fn missing_patterns(dist: &SymbolDistribution) -> u64 {
    let size = alphabet_size(dist.kind, dist.dimension).expect("dimension checked on construction");
    size - dist.observed() as u64
}

#[cfg(test)]
mod tests {
    use itertools::Itertools;
    use proptest::prelude::*;

    use super::*;
    use crate::ties::enumerate_alphabet;

    fn perm(d: &str) -> Symbol {
        Symbol::from_digits(SymbolKind::Permutation, d).unwrap()
    }

    fn uniform(m: usize) -> SymbolDistribution {
        let mut dist = SymbolDistribution::new(SymbolKind::Permutation, m).unwrap();
        for p in (1..=m as u8).permutations(m) {
            dist.add(Symbol::new(SymbolKind::Permutation, &p).unwrap(), 1.0);
        }
        dist
    }

    #[test]
    fn degenerate_distribution_has_zero_entropy() {
        let mut dist = SymbolDistribution::new(SymbolKind::Permutation, 3).unwrap();
        dist.add(perm("123"), 5.0);
        let h = shannon_entropy(&dist, LogBase::Natural).unwrap();
        assert_eq!(h.entropy, 0.0);
        assert_eq!(h.missing_patterns, 5);
        assert_eq!(missing_patterns(&dist), 5);
    }

    #[test]
    fn uniform_distribution_is_maximal() {
        for m in 2..=5 {
            let h = shannon_entropy(&uniform(m), LogBase::Natural).unwrap();
            let fact: f64 = (1..=m).map(|k| k as f64).product();
            assert!((h.entropy - fact.ln()).abs() < 1e-12);
            assert!((h.normalized - 1.0).abs() < 1e-12);
            assert_eq!(h.missing_patterns, 0);
        }
    }

    #[test]
    fn two_equal_symbols_give_log_two() {
        let mut dist = SymbolDistribution::new(SymbolKind::Permutation, 3).unwrap();
        dist.add(perm("123"), 1.0);
        dist.add(perm("321"), 1.0);
        let h = shannon_entropy(&dist, LogBase::Natural).unwrap();
        assert!((h.entropy - std::f64::consts::LN_2).abs() < 1e-15);
        let bits = shannon_entropy(&dist, LogBase::Two).unwrap();
        assert!((bits.entropy - 1.0).abs() < 1e-15);
        let dits = shannon_entropy(&dist, LogBase::Ten).unwrap();
        assert!((dits.entropy - 2f64.log10()).abs() < 1e-15);
        assert_eq!(h.normalized, bits.normalized);
    }

    #[test]
    fn empty_distribution_is_an_error() {
        let dist = SymbolDistribution::new(SymbolKind::Permutation, 3).unwrap();
        assert!(matches!(shannon_entropy(&dist, LogBase::Natural), Err(Error::EmptyDistribution)));
    }

    #[test]
    fn extended_uniform_normalizes_to_one() {
        for kind in [SymbolKind::ChronologicalExtended, SymbolKind::RankExtended] {
            for m in 3..=5 {
                let mut dist = SymbolDistribution::new(kind, m).unwrap();
                for s in enumerate_alphabet(kind, m).unwrap() {
                    dist.add(s, 2.0);
                }
                let h = shannon_entropy(&dist, LogBase::Two).unwrap();
                assert!((h.normalized - 1.0).abs() < 1e-12, "{kind} m={m}");
                assert_eq!(h.missing_patterns, 0);
            }
        }
    }

    #[test]
    fn merge_rejects_mismatched_tables() {
        let mut a = SymbolDistribution::new(SymbolKind::Permutation, 3).unwrap();
        let b = SymbolDistribution::new(SymbolKind::RankExtended, 3).unwrap();
        let c = SymbolDistribution::new(SymbolKind::Permutation, 4).unwrap();
        assert!(a.merge(&b).is_err());
        assert!(a.merge(&c).is_err());
    }

    #[test]
    fn log_base_parsing() {
        assert_eq!("e".parse::<LogBase>().unwrap(), LogBase::Natural);
        assert_eq!("2".parse::<LogBase>().unwrap(), LogBase::Two);
        assert_eq!("10".parse::<LogBase>().unwrap(), LogBase::Ten);
        assert!("3".parse::<LogBase>().is_err());
    }

    fn weights() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..10.0, 6)
    }

    fn table(w: &[f64]) -> SymbolDistribution {
        let mut dist = SymbolDistribution::new(SymbolKind::Permutation, 3).unwrap();
        for (p, &x) in (1..=3u8).permutations(3).zip(w) {
            dist.add(Symbol::new(SymbolKind::Permutation, &p).unwrap(), x);
        }
        dist
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one(w in weights()) {
            let dist = table(&w);
            prop_assume!(dist.total() > 0.0);
            let sum: f64 = dist.probabilities().map(|(_, p)| p).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            let counted: f64 = dist.counts().values().sum();
            prop_assert!((counted - dist.total()).abs() <= 1e-9 * dist.total());
            let h = shannon_entropy(&dist, LogBase::Natural).unwrap();
            prop_assert!(h.entropy >= 0.0 && h.entropy <= 6f64.ln() + 1e-12);
            prop_assert!((0.0..=1.0).contains(&h.normalized));
        }

        #[test]
        fn relabelling_leaves_entropy_unchanged(w in weights()) {
            let dist = table(&w);
            prop_assume!(dist.total() > 0.0);
            let mut rotated = w.clone();
            rotated.rotate_left(2);
            let a = shannon_entropy(&dist, LogBase::Natural).unwrap().entropy;
            let b = shannon_entropy(&table(&rotated), LogBase::Natural).unwrap().entropy;
            let c = shannon_entropy(&dist.to_chronological(), LogBase::Natural).unwrap().entropy;
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((a - c).abs() < 1e-12);
        }

        #[test]
        fn entropy_is_concave(w1 in weights(), w2 in weights(), lambda in 0.0f64..=1.0) {
            let (p1, p2) = (table(&w1), table(&w2));
            prop_assume!(p1.total() > 0.0 && p2.total() > 0.0);
            let mixed: Vec<f64> = (1..=3u8)
                .permutations(3)
                .map(|p| {
                    let s = Symbol::new(SymbolKind::Permutation, &p).unwrap();
                    lambda * p1.probability(&s) + (1.0 - lambda) * p2.probability(&s)
                })
                .collect();
            let h = |d: &SymbolDistribution| shannon_entropy(d, LogBase::Natural).unwrap().entropy;
            prop_assert!(h(&table(&mixed)) >= lambda * h(&p1) + (1.0 - lambda) * h(&p2) - 1e-12);
        }
    }
}
