//! Strategies for windows that contain equal samples.
//!
//! Two strategies extend the alphabet so that ties get symbols of their own.
//! The other four treat a tied window as a permutation that was observed too
//! coarsely and map it back onto the rank alphabet: drop it, break ties by time,
//! draw uniformly among the compatible permutations, or draw according to the
//! distribution of the tie-free windows.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entropy::SymbolDistribution;
use crate::error::{Error, Result};
use crate::ordinal::{
    check_dimension, map_rank, min_rank_code, slice_has_ties, stable_argsort, Code, Symbol,
    SymbolKind, Window,
};

/// Bian's chronological extended symbol: positions sorted by value (stable),
/// each position replaced by the smallest index among the samples equal to it.
pub fn chronological_extended(window: &Window) -> Symbol {
    let values = window.values();
    let code = stable_argsort(values)
        .iter()
        .map(|&i| {
            let v = values[i as usize];
            values.iter().position(|&x| x == v).expect("value is present") as u8 + 1
        })
        .collect();
    Symbol::from_code_unchecked(SymbolKind::ChronologicalExtended, code)
}

/// Rank extended symbol: tied samples share the lowest rank of their group.
pub fn rank_extended(window: &Window) -> Symbol {
    Symbol::from_code_unchecked(SymbolKind::RankExtended, min_rank_code(window.values()))
}

/// Rank permutation with ties broken in favour of the earlier sample being smaller.
pub(crate) fn time_ordered_symbol(values: &[f64]) -> Symbol {
    let order = stable_argsort(values);
    let mut code: Code = std::iter::repeat(0).take(values.len()).collect();
    for (rank, &pos) in order.iter().enumerate() {
        code[pos as usize] = rank as u8 + 1;
    }
    Symbol::from_code_unchecked(SymbolKind::Permutation, code)
}

/// Every rank permutation a tied window could have come from.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibleSet {
    pub window: Window,
    /// Sorted, non-empty.
    pub symbols: Vec<Symbol>,
}

impl CompatibleSet {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.symbols.binary_search(symbol).is_ok()
    }
}

/// Permutations obtained by ordering each tie group in every possible way.
///
/// A group of size `k` whose shared min-rank is `r` receives the ranks
/// `r..r+k` in all `k!` arrangements, so the set has `prod k!` members.
pub fn compatible_symbols(window: &Window) -> CompatibleSet {
    CompatibleSet { window: window.clone(), symbols: compatible_codes(&min_rank_code(window.values())) }
}

fn compatible_codes(min_ranks: &[u8]) -> Vec<Symbol> {
    let groups: Vec<(u8, Vec<usize>)> = min_ranks
        .iter()
        .enumerate()
        .map(|(pos, &r)| (r, pos))
        .into_group_map()
        .into_iter()
        .sorted()
        .collect();
    let mut symbols: Vec<Symbol> = groups
        .iter()
        .map(|(rank, positions)| {
            let k = positions.len() as u8;
            (*rank..*rank + k).permutations(k as usize).collect::<Vec<_>>()
        })
        .multi_cartesian_product()
        .map(|choice| {
            let mut code: Code = std::iter::repeat(0).take(min_ranks.len()).collect();
            for ((_, positions), ranks) in groups.iter().zip(&choice) {
                for (&pos, &r) in positions.iter().zip(ranks) {
                    code[pos] = r;
                }
            }
            Symbol::from_code_unchecked(SymbolKind::Permutation, code)
        })
        .collect();
    symbols.sort();
    symbols
}

/// Compatible sets keyed by the window's min-rank pattern, which fully
/// determines them.
#[derive(Default)]
struct CompatibleCache(HashMap<Code, Vec<Symbol>>);

impl CompatibleCache {
    fn get(&mut self, values: &[f64]) -> &[Symbol] {
        let key = min_rank_code(values);
        self.0.entry(key).or_insert_with_key(|k| compatible_codes(k))
    }
}

fn dimension_of(windows: &[Window]) -> Result<usize> {
    let m = windows.first().ok_or(Error::EmptyInput("no windows"))?.dimension();
    if windows.iter().any(|w| w.dimension() != m) {
        return Err(Error::InvalidDimension { m, reason: "windows of mixed dimension" });
    }
    Ok(m)
}

fn extended(windows: &[Window], kind: SymbolKind, map: fn(&Window) -> Symbol) -> Result<SymbolDistribution> {
    let mut dist = SymbolDistribution::new(kind, dimension_of(windows)?)?;
    for w in windows {
        dist.add(map(w), 1.0);
    }
    dist.set_window_counts(windows.len(), windows.len());
    Ok(dist)
}

/// Counts rank permutations of the tie-free windows only.
pub fn complete_cases(windows: &[Window]) -> Result<SymbolDistribution> {
    let mut dist = SymbolDistribution::new(SymbolKind::Permutation, dimension_of(windows)?)?;
    let mut retained = 0;
    for w in windows {
        if let Ok(s) = map_rank(w) {
            dist.add(s, 1.0);
            retained += 1;
        }
    }
    if retained == 0 {
        return Err(Error::NoCompleteCases);
    }
    dist.set_window_counts(windows.len(), retained);
    Ok(dist)
}

/// Maps every window, resolving `x_a = x_b, a < b` as `x_a < x_b`.
pub fn time_ordered(windows: &[Window]) -> Result<SymbolDistribution> {
    let mut dist = SymbolDistribution::new(SymbolKind::Permutation, dimension_of(windows)?)?;
    for w in windows {
        dist.add(time_ordered_symbol(w.values()), 1.0);
    }
    dist.set_window_counts(windows.len(), windows.len());
    Ok(dist)
}

/// Replaces each tied window by a uniform draw from its compatible set.
/// Deterministic for a given seed.
pub fn random_imputation(windows: &[Window], seed: u64) -> Result<SymbolDistribution> {
    let mut dist = SymbolDistribution::new(SymbolKind::Permutation, dimension_of(windows)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache = CompatibleCache::default();
    for w in windows {
        if !slice_has_ties(w.values()) {
            dist.add(map_rank(w)?, 1.0);
            continue;
        }
        let set = cache.get(w.values());
        let pick = rng.gen_range(0..set.len());
        dist.add(set[pick].clone(), 1.0);
    }
    dist.set_window_counts(windows.len(), windows.len());
    Ok(dist)
}

/// How the Bayesian strategy turns weights into counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BayesMode {
    /// Adds the fractional weight of every compatible symbol. Seed-free.
    #[default]
    ExpectedCount,
    /// Draws one symbol per tied window.
    Sampled,
}

impl FromStr for BayesMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expected" | "expected-count" => Ok(BayesMode::ExpectedCount),
            "sampled" => Ok(BayesMode::Sampled),
            other => Err(Error::Config(format!("unknown bayes mode {other:?}"))),
        }
    }
}

impl fmt::Display for BayesMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BayesMode::ExpectedCount => "expected",
            BayesMode::Sampled => "sampled",
        })
    }
}

/// Imputation weighted by the complete-case distribution.
///
/// A first pass builds the prior `p*` from the tie-free windows. In the second
/// pass each tied window spreads one unit of mass over its compatible set with
/// weights `p*(s) / sum p*`, falling back to uniform when the whole set is
/// unobserved in the prior.
pub fn bayesian_imputation(
    windows: &[Window],
    mode: BayesMode,
    seed: Option<u64>,
) -> Result<SymbolDistribution> {
    let mut rng = match (mode, seed) {
        (BayesMode::Sampled, None) => return Err(Error::MissingSeed("bayes-imp (sampled)")),
        (BayesMode::Sampled, Some(seed)) => Some(ChaCha8Rng::seed_from_u64(seed)),
        (BayesMode::ExpectedCount, _) => None,
    };
    let prior = match complete_cases(windows) {
        Ok(p) => p,
        Err(Error::NoCompleteCases) => return Err(Error::EmptyPrior),
        Err(e) => return Err(e),
    };
    let mut dist = SymbolDistribution::new(SymbolKind::Permutation, prior.dimension())?;
    let mut cache = CompatibleCache::default();
    let mut weights: HashMap<Code, Vec<f64>> = HashMap::new();
    for w in windows {
        if !slice_has_ties(w.values()) {
            dist.add(map_rank(w)?, 1.0);
            continue;
        }
        let key = min_rank_code(w.values());
        let set = cache.get(w.values());
        let wts = weights.entry(key).or_insert_with(|| imputation_weights(&prior, set));
        match rng.as_mut() {
            Some(rng) => {
                let index = WeightedIndex::new(wts.iter()).expect("weights are a distribution");
                dist.add(set[index.sample(rng)].clone(), 1.0);
            }
            None => {
                for (s, &wt) in set.iter().zip(wts.iter()) {
                    dist.add(s.clone(), wt);
                }
            }
        }
    }
    dist.set_window_counts(windows.len(), windows.len());
    Ok(dist)
}

/// Prior mass restricted to `set` and renormalised.
pub(crate) fn imputation_weights(prior: &SymbolDistribution, set: &[Symbol]) -> Vec<f64> {
    let masses: Vec<f64> = set.iter().map(|s| prior.probability(s)).collect();
    let sum: f64 = masses.iter().sum();
    if sum > 0.0 {
        masses.iter().map(|p| p / sum).collect()
    } else {
        vec![1.0 / set.len() as f64; set.len()]
    }
}

/// The six tie-handling strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StrategyName {
    ChronologicalExtended,
    RankExtended,
    CompleteCases,
    TimeOrdered,
    RandomImputation,
    BayesianImputation,
}

impl StrategyName {
    pub const ALL: [StrategyName; 6] = [
        StrategyName::ChronologicalExtended,
        StrategyName::RankExtended,
        StrategyName::CompleteCases,
        StrategyName::TimeOrdered,
        StrategyName::RandomImputation,
        StrategyName::BayesianImputation,
    ];

    /// Short name used on the command line and in CSV output.
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyName::ChronologicalExtended => "chrono-ext",
            StrategyName::RankExtended => "rank-ext",
            StrategyName::CompleteCases => "complete-cases",
            StrategyName::TimeOrdered => "time-ordered",
            StrategyName::RandomImputation => "random-imp",
            StrategyName::BayesianImputation => "bayes-imp",
        }
    }

    /// Alphabet the strategy's symbols are drawn from.
    pub fn alphabet(self) -> SymbolKind {
        match self {
            StrategyName::ChronologicalExtended => SymbolKind::ChronologicalExtended,
            StrategyName::RankExtended => SymbolKind::RankExtended,
            _ => SymbolKind::Permutation,
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownStrategy(s.to_string()))
    }
}

/// A strategy together with its options.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Strategy {
    pub name: StrategyName,
    pub seed: Option<u64>,
    pub bayes_mode: BayesMode,
}

impl Strategy {
    pub fn new(name: StrategyName) -> Self {
        Self { name, seed: None, bayes_mode: BayesMode::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_bayes_mode(mut self, mode: BayesMode) -> Self {
        self.bayes_mode = mode;
        self
    }

    /// Whether running the strategy consumes random numbers.
    pub fn is_sampled(&self) -> bool {
        match self.name {
            StrategyName::RandomImputation => true,
            StrategyName::BayesianImputation => self.bayes_mode == BayesMode::Sampled,
            _ => false,
        }
    }

    /// Fails when a sampled strategy has no seed.
    pub fn validate(&self) -> Result<()> {
        if self.is_sampled() && self.seed.is_none() {
            return Err(Error::MissingSeed(self.name.as_str()));
        }
        Ok(())
    }

    pub fn apply(&self, windows: &[Window]) -> Result<SymbolDistribution> {
        self.validate()?;
        match self.name {
            StrategyName::ChronologicalExtended => {
                extended(windows, SymbolKind::ChronologicalExtended, chronological_extended)
            }
            StrategyName::RankExtended => extended(windows, SymbolKind::RankExtended, rank_extended),
            StrategyName::CompleteCases => complete_cases(windows),
            StrategyName::TimeOrdered => time_ordered(windows),
            StrategyName::RandomImputation => {
                random_imputation(windows, self.seed.expect("validated"))
            }
            StrategyName::BayesianImputation => {
                bayesian_imputation(windows, self.bayes_mode, self.seed)
            }
        }
    }
}

/// Largest dimension accepted by [`enumerate_alphabet`].
pub const MAX_ENUMERATION_DIMENSION: usize = 7;

/// Every weak order on `m` positions as a vector of levels `0..k`.
pub(crate) fn weak_orders(m: usize) -> Vec<Vec<u8>> {
    fn recurse(remaining: u32, level: u8, levels: &mut [u8], out: &mut Vec<Vec<u8>>) {
        if remaining == 0 {
            out.push(levels.to_vec());
            return;
        }
        // every non-empty subset of the remaining positions forms the next block
        let mut block = remaining;
        while block != 0 {
            for (pos, slot) in levels.iter_mut().enumerate() {
                if block & (1 << pos) != 0 {
                    *slot = level;
                }
            }
            recurse(remaining & !block, level + 1, levels, out);
            block = (block - 1) & remaining;
        }
    }
    let mut out = Vec::new();
    recurse((1u32 << m) - 1, 0, &mut vec![0; m], &mut out);
    out
}

/// All distinct symbols of an alphabet, found by pushing every weak order of
/// `m` positions through the alphabet's mapping rule.
pub fn enumerate_alphabet(kind: SymbolKind, m: usize) -> Result<BTreeSet<Symbol>> {
    if !(2..=MAX_ENUMERATION_DIMENSION).contains(&m) {
        return Err(Error::InvalidDimension { m, reason: "enumeration supports 2..=7" });
    }
    let mut out = BTreeSet::new();
    for levels in weak_orders(m) {
        let values: Vec<f64> = levels.iter().map(|&l| f64::from(l)).collect();
        let window = Window::new(0, &values)?;
        match kind {
            SymbolKind::Permutation => {
                if let Ok(s) = map_rank(&window) {
                    out.insert(s);
                }
            }
            SymbolKind::ChronologicalExtended => {
                out.insert(chronological_extended(&window));
            }
            SymbolKind::RankExtended => {
                out.insert(rank_extended(&window));
            }
        }
    }
    Ok(out)
}

/// Number of symbols in an alphabet, computed in closed form.
///
/// * permutations: `m!`
/// * rank extended: the ordered Bell (Fubini) number of `m`
/// * chronological extended: counted by scanning indexes from `m` down to 1,
///   tracking how many non-label indexes are still free to join a tie group.
pub fn alphabet_size(kind: SymbolKind, m: usize) -> Result<u64> {
    check_dimension(m)?;
    Ok(match kind {
        SymbolKind::Permutation => (1..=m as u64).product(),
        SymbolKind::RankExtended => fubini(m),
        SymbolKind::ChronologicalExtended => chronological_alphabet_size(m),
    })
}

fn fubini(m: usize) -> u64 {
    let mut a = vec![1u64; m + 1];
    for n in 1..=m {
        a[n] = (1..=n).map(|k| binomial(n, k) * a[n - k]).sum();
    }
    a[m]
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

fn chronological_alphabet_size(m: usize) -> u64 {
    // ways[surplus][groups]: label assignments for indexes above the cursor
    let mut ways = vec![vec![0u64; m + 1]; m + 1];
    ways[0][0] = 1;
    for index in (1..=m).rev() {
        let mut next = vec![vec![0u64; m + 1]; m + 1];
        for surplus in 0..=m {
            for groups in 0..m {
                let w = ways[surplus][groups];
                if w == 0 {
                    continue;
                }
                // index 1 has nothing below it to label it, so it must be a label
                if index > 1 {
                    next[surplus + 1][groups] += w;
                }
                for size in 1..=surplus + 1 {
                    next[surplus + 1 - size][groups + 1] += w;
                }
            }
        }
        ways = next;
    }
    // groups appear in value order, any of the r! arrangements
    (1..=m).map(|r| ways[0][r] * (1..=r as u64).product::<u64>()).sum()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::{any, prop_assert_eq, prop_assume, proptest};

    use super::*;
    use crate::ordinal::{embed, has_ties, TimeSeries};

    fn w(values: &[f64]) -> Window {
        Window::new(0, values).unwrap()
    }

    fn sym(kind: SymbolKind, d: &str) -> Symbol {
        Symbol::from_digits(kind, d).unwrap()
    }

    fn perm(d: &str) -> Symbol {
        sym(SymbolKind::Permutation, d)
    }

    fn perms(ds: &[&str]) -> Vec<Symbol> {
        let mut v: Vec<_> = ds.iter().map(|d| perm(d)).collect();
        v.sort();
        v
    }

    #[test]
    fn chronological_extended_examples() {
        let c = |v: &[f64]| chronological_extended(&w(v)).to_string();
        assert_eq!(c(&[2., 5., 1., 2., 7.]), "31125");
        assert_eq!(c(&[1., 3., 1.]), "112");
        assert_eq!(c(&[7., 1., 1.]), "221");
        assert_eq!(c(&[1., 1., 3.]), "113");
        assert_eq!(c(&[1., 3., 1., 1.]), "1112");
    }

    #[test]
    fn rank_extended_examples() {
        let r = |v: &[f64]| rank_extended(&w(v)).to_string();
        assert_eq!(r(&[2., 5., 1., 2., 7.]), "24125");
        assert_eq!(r(&[1., 3., 1.]), "131");
        assert_eq!(r(&[4., 4., 2.]), "221");
        assert_eq!(r(&[1., 3., 1., 1.]), "1411");
    }

    #[test]
    fn extended_collisions_at_dimension_four() {
        let chrono = |v: &[f64]| chronological_extended(&w(v)).to_string();
        let rank = |v: &[f64]| rank_extended(&w(v)).to_string();
        assert_eq!(chrono(&[1., 4., 1., 4.]), "1122");
        assert_eq!(chrono(&[1., 4., 4., 1.]), "1122");
        assert_eq!(chrono(&[4., 1., 4., 1.]), "2211");
        assert_eq!(chrono(&[4., 1., 1., 4.]), "2211");
        assert_eq!(rank(&[1., 4., 1., 4.]), "1313");
        assert_eq!(rank(&[1., 4., 4., 1.]), "1331");
        assert_eq!(rank(&[4., 1., 4., 1.]), "3131");
        assert_eq!(rank(&[4., 1., 1., 4.]), "3113");
    }

    #[test]
    fn time_ordered_examples() {
        let t = |v: &[f64]| time_ordered_symbol(v).to_string();
        assert_eq!(t(&[7., 1., 1.]), "312");
        assert_eq!(t(&[1., 3., 1.]), "132");
        assert_eq!(t(&[2., 2., 1.]), "231");
        assert_eq!(t(&[1., 1., 3.]), "123");
        assert_eq!(t(&[5., 5., 5.]), "123");
    }

    #[test]
    fn compatible_set_examples() {
        assert_eq!(compatible_symbols(&w(&[7., 1., 1.])).symbols, perms(&["312", "321"]));
        assert_eq!(
            compatible_symbols(&w(&[7., 7., 7.])).symbols,
            perms(&["123", "132", "213", "231", "312", "321"])
        );
        assert_eq!(compatible_symbols(&w(&[9., 10., 6.])).symbols, perms(&["231"]));
    }

    // Oracle: perturb each tie group with distinct infinitesimals in every
    // order and rank-map the result.
    fn perturbation_oracle(values: &[f64]) -> Vec<Symbol> {
        let m = values.len();
        let mut out: BTreeSet<Symbol> = BTreeSet::new();
        for offsets in (0..m).permutations(m) {
            let perturbed: Vec<f64> =
                values.iter().zip(&offsets).map(|(v, &o)| v + o as f64 * 1e-6).collect();
            out.insert(map_rank(&w(&perturbed)).unwrap());
        }
        out.into_iter().collect()
    }

    #[test]
    fn compatible_set_for_two_pairs() {
        let set = compatible_symbols(&w(&[1., 1., 2., 2.]));
        assert_eq!(set.symbols, perms(&["1234", "1243", "2134", "2143"]));
        assert_eq!(set.symbols, perturbation_oracle(&[1., 1., 2., 2.]));
        let set = compatible_symbols(&w(&[1., 2., 1., 2.]));
        assert_eq!(set.symbols, perms(&["1324", "1423", "2314", "2413"]));
        assert_eq!(set.symbols, perturbation_oracle(&[1., 2., 1., 2.]));
    }

    #[test]
    fn compatible_sets_match_perturbation_for_every_weak_order() {
        for m in 2..=4 {
            for levels in weak_orders(m) {
                let values: Vec<f64> = levels.iter().map(|&l| f64::from(l)).collect();
                let set = compatible_symbols(&w(&values));
                let expected_len: usize = levels
                    .iter()
                    .counts()
                    .values()
                    .map(|&k| (1..=k).product::<usize>())
                    .product();
                assert_eq!(set.len(), expected_len, "{values:?}");
                assert_eq!(set.symbols, perturbation_oracle(&values), "{values:?}");
                let ranks = min_rank_code(&values);
                for s in &set.symbols {
                    // each tie group collapses to its smallest imputed rank
                    let collapsed: Vec<u8> = (0..m)
                        .map(|i| {
                            (0..m)
                                .filter(|&j| values[j] == values[i])
                                .map(|j| s.code()[j])
                                .min()
                                .unwrap()
                        })
                        .collect();
                    assert_eq!(collapsed.as_slice(), ranks.as_slice());
                }
            }
        }
    }

    #[test]
    fn weak_order_counts_are_fubini_numbers() {
        let counts: Vec<usize> = (1..=6).map(|m| weak_orders(m).len()).collect();
        assert_eq!(counts, vec![1, 3, 13, 75, 541, 4683]);
    }

    #[test]
    fn alphabet_sizes_match_enumeration() {
        for m in 2..=MAX_ENUMERATION_DIMENSION {
            for kind in [SymbolKind::Permutation, SymbolKind::ChronologicalExtended, SymbolKind::RankExtended] {
                let listed = enumerate_alphabet(kind, m).unwrap();
                assert_eq!(listed.len() as u64, alphabet_size(kind, m).unwrap(), "{kind} m={m}");
                assert!(listed.iter().all(|s| Symbol::new(kind, s.code()).is_ok()));
            }
        }
        assert_eq!(alphabet_size(SymbolKind::ChronologicalExtended, 8).unwrap(), 394_353);
        assert_eq!(alphabet_size(SymbolKind::RankExtended, 8).unwrap(), 545_835);
        assert!(enumerate_alphabet(SymbolKind::RankExtended, 8).is_err());
        assert!(enumerate_alphabet(SymbolKind::RankExtended, 1).is_err());
    }

    fn series(values: &[f64]) -> Vec<Window> {
        embed(&TimeSeries::new(values.to_vec()).unwrap(), 3, 1).unwrap()
    }

    #[test]
    fn complete_cases_drops_tied_windows() {
        let windows = series(&[2., 5., 1., 2., 7., 1., 1., 3., 1.]);
        let dist = complete_cases(&windows).unwrap();
        assert_eq!(dist.windows_seen(), 7);
        assert_eq!(dist.windows_retained(), 4);
        assert_eq!(dist.count(&perm("231")), 2.0);
        assert_eq!(dist.count(&perm("312")), 1.0);
        assert_eq!(dist.count(&perm("123")), 1.0);
        assert_eq!(dist.total(), 4.0);
        assert!(matches!(complete_cases(&series(&[1.; 6])), Err(Error::NoCompleteCases)));
    }

    #[test]
    fn random_imputation_is_reproducible_and_unbiased() {
        let windows = series(&[7., 1., 1.]);
        assert_eq!(random_imputation(&windows, 9).unwrap(), random_imputation(&windows, 9).unwrap());
        let mut hits = 0.0;
        for seed in 0..2000 {
            let d = random_imputation(&windows, seed).unwrap();
            assert_eq!(d.count(&perm("312")) + d.count(&perm("321")), 1.0);
            hits += d.count(&perm("312"));
        }
        // binomial(2000, 1/2): sd ~ 22
        assert!((hits - 1000.0).abs() < 100.0, "{hits}");

        let mut sixths = HashMap::new();
        for seed in 0..6000 {
            let d = random_imputation(&series(&[7., 7., 7.]), seed).unwrap();
            let (s, _) = d.counts().iter().next().unwrap();
            *sixths.entry(s.to_string()).or_insert(0) += 1;
        }
        assert_eq!(sixths.len(), 6);
        assert!(sixths.values().all(|&c| (c as f64 - 1000.0).abs() < 150.0), "{sixths:?}");
    }

    #[test]
    fn bayesian_requires_prior_and_seed() {
        assert!(matches!(
            bayesian_imputation(&series(&[3.; 5]), BayesMode::ExpectedCount, None),
            Err(Error::EmptyPrior)
        ));
        let windows = series(&[2., 5., 1., 2., 7., 1., 1., 3., 1.]);
        assert!(matches!(
            bayesian_imputation(&windows, BayesMode::Sampled, None),
            Err(Error::MissingSeed(_))
        ));
        assert!(Strategy::new(StrategyName::RandomImputation).validate().is_err());
        assert!(Strategy::new(StrategyName::BayesianImputation).validate().is_ok());
        assert!(Strategy::new(StrategyName::BayesianImputation)
            .with_bayes_mode(BayesMode::Sampled)
            .validate()
            .is_err());
    }

    #[test]
    fn bayesian_expected_counts_worked_window() {
        let x = [2., 5., 1., 2., 7., 1., 1., 3., 1., 2., 4., 5., 1., 3., 2., 4., 4., 2., 2., 1., 0.];
        let windows = series(&x);
        let prior = complete_cases(&windows).unwrap();
        let set = compatible_symbols(&w(&[7., 1., 1.]));
        let wts = imputation_weights(&prior, &set.symbols);
        assert!((wts[0] - 0.75).abs() < 1e-12);
        assert!((wts[1] - 0.25).abs() < 1e-12);
        let dist = bayesian_imputation(&windows, BayesMode::ExpectedCount, None).unwrap();
        assert!((dist.total() - 19.0).abs() < 1e-12);
    }

    #[test]
    fn zero_mass_prior_falls_back_to_uniform() {
        // tie-free windows are all 123; the window (2,2,1) can only be 231 or 321
        let windows = vec![w(&[1., 2., 3.]), w(&[2., 2., 1.])];
        let dist = bayesian_imputation(&windows, BayesMode::ExpectedCount, None).unwrap();
        assert!((dist.count(&perm("231")) - 0.5).abs() < 1e-15);
        assert!((dist.count(&perm("321")) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn uniform_prior_matches_random_expectation() {
        let mut windows: Vec<Window> = (1..=3u8)
            .permutations(3)
            .map(|p| w(&p.iter().map(|&v| f64::from(v)).collect::<Vec<_>>()))
            .collect();
        windows.push(w(&[7., 1., 1.]));
        windows.push(w(&[4., 4., 4.]));
        let dist = bayesian_imputation(&windows, BayesMode::ExpectedCount, None).unwrap();
        // random imputation expectation: 1 per permutation, plus 1/2 each for
        // 312 and 321, plus 1/6 everywhere
        for p in (1..=3u8).permutations(3) {
            let s = Symbol::new(SymbolKind::Permutation, &p).unwrap();
            let half = if ["312", "321"].contains(&s.to_string().as_str()) { 0.5 } else { 0.0 };
            assert!((dist.count(&s) - (1.0 + half + 1.0 / 6.0)).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for name in StrategyName::ALL {
            assert_eq!(name.as_str().parse::<StrategyName>().unwrap(), name);
        }
        assert!("bayes".parse::<StrategyName>().is_err());
    }

    proptest! {
        #[test]
        fn strategies_agree_without_ties(
            values in proptest::collection::hash_set(-10_000i32..10_000, 8..40),
            seed in any::<u64>(),
        ) {
            let values: Vec<f64> = values.into_iter().map(|v| f64::from(v) / 7.0).collect();
            let windows = series(&values);
            prop_assume!(windows.iter().all(|w| !has_ties(w)));
            let reference = complete_cases(&windows).unwrap();
            for name in [StrategyName::TimeOrdered, StrategyName::RandomImputation, StrategyName::BayesianImputation] {
                let d = Strategy::new(name).with_seed(seed).apply(&windows).unwrap();
                prop_assert_eq!(d.counts(), reference.counts());
            }
            let sampled = Strategy::new(StrategyName::BayesianImputation)
                .with_bayes_mode(BayesMode::Sampled)
                .with_seed(seed)
                .apply(&windows)
                .unwrap();
            prop_assert_eq!(sampled.counts(), reference.counts());
        }

        #[test]
        fn deterministic_strategies_merge_over_split_streams(
            values in proptest::collection::vec(0u8..4, 10..40),
            split in 1usize..8,
        ) {
            let values: Vec<f64> = values.into_iter().map(f64::from).collect();
            let windows = series(&values);
            let cut = split.min(windows.len() - 1);
            for name in [StrategyName::ChronologicalExtended, StrategyName::RankExtended, StrategyName::TimeOrdered] {
                let s = Strategy::new(name);
                let whole = s.apply(&windows).unwrap();
                let mut left = s.apply(&windows[..cut]).unwrap();
                left.merge(&s.apply(&windows[cut..]).unwrap()).unwrap();
                prop_assert_eq!(whole.counts(), left.counts());
                prop_assert_eq!(whole.windows_seen(), left.windows_seen());
            }
        }
    }
}
