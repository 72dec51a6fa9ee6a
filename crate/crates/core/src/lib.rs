//! Permutation entropy for time series with tied values.
//!
//! The crate turns a real-valued series into Bandt–Pompe ordinal symbols and
//! offers six ways of dealing with windows that contain equal samples:
//!
//! | strategy | alphabet | what happens to a tied window |
//! |---|---|---|
//! | [`StrategyName::ChronologicalExtended`] | chronological extended | gets its own symbol, ties labelled by the earliest index |
//! | [`StrategyName::RankExtended`] | rank extended | gets its own symbol, ties share the lowest rank |
//! | [`StrategyName::CompleteCases`] | permutations | dropped |
//! | [`StrategyName::TimeOrdered`] | permutations | earlier sample is treated as smaller |
//! | [`StrategyName::RandomImputation`] | permutations | uniform draw from the compatible permutations |
//! | [`StrategyName::BayesianImputation`] | permutations | draw (or expectation) weighted by the complete-case distribution |
//!
//! ```
//! use tiepe::{embed, shannon_entropy, LogBase, Strategy, StrategyName, TimeSeries};
//!
//! let series = TimeSeries::new(vec![2., 5., 1., 2., 7., 1., 1., 3., 1.]).unwrap();
//! let windows = embed(&series, 3, 1).unwrap();
//! let dist = Strategy::new(StrategyName::CompleteCases).apply(&windows).unwrap();
//! assert_eq!(dist.windows_retained(), 4);
//! let h = shannon_entropy(&dist, LogBase::Natural).unwrap();
//! assert!(h.entropy > 0.0 && h.normalized <= 1.0);
//! ```
//!
//! Beyond the estimators, [`maps`] generates chaotic orbits and coarsened copies
//! of them, [`experiment`] runs the strategy-comparison sweep, and
//! [`stats`] / [`rr`] provide the Mann–Whitney two-group comparison used on
//! RR-interval recordings.

pub mod config;
pub mod entropy;
mod error;
pub mod experiment;
pub mod maps;
pub mod ordinal;
pub mod rr;
pub mod stats;
pub mod ties;

pub use entropy::{missing_patterns, shannon_entropy, EntropyResult, LogBase, SymbolDistribution};
pub use error::{Error, ErrorKind, Result};
pub use ordinal::{
    embed, has_ties, map_chronological, map_rank, min_ranks, Symbol, SymbolKind, TimeSeries,
    Window, MAX_DIMENSION,
};
pub use ties::{
    alphabet_size, bayesian_imputation, chronological_extended, compatible_symbols,
    complete_cases, enumerate_alphabet, random_imputation, rank_extended, time_ordered,
    BayesMode, CompatibleSet, Strategy, StrategyName,
};
pub use experiment::{aggregate, run_sweep, EntropyBins, EntropyScale, Grouping, SweepConfig, SweepRecord};
pub use maps::{coarsen, default_catalog, generate, repeated_ratio, MapKind, MapSpec, Truncation};
pub use rr::{group_compare, read_rr_file, read_series, CompareReport, Group};
pub use stats::{mann_whitney_u, TestResult};
