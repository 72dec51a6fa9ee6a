//! `tiepe`: permutation entropy of tied time series from the command line.
//!
//! Exit codes: 0 success, 2 bad flags, 3 unreadable or malformed input,
//! 4 estimator failure. Errors are reported on stderr as a single
//! `error: kind=<kind> code=<code> message="<text>"` line.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tiepe::experiment::{write_aggregate, write_records};
use tiepe::rr::list_series_files;
use tiepe::{
    aggregate, embed, enumerate_alphabet, group_compare, missing_patterns, read_series, repeated_ratio, run_sweep,
    shannon_entropy, BayesMode, EntropyBins, ErrorKind, Group, Grouping, LogBase, Strategy, StrategyName,
    SweepConfig, SymbolKind,
};

#[derive(Parser)]
#[command(name = "tiepe", version, about = "Permutation entropy for time series with tied values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mapping {
    Rank,
    Chronological,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alphabet {
    Permutation,
    ChronologicalExtended,
    RankExtended,
}

impl From<Alphabet> for SymbolKind {
    fn from(a: Alphabet) -> Self {
        match a {
            Alphabet::Permutation => SymbolKind::Permutation,
            Alphabet::ChronologicalExtended => SymbolKind::ChronologicalExtended,
            Alphabet::RankExtended => SymbolKind::RankExtended,
        }
    }
}

#[derive(clap::Args)]
struct StrategyArgs {
    /// chrono-ext, rank-ext, complete-cases, time-ordered, random-imp or bayes-imp
    #[arg(long, short)]
    strategy: StrategyName,
    /// Seed for random-imp and sampled bayes-imp
    #[arg(long)]
    seed: Option<u64>,
    /// How bayes-imp spreads a tied window: `expected` or `sampled`
    #[arg(long, default_value = "expected")]
    bayes_mode: BayesMode,
}

impl StrategyArgs {
    fn build(&self) -> Strategy {
        let s = Strategy::new(self.strategy).with_bayes_mode(self.bayes_mode);
        match self.seed {
            Some(seed) => s.with_seed(seed),
            None => s,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Entropy of one series file (one value per line, `#` comments)
    Entropy {
        file: PathBuf,
        /// Embedding dimension
        #[arg(long, short, value_parser = clap::value_parser!(u8).range(2..=7))]
        m: u8,
        #[command(flatten)]
        strategy: StrategyArgs,
        /// Symbol labels for permutation strategies
        #[arg(long, value_enum, default_value = "rank")]
        mapping: Mapping,
        /// e, 2 or 10
        #[arg(long, default_value = "e")]
        log_base: LogBase,
        /// Print a header line before the row
        #[arg(long)]
        header: bool,
        /// Print `symbol,count,probability` rows instead of the summary
        #[arg(long)]
        distribution: bool,
    },
    /// Run the strategy-comparison sweep described by a TOML config
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for records.csv and the aggregate tables
        #[arg(long, env = "TIEPE_OUT_DIR", default_value = "tiepe-sweep")]
        out: PathBuf,
        /// Overrides the config's master seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Mann-Whitney comparison of two directories of RR-interval files
    Compare {
        dir_a: PathBuf,
        dir_b: PathBuf,
        #[arg(long, short, value_parser = clap::value_parser!(u8).range(2..=7))]
        m: u8,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
    /// List every symbol of an alphabet
    EnumerateAlphabet {
        #[arg(long, value_enum)]
        kind: Alphabet,
        #[arg(long, short, value_parser = clap::value_parser!(u8).range(2..=7))]
        m: u8,
        /// Print only the number of symbols
        #[arg(long)]
        count: bool,
    },
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, kind: "usage", message: message.into() }
    }

    fn input(message: impl Into<String>) -> Self {
        Self { code: 3, kind: "input", message: message.into() }
    }
}

impl From<tiepe::Error> for Failure {
    fn from(e: tiepe::Error) -> Self {
        let (code, kind) = match e.kind() {
            ErrorKind::Usage => (2, "usage"),
            ErrorKind::Input => (3, "input"),
            ErrorKind::Strategy => (4, "strategy"),
        };
        Self { code, kind, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn entropy_cmd(
    file: &Path,
    m: usize,
    strategy: Strategy,
    mapping: Mapping,
    log_base: LogBase,
    header: bool,
    distribution: bool,
) -> CmdResult {
    strategy.validate()?;
    if matches!(mapping, Mapping::Chronological) && strategy.name.alphabet() != SymbolKind::Permutation {
        return Err(Failure::usage(format!("--mapping only applies to permutation strategies, not {}", strategy.name)));
    }
    let series = read_series(file)?;
    let windows = embed(&series, m, 1)?;
    let mut dist = strategy.apply(&windows)?;
    let h = shannon_entropy(&dist, log_base)?;
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    if distribution {
        if matches!(mapping, Mapping::Chronological) {
            dist = dist.to_chronological();
        }
        out.write_record(["symbol", "count", "probability"])?;
        for (symbol, p) in dist.probabilities() {
            out.write_record([symbol.to_string(), fmt(dist.count(symbol)), fmt(p)])?;
        }
    } else {
        if header {
            out.write_record(["h", "h_normalized", "repeated_ratio", "missing_patterns", "windows_retained", "windows_seen"])?;
        }
        out.write_record([
            fmt(h.entropy),
            fmt(h.normalized),
            fmt(repeated_ratio(&windows)?),
            missing_patterns(&dist).to_string(),
            dist.windows_retained().to_string(),
            dist.windows_seen().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn fmt(x: f64) -> String {
    tiepe::experiment::format_float(x)
}

fn sweep_cmd(config: &Path, out: &Path, seed: Option<u64>) -> CmdResult {
    // everything wrong with the config file is an input problem here
    let mut cfg = SweepConfig::load(config).map_err(|e| Failure::input(e.to_string()))?;
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    let records = run_sweep(&cfg)?;
    let ok = records.iter().filter(|r| r.is_ok()).count();
    if ok == 0 {
        let first = records.first().map(|r| r.status.clone()).unwrap_or_default();
        return Err(Failure { code: 4, kind: "strategy", message: format!("no sweep cell succeeded: {first}") });
    }
    let by_ratio = aggregate(&records, &Grouping::RepeatedRatio(cfg.ratio_bins.clone()))?;
    let by_level = aggregate(&records, &Grouping::EntropyLevel(cfg.entropy_bins.clone()))?;
    fs::create_dir_all(out).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    let create = |name: &str| -> Result<BufWriter<File>, Failure> {
        let path = out.join(name);
        File::create(&path).map(BufWriter::new).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    };
    write_records(create("records.csv")?, &records)?;
    write_aggregate(create("aggregate_repeated_ratio.csv")?, &by_ratio)?;
    write_aggregate(create("aggregate_entropy_level.csv")?, &by_level)?;
    let bins = match &cfg.entropy_bins {
        EntropyBins::Quantiles(k) => format!("{k} quantiles"),
        EntropyBins::Edges(e) => format!("{} edges", e.len()),
    };
    println!(
        "cells={} ok={} failed={} entropy_bins={bins} out={}",
        records.len(),
        ok,
        records.len() - ok,
        out.display()
    );
    Ok(())
}

fn group_of(dir: &Path) -> Result<Group, Failure> {
    let files = list_series_files(dir)?;
    let label = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| dir.display().to_string());
    Ok(Group { label, files })
}

fn compare_cmd(dir_a: &Path, dir_b: &Path, m: usize, strategy: Strategy) -> CmdResult {
    strategy.validate()?;
    let (mut a, mut b) = (group_of(dir_a)?, group_of(dir_b)?);
    if a.label == b.label {
        a.label = dir_a.display().to_string();
        b.label = dir_b.display().to_string();
    }
    let report = group_compare(&a, &b, m, &strategy)?;
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    report.write_csv(&mut lock)?;
    writeln!(lock, "{}", report.test.summary())?;
    Ok(())
}

fn enumerate_cmd(kind: SymbolKind, m: usize, count: bool) -> CmdResult {
    let symbols = enumerate_alphabet(kind, m)?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    if count {
        writeln!(out, "{}", symbols.len())?;
    } else {
        for s in symbols {
            writeln!(out, "{s}")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 2 {
                let first = e.to_string();
                let first = first.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
                eprintln!("error: kind=usage code=2 message={first:?}");
            }
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Entropy { file, m, strategy, mapping, log_base, header, distribution } => {
            entropy_cmd(&file, m.into(), strategy.build(), mapping, log_base, header, distribution)
        }
        Command::Sweep { config, out, seed } => sweep_cmd(&config, &out, seed),
        Command::Compare { dir_a, dir_b, m, strategy } => compare_cmd(&dir_a, &dir_b, m.into(), strategy.build()),
        Command::EnumerateAlphabet { kind, m, count } => enumerate_cmd(kind.into(), m.into(), count),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: kind={} code={} message={:?}", f.kind, f.code, f.message);
            ExitCode::from(f.code)
        }
    }
}
