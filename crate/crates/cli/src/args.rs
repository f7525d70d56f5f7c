use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "strata",
    version,
    about = "Exact dynamics of unicritical polynomials over finite fields",
    long_about = "Computes iterated image chains, preperiodic strata, exact sweeps and \
quadratic averages, wreath-product fixed-point proportions, and bound reports. \
All exact output is bit-identical across runs and worker counts. \
Set STRATA_TABLE_LIMIT to override the default 2^26 cap on enumerated domain sizes."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Describe F_{p^r}: canonical modulus and element counts by degree
    FieldInfo {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Analyze one map x^d + alpha: periodic count, tail, strata
    Strata {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long)]
        d: u64,
        /// canonical code of alpha
        #[arg(long)]
        alpha: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sweep every alpha in the field; CSV rows plus a trailing AGG row
    Sweep {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long)]
        d: u64,
        /// aggregate mean w_n for n = 0..=n-max
        #[arg(long = "n-max", default_value_t = 4)]
        n_max: u32,
        #[arg(long, value_enum, default_value_t = FilterArg::All)]
        filter: FilterArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exact average of w_{m,n} over all degree-2 polynomials
    AverageQuadratics {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = AverageModeArg::Both)]
        mode: AverageModeArg,
    },
    /// Fixed-point proportions of iterated wreath products of Z/dZ
    Wreath {
        #[arg(long)]
        d: u64,
        #[arg(long = "max-n")]
        max_n: u32,
        /// exact rationals (default; limited depth)
        #[arg(long, conflicts_with_all = ["float", "mc"])]
        exact: bool,
        /// certified floating values for any depth
        #[arg(long, conflicts_with = "mc")]
        float: bool,
        /// seeded Monte-Carlo estimates
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Evaluate one bound statement; optionally compare an empirical value
    Bounds {
        /// technical | quadcor | upperboundforw | upperboundforW |
        /// lowerboundforW | aaroncorollary | orderofgrowth |
        /// averageupperbound | strongest | genhead | averagelowerboundmn
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        p: u64,
        /// extension degree; may exceed 64-bit range (decimal string)
        #[arg(long)]
        r: String,
        #[arg(long, default_value_t = 2)]
        d: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: Option<u64>,
        /// for `strongest`: rational in (0,2), e.g. 1/2 or 0.5
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long = "log-base", value_enum, default_value_t = LogBaseArg::Natural)]
        log_base: LogBaseArg,
        /// empirical value as num/den, to fill the comparison columns
        #[arg(long)]
        empirical: Option<String>,
        #[arg(long = "empirical-kind", value_enum)]
        empirical_kind: Option<EmpiricalKindArg>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArg,
    },
    /// Scan for the least n past which a stated inequality always holds
    ScanThreshold {
        #[arg(long, value_enum)]
        inequality: InequalityArg,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long = "log-base", value_enum, default_value_t = LogBaseArg::Natural)]
        log_base: LogBaseArg,
    },
    /// Mean image proportions over all alpha vs the wreath predictions
    ImageVsWreath {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 2)]
        d: u64,
        #[arg(long = "max-n", default_value_t = 8)]
        max_n: u32,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run an invariant suite; exit 0 iff every check passes
    Check {
        #[arg(long, value_enum)]
        suite: SuiteArg,
    },
}

#[derive(Args, Debug)]
pub struct OutArg {
    /// write to a file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Dot,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterArg {
    All,
    PrimitiveOnly,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AverageModeArg {
    ViaMu,
    BruteForce,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogBaseArg {
    Natural,
    Ten,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum InequalityArg {
    Orderofgrowth,
    Strongest,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmpiricalKindArg {
    /// |f^n(F)|/q at the row's n
    Image,
    Wn,
    Wmn,
    AvgWn,
    AvgWmn,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteArg {
    Partition,
    Field,
    W0,
    Mu,
    Wreath,
    Bounds,
    All,
}
