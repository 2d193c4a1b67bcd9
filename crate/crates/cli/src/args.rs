use std::path::PathBuf;

use anslab::optimize::{Objective, QuantizedSearchMode};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "anslab",
    version,
    about = "tANS spread analysis, search and coding"
)]
pub struct Cli {
    /// Worker threads; 1 runs the sequential reference path. Defaults to all cores.
    #[arg(long, global = true, env = "ANSLAB_THREADS")]
    pub threads: Option<usize>,

    /// Where to write the run manifest. Defaults to `<primary output>.manifest.json`.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stationary distribution and redundancy of one spread.
    Analyze(AnalyzeArgs),
    /// Analytic spread from the state-probability law.
    Tune(TuneArgs),
    /// Swap search for a low (or high) redundancy spread.
    Optimize(OptimizeArgs),
    /// Every spread of a small table: extremes and a histogram of κ.
    Enumerate(EnumerateArgs),
    /// Compress a byte file into a container.
    Encode(EncodeArgs),
    /// Restore a byte file from a container.
    Decode(DecodeArgs),
    /// Key-derived secret spreads.
    #[command(subcommand)]
    Keyed(KeyedCommand),
    /// Minimum and maximum ΔH reached by swap search per table size and seed.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArithArg {
    Exact,
    Float,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// `symbol<TAB>probability` or `symbol<TAB>count` lines.
    #[arg(long = "dist", visible_alias = "dist-file")]
    pub dist: PathBuf,

    /// Table exponent: `L = 2^R` states.
    #[arg(long = "R", visible_alias = "r")]
    pub r: u32,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct ArithFlags {
    /// Rational arithmetic (default for L ≤ 256 when probabilities are exact).
    #[arg(long)]
    pub exact: bool,
    /// Floating-point arithmetic.
    #[arg(long)]
    pub float: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Spread file (`x<TAB>symbol` per state).
    #[arg(long = "spread", visible_alias = "spread-file")]
    pub spread: PathBuf,
    #[command(flatten)]
    pub arith: ArithFlags,
    /// Also list every state probability p_x.
    #[arg(long)]
    pub probs: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TuneMethod {
    Tune,
    Rank,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long, value_enum, default_value = "tune")]
    pub method: TuneMethod,
    /// Spread file to write.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Random,
    Tuned,
    Rank,
    File,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Stop once ΔH crosses this value (below for min, above for max).
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    #[arg(long, default_value_t = 10_000)]
    pub iters: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "random")]
    pub init: InitArg,
    /// Starting spread for `--init file`.
    #[arg(long = "spread", visible_alias = "spread-file")]
    pub spread: Option<PathBuf>,
    #[arg(long, default_value = "min", value_parser = parse_objective)]
    pub objective: Objective,
    /// How to choose the counts L_s.
    #[arg(long, default_value = "best-fit", value_parser = parse_quantized)]
    pub counts: QuantizedSearchMode,
    #[command(flatten)]
    pub arith: ArithFlags,
    /// Final spread file.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Good-swap trace. Defaults to `<out>.trace.tsv`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    s.parse()
}

fn parse_quantized(s: &str) -> Result<QuantizedSearchMode, String> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Refuse to enumerate more spreads than this.
    #[arg(long, default_value_t = anslab::optimize::DEFAULT_CAP)]
    pub cap: u128,
    /// Interior histogram edges, comma separated (`1.48,1.49,1.5` or fractions).
    #[arg(long, value_delimiter = ',')]
    pub edges: Option<Vec<String>>,
    #[command(flatten)]
    pub arith: ArithFlags,
    /// Histogram CSV.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Spread attaining the minimum. Defaults to `<out>.min.spread`.
    #[arg(long)]
    pub min_spread: Option<PathBuf>,
    /// Spread attaining the maximum. Defaults to `<out>.max.spread`.
    #[arg(long)]
    pub max_spread: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CoderArgs {
    /// Distribution file. Encode builds one from the input's byte histogram when absent.
    #[arg(long = "dist", visible_alias = "dist-file")]
    pub dist: Option<PathBuf>,
    /// Spread file. Derived with `--method` when absent.
    #[arg(long = "spread", visible_alias = "spread-file")]
    pub spread: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tune")]
    pub method: TuneMethod,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long = "R", visible_alias = "r")]
    pub r: u32,
    #[command(flatten)]
    pub coder: CoderArgs,
    /// Initial encoder state, defaults to L.
    #[arg(long)]
    pub x_init: Option<u32>,
    /// Where to write the quantized counts decode needs. Defaults to `<output>.dist`.
    #[arg(long)]
    pub dist_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[command(flatten)]
    pub coder: CoderArgs,
}

#[derive(Debug, Args)]
pub struct KeyArgs {
    /// 32-byte key as 64 hex digits.
    #[arg(long, env = "ANSLAB_KEY_HEX", hide_env_values = true)]
    pub key_hex: String,
    #[arg(long = "dist-file", visible_alias = "dist")]
    pub dist: PathBuf,
    #[arg(long = "R", visible_alias = "r")]
    pub r: u32,
    #[arg(long, default_value_t = anslab::keyed::DEFAULT_KEYED_ITERS)]
    pub iters: u64,
}

#[derive(Debug, Subcommand)]
pub enum KeyedCommand {
    /// Derive the secret spread and report its digest and ΔH.
    Derive {
        #[command(flatten)]
        key: KeyArgs,
        /// Also write the spread file (it is secret).
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    Encode {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
    Decode {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long = "dist", visible_alias = "dist-file")]
    pub dist: PathBuf,
    /// Table exponents, comma separated.
    #[arg(
        long = "R-list",
        visible_alias = "r-list",
        value_delimiter = ',',
        required = true
    )]
    pub r_list: Vec<u32>,
    #[arg(long, default_value_t = 10_000)]
    pub iters: u64,
    /// Number of seeds per exponent, starting at `--first-seed`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,
    /// CSV output.
    #[arg(long, short)]
    pub out: PathBuf,
}
