use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "hrsft", version, about = "Entropy, pressure and lemma checks for rank-r subshifts given by commuting 0-1 matrices")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Base for displayed logarithms. Stored values are always in nats.
    #[arg(long, global = true, value_enum, default_value_t = LogBase::E)]
    pub log_base: LogBase,
    /// Worker thread cap; 1 runs everything sequentially.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest number of words any single enumeration may produce.
    #[arg(long, global = true, default_value_t = 5e7)]
    pub max_words: f64,
    /// Largest decimal size of exact count entries.
    #[arg(long, global = true, default_value_t = 1e6)]
    pub max_digits: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LogBase {
    #[value(name = "e")]
    #[serde(rename = "e")]
    E,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
    #[value(name = "10")]
    #[serde(rename = "10")]
    Ten,
}

impl LogBase {
    /// Divisor turning nats into the display unit.
    pub fn ln(self) -> f64 {
        match self {
            LogBase::E => 1.0,
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::Ten => std::f64::consts::LN_10,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FamilyArg {
    /// Family JSON file: {"rank", "alphabet", "matrices"}.
    #[arg(short = 'f', long = "family")]
    pub family: PathBuf,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Check a family file against the validity conditions.
    Validate {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArg,
    },
    /// Enumerate the words of one shape.
    Words {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArg,
        /// Shape, as one number (broadcast) or comma-separated components.
        #[arg(long)]
        shape: String,
        /// Only words starting at this letter (name or index).
        #[arg(long)]
        origin: Option<String>,
        /// Stop after this many words.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Compare enumerated word counts with the matrix formula for every shape up to a bound.
    CountCheck {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArg,
        #[arg(long)]
        max_shape: String,
    },
    /// Entropy of the shift in direction p, exactly and from separated sets.
    Entropy {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArg,
        #[arg(long)]
        p: String,
        /// Metric scale: separation at distance 1/(k+2).
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = EntropyMode::Both)]
        mode: EntropyMode,
    },
    /// Entropy bound for the whole action over cubes of side n.
    ActionEntropy {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArg,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Cube sides, comma-separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![10usize, 100])]
        n: Vec<usize>,
    },
    /// Pressure of a potential in direction p.
    Pressure {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArg,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        /// Potential JSON: {"window", "default", "entries": [{"word", "value"}]}.
        #[arg(long, conflicts_with_all = ["g", "constant"])]
        potential: Option<PathBuf>,
        /// Vertex potential f(x) = g(x(0)), one value per letter, comma-separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "constant")]
        g: Option<Vec<f64>>,
        /// Constant potential.
        #[arg(long, allow_hyphen_values = true)]
        constant: Option<f64>,
        /// Also compute the closed-form value (vertex potentials only).
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = Method::Transfer)]
        method: Method,
    },
    /// Check that every pattern matrix of the lemma is a partial isometry.
    LemmaCheck {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArg,
        #[arg(long)]
        p: String,
        #[arg(long)]
        max_shape: String,
        /// Use this m for every pair instead of the minimal one.
        #[arg(long)]
        m: Option<String>,
        /// Keep per-pair reports that passed, not just failures.
        #[arg(long)]
        all_reports: bool,
    },
    /// Search small families for a strict spectral-radius gap.
    SearchGap {
        /// Accepted for uniformity and ignored.
        #[arg(short = 'f', long = "family")]
        family: Option<PathBuf>,
        /// Enumerate every tuple instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        /// Alphabet size.
        #[arg(long, default_value_t = 2)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Tensor-product pairs injected as positive controls (random mode).
        #[arg(long, default_value_t = 0)]
        controls: usize,
        /// Drop families that are relabelings of an earlier one.
        #[arg(long)]
        canonicalize: bool,
        /// Include per-record runtimes in JSON output (breaks byte-identical reruns).
        #[arg(long)]
        timings: bool,
        /// Candidate cap for exhaustive mode.
        #[arg(long, default_value_t = 5e7)]
        max_candidates: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyMode {
    Exact,
    Bowen,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Transfer,
    Enumerate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Words { .. } => "words",
            Command::CountCheck { .. } => "count-check",
            Command::Entropy { .. } => "entropy",
            Command::ActionEntropy { .. } => "action-entropy",
            Command::Pressure { .. } => "pressure",
            Command::LemmaCheck { .. } => "lemma-check",
            Command::SearchGap { .. } => "search-gap",
        }
    }
}
