use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "tasep",
    version,
    about = "Sorting dynamics of discrete-time TASEP with parallel update",
    args_override_self = true
)]
pub struct Cli {
    /// Flat TOML file of `flag = value` pairs applied before the command
    /// line flags; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for Monte Carlo commands; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the JSON artifact here instead of standard output.
    #[arg(long, short, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the trajectory of a string under the dynamics.
    #[command(args_override_self = true)]
    Evolve(EvolveArgs),
    /// Stabilization time and final configuration.
    #[command(args_override_self = true)]
    Stabilize(StabilizeArgs),
    /// Height-profile landmarks, the zero-excess predicate and phases.
    #[command(args_override_self = true)]
    Landmarks(LandmarksArgs),
    /// Sample Bernoulli initial conditions as a line-oriented text file.
    #[command(args_override_self = true)]
    Sample(SampleArgs),
    /// Exact laws of the excess and stabilization times for small n.
    #[command(args_override_self = true)]
    Enumerate(EnumerateArgs),
    /// Monte Carlo for the normalized two-type stabilization time.
    #[command(name = "mc-t2", args_override_self = true)]
    McT2(McArgs),
    /// Monte Carlo for the excess.
    #[command(name = "mc-excess", args_override_self = true)]
    McExcess(McArgs),
    /// First-passage laws and the excursion chain.
    #[command(subcommand)]
    Rw(RwCommand),
    /// Simulated Brownian reference functionals.
    #[command(name = "brownian-ref", args_override_self = true)]
    BrownianRef(BrownianArgs),
    /// Monte Carlo for the gap between the leftmost maximum and K.
    #[command(name = "mk-gap", args_override_self = true)]
    MkGap(McArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// A single string over {0, 1, 2}.
    #[arg(long, value_name = "STRING")]
    pub input_string: Option<String>,
    /// File with one string per line (`#` starts a comment).
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dynamics {
    Two,
    Three,
}

#[derive(Debug, Args)]
pub struct DynamicsFlags {
    /// Three-type dynamics (the default).
    #[arg(long)]
    pub three: bool,
    /// Two-type dynamics; symbols must be 0 and 2.
    #[arg(long)]
    pub two: bool,
}

impl DynamicsFlags {
    pub fn resolve(&self) -> Dynamics {
        if self.two && !self.three {
            Dynamics::Two
        } else {
            Dynamics::Three
        }
    }
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub dynamics: DynamicsFlags,
    /// Stop after this many steps even if not yet sorted.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StabilizeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub dynamics: DynamicsFlags,
    /// Include every intermediate configuration.
    #[arg(long)]
    pub trajectory: bool,
}

#[derive(Debug, Args)]
pub struct LandmarksArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Track the maxima through the evolution and classify their moves.
    #[arg(long)]
    pub phases: bool,
    /// Print `key=value` records instead of JSON.
    #[arg(long)]
    pub records: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Plus,
    Minus,
}

/// Length and density, either fixed `--p` or critical `--lambda` with an
/// explicit `--convention`.
#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub n: usize,
    /// Density of 2s.
    #[arg(long)]
    pub p: Option<f64>,
    /// Critical scaling p = 1/2 +- lambda / (2 sqrt(n)).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Master seed; a fresh one is generated and recorded when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Place a second class particle on a uniform 0.
    #[arg(long)]
    pub three: bool,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Density of 2s, as a decimal or a fraction `a/b` (fractions also get
    /// exact rational laws).
    #[arg(long)]
    pub p: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Simulate,
    Predicate,
    Both,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Defaults to `predicate` for mc-excess and `simulate` otherwise.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Keep the per-sample values in the JSON artifact.
    #[arg(long)]
    pub keep_samples: bool,
    /// Write the empirical CDF (`value,count`) here.
    #[arg(long, value_name = "FILE")]
    pub ecdf: Option<PathBuf>,
    /// Write a histogram (`value,count`) here.
    #[arg(long, value_name = "FILE")]
    pub histogram: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    /// Paths of the simulated reference law (critical mc-t2).
    #[arg(long)]
    pub reference_paths: Option<usize>,
    /// Grid steps of the simulated reference law (critical mc-t2).
    #[arg(long)]
    pub reference_steps: Option<usize>,
}

/// Walk parameters: `--p`, or `--n` with `--lambda` for
/// p = (1 - lambda / sqrt(n)) / 2.
#[derive(Debug, Args)]
pub struct WalkArgs {
    /// Probability of a -1 step.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum RwCommand {
    /// P_1(V_0 = j) and P_1(V_0 > j) for j up to --max-len.
    #[command(args_override_self = true)]
    Pmf {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        max_len: usize,
        /// Also write the table as CSV (`length,pmf,tail`).
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Exact first-passage probabilities by path enumeration.
    #[command(args_override_self = true)]
    Oracle {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        max_len: usize,
    },
    /// P_1(V_0 > m).
    #[command(args_override_self = true)]
    Tail {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        m: usize,
    },
    /// Generating function g(s).
    #[command(args_override_self = true)]
    Gf {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        s: f64,
    },
    /// P_1(V_0 = infinity).
    #[command(args_override_self = true)]
    Escape {
        #[command(flatten)]
        walk: WalkArgs,
    },
    /// Conditional first-drop probability and expectation from level 2.
    #[command(args_override_self = true)]
    Conditional {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        m: usize,
    },
    /// Excursion chain, sampled or read from a string.
    #[command(args_override_self = true)]
    Chain {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of chains (stream indices 0..count).
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Drive the chain with the reversed walk of this string.
        #[arg(long, value_name = "STRING")]
        input_string: Option<String>,
        /// Also write the records as CSV (`chain,k,tau,indicator,length`).
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BrownianKindArg {
    MaxMinusHalf,
    ArgmaxExpectation,
}

#[derive(Debug, Args)]
pub struct BrownianArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, value_enum)]
    pub kind: BrownianKindArg,
    #[arg(long)]
    pub paths: usize,
    #[arg(long)]
    pub steps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the empirical CDF of max-minus-half samples here.
    #[arg(long, value_name = "FILE")]
    pub ecdf: Option<PathBuf>,
}
