use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rgs_core::emitters::OrderingKind;
use rgs_core::treecode::BranchVector;
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "rgs", version, about = "Repeater graph state rates, simulations and checks")]
pub struct Cli {
    /// TOML file with optional top-level seed/format/threads and one table per subcommand
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output file (standard output when absent)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (defaults to all cores)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Success probability and rate tables for both repeater schemes
    Sweep(SweepArgs),
    /// Exact stabilizer simulation of a small repeater chain
    Simulate(SimulateArgs),
    /// Trellis reduction and fusion self-checks
    Verify(VerifyArgs),
    /// Logical X/Z success of tree codes versus loss
    Treecode(TreecodeArgs),
    /// LDPC failure rates over a flip-and-erase channel grid
    Ldpc(LdpcArgs),
    /// Emitter counts (maximum cut-rank) per emission ordering
    Emitters(EmittersArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Total distances in attenuation lengths
    #[arg(long = "l-over-latt", value_delimiter = ',')]
    pub l_over_latt: Option<Vec<f64>>,
    /// Station spacing in attenuation lengths
    #[arg(long = "l0-over-latt")]
    pub l0_over_latt: Option<f64>,
    #[arg(long)]
    pub branch: Option<BranchVector>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of repeater stations
    #[arg(long = "n-r")]
    pub n_r: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long = "l0-over-latt")]
    pub l0_over_latt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Cases per randomized check
    #[arg(long)]
    pub trials: Option<usize>,
    /// Perturb one column operation of the reference example (must fail)
    #[arg(long, hide = true)]
    pub inject_bad_q: bool,
}

#[derive(Debug, Args)]
pub struct TreecodeArgs {
    /// Branch vector such as 5,11,4; repeat for several trees
    #[arg(long, action = clap::ArgAction::Append)]
    pub branch: Option<Vec<BranchVector>>,
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct LdpcArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "col-weight")]
    pub col_weight: Option<usize>,
    #[arg(long = "p-bsc", value_delimiter = ',')]
    pub p_bsc: Option<Vec<f64>>,
    #[arg(long = "p-bec", value_delimiter = ',')]
    pub p_bec: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EmittersArgs {
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Random instances per (k, n)
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub ordering: Option<Vec<OrderingKind>>,
}
