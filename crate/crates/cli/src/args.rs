//! Command-line flags. Every parameter is optional here so that a config
//! file can fill whatever the command line leaves out.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "coherence-orders", version, about = "Coherence-order decomposition, dephasing and phase-estimation reports")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// TOML file with defaults; explicit flags win.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output directory [default: out]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Table format [default: csv]
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Worker threads; overrides COHERENCE_ORDERS_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-order coherence tables for one state.
    Decompose(DecomposeArgs),
    /// Normalized order coherences along a dephasing time grid.
    Dephase(DephaseArgs),
    /// Fisher information, squared speed and witness report, or a figure sweep.
    Metrology(MetrologyArgs),
    /// Regenerate every figure table and compare with the goldens.
    ReproduceAll(ReproduceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Decompose(_) => "decompose",
            Command::Dephase(_) => "dephase",
            Command::Metrology(_) => "metrology",
            Command::ReproduceAll(_) => "reproduce-all",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct StateArgs {
    /// ghz, plus, w, dicke, bell-phi+, bell-phi-, bell-psi+, bell-psi-, phi,
    /// mixed, basis, ex1..ex5, mixed-ghz
    #[arg(long)]
    pub state: Option<String>,
    /// Number of qubits [default: 3]
    #[arg(long)]
    pub n: Option<usize>,
    /// Mixing weight [default: 1]
    #[arg(long)]
    pub p: Option<f64>,
    /// Superposition angle [default: 0]
    #[arg(long)]
    pub phi: Option<f64>,
    /// Excitation number for dicke [default: 1]
    #[arg(long)]
    pub k: Option<usize>,
    /// Basis index for basis [default: 0]
    #[arg(long)]
    pub index: Option<usize>,
    /// Read the density matrix from a text file instead.
    #[arg(long = "in", value_name = "FILE")]
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct DecomposeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyArg {
    Common,
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum DephaseFigure {
    #[value(name = "3a")]
    #[serde(rename = "3a")]
    Fig3a,
    #[value(name = "3b")]
    #[serde(rename = "3b")]
    Fig3b,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct DephaseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
    /// Load a figure parameter set (flags still override it).
    #[arg(long, value_enum)]
    pub figure: Option<DephaseFigure>,
    #[arg(long, value_enum)]
    pub topology: Option<TopologyArg>,
    /// Inverse correlation time of the OU kernel [default: 10]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// OU strength [default: 100]
    #[arg(long)]
    pub damping: Option<f64>,
    /// Qubit frequency; drops out of the order coherences [default: 0]
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Comma-separated coupling per qubit
    #[arg(long, value_delimiter = ',')]
    pub couplings: Option<Vec<f64>>,
    /// End of the time grid [default: 0.5]
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Grid points including t = 0 [default: 100]
    #[arg(long)]
    pub points: Option<usize>,
    /// Add trajectory-averaged columns from this many trajectories
    #[arg(long, value_name = "N")]
    pub monte_carlo: Option<usize>,
    /// Monte Carlo seed [default: 7]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo integration step [default: 0.001]
    #[arg(long)]
    pub max_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum MetrologyFigure {
    #[value(name = "4")]
    #[serde(rename = "4")]
    Fig4,
    #[value(name = "A1")]
    A1,
    #[value(name = "A2")]
    A2,
    #[value(name = "A4")]
    A4,
    #[value(name = "A5")]
    A5,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct MetrologyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
    /// Sweep an example family instead of reporting one state.
    #[arg(long, value_enum)]
    pub figure: Option<MetrologyFigure>,
    /// Encoded phase [default: pi/6]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Sweep points [default: 101]
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ReproduceArgs {
    /// Golden directory [default: the goldens shipped with this crate]
    #[arg(long)]
    pub goldens: Option<PathBuf>,
    /// Overwrite the goldens instead of comparing.
    #[arg(long)]
    #[serde(default)]
    pub bless: bool,
    /// Monte Carlo seed [default: 7]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trajectories for the figure 3 columns; 0 skips them [default: 10000]
    #[arg(long, value_name = "N")]
    pub monte_carlo: Option<usize>,
}
