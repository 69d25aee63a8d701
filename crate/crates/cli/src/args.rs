use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nrowrl_core::minimax::Pruning;
use nrowrl_core::trainer::{Perspectives, StartState, UpdateRule, DEFAULT_CHECKPOINT_EVERY, DEFAULT_ETA};

#[derive(Debug, Parser)]
#[command(name = "nrowrl", version, about = "N-in-a-row self-play learning workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a linear value function by self-play.
    Train(TrainArgs),
    /// Play a checkpoint as X against an opponent and print the tally.
    Eval(EvalArgs),
    /// Time minimax and learned-agent move selection.
    Bench(BenchArgs),
    /// Count every game on a small board.
    Enumerate(EnumerateArgs),
    /// Play in the terminal against an engine.
    Play(PlayArgs),
    /// Run the HTTP game service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PerspectivesArg {
    X,
    Both,
}

impl From<PerspectivesArg> for Perspectives {
    fn from(p: PerspectivesArg) -> Self {
        match p {
            PerspectivesArg::X => Perspectives::XOnly,
            PerspectivesArg::Both => Perspectives::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StartArg {
    Empty,
    Random,
}

impl From<StartArg> for StartState {
    fn from(s: StartArg) -> Self {
        match s {
            StartArg::Empty => StartState::Empty,
            StartArg::Random => StartState::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum UpdateArg {
    /// Step scaled by the squared feature norm.
    Nlms,
    /// Unscaled step.
    Lms,
}

impl From<UpdateArg> for UpdateRule {
    fn from(u: UpdateArg) -> Self {
        match u {
            UpdateArg::Nlms => UpdateRule::NormalizedLms,
            UpdateArg::Lms => UpdateRule::Lms,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PruningArg {
    None,
    Ab,
}

impl From<PruningArg> for Pruning {
    fn from(p: PruningArg) -> Self {
        match p {
            PruningArg::None => Pruning::None,
            PruningArg::Ab => Pruning::AlphaBeta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpponentArg {
    Random,
    Minimax,
    #[value(name = "self")]
    SelfPlay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Random,
    Minimax,
    /// The checkpoint given with --checkpoint.
    #[value(alias = "self")]
    Agent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    X,
    O,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct BoardArgs {
    #[arg(long, default_value_t = 3)]
    pub size: usize,
    /// Defaults to the board size.
    #[arg(long)]
    pub win_length: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Minimax depth limit; unlimited when omitted.
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, value_enum, default_value_t = PruningArg::Ab)]
    pub pruning: PruningArg,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub board: BoardArgs,
    #[arg(long)]
    pub games: u64,
    #[arg(long, default_value_t = DEFAULT_ETA, allow_negative_numbers = true)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_CHECKPOINT_EVERY)]
    pub checkpoint_every: u64,
    #[arg(long, value_enum, default_value_t = PerspectivesArg::Both)]
    pub perspectives: PerspectivesArg,
    #[arg(long, value_enum, default_value_t = StartArg::Empty)]
    pub start: StartArg,
    #[arg(long, value_enum, default_value_t = UpdateArg::Nlms)]
    pub update: UpdateArg,
    /// Output directory for metrics.csv and checkpoint files.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write every game to traces.txt in the output directory.
    #[arg(long)]
    pub dump_traces: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, value_enum, default_value_t = OpponentArg::Random)]
    pub opponent: OpponentArg,
    #[arg(long, default_value_t = 1000)]
    pub games: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Board sizes, comma separated; the win length equals the size.
    #[arg(long = "size", value_delimiter = ',', default_values_t = [3, 4, 5])]
    pub sizes: Vec<usize>,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, default_value_t = nrowrl_core::minimax::DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    /// Checkpoints for the agent rows, matched to sizes by dimension.
    #[arg(long)]
    pub checkpoint: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub board: BoardArgs,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    #[command(flatten)]
    pub board: BoardArgs,
    #[arg(long, value_enum, default_value_t = EngineArg::Minimax)]
    pub opponent: EngineArg,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Which side the human plays.
    #[arg(long, value_enum, default_value_t = SideArg::X)]
    pub human: SideArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Directory of `*.ckpt` files, referenced by file stem.
    #[arg(long)]
    pub checkpoint_dir: Option<PathBuf>,
    /// Web UI files served at `/`.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    #[arg(long, default_value_t = nrowrl_service::DEFAULT_SESSION_CAPACITY)]
    pub capacity: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
