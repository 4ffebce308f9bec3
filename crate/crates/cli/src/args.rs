use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable that overrides the default seed of every subcommand.
pub const SEED_ENV: &str = "COLLAPSE_SEED";

#[derive(Debug, Parser)]
#[command(name = "collapse", version, about = "Simulate and audit collapse-based signalling protocols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nonlocal projector protocol: sender measures |+⟩⟨+|, receiver measures |B⟩⟨B|.
    Protocol1(Protocol1Args),
    /// Momentum-measurement protocol: sender spreads a Gaussian packet toward the receiver.
    Protocol2(Protocol2Args),
    /// Detection probabilities over a range of one protocol-2 parameter.
    Scan(ScanArgs),
    /// Commutator norm against the exact sender/receiver marginal difference.
    Audit(AuditArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the machine-readable report here.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Report format. Without --output the report goes to stdout in place of the summary.
    #[arg(long)]
    pub format: Option<Format>,
    /// Include per-trial records in JSON output.
    #[arg(long)]
    pub emit_trials: bool,
}

impl OutputArgs {
    /// Format for file output: explicit flag, else the file extension, else JSON.
    pub fn file_format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.output {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
            _ => Format::Json,
        })
    }
}

#[derive(Debug, Args)]
pub struct Protocol1Args {
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, env = SEED_ENV, default_value_t = 42)]
    pub seed: u64,
    /// Perform the sender's |+⟩⟨+| measurement (otherwise the sender stays idle).
    #[arg(long)]
    pub sender_acts: bool,
    /// Particles per trial for the ensemble estimate.
    #[arg(long, default_value_t = 1)]
    pub particles: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Clone)]
pub struct PacketArgs {
    /// Initial packet width.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    /// Packet width after the momentum measurement.
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub sigma_bar: f64,
    /// Receiver distance.
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub d: f64,
    /// Receiver half-width.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub k: f64,
}

#[derive(Debug, Args)]
pub struct Protocol2Args {
    #[command(flatten)]
    pub packet: PacketArgs,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, env = SEED_ENV, default_value_t = 7)]
    pub seed: u64,
    /// Evaluate P_after at λ ∈ {−3, −1, 0, 1, 3}/(σ√2).
    #[arg(long)]
    pub lambda_scan: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanParam {
    Sigma,
    SigmaBar,
    D,
    K,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Parameter to sweep; the others stay fixed.
    #[arg(long, value_enum, default_value_t = ScanParam::SigmaBar)]
    pub param: ScanParam,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, default_value_t = 1000.0, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[command(flatten)]
    pub packet: PacketArgs,
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairSelector {
    /// (|+⟩⟨+|, |B⟩⟨B|) on |A⟩.
    Paper,
    /// Projectors diagonal in a shared random basis.
    RandomCommuting,
    /// Shared-basis and independent-basis pairs mixed.
    Random,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long, value_enum, default_value_t = PairSelector::Paper)]
    pub pair: PairSelector,
    #[arg(long, default_value_t = 100)]
    pub count: u64,
    #[arg(long, env = SEED_ENV, default_value_t = 3)]
    pub seed: u64,
    /// Commutator norm below which the no-signalling premise counts as holding.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}
