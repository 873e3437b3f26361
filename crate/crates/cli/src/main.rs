mod audit;
mod demo;
mod parse;
mod rates;
mod simulate;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use erasure_ot::sim::Model;
use erasure_ot::swot::SwotVariant;
use erasure_ot::FunctionSpec;

use parse::{Branching, Grid};

#[derive(Parser)]
#[command(name = "erasure-ot", version, about = "Oblivious transfer and two-party computation over erasure resources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate curves as CSV (`p,params,rate`).
    Rates(rates::RatesArgs),
    /// Best branching sequence per erasure probability, as CSV.
    Optimize(rates::OptimizeArgs),
    /// Seeded Monte Carlo sessions with an abort-rate regression gate.
    Simulate(simulate::SimulateArgs),
    /// Exact privacy audit of a tiny instance.
    Audit(audit::AuditArgs),
    /// Annotated trace of one session.
    Demo(demo::DemoArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProtocolKind {
    Swot,
    Boot,
    Gsfc,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    #[default]
    Source,
    Channel,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Source => Model::Source,
            ModelArg::Channel => Model::Channel,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    #[default]
    Faithful,
    /// Reuses one erased index for every concealed position (leaks).
    Reuse,
}

impl From<VariantArg> for SwotVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Faithful => SwotVariant::Faithful,
            VariantArg::Reuse => SwotVariant::ReuseConcealedIndex,
        }
    }
}

/// Size and resource flags shared by the session subcommands.
#[derive(Args, Clone, Debug)]
pub struct SessionArgs {
    #[arg(long, value_enum, default_value = "swot")]
    pub protocol: ProtocolKind,
    /// Erasure probability.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Number of choices (strings for the bootstrapped protocol).
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Output samples or string length.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Erasure samples. Derived from the rate and `--slack` when absent.
    #[arg(long)]
    pub n: Option<usize>,
    /// Branching sequence for the bootstrapped protocol, e.g. `2x3`.
    #[arg(long)]
    pub params: Option<Branching>,
    /// Function table file for two-way function computation.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Fractional headroom over the rate when sizing resources.
    #[arg(long, default_value_t = 0.1)]
    pub slack: f64,
    /// Run one OT and reveal the derived output.
    #[arg(long)]
    pub single_ot: bool,
    #[arg(long, value_enum, default_value = "faithful")]
    pub variant: VariantArg,
    #[arg(long, env = "ERASURE_OT_SEED", default_value_t = 1)]
    pub seed: u64,
}

impl SessionArgs {
    pub fn spec(&self) -> anyhow::Result<FunctionSpec> {
        let path = self
            .table
            .as_ref()
            .context("--table is required for this protocol")?;
        read_table(path)
    }
}

pub fn read_table(path: &Path) -> anyhow::Result<FunctionSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    FunctionSpec::parse_table(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `--p` as a one-point grid, or `--p-grid`.
#[derive(Args, Clone, Debug)]
pub struct PointsArgs {
    /// Single erasure probability.
    #[arg(long, conflicts_with = "p_grid")]
    pub p: Option<f64>,
    /// Grid `start:stop:step`.
    #[arg(long, default_value = "0:1:0.01")]
    pub p_grid: Grid,
}

impl PointsArgs {
    pub fn points(&self) -> anyhow::Result<Vec<f64>> {
        let points = match self.p {
            Some(p) => vec![p],
            None => self.p_grid.0.clone(),
        };
        if let Some(bad) = points.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            anyhow::bail!("erasure probability {bad} outside [0, 1]");
        }
        Ok(points)
    }
}

/// Writes to `--output` or standard output.
pub fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Result of a subcommand with a regression gate.
pub enum Verdict {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Rates(a) => rates::rates(&a).map(|_| Verdict::Pass),
        Command::Optimize(a) => rates::optimize(&a).map(|_| Verdict::Pass),
        Command::Simulate(a) => simulate::simulate(&a),
        Command::Audit(a) => audit::audit(&a),
        Command::Demo(a) => demo::demo(&a).map(|_| Verdict::Pass),
    };
    match run {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
