use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mpbmc::campaign::{self, CampaignError, EmbedSource, OfflineConfig};
use mpbmc::cluster::FamilyOptions;
use mpbmc::embed::SignatureOptions;
use mpbmc::gain::GainMode;
use mpbmc::generate;
use mpbmc::online::{Assoc, OnlineConfig};
use mpbmc::par::Workers;
use mpbmc::{BmcConfig, Budget, UnfoldMode};

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "mpbmc", version, about = "Multi-property BMC with property clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify known designs and build the three databases.
    Offline(OfflineArgs),
    /// Verify an unseen design with clusters transferred from the databases.
    Verify(VerifyArgs),
    /// Write figure data (x,y CSV files) for a campaign directory.
    Report {
        campaign: PathBuf,
    },
    /// Write a synthetic AIGER design.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Init,
    Inductive,
}

#[derive(Clone, Copy, ValueEnum)]
enum AssocArg {
    Optimal,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbedArg {
    Sim,
    Import,
}

#[derive(Args)]
struct RunArgs {
    /// Per-property wall-clock budget in seconds.
    #[arg(long, default_value_t = 1.0)]
    time_budget: f64,
    /// Per-property budget in solver conflicts (reproducible; overrides --time-budget).
    #[arg(long)]
    budget_conflicts: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Inductive)]
    mode: ModeArg,
    /// Deepest frame explored (inclusive).
    #[arg(long)]
    max_depth: Option<u32>,
    /// Report UNSAT once frames 0..=N are refuted.
    #[arg(long)]
    proof_bound: Option<u32>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Rank newly resolved properties by -t_c/n instead of t_c/n.
    #[arg(long)]
    gain_sat_inverse: bool,
}

impl RunArgs {
    fn bmc(&self) -> Result<BmcConfig> {
        let budget = match self.budget_conflicts {
            Some(c) => Budget::Conflicts(c),
            None => {
                if !(self.time_budget.is_finite() && self.time_budget > 0.0) {
                    bail!("--time-budget must be a positive number of seconds");
                }
                Budget::seconds(self.time_budget)
            }
        };
        let cfg = BmcConfig {
            budget,
            max_depth: self.max_depth,
            mode: match self.mode {
                ModeArg::Init => UnfoldMode::InitialState,
                ModeArg::Inductive => UnfoldMode::Inductive,
            },
            seed: self.seed,
            proof_bound: self.proof_bound,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn gain_mode(&self) -> GainMode {
        if self.gain_sat_inverse {
            GainMode::SatInverse
        } else {
            GainMode::Literal
        }
    }
}

#[derive(Args)]
struct OfflineArgs {
    /// AIGER (aag) designs.
    #[arg(required = true)]
    designs: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value_t = mpbmc::cluster::DEFAULT_MAX_CLUSTERS)]
    max_clusters: usize,
    #[arg(long, default_value_t = 0.95)]
    pca_threshold: f64,
    #[arg(long, value_enum, default_value_t = EmbedArg::Sim)]
    embed: EmbedArg,
    /// Directory of tensor files for --embed import.
    #[arg(long)]
    tensors: Option<PathBuf>,
    /// Random simulation patterns per signature.
    #[arg(long, default_value_t = mpbmc::embed::DEFAULT_PATTERNS)]
    patterns: usize,
}

#[derive(Args)]
struct VerifyArgs {
    unknown: PathBuf,
    /// Directory holding the offline databases.
    #[arg(long)]
    db: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    run: RunArgs,
    /// Property-count pruning window; defaults to max(5, ceil(0.2 * P)).
    #[arg(long)]
    delta: Option<u64>,
    #[arg(long, value_enum, default_value_t = AssocArg::Optimal)]
    assoc: AssocArg,
    /// Also verify every property standalone and report gains.
    #[arg(long)]
    baseline: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Counter,
    TwoCounters,
    Steering,
    Miter,
    Random,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// State bits (counters, steering, miter).
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=32))]
    bits: u8,
    /// Copies of the property (steering) or property count (miter).
    #[arg(long, default_value_t = 2)]
    copies: usize,
}

fn offline_config(a: &OfflineArgs) -> Result<OfflineConfig> {
    let embed = match a.embed {
        EmbedArg::Sim => EmbedSource::Simulation(SignatureOptions {
            patterns: a.patterns.max(1),
            seed: a.run.seed,
            ..SignatureOptions::default()
        }),
        EmbedArg::Import => match &a.tensors {
            Some(dir) => EmbedSource::Import(dir.clone()),
            None => bail!("--embed import needs --tensors <dir>"),
        },
    };
    if !(a.pca_threshold > 0.0 && a.pca_threshold <= 1.0) {
        bail!("--pca-threshold must lie in (0, 1]");
    }
    Ok(OfflineConfig {
        bmc: a.run.bmc()?,
        embed,
        pca_threshold: a.pca_threshold,
        family: FamilyOptions {
            max_clusters: a.max_clusters.max(1),
            workers: Workers::new(a.run.workers),
            ..FamilyOptions::default()
        },
        gain_mode: a.run.gain_mode(),
        workers: Workers::new(a.run.workers),
    })
}

fn offline(a: &OfflineArgs, cfg: &OfflineConfig) -> Result<(), CampaignError> {
    let dbs = campaign::cmd_offline(&a.designs, &a.out, cfg)?;
    println!(
        "{} designs, {} embeddings ({} components), {} influencing-cluster rows -> {}",
        dbs.db1.designs.len(),
        dbs.db2.records.len(),
        dbs.db2.width,
        dbs.db3.records.len(),
        a.out.display()
    );
    Ok(())
}

fn verify_config(a: &VerifyArgs) -> Result<OnlineConfig> {
    Ok(OnlineConfig {
        bmc: a.run.bmc()?,
        delta: a.delta,
        assoc: match a.assoc {
            AssocArg::Optimal => Assoc::Optimal,
            AssocArg::Greedy => Assoc::Greedy,
        },
        baseline: a.baseline,
        workers: Workers::new(a.run.workers),
        gain_mode: a.run.gain_mode(),
    })
}

fn verify(a: &VerifyArgs, cfg: &OnlineConfig) -> Result<(), CampaignError> {
    let report = campaign::cmd_verify(&a.unknown, &a.db, &a.out, cfg)?;
    print!("{}", campaign::render_tsv(&report));
    Ok(())
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let bits = a.bits as usize;
    let n = match a.kind {
        Kind::Counter => generate::counter(bits, (1u64 << bits) - 1, true),
        Kind::TwoCounters => generate::two_counters(bits, 3, 5),
        Kind::Steering => generate::steering_puzzle(a.seed, bits, 2, bits, a.copies.max(1)),
        Kind::Miter => generate::equivalence_miter(a.seed, bits, 2, a.copies.max(1)),
        Kind::Random => generate::random_netlist(a.seed, bits, 4, 40, a.copies.max(1)),
    };
    write_text(&a.out, &n.to_aiger())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn exit_for(e: &CampaignError) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_internal() {
        ExitCode::from(EXIT_INTERNAL)
    } else {
        ExitCode::from(EXIT_DATA)
    }
}

fn usage(e: anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Offline(a) => match offline_config(a) {
            Ok(cfg) => offline(a, &cfg),
            Err(e) => return usage(e),
        },
        Command::Verify(a) => match verify_config(a) {
            Ok(cfg) => verify(a, &cfg),
            Err(e) => return usage(e),
        },
        Command::Report { campaign } => campaign::cmd_report(campaign).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
        }),
        Command::Generate(a) => {
            return match generate(a) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(EXIT_DATA)
                }
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => exit_for(&e),
    }
}
