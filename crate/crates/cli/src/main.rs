use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use cosra_cli::commands;
use cosra_cli::config::{parse_config, Manifest, Settings};

#[derive(Parser)]
#[command(name = "cosra", version, about = "CosRA recommendation experiments on bipartite rating networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print users, objects, links and sparsity of the coarse-grained graph
    Stats(Flags),
    /// Cross-validated benchmark; writes report.csv
    Run(Flags),
    /// Generalized CosRA over an (eta1, eta2) grid; writes sweep.csv
    Sweep(Flags),
    /// Degree histogram of recommended objects; writes degdist_<alg>_<L>.csv
    Degdist(Flags),
}

/// Every flag can also be set in the `--config` file under the same name.
#[derive(Args, Default)]
struct Flags {
    /// key = value file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<String>,
    /// movielens | ml1m | delimited(sep=..;cols=..;min=..;max=..;header=..)
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    folds: Option<String>,
    #[arg(long)]
    realizations: Option<String>,
    #[arg(long = "list-length")]
    list_length: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// e.g. gr,ucf,icf,md,hc,cosra or CosRA*(-0.5,-1)
    #[arg(long)]
    algorithms: Option<String>,
    /// start:end:step
    #[arg(long, allow_hyphen_values = true)]
    eta1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta2: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// sample this many user pairs for the Hamming distance ("exact" for all)
    #[arg(long = "hamming-budget")]
    hamming_budget: Option<String>,
    /// list lengths for degdist, e.g. 20,50
    #[arg(long)]
    lengths: Option<String>,
    /// held-out fold used by degdist
    #[arg(long)]
    fold: Option<String>,
}

impl Flags {
    fn manifest(self) -> Result<Manifest> {
        let mut settings = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read config {}", path.display()))?;
                parse_config(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => Settings::new(),
        };
        let flags = [
            ("data", self.data),
            ("format", self.format),
            ("threshold", self.threshold),
            ("folds", self.folds),
            ("realizations", self.realizations),
            ("list-length", self.list_length),
            ("seed", self.seed),
            ("algorithms", self.algorithms),
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("out", self.out),
            ("workers", self.workers),
            ("hamming-budget", self.hamming_budget),
            ("lengths", self.lengths),
            ("fold", self.fold),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                settings.insert(key.to_string(), v);
            }
        }
        Manifest::from_settings(&settings)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stats(flags) => print!("{}", commands::cmd_stats(&flags.manifest()?)?),
        Command::Run(flags) => println!("{}", commands::cmd_run(&flags.manifest()?)?.display()),
        Command::Sweep(flags) => println!("{}", commands::cmd_sweep(&flags.manifest()?)?.display()),
        Command::Degdist(flags) => {
            for path in commands::cmd_degree_dist(&flags.manifest()?)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
