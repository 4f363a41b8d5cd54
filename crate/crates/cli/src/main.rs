use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use helpercap_cli::{
    format_verify, run_classify, run_mc, run_region, run_verify, RunConfig, VerifyTarget,
    EXIT_FAILED, EXIT_OK, EXIT_USAGE,
};
use helpercap_core::{RateUnit, User};

#[derive(Parser)]
#[command(name = "helpercap", version, about = "Capacity-region bounds for parallel Gaussian channels with a state-cognitive helper")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to the config's `out`, then the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rate unit for all outputs.
    #[arg(long)]
    unit: Option<RateUnit>,
}

#[derive(Subcommand)]
enum Command {
    /// Trace outer, inner and time-sharing regions.
    Region(Common),
    /// Check the closed forms against the covariance oracle.
    Verify {
        /// Channel to verify; without it random channels are drawn.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of random cases.
        #[arg(long, default_value_t = 1000)]
        random: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write verify_report.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report characterized capacity segments.
    Classify(Common),
    /// Compare sampled and analytic covariances.
    Mc {
        #[command(flatten)]
        common: Common,
        /// Overrides the config's Monte Carlo seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Loads the config and applies command-line overrides.
fn load(common: &Common) -> Result<(RunConfig, PathBuf)> {
    let mut run = RunConfig::load(&common.config)?;
    if let Some(u) = common.unit {
        run.unit = u;
    }
    let out = common
        .out
        .clone()
        .or_else(|| run.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((run, out))
}

enum Failure {
    /// Bad usage, configuration or I/O.
    Usage(anyhow::Error),
    /// A check ran and did not pass.
    Failed,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Region(common) => {
            let (run, out) = load(&common)?;
            let r = run_region(&run, &out)?;
            let u = r.unit;
            println!(
                "outer: {} vertices, max ({:.6}, {:.6}) {u}",
                r.outer.vertices, r.outer.max_r1, r.outer.max_r2
            );
            println!("inner: {} vertices, 45-degree margin over time sharing {:.6} {u}", r.inner.len(), r.gap.margin_45);
            println!("wrote outer.csv inner.csv ts.csv report.json region.svg to {}", out.display());
        }
        Command::Verify {
            config,
            random,
            seed,
            out,
        } => {
            let loaded = config.as_deref().map(RunConfig::load).transpose()?;
            let target = match &loaded {
                Some(run) => VerifyTarget::Config { run, cases: random },
                None => VerifyTarget::Random { cases: random },
            };
            let report = run_verify(target, seed)?;
            print!("{}", format_verify(&report));
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(anyhow::Error::from)?;
                let text = serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?;
                std::fs::write(dir.join("verify_report.json"), text + "\n").map_err(anyhow::Error::from)?;
            }
            if !report.pass {
                return Err(Failure::Failed);
            }
        }
        Command::Classify(common) => {
            let (run, out) = load(&common)?;
            let r = run_classify(&run, &out)?;
            for k in User::BOTH {
                let s = r.segments.get(k);
                match s.rate {
                    Some(rate) => println!("user {}: class {:?}, rate {rate:.9} {}", k.index() + 1, s.class, r.unit),
                    None => println!("user {}: class {:?}", k.index() + 1, s.class),
                }
            }
        }
        Command::Mc { common, seed } => {
            let (mut run, out) = load(&common)?;
            if let Some(s) = seed {
                run.mc.seed = s;
            }
            let r = run_mc(&run, &out)?;
            println!(
                "{} strategies, {} samples, seed {}: max relative error {:.3e} (tol {:.0e})",
                r.cases.len(),
                r.samples,
                r.seed,
                r.max_rel_error,
                r.tol_rel
            );
            if !r.pass {
                println!("Monte Carlo check failed");
                return Err(Failure::Failed);
            }
            println!("Monte Carlo check passed");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(Failure::Failed) => ExitCode::from(EXIT_FAILED),
        Err(Failure::Usage(e)) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
