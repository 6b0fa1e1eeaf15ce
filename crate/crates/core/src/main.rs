use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dfrc::design::Strategy;
use dfrc::sim::{self, ExperimentConfig, SweepKind};
use dfrc::{Error, Result};

/// Precoder design and Monte-Carlo experiments for OFDM dual-function
/// radar-communication transmitters.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Experiment configuration (JSON). Missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design precoders for one channel and write them as JSON.
    Design {
        #[arg(long)]
        strategy: Strategy,
        /// Trade-off factor for the trade-off strategies.
        #[arg(long)]
        rho: Option<f64>,
    },
    /// SER and rate against SNR.
    SerSweep,
    /// SER and rate against the trade-off factor at the reference SNR.
    TradeoffSweep,
    /// Beampatterns, NMSE and normalized CRB against the trade-off factor.
    Beampattern,
    /// SQP objective traces for each AR-max trade-off factor.
    SqpTrace,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let cfg = load_config(cli)?;
    let dir = &cfg.output_dir;
    match &cli.command {
        Command::Design { strategy, rho } => {
            let report = sim::design_report(&cfg, *strategy, *rho)?;
            std::fs::create_dir_all(dir)?;
            let name = match rho {
                Some(r) => format!("design_{strategy}_rho_{r}.json"),
                None => format!("design_{strategy}.json"),
            };
            let path = dir.join(name);
            std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
            println!("rate {:.4} bits/sc, nmse {:.3e}, wrote {}", report.rate, report.nmse, path.display());
        }
        Command::SerSweep => {
            let res = sim::run_ser_sweep(&cfg)?;
            sim::write_sweep_outputs(&res, SweepKind::Snr, &cfg, dir)?;
            println!("{} rows, {} resamples, wrote {}", res.rows.len(), res.resamples.len(), dir.display());
        }
        Command::TradeoffSweep => {
            let res = sim::run_tradeoff_sweep(&cfg)?;
            sim::write_sweep_outputs(&res, SweepKind::Tradeoff, &cfg, dir)?;
            println!("{} rows, {} resamples, wrote {}", res.rows.len(), res.resamples.len(), dir.display());
        }
        Command::Beampattern => {
            let set = sim::run_beampattern_report(&cfg)?;
            sim::write_beampattern_outputs(&set, &cfg, dir)?;
            println!("{} patterns, wrote {}", set.entries.len(), dir.display());
        }
        Command::SqpTrace => {
            let runs = sim::run_sqp_convergence(&cfg)?;
            sim::write_sqp_outputs(&runs, &cfg, dir)?;
            for r in &runs {
                println!("rho {}: {} iterations, converged {}", r.rho, r.outcome.iterations(), r.outcome.converged);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}
