use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use frailfit::config::{Config, Overrides};
use frailfit::models::ModelKind;
use frailfit::pipeline;

#[derive(Parser)]
#[command(name = "frailfit", version = concat!(env!("CARGO_PKG_VERSION"), " (library ", env!("CARGO_PKG_VERSION"), ")"))]
#[command(about = "Bayesian shared-frailty survival models with a generalized Weibull baseline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to the dataset named in the config.
    Fit(RunArgs),
    /// Generate a synthetic dataset from the [simulate] section.
    Simulate(RunArgs),
    /// Summarize chain CSVs written by `fit`.
    Diagnose {
        #[command(flatten)]
        run: RunArgs,
        #[arg(required = true)]
        chains: Vec<PathBuf>,
    },
    /// Tabulate information criteria of two or more fits.
    Compare {
        #[arg(long)]
        out: PathBuf,
        /// Fit output directories or criteria CSVs.
        #[arg(required = true, num_args = 2..)]
        fits: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long = "burn-in")]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long)]
    quiet: bool,
    /// Print the resolved config as JSON and exit.
    #[arg(long = "dump-config")]
    dump_config: bool,
}

impl RunArgs {
    fn config(&self) -> frailfit::Result<Config> {
        let base = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        Ok(base.resolved(&Overrides {
            seed: self.seed,
            model: self.model,
            iterations: self.iters,
            burn_in: self.burn_in,
            thin: self.thin,
        }))
    }

    fn out(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn run(cli: Cli) -> frailfit::Result<()> {
    let (args, chains) = match &cli.command {
        Command::Compare { out, fits } => {
            let (rows, _) = pipeline::cmd_compare(fits, out)?;
            for r in rows {
                println!("{}: AIC {:.3}", r.model, r.criteria.aic);
            }
            return Ok(());
        }
        Command::Fit(a) | Command::Simulate(a) => (a, None),
        Command::Diagnose { run, chains } => (run, Some(chains)),
    };
    let cfg = args.config()?;
    if args.dump_config {
        println!("{}", cfg.to_json()?);
        return Ok(());
    }
    let out = args.out();
    match &cli.command {
        Command::Fit(_) => {
            let report = pipeline::cmd_fit(&cfg, &out, !args.quiet && cfg.mcmc.progress_interval > 0)?;
            if !args.quiet {
                eprintln!(
                    "{}: {} chains, AIC {:.3}, K-S p {:.4}; wrote {}",
                    report.kind,
                    report.chains.len(),
                    report.criteria.criteria.aic,
                    report.ks.p_value,
                    out.display()
                );
            }
        }
        Command::Simulate(_) => {
            let (data, _) = pipeline::cmd_simulate(&cfg, &out)?;
            if !args.quiet {
                eprintln!("{} records ({} events); wrote {}", data.len(), data.num_events(), out.display());
            }
        }
        Command::Diagnose { .. } => {
            pipeline::cmd_diagnose(chains.expect("diagnose has chains"), &cfg, &out)?;
        }
        Command::Compare { .. } => unreachable!(),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.kind());
            ExitCode::FAILURE
        }
    }
}
