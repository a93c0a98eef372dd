use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use weakform_qpinn::runner::{self, Overrides, RunConfig};
use weakform_qpinn::{Error, Result};

/// Train quantum PINN strategies on a benchmark problem and write CSV and SVG results.
#[derive(Parser)]
#[command(name = "solve")]
struct Args {
    /// damped_oscillator | burgers | linear_2d | laplace
    #[arg(long)]
    problem: Option<String>,
    /// coll | coll_join | weak | both | all
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config file of `key = value` lines, applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` override; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print every epoch to stderr.
    #[arg(long)]
    verbose: bool,
}

fn overrides(args: &Args) -> Result<Overrides> {
    let mut o = Overrides::new();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        o.push_text(&text)?;
    }
    let flags = [
        ("problem", args.problem.clone()),
        ("strategy", args.strategy.clone()),
        ("seed", args.seed.map(|v| v.to_string())),
        ("epochs", args.epochs.map(|v| v.to_string())),
        ("out", args.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            o.set(k, v);
        }
    }
    for s in &args.set {
        o.push_assignment(s)?;
    }
    Ok(o)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = overrides(&args).and_then(|o| RunConfig::resolve(&o)).and_then(|cfg| {
        runner::run(&cfg, |s, r| {
            if args.verbose {
                eprintln!("{s} epoch {} loss {:.6e} metric {:.6e}", r.epoch, r.loss.total, r.metric);
            }
        })
    });
    match result {
        Ok(runs) => {
            print!("{}", runner::summary(&runs));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("solve: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
