use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use finsler_cli::{apply_overrides, configure_threads, execute, Command, Format, RunConfig};

/// Fundamental tensors, curvature, identity audits and scalar Ricci flow of
/// (α, β)-metrics.
#[derive(Parser, Debug)]
#[command(name = "finsler", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random samples and direction sets (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated report formats (overrides `formats`).
    #[arg(long, value_enum, value_delimiter = ',')]
    format: Option<Vec<Format>>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let run = || -> Result<finsler_cli::RunSummary, finsler_cli::Failure> {
        configure_threads(std::env::var("FINSLER_THREADS").ok().as_deref())?;
        let mut cfg = RunConfig::load(&cli.config)?;
        apply_overrides(&mut cfg, cli.out.as_deref(), cli.seed, cli.format.clone());
        execute(cli.command, &cfg)
    };
    match run() {
        Ok(summary) => {
            if summary.code == 0 {
                println!("{}", summary.message);
            } else {
                eprintln!("error: {}", summary.message);
            }
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(summary.code as u8)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
