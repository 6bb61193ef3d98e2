use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gentp_cli::commands::{
    classify_cmd, meanvalue_cmd, reproduce_cmd, spectrum_cmd, tp_cmd, ClassifyArgs, MeanArgs, ReproduceArgs,
    SpectrumArgs, TpArgs,
};
use gentp_cli::{CliError, Outcome, EXIT_INPUT};

/// Generalized numbers, Bohr mean values and generalized transition
/// probabilities.
#[derive(Debug, Parser)]
#[command(name = "gentp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a net: kind, valuation and support.
    Classify(ClassifyArgs),
    /// Bohr mean value of an almost periodic function.
    Meanvalue(MeanArgs),
    /// Transition probability for a matrix net and a vector pair.
    Tp(TpArgs),
    /// Eigenvalue nets, their classes and supports.
    Spectrum(SpectrumArgs),
    /// Recompute every worked example.
    Reproduce(ReproduceArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GENTP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Input(format!("GENTP_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Classify(a) => classify_cmd(a),
        Command::Meanvalue(a) => meanvalue_cmd(a),
        Command::Tp(a) => tp_cmd(a),
        Command::Spectrum(a) => spectrum_cmd(a),
        Command::Reproduce(a) => reproduce_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let start = std::time::Instant::now();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.document.as_bytes());
            let _ = stdout.flush();
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
