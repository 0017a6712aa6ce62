use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use pqt::harness::{parse_config, run, ExperimentConfig, PROTOCOLS};
use pqt::measurement::Mode;
use pqt::Error;

#[derive(Parser)]
#[command(name = "pqt", version, about = "Seeded experiments with collapsing and passive measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and print or write its report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mode: Option<ModeArg>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add the wall-clock time to the report (makes it non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// List the protocol identifiers a config may name.
    ListProtocols,
    /// Parse and check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Quantum,
    Passive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn load(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config { field: "<file>".into(), reason: format!("{}: {e}", path.display()) })?;
    parse_config(&text)
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<(), Error> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::ListProtocols => {
            let text: String = PROTOCOLS.iter().map(|(id, about)| format!("{id:<20} {about}\n")).collect();
            emit(&text)?;
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("ok: {} ({})", cfg.name, cfg.protocol);
        }
        Command::Run { config, seed, mode, format, out, timing } => {
            let mut cfg = load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(m) = mode {
                cfg.mode = match m {
                    ModeArg::Quantum => Mode::Quantum,
                    ModeArg::Passive => Mode::Passive,
                };
            }
            cfg.validate()?;
            let start = Instant::now();
            let mut report = run(&cfg)?;
            if timing {
                report.wall_clock_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv()?,
            };
            match out {
                Some(path) => std::fs::write(&path, text)?,
                None => emit(&text)?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
