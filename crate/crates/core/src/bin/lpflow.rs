use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lpflow::config::{load_config, OUTPUT_DIR_ENV};
use lpflow::monitor::{build_report, read_csv};
use lpflow::{runner, verify, Error};

/// Exit statuses.
const OK: u8 = 0;
const CONFIG_ERROR: u8 = 2;
const BLOWUP: u8 = 3;
const VERIFY_FAILED: u8 = 4;
const IO_ERROR: u8 = 5;

#[derive(Parser)]
#[command(name = "lpflow", version, about = "Oldroyd-B and MHD runs with blowup-criterion monitoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured simulation.
    Run { config: PathBuf },
    /// Run the property suite on the configured grid.
    Verify {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Continue a run from a checkpoint.
    Resume {
        checkpoint: PathBuf,
        #[arg(long)]
        until: f64,
        /// Output directory; defaults to the checkpointed run's.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Rebuild the criterion report from a samples file.
    Report {
        csv: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn status(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Checkpoint(_) | Error::Samples(_) => IO_ERROR,
        Error::Blowup { .. } => BLOWUP,
        _ => CONFIG_ERROR,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            status(&e)
        }
    };
    ExitCode::from(code)
}

fn execute(command: Command) -> lpflow::Result<u8> {
    match command {
        Command::Run { config } => {
            let config = load_config(&config)?;
            finish(runner::run(&config)?)
        }
        Command::Resume {
            checkpoint,
            until,
            output_dir,
        } => {
            let dir = output_dir.or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from));
            finish(runner::resume(&checkpoint, until, dir.as_deref())?)
        }
        Command::Verify { config, format } => {
            let config = load_config(&config)?;
            let report = verify::verify(&config)?;
            match format {
                Format::Json => emit(&to_json(&report)?),
                Format::Text => {
                    let mut text = String::new();
                    for c in &report.checks {
                        let verdict = if c.passed { "PASS" } else { "FAIL" };
                        text += &format!(
                            "{verdict} {:<34} measured {:<12.4e} limit {:<10.3e} margin {:.3e}  {}\n",
                            c.name, c.measured, c.limit, c.margin, c.detail
                        );
                    }
                    text += &format!(
                        "log-interpolation corpus max ratio: {}",
                        report.log_interpolation_max_ratio
                    );
                    emit(&text)
                }
            }
            Ok(if report.passed { OK } else { VERIFY_FAILED })
        }
        Command::Report { csv, format } => {
            let file = std::fs::File::open(&csv).map_err(|e| Error::Io {
                path: csv.clone(),
                source: e,
            })?;
            let (meta, samples) = read_csv(BufReader::new(file))?;
            let report = build_report(&samples, &meta.options, None, None)?;
            match format {
                Format::Json => emit(&to_json(&report)?),
                Format::Text => emit(&format!("{report:#?}")),
            }
            Ok(OK)
        }
    }
}

fn finish(outcome: runner::RunOutcome) -> lpflow::Result<u8> {
    eprintln!(
        "{} steps, outputs in {}",
        outcome.steps,
        outcome.dir.display()
    );
    Ok(match outcome.blowup() {
        Some(reason) => {
            eprintln!("{reason}");
            BLOWUP
        }
        None => OK,
    })
}

/// Prints to stdout; a closed pipe ends the output quietly.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn to_json<T: serde::Serialize>(value: &T) -> lpflow::Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Samples(e.to_string()))
}
