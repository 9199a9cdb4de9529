use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use eventwarden_core::agents::run_scenario;
use eventwarden_core::report::ScenarioReport;
use eventwarden_core::scenario::{ScenarioConfig, ScenarioError};

/// Run EventWarden scenarios on the deterministic chain simulator.
#[derive(Parser)]
#[command(name = "eventwarden", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario file and write its report.
    ///
    /// Exits 0 when every `expect` line holds, 1 when one does not, and 2
    /// when the scenario does not parse or validate (no report is written).
    Run {
        /// Scenario file.
        scenario: PathBuf,
        /// Seed for actor addresses [default: the file's `seed`, else 1].
        #[arg(long)]
        seed: Option<u64>,
        /// Blockhash window in blocks [default: the file's `window`, else 256].
        #[arg(long)]
        window: Option<u64>,
        /// Number of executors; the file's delays are reused cyclically
        /// [default: the file's `executors`, else 1].
        #[arg(long)]
        executors: Option<usize>,
        /// Report format.
        #[arg(long, value_enum, default_value_t = Format::Table)]
        report: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a scenario without running it.
    Check {
        scenario: PathBuf,
    },
    /// Render a saved tree report as a table.
    Render {
        tree: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Tree,
}

const EXIT_ASSERTION: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn load(path: &Path) -> Result<Result<ScenarioConfig, ScenarioError>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ScenarioConfig::parse(&text))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run {
            scenario,
            seed,
            window,
            executors,
            report,
            out,
        } => {
            let mut config = match load(&scenario)? {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{}: {e}", scenario.display());
                    return Ok(ExitCode::from(EXIT_INPUT));
                }
            };
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(w) = window {
                config.blockhash_window = w;
            }
            if let Some(n) = executors {
                config.set_executor_count(n);
            }
            let result = match run_scenario(&config) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{}: {e}", scenario.display());
                    return Ok(ExitCode::from(EXIT_INPUT));
                }
            };
            let text = match report {
                Format::Table => result.to_table(),
                Format::Tree => result.to_tree(),
            };
            emit(&text, out.as_deref())?;
            if result.expectations_hold() {
                Ok(ExitCode::SUCCESS)
            } else {
                for e in result.expectations.iter().filter(|e| !e.holds) {
                    eprintln!(
                        "expectation failed: {} is {}, expected {}",
                        e.proxy,
                        e.actual.map_or("not deployed", |s| s.name()),
                        e.expected
                    );
                }
                Ok(ExitCode::from(EXIT_ASSERTION))
            }
        }
        Command::Check { scenario } => match load(&scenario)? {
            Ok(c) => {
                println!(
                    "{}: {} actors, {} proxies, {} steps, {} executors",
                    scenario.display(),
                    c.actors.len(),
                    c.proxies.len(),
                    c.steps.len(),
                    c.executor_delays.len()
                );
                Ok(ExitCode::SUCCESS)
            }
            Err(e) => {
                eprintln!("{}: {e}", scenario.display());
                Ok(ExitCode::from(EXIT_INPUT))
            }
        },
        Command::Render { tree } => {
            let text = fs::read_to_string(&tree).with_context(|| format!("reading {}", tree.display()))?;
            let report = ScenarioReport::from_tree(&text).with_context(|| format!("parsing {}", tree.display()))?;
            emit(&report.to_table(), None)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
