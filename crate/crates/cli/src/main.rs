//! `qss`: run, sweep and verify the two-photon secret-sharing simulator.
//!
//! Exit codes: 0 on success, 1 on usage, configuration or self-test
//! failure, 2 when a `run` session aborts.

mod config;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use qss_sim::protocol::{run_session, SessionConfig};
use qss_sim::report::Report;
use qss_sim::selftest::{run_selftest_with, Fixture};
use qss_sim::sweep::{run_sweep, write_csv, write_table, SweepGrid};

use config::SessionArgs;

#[derive(Parser, Debug)]
#[command(name = "qss", version, about = "Two-photon dense-coding secret-sharing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one session and write its JSON report.
    Run {
        #[command(flatten)]
        session: SessionArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Run one session per (p_d, p_c) cell and tabulate efficiencies.
    Sweep {
        #[command(flatten)]
        session: SessionArgs,
        #[command(flatten)]
        io: IoArgs,
        /// Comma-separated decoy probabilities.
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.3")]
        pd_values: Vec<f64>,
        /// Comma-separated check probabilities.
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.3")]
        pc_values: Vec<f64>,
        /// CSV output path [default: the --out path with a .csv extension]
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Dump the verified state, transition and swapping tables.
    Tables {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the exhaustive oracle suite.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Corrupt one canonical amplitude to show the oracles catch it.
        #[arg(long, hide = true)]
        perturbed_fixture: bool,
    },
}

#[derive(clap::Args, Debug)]
struct IoArgs {
    /// Output path [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat TOML file with session parameters; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl IoArgs {
    fn session(&self, flags: &SessionArgs) -> anyhow::Result<SessionConfig> {
        let file = match &self.config {
            Some(path) => SessionArgs::load(path)?,
            None => SessionArgs::default(),
        };
        flags.over(&file).session_config()
    }
}

enum Outcome {
    Done,
    Aborted,
    SelftestFailed,
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn execute(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Run { session, io } => {
            let config = io.session(&session)?;
            let outcome = run_session(&config)?;
            let report = Report::from_outcome(&outcome);
            emit(io.out.as_deref(), &report.to_json())?;
            match &report.abort {
                Some(abort) => {
                    eprintln!("{abort}");
                    Ok(Outcome::Aborted)
                }
                None => {
                    eprintln!(
                        "sifted {} rounds, {} key bits",
                        report.counts.sifted, report.counts.key_bits
                    );
                    Ok(Outcome::Done)
                }
            }
        }
        Command::Sweep {
            session,
            io,
            pd_values,
            pc_values,
            csv,
        } => {
            let base = io.session(&session)?;
            let grid = SweepGrid {
                p_d: pd_values,
                p_c: pc_values,
            };
            for (p_d, p_c) in grid.cells() {
                SessionConfig {
                    p_d,
                    p_c,
                    ..base.clone()
                }
                .validate()?;
            }
            let rows = run_sweep(&base, &grid, base.seed)?;
            let mut table = Vec::new();
            write_table(&rows, &mut table)?;
            emit(io.out.as_deref(), &String::from_utf8(table)?)?;
            if let Some(path) = csv.or_else(|| io.out.as_ref().map(|p| p.with_extension("csv"))) {
                let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                write_csv(&rows, file)?;
            }
            Ok(Outcome::Done)
        }
        Command::Tables { out } => {
            emit(out.as_deref(), &qss_sim::dump::tables_dump())?;
            Ok(Outcome::Done)
        }
        Command::Selftest { out, perturbed_fixture } => {
            let fixture = if perturbed_fixture {
                Fixture::PerturbedAmplitude
            } else {
                Fixture::Clean
            };
            let report = run_selftest_with(fixture);
            let mut text: String = report.results.iter().map(|r| format!("{r}\n")).collect();
            let verdict = if report.passed() { "PASS" } else { "FAIL" };
            text.push_str(&format!(
                "{verdict} selftest in {:.3} s\n",
                report.elapsed.as_secs_f64()
            ));
            emit(out.as_deref(), &text)?;
            Ok(if report.passed() {
                Outcome::Done
            } else {
                Outcome::SelftestFailed
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Aborted) => ExitCode::from(2),
        Ok(Outcome::SelftestFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
