use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weakkam::num::{parse_rational, Mode, Rational};
use weakkam::pipeline::{
    run_analyze, run_oracle, run_verify, AnalyzeOptions, PipelineError, EXIT_INPUT, EXIT_TOO_LARGE,
};

#[derive(Parser)]
#[command(name = "weakkam", version, about = "Ergodic optimization on countable Markov shifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis and emit the canonical report.
    Analyze {
        config: PathBuf,
        /// Write the report here instead of standard output.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Directory for beta_by_level.csv and finite_horizon.csv.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        plateau_window: Option<u32>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        #[arg(long, value_parser = parse_eta)]
        eta: Option<Rational>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Audit a sub-action (or a full report) against the configured model.
    Verify { config: PathBuf, subaction: PathBuf },
    /// Compare the solvers with brute-force oracles.
    Oracle {
        config: PathBuf,
        /// Also check this many seeded random instances.
        #[arg(long, default_value_t = 0)]
        seeds: u64,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: weakkam::num::ParseScalarError| e.to_string())
}

fn parse_eta(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn fail(code: i32, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code as u8)
}

fn pipeline_failure(e: &PipelineError, code: i32) -> ExitCode {
    fail(code, &format!("[{}] {e}", e.code()))
}

fn analyze(
    config: &Path,
    emit: Option<PathBuf>,
    csv: Option<PathBuf>,
    opts: AnalyzeOptions,
) -> ExitCode {
    let text = match read(config) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INPUT, &e),
    };
    let out = match run_analyze(&text, &opts) {
        Ok(out) => out,
        Err(e) => return pipeline_failure(&e, e.exit_code()),
    };
    let from_config = out.output.clone().unwrap_or(weakkam::config::OutputSpec {
        report: None,
        csv: None,
    });
    let emit = emit.or(from_config.report.map(PathBuf::from));
    let csv = csv.or(from_config.csv.map(PathBuf::from));
    let written = match &emit {
        Some(path) => write(path, &out.report),
        None => {
            print!("{}", out.report);
            Ok(())
        }
    };
    if let Err(e) = written {
        return fail(EXIT_INPUT, &e);
    }
    if let Some(dir) = csv {
        let res = fs::create_dir_all(&dir)
            .map_err(|e| format!("cannot create {}: {e}", dir.display()))
            .and_then(|_| write(&dir.join("beta_by_level.csv"), &out.beta_csv))
            .and_then(|_| write(&dir.join("finite_horizon.csv"), &out.horizon_csv));
        if let Err(e) = res {
            return fail(EXIT_INPUT, &e);
        }
    }
    if !out.passed {
        eprintln!("verdict: FALSIFIED");
    }
    ExitCode::from(out.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            config,
            emit,
            csv,
            plateau_window,
            mode,
            eta,
            horizon,
        } => analyze(
            &config,
            emit,
            csv,
            AnalyzeOptions {
                plateau_window,
                mode,
                eta,
                horizon,
            },
        ),
        Command::Verify { config, subaction } => {
            let texts = read(&config).and_then(|c| Ok((c, read(&subaction)?)));
            let (cfg, sub) = match texts {
                Ok(t) => t,
                Err(e) => return fail(EXIT_INPUT, &e),
            };
            match run_verify(&cfg, &sub) {
                Ok(out) => {
                    print!("{}", out.text);
                    ExitCode::from(out.exit_code as u8)
                }
                Err(e) => pipeline_failure(&e, EXIT_INPUT),
            }
        }
        Command::Oracle { config, seeds } => {
            let text = match read(&config) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_INPUT, &e),
            };
            match run_oracle(&text, seeds) {
                Ok(out) => {
                    print!("{}", out.text);
                    ExitCode::from(out.exit_code as u8)
                }
                Err(e) => {
                    let code = if e.exit_code() == EXIT_TOO_LARGE {
                        EXIT_TOO_LARGE
                    } else {
                        EXIT_INPUT
                    };
                    pipeline_failure(&e, code)
                }
            }
        }
    }
}
