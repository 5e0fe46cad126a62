use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use lqu_cli::commands::{self, ComputeRequest, Quantity, UnitarySource};
use lqu_cli::config::{tolerances_from_env, TOLERANCE_ENV};
use lqu_cli::table::{format_e12, Format, Grid, Meta, Table};
use lqu_cli::verify::{self, Suite, VerifyOptions};
use lqu_cli::{exit, CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "lqu",
    version,
    about = "Local quantum uncertainty: compute, sweep and verify"
)]
#[command(
    after_help = "Tolerance defaults can be overridden with LQU_TOLERANCES, a JSON object such as \
'{\"psd_clip\": 1e-9}'.\nExit codes: 0 success, 1 I/O error, 2 parse error, 3 validation error, 4 property failure, \
5 missing required input."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComputeFormat {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one quantity on a state file.
    Compute {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Observable on the whole space or on A (lifted to K (x) I).
        #[arg(long)]
        observable: Option<PathBuf>,
        /// Second state, for the Hellinger distance.
        #[arg(long)]
        other: Option<PathBuf>,
        /// Comma-separated spectrum on A for the LQU, e.g. -1,0,1.
        #[arg(long)]
        spectrum: Option<String>,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent searches from seed, seed+1, ...; the minimum is kept.
        #[arg(long, default_value_t = 1)]
        restarts: u64,
        #[arg(long, value_enum, default_value_t = ComputeFormat::Text)]
        format: ComputeFormat,
    },
    /// Variance of sigma_z on A, LQU and linear entropy along the Werner family.
    WernerSweep {
        #[arg(long, default_value = "0:1:101")]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// LQU of the one-clean-qubit output against the typical-unitary formula.
    Dqc1Sweep {
        /// Register size in qubits.
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "0:1:11")]
        grid: String,
        /// Seed for the Haar-random register unitary.
        #[arg(long, default_value_t = 0, conflicts_with = "unitary")]
        seed: u64,
        /// Unitary file (kind "unitary") used instead of a Haar sample.
        #[arg(long)]
        unitary: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Dephased spin probes: LQU, QFI and the precision limits.
    SpinProbeSweep {
        /// Comma-separated spins, e.g. 0.5,1,5.
        #[arg(long)]
        j: String,
        #[arg(long, default_value = "0:1:11")]
        grid: String,
        /// Number of repetitions in the Cramer-Rao bound.
        #[arg(long, default_value_t = 1)]
        nu: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the randomized property suites.
    Verify {
        /// Suite to run, e.g. `lqu verify all`.
        #[arg(value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Same as the positional suite.
        #[arg(long = "suite", value_enum, conflicts_with = "suite")]
        suite_flag: Option<Suite>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// Harness self-test: make every check fail.
        #[arg(long, hide = true)]
        corrupt_tolerances: bool,
    },
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn emit(text: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Lqu => "lqu",
        Quantity::Skew => "skew",
        Quantity::Qfi => "qfi",
        Quantity::Hellinger => "hellinger",
        Quantity::Variance => "variance",
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let tol = tolerances_from_env()?;
    let start = Instant::now();
    match cli.command {
        Command::Compute {
            state,
            quantity,
            observable,
            other,
            spectrum,
            budget,
            seed,
            restarts,
            format,
        } => {
            let req = ComputeRequest {
                state,
                quantity,
                observable,
                other,
                spectrum: spectrum.as_deref().map(commands::parse_list).transpose()?,
                budget,
                seed,
                restarts,
            };
            let report = commands::compute(&req, &tol)?;
            let text = match format {
                ComputeFormat::Text => format!("{:.12}\n", report.value),
                ComputeFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
                    s.push('\n');
                    s
                }
                ComputeFormat::Csv => {
                    let mut t = Table::new(Meta::new(Some(seed), command_line()), vec![quantity_name(quantity)]);
                    t.push(vec![report.value]);
                    t.to_csv()
                }
            };
            emit(&text, None)
        }
        Command::WernerSweep { grid, out, format } => {
            let table = commands::werner_sweep(&Grid::parse(&grid)?, &tol, &command_line())?;
            emit(&table.render(format), out.as_ref())?;
            eprintln!(
                "werner-sweep: {} rows, wall time {:.3}s",
                table.rows.len(),
                start.elapsed().as_secs_f64()
            );
            Ok(())
        }
        Command::Dqc1Sweep {
            n,
            grid,
            seed,
            unitary,
            out,
            format,
        } => {
            let source = match unitary {
                Some(p) => UnitarySource::File(p),
                None => UnitarySource::Haar { seed },
            };
            let table = commands::dqc1_sweep(n, &Grid::parse(&grid)?, &source, &tol, &command_line())?;
            emit(&table.render(format), out.as_ref())?;
            let worst = table
                .column("abs_error")
                .unwrap_or_default()
                .into_iter()
                .fold(0.0, f64::max);
            eprintln!(
                "dqc1-sweep: {} rows, max abs_error {}, wall time {:.3}s",
                table.rows.len(),
                format_e12(worst),
                start.elapsed().as_secs_f64()
            );
            Ok(())
        }
        Command::SpinProbeSweep {
            j,
            grid,
            nu,
            out,
            format,
        } => {
            let js = commands::parse_list(&j)?;
            let table = commands::spin_probe_sweep(&js, &Grid::parse(&grid)?, nu, &tol, &command_line())?;
            emit(&table.render(format), out.as_ref())?;
            eprintln!(
                "spin-probe-sweep: {} rows, wall time {:.3}s",
                table.rows.len(),
                start.elapsed().as_secs_f64()
            );
            Ok(())
        }
        Command::Verify {
            suite,
            suite_flag,
            seed,
            trials,
            corrupt_tolerances,
        } => {
            let report = verify::run(&VerifyOptions {
                suite: suite_flag.unwrap_or(suite),
                seed,
                trials,
                corrupt_tolerances,
            });
            emit(&report.render(), None)?;
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::PropertyFailure(format!(
                    "{} of {} properties failed",
                    report.failed(),
                    report.results.len()
                )))
            }
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                ErrorKind::MissingRequiredArgument | ErrorKind::MissingSubcommand => exit::MISSING_INPUT,
                _ => exit::PARSE,
            };
            let _ = e.print();
            process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("lqu: {e}");
        if matches!(e, CliError::Parse(_)) && e.to_string().contains(TOLERANCE_ENV) {
            eprintln!("lqu: {TOLERANCE_ENV} must be a JSON object mapping tolerance names to numbers");
        }
        process::exit(e.exit_code());
    }
}
