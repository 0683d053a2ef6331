//! `torsion`: compute torsions from JSON documents and run verification suites.
//!
//! Exit codes: 0 pass, 1 failed check, 2 malformed input, 3 violated data
//! invariant or numerical failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use torsion_core::analytic::ZetaEngine;
use torsion_core::verify::{self, InputKind, Report, Suite, VerifyOptions};
use torsion_core::TorsionError;

#[derive(Parser)]
#[command(name = "torsion", version, about = "Torsion forms, Thom-Smale complexes and gluing checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Torsion of a complex, Morse model, double complex, geometry or gluing scenario.
    Torsion {
        kind: Kind,
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        report: Format,
        /// Zeta engine: `closed` or `em[N]` (Euler-Maclaurin with N terms).
        #[arg(long, default_value = "closed")]
        precision: String,
    },
    /// Run a verification suite.
    Verify {
        suite: SuiteArg,
        /// Replaces every default tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        report: Format,
        #[arg(long, default_value = "closed")]
        precision: String,
        /// Finest circle grid of the transgression check.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Record wall-clock time per suite (makes reports run-dependent).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Complex,
    Morse,
    Double,
    Geometry,
    Scenario,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Finite,
    Spectral,
    Morse,
    Analytic,
    Gluing,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn parse_engine(s: &str) -> Result<ZetaEngine, TorsionError> {
    match s {
        "closed" => Ok(ZetaEngine::ClosedForm),
        "em" => Ok(ZetaEngine::EulerMaclaurin { terms: 1000 }),
        _ => s
            .strip_prefix("em")
            .and_then(|n| n.parse().ok())
            .map(|terms| ZetaEngine::EulerMaclaurin { terms })
            .ok_or_else(|| TorsionError::Input(format!("--precision: expected `closed` or `em<N>`, got `{s}`"))),
    }
}

fn exit_code(e: &TorsionError) -> u8 {
    match e {
        TorsionError::Input(_) | TorsionError::Dimension(_) | TorsionError::Config(_) => 2,
        _ => 3,
    }
}

fn emit(report: &Report, format: Format) {
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: Cli) -> Result<u8, TorsionError> {
    match cli.command {
        Command::Torsion { kind, file, report, precision } => {
            let engine = parse_engine(&precision)?;
            let text = std::fs::read_to_string(&file)
                .map_err(|e| TorsionError::Input(format!("{}: {e}", file.display())))?;
            let kind = match kind {
                Kind::Complex => InputKind::Complex,
                Kind::Morse => InputKind::Morse,
                Kind::Double => InputKind::Double,
                Kind::Geometry => InputKind::Geometry,
                Kind::Scenario => InputKind::Scenario,
            };
            let r = verify::torsion_report(kind, &text, engine)?;
            emit(&r, report);
            Ok(if r.passed() { 0 } else { 1 })
        }
        Command::Verify { suite, tolerance, seed, report, precision, grid, timing } => {
            let engine = parse_engine(&precision)?;
            if grid < 8 || grid % 4 != 0 {
                return Err(TorsionError::Input("--grid must be a multiple of 4 and at least 8".into()));
            }
            if tolerance.is_some_and(|t| !(t > 0.0)) {
                return Err(TorsionError::Input("--tolerance must be positive".into()));
            }
            let suite = match suite {
                SuiteArg::Finite => Suite::Finite,
                SuiteArg::Spectral => Suite::Spectral,
                SuiteArg::Morse => Suite::Morse,
                SuiteArg::Analytic => Suite::Analytic,
                SuiteArg::Gluing => Suite::Gluing,
                SuiteArg::All => Suite::All,
            };
            let opts = VerifyOptions { seed, tolerance, engine, grid, timing };
            let r = verify::run(suite, &opts);
            emit(&r, report);
            Ok(if r.passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
