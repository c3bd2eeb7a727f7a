mod decompose;
mod dilate;
mod generate;
mod point;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tetradecomp::{Error, Tolerance};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_MATH: u8 = 3;
pub const EXIT_HYPOTHESIS: u8 = 4;
pub const EXIT_RESOURCE: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "tetradecomp", version, about = "Decompositions of commuting contractions and tetrablock tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a tuple into its 2^n joint atoms.
    Decompose(decompose::Args),
    /// Classify a point of C^3 against the tetrablock.
    TetraPoint(point::Args),
    /// Build and check a truncated isometric dilation of a triple.
    Dilate(dilate::Args),
    /// Write a planted instance with its truth table.
    Generate(generate::Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecomposeMode {
    /// unitary / completely non-unitary atoms
    Unitary,
    /// isometric / completely non-isometric atoms of c.n.u. members
    Cnu,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_) | Error::DimensionMismatch { .. } | Error::NonFinite => EXIT_INPUT,
        Error::Size { .. } => EXIT_RESOURCE,
        _ => EXIT_MATH,
    }
}

/// Flag, then instance file, then `TETRADECOMP_TOL`, then the default.
pub fn resolve_tol(flag: Option<f64>, instance: Option<f64>) -> Result<Tolerance, Failure> {
    let base = match (flag, instance) {
        (Some(t), _) | (None, Some(t)) => t,
        (None, None) => match std::env::var("TETRADECOMP_TOL") {
            Ok(s) => s.trim().parse::<f64>().map_err(|_| Failure::input(format!("TETRADECOMP_TOL={s:?} is not a number")))?,
            Err(_) => return Ok(Tolerance::default()),
        },
    };
    if !(base > 0.0 && base.is_finite()) {
        return Err(Failure::input(format!("tolerance must be positive, got {base}")));
    }
    Ok(Tolerance::new(base))
}

pub fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure { code: EXIT_RESOURCE, message: format!("{}: {e}", p.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Decompose(args) => decompose::run(args),
        Command::TetraPoint(args) => point::run(args),
        Command::Dilate(args) => dilate::run(args),
        Command::Generate(args) => generate::run(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
