//! `wigmix`: evaluate mixed-ensemble spacing surmises, run large-matrix
//! transition experiments and fit couplings to measured spectra.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 run
//! refused by the time budget.

/// glibc malloc fragments badly when small result vectors are interleaved
/// with the eigensolver's large per-matrix buffers, so RSS grows with the
/// number of matrices sampled.
#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Common, EvalArgs, FitExternalArgs, GibbsArgs, ScanArgs, TransitionArgs};

#[derive(Debug, Parser)]
#[command(name = "wigmix", version, about = "Spacing distributions of mixed random-matrix ensembles")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate a surmise density P(s) for one or more couplings.
    Eval(EvalArgs),
    /// Sample a mixed ensemble, histogram its spacings and fit λ.
    Transition(TransitionArgs),
    /// Fit λ in windows of varying density and fit λ = kρ.
    DensityScan(ScanArgs),
    /// Maxima of the λ → 0 limit functions and the Fourier overshoot.
    Gibbs(GibbsArgs),
    /// Fit several kinds to a spectrum file and rank them.
    FitExternal(FitExternalArgs),
}

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Validation(_) => 1,
            Self::Numerical(_) => 2,
            Self::Budget(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Validation(m) => write!(f, "invalid input: {m}"),
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
            Self::Budget(m) => write!(f, "refused: {m}"),
        }
    }
}

impl From<wigmix_core::Error> for Failure {
    fn from(e: wigmix_core::Error) -> Self {
        use wigmix_core::Error as E;
        match e {
            E::Domain(_) | E::EmptySample(_) | E::Parse { .. } | E::Io(_) => Self::Validation(e.to_string()),
            E::Convergence { .. } | E::Eigen { .. } | E::Optimizer(_) => Self::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Eval(a) => commands::eval(&cli.common, a),
        Command::Transition(a) => commands::transition(&cli.common, a),
        Command::DensityScan(a) => commands::density_scan(&cli.common, a),
        Command::Gibbs(a) => commands::gibbs(&cli.common, a),
        Command::FitExternal(a) => commands::fit_external(&cli.common, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("wigmix: {f}");
            ExitCode::from(f.code())
        }
    }
}
