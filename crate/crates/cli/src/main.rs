use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod parse;

/// Recoupling tables, recoupling identities, Hamiltonian annihilation checks
/// and SO*(2n) coherent-state statistics.
#[derive(Parser, Debug)]
#[command(name = "spinnet", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file whose keys mirror the long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Clebsch-Gordan table of F_gamma (or a discrete series) with a module.
    Cg(commands::CgArgs),
    /// One Racah coefficient.
    Racah(commands::RacahArgs),
    /// Pentagon identity residuals over random admissible configurations.
    Pentagon(commands::PentagonArgs),
    /// Residual of a Hamiltonian constraint on a tetrahedral network.
    Hamiltonian(commands::HamiltonianArgs),
    /// Spin(3,1) coefficient table for F^(A)_gamma with a principal series module.
    Spin31(commands::Spin31Args),
    /// SO*(2n) coherent-state statistics.
    #[command(subcommand)]
    Coherent(commands::CoherentCmd),
    /// Run every acceptance criterion.
    VerifyAll(commands::VerifyArgs),
}

/// Result of a command: the rendered output and whether its checks passed.
pub struct Outcome {
    pub output: String,
    pub passed: bool,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use spinnet::Error as E;
    if err.downcast_ref::<parse::InputError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<E>() {
        Some(E::WindowTooSmall(_)) => 3,
        Some(
            E::InvalidLabel(_)
            | E::NotDecomposable(_)
            | E::UnsupportedCoupling(_)
            | E::UnsupportedLabel(_)
            | E::OutsideDomain(_)
            | E::NotRank2(_)
            | E::NotSquare(..)
            | E::NotAntisymmetric(_)
            | E::ZeroNorm,
        ) => 2,
        _ => 1,
    }
}

fn command() -> clap::Command {
    let mut cmd = Cli::command()
        .mut_subcommands(|s| s.args_override_self(true).mut_subcommands(|s| s.args_override_self(true)));
    cmd.build();
    cmd
}

fn parse_cli(args: Vec<OsString>) -> anyhow::Result<Cli> {
    let cmd = command();
    let args = match config::config_path(&args) {
        Some(p) => {
            let entries = config::read(p.as_ref())?;
            config::merge(&cmd, args, &entries)?
        }
        None => args,
    };
    let m = cmd.try_get_matches_from(args).unwrap_or_else(|e| e.exit());
    Ok(Cli::from_arg_matches(&m).unwrap_or_else(|e| e.exit()))
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let g = &cli.global;
    match cli.command {
        Cmd::Cg(a) => commands::cg(&a, g),
        Cmd::Racah(a) => commands::racah(&a, g),
        Cmd::Pentagon(a) => commands::pentagon(&a, g),
        Cmd::Hamiltonian(a) => commands::hamiltonian(&a, g),
        Cmd::Spin31(a) => commands::spin31(&a, g),
        Cmd::Coherent(c) => commands::coherent(&c, g),
        Cmd::VerifyAll(a) => commands::verify_all(&a, g),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let result = parse_cli(std::env::args_os().collect()).and_then(|cli| {
        let out = cli.global.out.clone();
        let o = run(cli)?;
        emit(&out, &o.output)?;
        Ok(o.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
