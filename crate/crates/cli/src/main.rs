use std::process::ExitCode;

use clap::{Parser, Subcommand};
use modgap_cli::{build_config, execute, write_output, CliError, Command, Overrides};

/// Spontaneous emission near a time-modulated photonic band edge.
///
/// Frequencies are in units of the emitter frequency omega0 and times in
/// units of 1/omega0. Every option can also be given in a flat
/// `key = value` file passed with --config; flags take precedence. With no
/// options, `spectrum` computes the three-peak spectrum at omega_g = 0.5,
/// xi_bar = 0.01, omega_c = 0.1, t = 1200.
#[derive(Parser)]
#[command(name = "modgap", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    options: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Band structure of the slab crystal (columns k, omega).
    Dispersion,
    /// Density of states at time t (columns omega, value).
    Dos,
    /// Emission spectrum at time t (columns omega, value).
    Spectrum,
    /// Total emission probability versus time (columns t, probability).
    Decay,
    /// Side-peak ratio versus modulation frequency plus a band-edge fit
    /// (columns omega_c, ratio).
    Sweep,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Dispersion => Command::Dispersion,
            Sub::Dos => Command::Dos,
            Sub::Spectrum => Command::Spectrum,
            Sub::Decay => Command::Decay,
            Sub::Sweep => Command::Sweep,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = build_config(cli.command.into(), &cli.options)?;
    let table = execute(&cfg)?;
    write_output(&cfg, &table)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
