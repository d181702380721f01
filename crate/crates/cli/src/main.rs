mod args;
mod commands;
mod output;

use std::fmt::Display;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command, Format};

const SEED_ENV: &str = "TEMPODISC_SEED";

#[derive(Debug)]
pub enum CliError {
    /// Bad flag values or combinations; exit status 2.
    Usage(String),
    /// Unusable input data or a computation outside its domain; exit status 3.
    Data(String),
}

impl CliError {
    pub fn usage(e: impl Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub fn data(e: impl Display) -> Self {
        CliError::Data(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

fn resolve_seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}='{raw}' is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let seed = resolve_seed(cli.global.seed)?;
    let (name, outcome) = match &cli.command {
        Command::Decide(a) => ("decide", commands::decide_cmd(a)?),
        Command::Curve(a) => ("curve", commands::curve_cmd(a)?),
        Command::Reversal(a) => ("reversal", commands::reversal_cmd(a)?),
        Command::Contrast(a) => ("contrast", commands::contrast_cmd(a)?),
        Command::Thaler(a) => ("thaler", commands::thaler_cmd(a)?),
        Command::Fit(a) => ("fit", commands::fit_cmd(a)?),
        Command::Population(a) => ("population", commands::population_cmd(a, seed)?),
    };
    let meta = json!({
        "command": name,
        "params": outcome.params,
        "period_length": cli.global.period_length,
        "version": env!("CARGO_PKG_VERSION"),
    });
    if cli.global.format == Format::Csv {
        if let Some(note) = &outcome.note {
            eprintln!("{note}");
        }
    }
    match outcome.table.emit(cli.global.format, meta, cli.global.out.as_deref()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Data(format!("writing output: {e}"))),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
