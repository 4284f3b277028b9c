use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod error;
mod expr;
mod output;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::Caps::from_env().and_then(|caps| commands::run(cli.command, caps)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qwalk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
