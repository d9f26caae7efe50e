use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    spde_lab_cli::main_with(spde_lab_cli::Cli::parse())
}
