use std::process::ExitCode;

use clap::Parser;
use deltaflow::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = std::panic::catch_unwind(|| execute(&cli)).unwrap_or(3);
    ExitCode::from(code as u8)
}
