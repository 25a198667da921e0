use std::process::ExitCode;

use clap::Parser;
use kantorovich_lab::{main_with, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = main_with(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}
