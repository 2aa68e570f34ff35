use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use orbitcount::cli::{config_from_cli, exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match config_from_cli(cli).and_then(run) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("orbitcount: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
