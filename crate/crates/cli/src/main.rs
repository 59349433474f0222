use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use paradet_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(outcome) => {
            let wrote_file = match &cli.command {
                paradet_cli::Command::Det(c)
                | paradet_cli::Command::Verify(c)
                | paradet_cli::Command::Sun(c)
                | paradet_cli::Command::Bench(c) => c.out.is_some(),
            };
            if !wrote_file {
                let _ = std::io::stdout().write_all(outcome.text.as_bytes());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("paradet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
