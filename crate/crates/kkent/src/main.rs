use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use kkent::app::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stderr = std::io::stderr();
    let status = match run(&cli, &mut stderr) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(outcome.stdout.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                kkent::ExitStatus::Io
            } else {
                outcome.status
            }
        }
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            err.exit_status()
        }
    };
    ExitCode::from(status.code() as u8)
}
