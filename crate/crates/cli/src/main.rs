use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use scaffold_cli::{run, Cli, CliError, TERM_LIMIT_ENV};

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            return fail(&CliError::Usage(
                first.trim_start_matches("error: ").to_string(),
            ));
        }
    };

    if let Ok(raw) = std::env::var(TERM_LIMIT_ENV) {
        match raw.trim().parse::<usize>() {
            Ok(limit) if limit > 0 => scaffold_core::localfield::set_term_limit(limit),
            _ => {
                return fail(&CliError::Usage(format!(
                    "{TERM_LIMIT_ENV} must be a positive integer, got {raw:?}"
                )))
            }
        }
    }

    match run(&cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            let _ = stdout.flush();
            match outcome.error {
                Some(err) => fail(&err),
                None => ExitCode::SUCCESS,
            }
        }
        Err(err) => fail(&err),
    }
}
