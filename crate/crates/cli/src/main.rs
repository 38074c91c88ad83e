use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use symmorse_cli::{run, Cli, Format};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common().clone();
    let outcome = run(&cli);
    let status = &outcome.report.status;
    if let Some(e) = &status.error {
        eprintln!("symmorse: {e}");
    }
    match &common.out {
        Some(dir) => match outcome.write_to(dir, common.format) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("symmorse: cannot write to {}: {e}", dir.display());
                return ExitCode::from(symmorse_cli::exit::NUMERIC);
            }
        },
        None => {
            let body = match common.format {
                Format::Json => outcome.report.to_json(),
                Format::Csv => outcome.report.to_csv(),
            };
            let _ = std::io::stdout().write_all(body.as_bytes());
        }
    }
    ExitCode::from(outcome.exit_code())
}
