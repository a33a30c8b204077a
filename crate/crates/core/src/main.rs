use std::process::ExitCode;

use clap::Parser;
use dlharmonic::cli::{self, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common();
    let report = match cli::run(&cli.command) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = match report.render(common.format) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &common.out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(dlharmonic::Error::Io(e).exit_code() as u8);
    }
    for c in &report.checks {
        eprintln!("{}: {:e} (tol {:e}) {}", c.name, c.value, c.tol, if c.pass { "ok" } else { "FAIL" });
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
