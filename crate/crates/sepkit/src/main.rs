use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = sepkit::cli::Cli::parse();
    match sepkit::commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
