use capkm_cli::args::Cli;
use capkm_cli::{run, EXIT_BOUND_FAILURE, EXIT_PASS};
use clap::Parser;
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(&cli, &mut out);
    let _ = std::io::stdout().write_all(out.as_bytes());
    match result {
        Ok(true) => ExitCode::from(EXIT_PASS),
        Ok(false) => ExitCode::from(EXIT_BOUND_FAILURE),
        Err(e) => {
            eprintln!("capkm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
