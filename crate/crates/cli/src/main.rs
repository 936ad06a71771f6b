use std::process::ExitCode;

use clap::Parser;
use semspace::commands::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // --help and --version are not usage errors.
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let code = run(&cli, &mut stdout.lock());
    ExitCode::from(code as u8)
}
