use std::process::ExitCode;

use clap::Parser;
use mmi_cli::commands::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { mmi_cli::error::EXIT_INVALID } else { mmi_cli::error::EXIT_OK };
            e.print().ok();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mmi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
