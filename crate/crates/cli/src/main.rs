use std::process::ExitCode;

use adaptor::cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    // Needed before parsing so that parse errors honor it too.
    let json_errors = std::env::args().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            if json_errors {
                let msg = e.render().to_string();
                eprintln!("{}", serde_json::json!({"error": "usage", "message": msg.trim_end(), "violations": []}));
            } else {
                let _ = e.print();
            }
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report(json_errors));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
