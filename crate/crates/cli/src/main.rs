use std::io::Write;

use clap::Parser;

use indivisible_cli::commands::{run, Cli, Format};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let body = match cli.format {
                Format::Text => outcome.text,
                Format::Json => {
                    serde_json::to_string_pretty(&outcome.json).expect("reports serialize")
                }
            };
            // Ignore write errors (for example a closed pipe): the exit code
            // still reports the verdict.
            let _ = writeln!(std::io::stdout(), "{body}");
            std::process::exit(outcome.code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
