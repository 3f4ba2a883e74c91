use clap::Parser;
use ngpd_cli::commands::{run, Cli};
use std::io::Write;

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout();
            stdout.write_all(outcome.text.as_bytes()).expect("stdout");
            stdout.flush().expect("stdout");
            std::process::exit(outcome.exit);
        }
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    }
}
