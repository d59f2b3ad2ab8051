use std::io::Write;

use clap::Parser;
use dml_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let (code, out, err) = run(&cli);
    let _ = std::io::stdout().write_all(out.as_bytes());
    let _ = std::io::stderr().write_all(err.as_bytes());
    std::process::exit(code);
}
