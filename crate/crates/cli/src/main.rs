mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::commands::Exit;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(exit) => {
            eprintln!("error: {}", exit.message);
            ExitCode::from(exit.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Exit> {
    if cli.common.jobs == 0 {
        return Err(Exit::usage("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.jobs)
        .build_global()
        .map_err(|e| Exit::usage(e.to_string()))?;

    let outcome = commands::dispatch(&cli.command, &cli.common)?;
    match &cli.common.output {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| Exit::usage(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(outcome.text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Exit::usage(format!("cannot write output: {e}")))?;
        }
    }
    Ok(outcome.code)
}
