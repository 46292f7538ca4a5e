mod args;
mod commands;
mod output;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Command, RunConfig};
use commands::{Failure, Outcome};

fn run(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let format = cfg.output.format;
    match &cfg.command {
        Command::Report(a) => commands::report(a, format),
        Command::Scenario(a) => commands::scenario(a, format),
        Command::Sweep(a) => commands::sweep_cmd(a, format),
        Command::Optimize(a) => commands::optimize(a, format),
        Command::Discriminate(a) => commands::discriminate(a, format),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth an error exit
            let _ = stdout.write_all(text.as_bytes());
            let _ = stdout.flush();
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if !cfg.output.no_banner {
        eprintln!("cfgain {}", env!("CARGO_PKG_VERSION"));
    }
    let result = run(&cfg).and_then(|outcome| {
        emit(&cfg, &outcome.text)?;
        outcome.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
