mod args;
mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;
use trunclap::Error;

use args::{Cli, Command};

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parameter(_) | Error::Domain(_) => 1,
        Error::IterationLimit { .. } | Error::Divergence(_) | Error::Invariant(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match &cli.command {
        Command::EigenClosed(a) => commands::eigen_closed(a),
        Command::EigenNumeric(a) => commands::eigen_numeric(a),
        Command::Fk(a) => commands::fk(a),
        Command::Fk2(a) => commands::fk2(a),
        Command::Lieb(a) => commands::lieb(a),
        Command::Counterexample(a) => commands::counterexample(a, cli.seed),
        Command::Holder(a) => commands::holder(a, cli.seed),
        Command::Remark(a) => commands::remark(a, cli.seed),
        Command::Explore(a) => commands::explore(a),
    };
    let report = match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::IterationLimit { history, .. } = &e {
                eprintln!("history: {}", json!(history));
            }
            return ExitCode::from(exit_code(&e));
        }
    };
    let globals = json!({
        "seed": cli.seed,
        "threads": rayon::current_num_threads(),
        "format": cli.format,
    });
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            report.write(&mut w, cli.format, globals)?;
            w.flush()
        }),
        None => {
            let mut w = io::stdout().lock();
            report
                .write(&mut w, cli.format, globals)
                .and_then(|_| w.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(1);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "check failed: {}",
            report
                .diagnostic
                .as_deref()
                .unwrap_or("assertion did not hold")
        );
        ExitCode::from(2)
    }
}
