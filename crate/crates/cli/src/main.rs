//! Batch front door: read a problem file, run its tasks, emit the JSON
//! report on standard output (or a file) and a one-line-per-task summary
//! on standard error.
//!
//! Exit codes: 0 when every task passes, 1 when any verdict fails,
//! 2 for unreadable or invalid input, 3 for an internal inconsistency.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use rayon::prelude::*;

use covpic::problem::{parse_problem, ProblemFile};
use covpic::report::Report;
use covpic::runner::{finish_report, prepare, run, run_task, verify_oracle, RunFlags};
use covpic::Error;

#[derive(Parser)]
#[command(
    name = "covpic",
    version,
    about = "Run covariant Morita workbench tasks from a problem file"
)]
struct Args {
    /// Problem file to run; "-" reads standard input.
    #[arg(long, short = 'i', default_value = "-")]
    input: PathBuf,

    /// Write the JSON report to this file instead of standard output.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,

    /// Override the truncation order declared in the file.
    #[arg(long)]
    truncation: Option<u32>,

    /// Override the mode window declared in the file.
    #[arg(long)]
    window: Option<i64>,

    /// Run independent tasks on a thread pool; report order is the
    /// input order either way.
    #[arg(long)]
    parallel: bool,

    /// Rerun oracle-backed tasks against the independent brute-force
    /// oracles instead of the primary pipeline.
    #[arg(long)]
    oracle: bool,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let args = Args::parse();
    let text = match read_input(&args.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("covpic: {e}");
            return 2;
        }
    };
    let problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("covpic: {e}");
            return 2;
        }
    };
    let flags = RunFlags {
        truncation: args.truncation,
        window: args.window,
    };
    let outcome = if args.oracle {
        verify_oracle(&problem, &flags)
    } else if args.parallel {
        run_parallel(&problem, &flags)
    } else {
        run(&problem, &flags)
    };
    let report = match outcome {
        Ok(r) => r,
        Err(Error::Internal(m)) => {
            eprintln!("covpic: internal inconsistency: {m}");
            return 3;
        }
        Err(e) => {
            eprintln!("covpic: {e}");
            return 2;
        }
    };
    let json = report.to_json();
    if let Some(path) = &args.output {
        if let Err(e) = fs::write(path, &json) {
            eprintln!("covpic: cannot write {}: {e}", path.display());
            return 2;
        }
    } else {
        print!("{json}");
    }
    eprintln!("{}", report.summary());
    if report.all_passed() {
        0
    } else {
        1
    }
}

fn read_input(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        fs::read_to_string(path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    }
}

/// Same report as the sequential runner; tasks execute on the rayon
/// pool and are collected back in input order.
fn run_parallel(problem: &ProblemFile, flags: &RunFlags) -> covpic::Result<Report> {
    let start = Instant::now();
    let bench = prepare(problem, flags)?;
    let results: Vec<_> = problem
        .tasks
        .par_iter()
        .map(|t| run_task(&bench, t))
        .collect();
    let mut tasks = Vec::with_capacity(results.len());
    for r in results {
        tasks.push(r?);
    }
    Ok(finish_report(
        &bench,
        tasks,
        start.elapsed().as_millis() as u64,
    ))
}
