//! The `revpref` command line: dataset ingestion, command dispatch and reports.
//!
//! Exit codes: 0 when every input is satisfied, 1 when some input gets a
//! negative verdict, 2 on input or usage errors.

pub mod args;
pub mod commands;
pub mod error;
pub mod format;
pub mod io;

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;

use args::{Cli, Command, OutputFormat};
use commands::Outcome;
use error::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

fn render(outcome: &Outcome, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => outcome.text.clone(),
        OutputFormat::Json => {
            let mut value = outcome.json.clone();
            format::round_json(&mut value);
            let mut s = serde_json::to_string(&value).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

fn exit_code(results: &[Result<Outcome, CliError>]) -> i32 {
    if results.iter().any(Result::is_err) {
        EXIT_INPUT
    } else if results.iter().any(|r| matches!(r, Ok(o) if !o.satisfied)) {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    }
}

/// Runs `task` on every file, on `jobs` threads, keeping input order.
fn batch<F>(
    files: &[PathBuf],
    jobs: usize,
    task: F,
) -> Result<Vec<Result<Outcome, CliError>>, CliError>
where
    F: Fn(&PathBuf) -> Result<Outcome, CliError> + Sync,
{
    if jobs <= 1 || files.len() <= 1 {
        return Ok(files.iter().map(&task).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(|| files.par_iter().map(&task).collect()))
}

/// Writes each report with a single call so batch output never interleaves.
fn emit(
    results: &[Result<Outcome, CliError>],
    format: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    for r in results {
        match r {
            Ok(o) => {
                let _ = out.write_all(render(o, format).as_bytes());
            }
            Err(e) => {
                let _ = err.write_all(format!("revpref: {e}\n").as_bytes());
            }
        }
    }
    exit_code(results)
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if !(cli.tolerance.is_finite() && cli.tolerance >= 0.0) {
        let _ = writeln!(
            err,
            "revpref: usage error: tolerance must be finite and nonnegative"
        );
        return EXIT_INPUT;
    }
    let (tol, seed, jobs) = (cli.tolerance, cli.seed, cli.jobs);
    let results = match &cli.command {
        Command::Check(a) => batch(&a.files, jobs, |f| commands::check(f, a.method(), tol)),
        Command::Utility(a) => batch(&a.files, jobs, |f| commands::utility(f, a, tol, seed)),
        Command::Transport(a) => batch(&a.files, jobs, |f| {
            commands::transport(f, a.diagonal_check, a.solve, tol)
        }),
        Command::Fields(a) => Ok(vec![commands::fields(a, tol, seed)]),
        Command::Generate(a) => match commands::generate(a, seed) {
            Ok(g) => match g.outcome {
                Some(o) => Ok(vec![Ok(o)]),
                None => {
                    let _ = out.write_all(g.serialized.as_bytes());
                    return EXIT_OK;
                }
            },
            Err(e) => Ok(vec![Err(e)]),
        },
    };
    match results {
        Ok(results) => emit(&results, cli.format, out, err),
        Err(e) => {
            let _ = writeln!(err, "revpref: {e}");
            EXIT_INPUT
        }
    }
}
