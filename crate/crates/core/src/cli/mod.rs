//! The `mimetic` command line driver.
//!
//! Each solver subcommand writes `<tag>.csv` (conserved quantities per recorded
//! step), `<tag>_errors.csv` where an error field applies, and `<tag>.json`
//! with a [`RunReport`]. Exit codes: [`EXIT_PASS`] when every check passes,
//! [`EXIT_FAIL`] when one fails, [`EXIT_USAGE`] for bad arguments or config.

mod args;
mod config;
mod report;
mod run;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches};

pub use args::{Cli, Command};
pub use config::ConfigFile;
pub use report::{Check, RunReport, SeriesPoint};

use crate::error::{Error, Result};
use report::Output;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Overrides the output directory unless `--out` is given.
pub const OUT_DIR_ENV: &str = "MIMETIC_OUT_DIR";

const DEFAULT_OUT: &str = "mimetic-out";

fn parse(args: &[OsString]) -> std::result::Result<Cli, clap::Error> {
    let m = Cli::command().try_get_matches_from(args)?;
    Cli::from_arg_matches(&m)
}

fn clap_exit(e: clap::Error) -> i32 {
    let _ = e.print();
    if e.use_stderr() {
        EXIT_USAGE
    } else {
        EXIT_PASS
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let first = match parse(&args) {
        Ok(c) => c,
        Err(e) => return clap_exit(e),
    };
    let (cli, file) = match &first.config {
        None => (first, ConfigFile::default()),
        Some(path) => {
            let file = match ConfigFile::load(path) {
                Ok(f) => f,
                Err(e) => return usage(&e),
            };
            let name = first.command.name();
            let merged = match (
                file.flags(name, &args),
                config::subcommand_index(&args, name),
            ) {
                (Ok(extra), Some(at)) => {
                    let mut v = args[..=at].to_vec();
                    v.extend(extra);
                    v.extend_from_slice(&args[at + 1..]);
                    v
                }
                (Ok(_), None) => args.clone(),
                (Err(e), _) => return usage(&e),
            };
            match parse(&merged) {
                Ok(c) => (c, file),
                Err(e) => return clap_exit(e),
            }
        }
    };
    match execute(&cli, &file) {
        Ok(Some(report)) => {
            if !cli.quiet {
                summarize(&report);
            }
            if report.passed || cli.no_assert {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Ok(None) => EXIT_PASS,
        Err(e) => usage(&e),
    }
}

fn usage(e: &Error) -> i32 {
    eprintln!("error: {e}");
    EXIT_USAGE
}

fn out_dir(cli: &Cli, file: &ConfigFile) -> Result<PathBuf> {
    if let Some(d) = &cli.out {
        return Ok(d.clone());
    }
    Ok(file
        .out_dir()?
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)))
}

/// Runs the parsed command. `None` for commands that produce no report.
pub fn execute(cli: &Cli, file: &ConfigFile) -> Result<Option<RunReport>> {
    if let Command::Schema = cli.command {
        let s =
            serde_json::to_string_pretty(&schema()).map_err(|e| Error::Config(e.to_string()))?;
        println!("{s}");
        return Ok(None);
    }
    let out = Output {
        dir: out_dir(cli, file)?,
        tag: cli.tag.clone().unwrap_or_else(|| cli.command.default_tag()),
    };
    std::fs::create_dir_all(&out.dir)?;
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Oscillator(a) => run::oscillator(a, &out)?,
        Command::System(a) => run::system(a, &out)?,
        Command::Wave1d(a) => run::wave1d(a, &out)?,
        Command::Wave1dConvergence(a) => run::wave1d_convergence(a, &out)?,
        Command::ConvergenceTable(a) => run::convergence_table(a, &out)?,
        Command::Wave2d(a) => run::wave2d(a, &out)?,
        Command::Wave3d(a) => run::wave3d(a, &out)?,
        Command::Maxwell(a) => run::maxwell(a, &out)?,
        Command::Transport(a) => run::transport(a, &out)?,
        Command::Diffusion(a) => run::diffusion(a, &out)?,
        Command::Verify(a) => verify::verify(a)?,
        Command::Schema => unreachable!("handled above"),
    };
    report.wall_time_s = start.elapsed().as_secs_f64();
    report.finish();
    let path = out.path("", "json");
    report.artifacts.push(path.clone());
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(&path, text + "\n")?;
    Ok(Some(report))
}

fn summarize(r: &RunReport) {
    for c in &r.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        if c.relation == "holds" {
            println!("{verdict} {}", c.name);
        } else if let Some(lo) = c.lower {
            println!(
                "{verdict} {}: {:e} in [{lo:e}, {:e}]",
                c.name, c.value, c.limit
            );
        } else {
            println!(
                "{verdict} {}: {:e} {} {:e}",
                c.name, c.value, c.relation, c.limit
            );
        }
    }
    for (k, v) in &r.metrics {
        println!("     {k} = {v:e}");
    }
    for p in &r.artifacts {
        println!("     wrote {}", p.display());
    }
}

/// Options of every subcommand as JSON, read from the argument definitions.
pub fn schema() -> serde_json::Value {
    use serde_json::json;
    let cmd = Cli::command();
    let describe = |c: &clap::Command| -> serde_json::Value {
        let opts: Vec<_> = c
            .get_arguments()
            .filter(|a| a.get_id() != "help" && a.get_id() != "version")
            .map(|a| {
                let values: Vec<String> = a
                    .get_possible_values()
                    .iter()
                    .map(|v| v.get_name().to_string())
                    .collect();
                let defaults: Vec<String> = a
                    .get_default_values()
                    .iter()
                    .map(|v| v.to_string_lossy().into_owned())
                    .collect();
                json!({
                    "name": a.get_long().map(str::to_string).unwrap_or_else(|| a.get_id().to_string()),
                    "positional": a.is_positional(),
                    "takes_value": a.get_num_args().is_some_and(|n| n.takes_values()),
                    "required": a.is_required_set(),
                    "global": a.is_global_set(),
                    "default": defaults,
                    "values": values,
                    "help": a.get_help().map(|h| h.to_string()),
                })
            })
            .collect();
        json!({ "name": c.get_name(), "about": c.get_about().map(|h| h.to_string()), "options": opts })
    };
    json!({
        "program": describe(&cmd),
        "config": "TOML; one table per subcommand with keys named like the long options, plus [output] dir",
        "env": { OUT_DIR_ENV: "output directory unless --out is given" },
        "exit_codes": { "0": "all checks passed", "1": "a check failed", "2": "usage or configuration error" },
        "subcommands": cmd.get_subcommands().map(describe).collect::<Vec<_>>(),
    })
}
