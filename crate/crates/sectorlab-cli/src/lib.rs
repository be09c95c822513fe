//! The `sectorlab` command-line driver.
//!
//! Every experiment is a subcommand. Runs can also be described by a TOML
//! file (see [`config`]) and leave a JSON report (see [`report`]).
//!
//! Exit codes: 0 success, 1 a check failed or the run broke, 2 usage error.

pub mod commands;
pub mod config;
pub mod report;
pub mod schema;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::commands::{Args, CmdError};
use crate::config::{load_config, ParamValue, RunConfig};
use crate::report::{write_atomic, write_report, RunReport};
use crate::schema::{Kind, Param, Presence};

pub const THREADS_ENV: &str = "SECTORLAB_THREADS";

fn param_arg(p: &Param) -> Arg {
    let mut a = Arg::new(p.name).long(p.name).help(p.help);
    if p.kind == Kind::Flag {
        return a.action(ArgAction::SetTrue);
    }
    let checker = p.clone();
    a = a
        .value_name(p.kind.label())
        .allow_hyphen_values(matches!(p.kind, Kind::Int | Kind::Real | Kind::Rational | Kind::Gaussian))
        .value_parser(move |s: &str| checker.check(s).map(|_| s.to_string()));
    if p.list {
        a = a.action(ArgAction::Append).value_delimiter(',');
    } else {
        a = a.action(ArgAction::Set);
    }
    match p.presence {
        Presence::Required => a.required(true),
        Presence::Optional => a,
        Presence::Default(d) => a.default_value(d),
    }
}

pub fn build_cli() -> Command {
    let mut cli = Command::new("sectorlab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Gaussian primes in narrow sectors: experiments and exact checks")
        .arg(Arg::new("config").long("config").global(true).value_name("FILE").help("run a TOML configuration"))
        .arg(
            Arg::new("threads")
                .long("threads")
                .global(true)
                .value_parser(clap::value_parser!(usize))
                .help("thread budget (fallback SECTORLAB_THREADS)"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .global(true)
                .value_parser(clap::value_parser!(u64))
                .help("seed for sampling experiments"),
        )
        .arg(Arg::new("output").long("output").global(true).value_name("FILE").help("write the JSON report here"))
        .arg(Arg::new("csv").long("csv").global(true).value_name("FILE").help("write the result table here"))
        .arg(
            Arg::new("json")
                .long("json")
                .global(true)
                .action(ArgAction::SetTrue)
                .help("print the JSON report instead of text"),
        );
    let mut density = Command::new("density").about("density estimates and the exponent C").subcommand_required(true);
    for c in schema::commands() {
        let args: Vec<Arg> = c.params.iter().map(param_arg).collect();
        match c.path.split_once(' ') {
            Some((_, leaf)) => density = density.subcommand(Command::new(leaf).about(c.about).args(args)),
            None => cli = cli.subcommand(Command::new(c.path).about(c.about).args(args)),
        }
    }
    cli.subcommand(density)
}

/// The chosen command path and its argument matches.
fn leaf(m: &ArgMatches) -> Option<(String, &ArgMatches)> {
    let (name, sub) = m.subcommand()?;
    match sub.subcommand() {
        Some((inner, leaf)) => Some((format!("{name} {inner}"), leaf)),
        None => Some((name.to_string(), sub)),
    }
}

fn echo_params(path: &str, m: &ArgMatches) -> std::collections::BTreeMap<String, ParamValue> {
    let mut out = std::collections::BTreeMap::new();
    let Some(schema) = schema::find(path) else { return out };
    for p in &schema.params {
        let value = if p.kind == Kind::Flag {
            m.get_flag(p.name).then_some(ParamValue::Flag(true))
        } else if p.list {
            m.get_many::<String>(p.name).map(|v| ParamValue::Many(v.cloned().collect()))
        } else {
            m.get_one::<String>(p.name).map(|v| ParamValue::One(v.clone()))
        };
        if let Some(v) = value {
            out.insert(p.name.to_string(), v);
        }
    }
    out
}

/// Best guess at the command the user meant, for usage messages.
fn attempted_path(argv: &[OsString]) -> Option<String> {
    let words: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let names: Vec<String> = schema::commands().into_iter().map(|c| c.path.to_string()).collect();
    for (i, w) in words.iter().enumerate() {
        if w == "density" {
            if let Some(next) = words.get(i + 1) {
                let full = format!("density {next}");
                if names.contains(&full) {
                    return Some(full);
                }
            }
        }
        if names.contains(w) {
            return Some(w.clone());
        }
    }
    None
}

fn usage(err: &mut dyn Write, message: &str, path: Option<&str>) -> i32 {
    let message = message.trim_end();
    let message = message.strip_prefix("error: ").unwrap_or(message);
    let _ = writeln!(err, "error: {message}");
    let _ = writeln!(err);
    let _ = write!(err, "{}", schema::render(path));
    2
}

fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got {s:?}")),
        },
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let top = match build_cli().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let path = attempted_path(&argv);
            return usage(err, &e.render().to_string(), path.as_deref());
        }
    };

    let file_config = match top.get_one::<String>("config") {
        None => None,
        Some(path) => {
            if top.subcommand().is_some() {
                return usage(err, "--config replaces the subcommand; give one or the other", None);
            }
            match load_config(&PathBuf::from(path)) {
                Ok(c) => Some(c),
                Err(e) => return usage(err, &e.to_string(), None),
            }
        }
    };
    let reparsed;
    let matches = match &file_config {
        Some(c) => match build_cli().try_get_matches_from(c.to_argv()) {
            Ok(m) => {
                reparsed = m;
                &reparsed
            }
            Err(e) => return usage(err, &e.render().to_string(), Some(&c.command)),
        },
        None => &top,
    };
    let Some((path, leaf_matches)) = leaf(matches) else {
        return usage(err, "no command given", None);
    };

    let env_threads = match threads_from_env() {
        Ok(t) => t,
        Err(msg) => return usage(err, &msg, Some(&path)),
    };
    let threads =
        top.get_one::<usize>("threads").copied().or(file_config.as_ref().and_then(|c| c.threads)).or(env_threads);
    if threads == Some(0) {
        return usage(err, "--threads must be at least 1", Some(&path));
    }
    let seed = top.get_one::<u64>("seed").copied().or(file_config.as_ref().map(|c| c.seed)).unwrap_or(0);
    let pick = |key: &str, from_file: Option<&PathBuf>| -> Option<PathBuf> {
        top.get_one::<String>(key).map(PathBuf::from).or_else(|| from_file.cloned())
    };
    let output = pick("output", file_config.as_ref().and_then(|c| c.output.as_ref()));
    let csv = pick("csv", file_config.as_ref().and_then(|c| c.csv.as_ref()));
    let json = top.get_flag("json");

    let echo = RunConfig {
        command: path.clone(),
        seed,
        threads,
        output: output.clone(),
        csv: csv.clone(),
        params: echo_params(&path, leaf_matches),
    };

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return 1;
        }
    };
    let start = Instant::now();
    let outcome = pool.install(|| commands::execute(&path, &Args::new(leaf_matches), seed));
    let outcome = match outcome {
        Ok(o) => o,
        Err(e @ CmdError::Usage(_)) => return usage(err, &e.to_string(), Some(&path)),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let report = RunReport::new(echo, outcome.results, outcome.checks, start.elapsed().as_secs_f64());

    if json {
        let _ = write!(out, "{}", report.to_json());
    } else {
        let _ = write!(out, "{}", outcome.text);
        for c in &report.checks {
            let _ = writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
    }
    if let Some(p) = &output {
        if let Err(e) = write_report(&report, p) {
            let _ = writeln!(err, "error: cannot write report {}: {e}", p.display());
            return 1;
        }
    }
    if let Some(p) = &csv {
        let written = match &outcome.table {
            Some(t) => t.to_csv().and_then(|bytes| write_atomic(p, &bytes)),
            None => Err(std::io::Error::new(std::io::ErrorKind::Unsupported, format!("{path} produces no table"))),
        };
        if let Err(e) = written {
            let _ = writeln!(err, "error: cannot write csv {}: {e}", p.display());
            return 1;
        }
    }
    if report.passed {
        0
    } else {
        1
    }
}
