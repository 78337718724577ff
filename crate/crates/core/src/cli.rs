//! Command-line front end. [`run_cli`] does all the work and returns the exit
//! code so it can be driven from tests without spawning a process.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::scenario::{self, ScenarioSpec, CROSS_CHECK_TOL};
use crate::timesym::ProcessTag;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ppse", version, about = "Pre- and post-selected ensemble simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a scenario and print its report.
    Run {
        #[command(flatten)]
        input: Input,
        /// Run every builtin scenario.
        #[arg(long, conflicts_with_all = ["builtin", "file"])]
        all_builtins: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Compare the forward weights with the reverse-time processes.
    CheckTimesym {
        #[command(flatten)]
        input: Input,
        /// Processes to run, e.g. `--process i,ii,iii`.
        #[arg(long, value_delimiter = ',', value_parser = parse_process)]
        process: Option<Vec<ProcessTag>>,
        #[command(flatten)]
        tol: TolArg,
    },
    /// List the builtin scenario names.
    ListBuiltins,
    /// Print a builtin scenario in the scenario language.
    RenderBuiltin { name: String },
    /// Parse and check a scenario without running it.
    Validate {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Args, Debug)]
pub struct Input {
    #[arg(long, conflicts_with = "file")]
    pub builtin: Option<String>,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TolArg {
    /// Numerical tolerance for the scenario's checks.
    #[arg(long, env = "PPSE_TOL")]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

fn parse_process(s: &str) -> Result<ProcessTag, String> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    ProcessTag::parse(s).ok_or_else(|| format!("unknown process `{s}` (expected i … viii)"))
}

enum Failure {
    Usage(String),
    Typed(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Typed(e)
    }
}

fn load(input: &Input, err: &mut dyn Write) -> Result<ScenarioSpec, Failure> {
    match (&input.builtin, &input.file) {
        (Some(name), None) => Ok(scenario::builtin(name)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let (spec, warnings) = scenario::parse_with_warnings(&text)?;
            for w in warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            Ok(spec)
        }
        _ => Err(Failure::Usage("give exactly one of --builtin NAME or --file PATH".into())),
    }
}

fn apply_tol(spec: &mut ScenarioSpec, tol: &TolArg) -> Result<(), Failure> {
    if let Some(t) = tol.tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(Failure::Usage(format!("--tol must lie in (0, 1), got {t}")));
        }
        spec.options.tol = t;
    }
    Ok(())
}

fn format_report(r: &scenario::RunReport, format: Format) -> String {
    match format {
        Format::Table => r.to_table(),
        Format::Json => r.to_json() + "\n",
        Format::Csv => r.to_csv(),
    }
}

fn run_all(format: Format, tol: &TolArg) -> Result<String, Failure> {
    let mut specs = Vec::new();
    for name in scenario::BUILTINS {
        let mut spec = scenario::builtin(name)?;
        apply_tol(&mut spec, tol)?;
        specs.push(spec);
    }
    // scenarios are independent, so run them side by side
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = specs.iter().map(|spec| s.spawn(move || scenario::run(spec))).collect();
        handles.into_iter().map(|h| h.join().expect("runner thread")).collect()
    });
    let reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&reports).expect("reports serialise") + "\n",
        Format::Csv => {
            let mut s = String::new();
            for r in &reports {
                for (i, line) in r.to_csv().lines().enumerate() {
                    if i == 0 {
                        if s.is_empty() {
                            s.push_str("scenario,");
                            s.push_str(line);
                            s.push('\n');
                        }
                        continue;
                    }
                    s.push_str(&format!("{},{line}\n", r.scenario));
                }
            }
            s
        }
        Format::Table => reports.iter().map(|r| r.to_table()).collect::<Vec<_>>().join("\n"),
    })
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::ListBuiltins => {
            for n in scenario::builtin_names() {
                let _ = writeln!(out, "{n}");
            }
        }
        Command::RenderBuiltin { name } => {
            let _ = write!(out, "{}", scenario::render(&scenario::builtin(&name)?));
        }
        Command::Validate { input } => {
            let spec = load(&input, err)?;
            spec.build()?;
            let _ = writeln!(out, "ok: {}", spec.name);
        }
        Command::Run { input, all_builtins, format, tol } => {
            if all_builtins {
                let _ = write!(out, "{}", run_all(format, &tol)?);
            } else {
                let mut spec = load(&input, err)?;
                apply_tol(&mut spec, &tol)?;
                let report = scenario::run(&spec)?;
                let _ = write!(out, "{}", format_report(&report, format));
            }
        }
        Command::CheckTimesym { input, process, tol } => {
            let mut spec = load(&input, err)?;
            apply_tol(&mut spec, &tol)?;
            let threshold = CROSS_CHECK_TOL.max(spec.options.tol);
            let report = scenario::run_timesym(&spec, process.as_deref())?;
            let forward = scenario::run(&spec)?;
            let _ = writeln!(out, "scenario {}", spec.name);
            for e in &forward.eigenvalues {
                let _ = writeln!(out, "Prob[k={}] = {:.6}", e.k, e.prob);
            }
            let _ = write!(out, "{}", scenario::timesym_table(&report, threshold));
            if !report.passes(threshold) {
                return Ok(EXIT_ERROR);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parse `args` (including the program name) and execute. Returns the exit
/// code: 0 success, 1 scenario error or failed check, 2 usage or I/O error.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Typed(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_cli(std::iter::once("ppse").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn list() {
        let (code, out, _) = call(&["list-builtins"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), scenario::BUILTINS.len());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["run"]).0, EXIT_USAGE);
        assert_eq!(call(&["run", "--file", "/no/such/file.ppse"]).0, EXIT_USAGE);
    }

    #[test]
    fn unknown_builtin_is_typed() {
        let (code, _, err) = call(&["run", "--builtin", "no-such"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("unknown builtin"));
    }
}
