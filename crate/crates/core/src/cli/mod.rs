//! Command-line front end: instance files, the verify / solve / oracle / fit
//! commands, and report and trace output.

mod file;
mod run;
mod trace;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use file::{
    parse_instance, validate, ConeSection, FamilyName, Instance, InstanceFile, ParseError,
    RunSection, SpaceSection, SCHEMA_VERSION,
};
pub use run::{run, Command, RunOptions, RunOutcome};
pub use trace::{emit_trace, render_trace, BoundParams, TraceFormat, COLUMNS};

use crate::contractions::{ClassKind, ClassSpec};
use crate::error::Error;
use crate::instances::{instance_a, instance_b, instance_c, instance_d, MappedSpace};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const BUILTIN_NAMES: [&str; 4] = ["instance_a", "instance_b", "instance_c", "instance_d"];

/// A canonical instance with its claimed class and run defaults.
pub fn builtin(name: &str) -> Option<Instance> {
    let (m, class, x0, starts): (MappedSpace, Option<ClassSpec>, f64, Vec<f64>) = match name {
        "instance_a" => (
            instance_a(),
            Some(ClassSpec::Tb { a: 0.5 }),
            1.0,
            vec![0.0, 0.3],
        ),
        "instance_b" => (
            instance_b(),
            Some(ClassSpec::Tb { a: 0.015625 }),
            1.0,
            vec![0.5],
        ),
        "instance_c" => (
            instance_c(),
            Some(ClassSpec::Tw { delta: 0.5, l: 0.5 }),
            0.7,
            vec![0.2, 0.8],
        ),
        "instance_d" => (instance_d(), None, 9.0, vec![]),
        _ => return None,
    };
    Some(Instance {
        name: Some(name.to_string()),
        space: m.space,
        maps: m.maps,
        class,
        run: RunSection {
            x0: Some(vec![x0]),
            starts: starts.into_iter().map(|s| vec![s]).collect(),
            ..RunSection::default()
        },
    })
}

#[derive(Parser, Debug)]
#[command(
    name = "conefix",
    version,
    about = "Cone metric spaces, T-contractions and monitored Picard iteration"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Check the cone and metric axioms and the instance's class inequality.
    Verify(CommonArgs),
    /// Run Picard iteration and certify the limit.
    Solve(CommonArgs),
    /// Exact exhaustive checks on a finite instance.
    Oracle(CommonArgs),
    /// Fit the smallest class constants on the carrier grid.
    Fit(CommonArgs),
    /// Print a built-in instance file.
    Builtin {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(BUILTIN_NAMES))]
        name: String,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Start point, comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Report file; for `solve`, the trace file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report file for `solve`.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: TraceFormat,
    /// Class kind for `fit` (tb, tk, tc, tw, tw_dual, twu).
    #[arg(long)]
    class: Option<String>,
    /// Fixed first constant for the weak classes in `fit`.
    #[arg(long)]
    pin: Option<f64>,
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(path: &Path) -> Result<Instance, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn configure_threads() {
    if let Some(n) = std::env::var("CONEFIX_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Runs the command line and returns the exit status: 0 when every requested
/// check passed, 1 when one failed, 2 on usage or configuration errors.
pub fn execute<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
        }
    };
    configure_threads();
    let (command, args) = match cli.command {
        CliCommand::Verify(a) => (Command::Verify, a),
        CliCommand::Solve(a) => (Command::Solve, a),
        CliCommand::Oracle(a) => (Command::Oracle, a),
        CliCommand::Fit(a) => (Command::Fit, a),
        CliCommand::Builtin { name } => {
            print!("{}", builtin(&name).expect("listed builtin").emit());
            return EXIT_PASS;
        }
    };
    match dispatch(command, &args) {
        Ok(passed) => {
            if passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(msg) => {
            eprintln!("conefix: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, args: &CommonArgs) -> Result<bool, String> {
    let inst = load(&args.instance)?;
    let class = args
        .class
        .as_deref()
        .map(str::parse::<ClassKind>)
        .transpose()
        .map_err(|e| e.to_string())?;
    let opts = RunOptions {
        seed: args.seed,
        samples: args.samples,
        x0: args.x0.clone(),
        epsilon: args.epsilon,
        format: args.format,
        class,
        pin: args.pin,
    };
    let outcome = run(command, &inst, &opts).map_err(|e| e.to_string())?;
    let mut report = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    report.push('\n');
    let (report_path, trace_path) = match command {
        Command::Solve => (args.report.as_deref(), args.out.as_deref()),
        _ => (args.out.as_deref().or(args.report.as_deref()), None),
    };
    match report_path {
        Some(p) => write(p, &report).map_err(|e| e.to_string())?,
        None => print!("{report}"),
    }
    if let (Some(p), Some(trace)) = (trace_path, &outcome.trace) {
        write(p, trace).map_err(|e| e.to_string())?;
    }
    Ok(outcome.passed)
}
