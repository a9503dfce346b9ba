use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use milnor_core::fixtures::{list_examples, load_fixture, negative_controls};
use milnor_core::par::ExecutionPolicy;
use milnor_core::report::{
    render_json_string, render_text, render_verify_json, render_verify_text,
};
use milnor_core::scenario::{
    run_compute, FormulaSelection, ReportFormat, RunOptions, ScenarioFile,
};
use milnor_core::verify::{run_suites, Suite, DEFAULT_CASES};

/// Milnor classes of singular hypersurfaces, their intersections and
/// projective-bundle sections, computed exactly in Chow rings.
#[derive(Parser)]
#[command(name = "milnor", version)]
struct Cli {
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Fail (exit 1) when formulas, oracles or expected values disagree.
    #[arg(long)]
    strict: bool,
    /// Leave elapsed times out of the report.
    #[arg(long)]
    no_timing: bool,
    /// Print only the JSON rendering.
    #[arg(long)]
    machine: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Compute {
        file: PathBuf,
        /// thm41, cor11, cor12, pp, aluffi, le or all.
        #[arg(long, default_value = "all")]
        formula: String,
        #[command(flatten)]
        out: Output,
    },
    /// Run the property suites.
    Verify {
        /// ring, bundle, classes, lecycles, intersect, projbundle or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CASES)]
        cases: usize,
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        machine: bool,
    },
    /// List the builtin fixtures, or run one.
    Examples {
        #[arg(long)]
        run: Option<String>,
        /// Print a fixture's scenario file instead of running it.
        #[arg(long, conflicts_with = "run")]
        show: Option<String>,
        #[command(flatten)]
        out: Output,
    },
}

fn input_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn emit(file: &ScenarioFile, opts: RunOptions, out: &Output) -> ExitCode {
    let rep = match run_compute(file, &opts) {
        Ok(r) => r,
        Err(e) => return input_error(e),
    };
    if out.machine || file.report_format() == Some(ReportFormat::Machine) {
        println!("{}", render_json_string(&rep));
    } else {
        print!("{}", render_text(&rep));
        println!();
        println!("{}", render_json_string(&rep));
    }
    if out.strict && !rep.pass() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let policy = if cli.sequential {
        ExecutionPolicy::Sequential
    } else {
        ExecutionPolicy::Parallel
    };
    match cli.command {
        Command::Compute { file, formula, out } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return input_error(format!("{}: {e}", file.display())),
            };
            let parsed = match ScenarioFile::from_json(&text) {
                Ok(f) => f,
                Err(e) => return input_error(format!("{}: {e}", file.display())),
            };
            let formulas = match FormulaSelection::parse(&formula) {
                Ok(f) => f,
                Err(e) => return input_error(e),
            };
            let opts = RunOptions {
                formulas,
                policy,
                timing: !out.no_timing,
            };
            emit(&parsed, opts, &out)
        }
        Command::Verify {
            suite,
            seed,
            cases,
            no_timing,
            machine,
        } => {
            let suites = if suite == "all" {
                Vec::new()
            } else {
                match suite.parse::<Suite>() {
                    Ok(s) => vec![s],
                    Err(e) => return input_error(e),
                }
            };
            let rep = run_suites(&suites, seed, cases, policy);
            if machine {
                println!("{:#}", render_verify_json(&rep, !no_timing));
            } else {
                print!("{}", render_verify_text(&rep, !no_timing));
            }
            if rep.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Examples { run, show, out } => match (run, show) {
            (Some(name), _) => match load_fixture(&name) {
                Ok(f) => {
                    let opts = RunOptions {
                        formulas: FormulaSelection::All,
                        policy,
                        timing: !out.no_timing,
                    };
                    emit(&f.file, opts, &out)
                }
                Err(e) => input_error(e),
            },
            (None, Some(name)) => match load_fixture(&name) {
                Ok(f) => {
                    println!("{}", f.file.to_json());
                    ExitCode::SUCCESS
                }
                Err(e) => input_error(e),
            },
            (None, None) => {
                for name in list_examples() {
                    println!("{name}");
                }
                for name in negative_controls() {
                    println!("{name} (negative control)");
                }
                ExitCode::SUCCESS
            }
        },
    }
}
