use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lindblad_ancilla::harness::{
    compare, exit, parse_methods, run_with, HarnessError, RunOptions, DEFAULT_COMPARE_TOL,
};
use lindblad_ancilla::scenario::{parse_scenario, Scenario};
use lindblad_ancilla::Tolerances;

/// Time evolution of open quantum systems through the lifted effective Hamiltonian.
#[derive(Parser)]
#[command(name = "lindblad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write observables as CSV.
    Solve {
        scenario: PathBuf,
        /// Output CSV file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace deviation above which rows are flagged.
        #[arg(long, default_value_t = Tolerances::DEFAULT.trace_flag)]
        tol: f64,
    },
    /// Run a scenario with several methods and report deviations as JSON.
    Compare {
        scenario: PathBuf,
        /// Comma-separated list, e.g. `expm,rk4,analytic`.
        #[arg(long)]
        methods: String,
        #[arg(long, default_value_t = DEFAULT_COMPARE_TOL)]
        tol: f64,
    },
    /// Parse and validate a scenario without running it.
    Validate { scenario: PathBuf },
}

fn load(path: &PathBuf) -> Result<Scenario, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    Ok(parse_scenario(&text)?)
}

fn execute(cli: Cli) -> Result<i32, HarnessError> {
    match cli.command {
        Command::Solve { scenario, out, tol } => {
            let s = load(&scenario)?;
            let report = run_with(&s, s.method, RunOptions { trace_tol: tol })?;
            let csv = report.to_csv();
            match out {
                Some(path) => fs::write(&path, csv)
                    .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?,
                None => print!("{csv}"),
            }
            eprintln!("{}", serde_json::to_string(&report.metadata).expect("metadata serializes"));
            Ok(exit::SUCCESS)
        }
        Command::Compare { scenario, methods, tol } => {
            let s = load(&scenario)?;
            let methods = parse_methods(&methods)?;
            let report = compare(&s, &methods, tol)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(report.exit_code())
        }
        Command::Validate { scenario } => {
            let s = load(&scenario)?;
            println!(
                "ok: {} model, dim {}, method {}, {} points, {} observables",
                s.model.kind(),
                s.model.dim(),
                s.method.name(),
                s.times.points,
                s.observables.len()
            );
            Ok(exit::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
