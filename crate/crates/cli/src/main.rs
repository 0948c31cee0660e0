use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dissipde_cli::config::BUNDLED;
use dissipde_cli::{exit, prepare, replay, run, CliError, Experiment, Outcome};

#[derive(Parser)]
#[command(name = "dissipde", version, about = "Simulate dissipative stochastic evolution equations and check their semigroup estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Config file, or the name of a bundled config.
    #[arg(long)]
    config: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// `key=value` with a dotted key, e.g. `params.p=1.5`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// One path, written as CSV and binary.
    Simulate(RunArgs),
    /// Coupling by change of measure and the Girsanov weight.
    Couple(RunArgs),
    /// Dimension-free Harnack inequality.
    Harnack(RunArgs),
    /// Gradient estimate for bounded and Lipschitz test functions.
    Gradient(RunArgs),
    /// Time averages under the invariant measure.
    Invariant(RunArgs),
    /// Comparison ODE of the ultraboundedness argument.
    Ultrabound(RunArgs),
    /// Resolvent, Yosida approximation and minimal section on a grid.
    YosidaTable(RunArgs),
    /// Rerun the experiment recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// List the bundled configs.
    Configs,
}

fn execute(experiment: Experiment, a: RunArgs) -> Result<Outcome, CliError> {
    let cfg = prepare(&a.config, &a.overrides, a.seed)?;
    run(experiment, &cfg, &a.out, a.workers)
}

fn summarize(o: &Outcome) {
    for c in &o.report.checks {
        println!("[{}] {} lhs={:e} rhs={:e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.lhs, c.rhs);
    }
    println!(
        "{}: {} ({})",
        o.report.experiment,
        if o.report.pass { "pass" } else { "statistical failure" },
        o.out_dir.display()
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => execute(Experiment::Simulate, a),
        Command::Couple(a) => execute(Experiment::Couple, a),
        Command::Harnack(a) => execute(Experiment::Harnack, a),
        Command::Gradient(a) => execute(Experiment::Gradient, a),
        Command::Invariant(a) => execute(Experiment::Invariant, a),
        Command::Ultrabound(a) => execute(Experiment::Ultrabound, a),
        Command::YosidaTable(a) => execute(Experiment::YosidaTable, a),
        Command::Replay { manifest, workers, out } => replay(&manifest, &out, workers),
        Command::Configs => {
            for b in BUNDLED {
                println!("{:<24} {}", b.name, b.experiment);
            }
            return ExitCode::SUCCESS;
        }
    };
    match result {
        Ok(o) => {
            summarize(&o);
            ExitCode::from(o.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::ERROR as u8)
        }
    }
}
