use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use goto_interval::cli::{run, Emit, OracleMode, RunConfig, EXIT_PARSE};
use goto_interval::domains::{DomainConfig, DomainKind};
use goto_interval::absint::{StorageMode, DEFAULT_ITERATION_CAP};
use goto_interval::concrete::DEFAULT_STEP_LIMIT;
use goto_interval::transform::InstrumentMode;

#[derive(Parser)]
#[command(name = "goto-interval", version, about = "Interval analysis for GOTO programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one program and emit the requested artifacts.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    input: PathBuf,
    #[arg(long, default_value = "integer")]
    domain: DomainKind,
    /// Precise `+ - * /`.
    #[arg(long)]
    arithmetic: bool,
    /// Precise bitwise operators, shifts and casts.
    #[arg(long)]
    bitwise: bool,
    #[arg(long)]
    widening: bool,
    #[arg(long, default_value = "shared_domain_cow")]
    storage: StorageMode,
    #[arg(long, default_value = "none")]
    instrument: InstrumentMode,
    /// Fold singleton expressions and remove unreachable statements.
    #[arg(long)]
    optimize: bool,
    /// annotated, optimized or report-json; may be repeated.
    #[arg(long, default_value = "annotated")]
    emit: Vec<Emit>,
    #[arg(long, default_value = "none")]
    oracle: OracleMode,
    #[arg(long, default_value_t = 8)]
    width_cap: u8,
    #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
    step_limit: u64,
    #[arg(long, default_value_t = DEFAULT_ITERATION_CAP)]
    iteration_cap: u64,
    /// Add wall-clock timings to the JSON report.
    #[arg(long)]
    timings: bool,
}

fn main() -> anyhow::Result<ExitCode> {
    // Usage errors share exit code 1 with invalid programs; clap's own code 2
    // would collide with "analysis cap exceeded".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            e.print()?;
            return Ok(ExitCode::from(code));
        }
    };
    let Command::Run(args) = cli.command;
    let cfg = RunConfig {
        input: args.input,
        domain: DomainConfig {
            domain: args.domain,
            arithmetic: args.arithmetic,
            bitwise: args.bitwise,
            widening: args.widening,
        },
        storage: args.storage,
        instrument: args.instrument,
        optimize: args.optimize,
        emit: args.emit,
        oracle: args.oracle,
        width_cap: args.width_cap,
        step_limit: args.step_limit,
        iteration_cap: args.iteration_cap,
        timings: args.timings,
    };
    let out = run(&cfg);
    print!("{}", out.stdout);
    for d in &out.diagnostics {
        eprintln!("{d}");
    }
    Ok(ExitCode::from(out.exit_code))
}
