use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lancor_cli::config::{parse_config_with, CONFIG_HELP};
use lancor_cli::run::{execute, Action};

#[derive(Parser)]
#[command(
    name = "lancor",
    version,
    about = "Workbench for estimation-corrected locally asymptotic tests on AR and ARCH series"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
#[command(after_help = CONFIG_HELP)]
struct RunArgs {
    /// Experiment config file (flat key=value lines)
    #[arg(long)]
    config: PathBuf,

    /// Directory receiving emitted files (default: current directory)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override one config key, e.g. --set replicates=100 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Override the master seed from the config
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one series per configured sample size and write each as CSV
    Simulate(RunArgs),
    /// Fit the autoregression per size; report estimates and intervals
    Estimate(RunArgs),
    /// Decide the test once per flavor on a single path per size
    Test(RunArgs),
    /// Monte Carlo power curve under the local alternative (CSV + SVG)
    Power(RunArgs),
    /// Monte Carlo size curve under the null (CSV + SVG)
    Size(RunArgs),
    /// Per-coordinate confidence-interval coverage at each size
    Coverage(RunArgs),
    /// Quadrature residuals of the score-family moment identities
    CheckRegularity(RunArgs),
    /// Compare analytic central-sequence gradients with finite differences
    GradCheck(RunArgs),
}

fn split(cmd: Cmd) -> (Action, RunArgs) {
    match cmd {
        Cmd::Simulate(a) => (Action::Simulate, a),
        Cmd::Estimate(a) => (Action::Estimate, a),
        Cmd::Test(a) => (Action::Test, a),
        Cmd::Power(a) => (Action::Power, a),
        Cmd::Size(a) => (Action::Size, a),
        Cmd::Coverage(a) => (Action::Coverage, a),
        Cmd::CheckRegularity(a) => (Action::CheckRegularity, a),
        Cmd::GradCheck(a) => (Action::GradCheck, a),
    }
}

fn exit_code(err: &lancor::Error) -> u8 {
    match err {
        lancor::Error::Parse { .. } | lancor::Error::Io(_) => 1,
        _ => 2,
    }
}

fn dispatch(cli: Cli) -> lancor::Result<String> {
    let (action, args) = split(cli.cmd);
    let text = std::fs::read_to_string(&args.config)?;
    let cfg = parse_config_with(&text, &args.set, args.seed)?;
    let out = args.out.unwrap_or_else(|| PathBuf::from("."));
    execute(action, &cfg, &out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
