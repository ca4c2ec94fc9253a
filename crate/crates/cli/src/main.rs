use std::path::PathBuf;
use std::process::ExitCode;

use agentpred::Exec;
use clap::{Parser, Subcommand};

mod elicit;
mod eq;
mod eval;
mod family;
mod io;
mod optimize;
mod run;

#[derive(Parser)]
#[command(name = "agentpred", version, about = "Money-request games, equilibrium benchmarks and agent-population prediction")]
struct Cli {
    /// Refuse any network access.
    #[arg(long, global = true)]
    offline: bool,
    /// Run the acceptance checks after the command; exit nonzero on failure.
    #[arg(long, global = true)]
    check: bool,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate, deduplicate or sample the game family.
    #[command(subcommand)]
    Family(family::FamilyCmd),
    /// Render or tabulate one game.
    #[command(subcommand)]
    Game(family::GameCmd),
    /// Enumerate and select equilibria.
    #[command(subcommand)]
    Eq(eq::EqCmd),
    /// Elicit response distributions from an agent model.
    Elicit(elicit::ElicitArgs),
    /// Fit agent populations to target distributions.
    #[command(subcommand)]
    Optimize(optimize::OptimizeCmd),
    /// Compare predictive models on human responses.
    #[command(subcommand)]
    Eval(eval::EvalCmd),
    /// Execute a run manifest end to end.
    Run(run::RunArgs),
}

pub struct Globals {
    pub offline: bool,
    pub exec: Exec,
}

/// Output target: a file when given, else stdout.
pub fn emit(out: Option<&PathBuf>, body: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, body)?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn dispatch(cmd: Command, g: &Globals) -> anyhow::Result<bool> {
    match cmd {
        Command::Family(c) => family::family(c, g).map(|_| true),
        Command::Game(c) => family::game(c).map(|_| true),
        Command::Eq(c) => eq::eq(c, g).map(|_| true),
        Command::Elicit(a) => elicit::elicit(a, g).map(|_| true),
        Command::Optimize(c) => optimize::optimize(c, g).map(|_| true),
        Command::Eval(c) => eval::eval(c, g),
        Command::Run(a) => run::run(a, g).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = Globals { offline: cli.offline, exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel } };
    if cli.command.is_none() && !cli.check {
        eprintln!("nothing to do; pass a subcommand or --check (see --help)");
        return ExitCode::from(2);
    }
    let mut ok = true;
    if let Some(cmd) = cli.command {
        match dispatch(cmd, &g) {
            Ok(passed) => ok &= passed,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::FAILURE;
            }
        }
    }
    if cli.check {
        for line in agentpred::pipeline::quick_checks(0) {
            println!("{line}");
            ok &= line.passed;
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
