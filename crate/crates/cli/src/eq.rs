use std::path::PathBuf;

use agentpred::equilibria::{enumerate_nash, hs_select, selection_census, SelectorConfig};
use anyhow::Result;
use clap::Subcommand;

use crate::{emit, io, Globals};

#[derive(Subcommand)]
pub enum EqCmd {
    /// Every extreme Nash equilibrium, with exact rational strategies.
    Solve {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The selected symmetric equilibrium and its diagnostics.
    Select {
        #[arg(long)]
        game: PathBuf,
        /// Steps of the logit tracing grid.
        #[arg(long)]
        trace_grid: Option<usize>,
        /// Skip the security-vector filter.
        #[arg(long)]
        no_pareto: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Selection categories over a JSONL population.
    Stats {
        #[arg(long)]
        population: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn eq(cmd: EqCmd, g: &Globals) -> Result<()> {
    let config = SelectorConfig::new();
    match cmd {
        EqCmd::Solve { game, out } => {
            let set = enumerate_nash(&io::read_game(&game)?, &config.nash)?;
            emit(out.as_ref(), &(serde_json::to_string_pretty(&set)? + "\n"))
        }
        EqCmd::Select { game, trace_grid, no_pareto, out } => {
            let mut config = config;
            if let Some(steps) = trace_grid {
                config.trace.steps = steps;
            }
            config.pareto_filter = !no_pareto;
            let outcome = hs_select(&io::read_game(&game)?, &config)?;
            emit(out.as_ref(), &(serde_json::to_string_pretty(&outcome)? + "\n"))
        }
        EqCmd::Stats { population, out } => {
            let specs = io::read_specs(&population)?;
            let census = selection_census(&specs, &config, g.exec)?;
            emit(out.as_ref(), &(serde_json::to_string_pretty(&census)? + "\n"))
        }
    }
}
