use std::collections::BTreeMap;
use std::path::PathBuf;

use agentpred::agents::ResponseDistribution;
use agentpred::games::GameSpec;
use agentpred::pipeline::published::reproduce_grid;
use agentpred::pipeline::HumanDataset;
use agentpred::stats::report::{comparison_table, comparisons_csv, coverage_table, grid_table, regression_table};
use agentpred::stats::{
    aggregate, game_llr, smooth, subgroup_regression, support_coverage, AggregateConfig, ComparisonReport, Factor,
    GameComparison, HcFlavor, EPSILON_GRID, HEADLINE_EPSILON,
};
use agentpred::Error;
use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use serde_json::json;

use crate::{emit, io, Globals};

#[derive(Args)]
pub struct PairArgs {
    /// Responses CSV with game_id, subject_id, action columns.
    #[arg(long)]
    humans: PathBuf,
    /// Distributions keyed by game id: a JSON file or a directory.
    #[arg(long)]
    model_a: PathBuf,
    #[arg(long)]
    model_b: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    bootstrap: usize,
    #[arg(long, default_value_t = 100_000)]
    permutations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write JSON here; Markdown goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum EvalCmd {
    /// Mean log likelihood ratio of model A over model B.
    Compare {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = HEADLINE_EPSILON)]
        epsilon: f64,
        /// Per-game ratios as CSV.
        #[arg(long)]
        per_game: Option<PathBuf>,
    },
    /// The comparison across smoothing levels.
    Grid {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_delimiter = ',', default_values_t = EPSILON_GRID)]
        epsilons: Vec<f64>,
    },
    /// How often human responses fall in a model's support.
    Coverage {
        #[arg(long)]
        humans: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regress per-game log ratios on game characteristics.
    Regress {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = HEADLINE_EPSILON)]
        epsilon: f64,
        #[arg(long, value_delimiter = ',', default_value = "points_rule,bonus_rule", value_parser = parse_factor)]
        by: Vec<Factor>,
        #[arg(long)]
        hc0: bool,
    },
    /// Re-derive the bundled published tables; fails on any mismatch.
    Published {
        #[arg(long, default_value_t = 10_000)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_factor(s: &str) -> Result<Factor, String> {
    Factor::parse(s).map_err(|e| e.to_string())
}

struct Loaded {
    humans: HumanDataset,
    a: BTreeMap<String, ResponseDistribution>,
    b: BTreeMap<String, ResponseDistribution>,
}

impl PairArgs {
    fn load(&self) -> Result<Loaded> {
        let a = io::read_models(&self.model_a)?;
        let b = io::read_models(&self.model_b)?;
        let mut both = b.clone();
        both.extend(a.clone());
        let humans = io::read_humans(&self.humans, &both)?;
        Ok(Loaded { humans, a, b })
    }

    fn config(&self, g: &Globals, index: u64) -> AggregateConfig {
        let mut cfg = AggregateConfig::new(agentpred::seed::derive(self.seed, "cli/eval", "aggregate", index));
        cfg.bootstrap_draws = self.bootstrap;
        cfg.permutation_iterations = self.permutations;
        cfg.exec = g.exec;
        cfg
    }
}

fn model_for<'m>(models: &'m BTreeMap<String, ResponseDistribution>, id: &str, name: &str) -> Result<&'m ResponseDistribution> {
    models
        .get(id)
        .ok_or_else(|| Error::MissingModelDistribution { game: id.into(), model: name.into() }.into())
}

fn comparisons(data: &Loaded, epsilon: f64) -> Result<Vec<GameComparison>> {
    data.humans
        .games
        .iter()
        .map(|game| {
            let a = smooth(model_for(&data.a, &game.game_id, "model-a")?, epsilon)?;
            let b = smooth(model_for(&data.b, &game.game_id, "model-b")?, epsilon)?;
            Ok(game_llr(&game.game_id, &game.actions(), &a, &b)?)
        })
        .collect()
}

fn label(pair: &PairArgs) -> String {
    let stem = |p: &PathBuf| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    format!("{} vs {}", stem(&pair.model_a), stem(&pair.model_b))
}

pub fn eval(cmd: EvalCmd, g: &Globals) -> Result<bool> {
    match cmd {
        EvalCmd::Compare { pair, epsilon, per_game } => {
            let data = pair.load()?;
            let comps = comparisons(&data, epsilon)?;
            let report = aggregate(&comps, &pair.config(g, 0))?;
            println!("{}", comparison_table(&[(label(&pair), &report)]));
            if let Some(path) = per_game {
                emit(Some(&path), &comparisons_csv(&comps)?)?;
            }
            let body = json!({ "epsilon": epsilon, "report": report });
            write_json(pair.out.as_ref(), &body)?;
        }
        EvalCmd::Grid { pair, epsilons } => {
            let data = pair.load()?;
            let reports = epsilons
                .iter()
                .enumerate()
                .map(|(i, &eps)| Ok(aggregate(&comparisons(&data, eps)?, &pair.config(g, i as u64))?))
                .collect::<Result<Vec<ComparisonReport>>>()?;
            println!("{}", grid_table(&epsilons, &[(label(&pair), reports.iter().collect())]));
            let rows: Vec<_> = epsilons.iter().zip(&reports).map(|(e, r)| json!({ "epsilon": e, "report": r })).collect();
            write_json(pair.out.as_ref(), &json!(rows))?;
        }
        EvalCmd::Coverage { humans, model, out } => {
            let models = io::read_models(&model)?;
            let data = io::read_humans(&humans, &models)?;
            let responses: Vec<_> = data.games.iter().map(|game| game.actions()).collect();
            let rows = data
                .games
                .iter()
                .zip(&responses)
                .map(|(game, ys)| Ok((ys.as_slice(), model_for(&models, &game.game_id, "model")?)))
                .collect::<Result<Vec<_>>>()?;
            let summary = support_coverage(&rows)?;
            let name = model.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            println!("{}", coverage_table(&[(name, &summary)]));
            write_json(out.as_ref(), &json!(summary))?;
        }
        EvalCmd::Regress { pair, epsilon, by, hc0 } => {
            let data = pair.load()?;
            let rows = comparisons(&data, epsilon)?
                .into_iter()
                .map(|c| {
                    let spec = GameSpec::from_id(&c.game_id)
                        .with_context(|| format!("regression needs family game ids, got {:?}", c.game_id))?;
                    Ok((c.llr, spec))
                })
                .collect::<Result<Vec<_>>>()?;
            let fit = subgroup_regression(&rows, &by, if hc0 { HcFlavor::Hc0 } else { HcFlavor::Hc1 })?;
            println!("{}", regression_table(&fit));
            write_json(pair.out.as_ref(), &json!({ "epsilon": epsilon, "fit": fit }))?;
        }
        EvalCmd::Published { bootstrap, seed } => {
            let mut cfg = AggregateConfig::new(seed);
            cfg.bootstrap_draws = bootstrap;
            cfg.permutation_iterations = 10_000;
            cfg.exec = g.exec;
            let mut ok = true;
            for c in reproduce_grid(&cfg)? {
                ok &= c.matches;
                println!(
                    "{} eps={} {}: mean {:.3}/{:.3} se {:.3}/{:.3} share {:.3}/{:.3} (bootstrap se {:.3})",
                    if c.matches { "PASS" } else { "FAIL" },
                    c.epsilon,
                    c.comparison,
                    c.report.mean_llr,
                    c.published.mean,
                    c.report.sample_se,
                    c.published.se,
                    c.report.best_predictor.proportion,
                    c.published.proportion,
                    c.report.bootstrap_se,
                );
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn write_json(out: Option<&PathBuf>, body: &serde_json::Value) -> Result<()> {
    if let Some(path) = out {
        emit(Some(path), &(serde_json::to_string_pretty(body)? + "\n"))?;
    }
    Ok(())
}
