use std::path::PathBuf;

use agentpred::agents::{
    elicit_distribution, mixture_distribution, AgentModel, PromptSpec, ResponseDistribution, Setting, TraitParam,
};
use agentpred::optimize::{construct_params, select_mixture, Budget, ConstructConfig, DistanceKind, DistanceMeasure, SelectConfig};
use anyhow::{bail, Context, Result};
use clap::Subcommand;
use serde::Deserialize;
use serde_json::json;

use crate::elicit::BackendArgs;
use crate::{emit, io, Globals};

fn parse_measure(s: &str) -> Result<DistanceKind, String> {
    DistanceKind::parse(s).map_err(|e| e.to_string())
}

fn parse_budget(s: &str) -> Result<Budget, String> {
    Budget::parse(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
pub enum OptimizeCmd {
    /// Mixture weights over fixed candidate distributions.
    Select {
        /// Directory of candidate distributions, one JSON file each.
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value = "cdf-abs", value_parser = parse_measure)]
        measure: DistanceKind,
        /// Mix ε of uniform into predictions before measuring.
        #[arg(long)]
        smoothing: Option<f64>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integer trait values for a parametrised persona template.
    Construct {
        /// Persona template (prompt spec JSON).
        #[arg(long)]
        template: PathBuf,
        /// `{"slots": n, "parameters": [{"name", "min", "max"}]}`; the
        /// parameters replace the template's.
        #[arg(long = "box")]
        bounds: Option<PathBuf>,
        /// JSON array of `{"setting", "target"}` pairs.
        #[arg(long)]
        targets: PathBuf,
        #[arg(long, default_value = "5+15", value_parser = parse_budget)]
        budget: Budget,
        #[arg(long, default_value = "cdf-abs", value_parser = parse_measure)]
        measure: DistanceKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draws per persona and setting.
        #[arg(long, default_value_t = 100)]
        n: u64,
        #[arg(long, default_value = "gpt-4o")]
        model: String,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[command(flatten)]
        backend: BackendArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Deserialize)]
struct BoxFile {
    #[serde(default = "one")]
    slots: usize,
    #[serde(default)]
    parameters: Vec<TraitParam>,
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
struct TargetPair {
    setting: Setting,
    target: ResponseDistribution,
}

pub fn optimize(cmd: OptimizeCmd, g: &Globals) -> Result<()> {
    match cmd {
        OptimizeCmd::Select { candidates, target, measure, smoothing, restarts, seed, out } => {
            let files = io::json_files(&candidates)?;
            if files.is_empty() {
                bail!("no candidate files in {}", candidates.display());
            }
            let names: Vec<String> =
                files.iter().map(|f| f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()).collect();
            let cands = files.iter().map(|f| io::read_json(f)).collect::<Result<Vec<ResponseDistribution>>>()?;
            let target: ResponseDistribution = io::read_json(&target)?;
            let measure = DistanceMeasure { kind: measure, smoothing };
            let cfg = SelectConfig { restarts, exec: g.exec, ..SelectConfig::default() };
            let fit = select_mixture(&cands, &target, &measure, seed, &cfg)?;
            let body = json!({ "candidate_files": names, "fit": fit });
            emit(out.as_ref(), &(serde_json::to_string_pretty(&body)? + "\n"))
        }
        OptimizeCmd::Construct {
            template,
            bounds,
            targets,
            budget,
            measure,
            seed,
            n,
            model,
            temperature,
            backend,
            out,
        } => {
            let mut template: PromptSpec = io::read_json(&template)?;
            let mut slots = 1;
            if let Some(p) = bounds {
                let b: BoxFile = io::read_json(&p)?;
                slots = b.slots;
                if !b.parameters.is_empty() {
                    template.parameters = b.parameters;
                }
            }
            let pairs: Vec<TargetPair> = io::read_json(&targets)?;
            let settings: Vec<Setting> = pairs.iter().map(|p| p.setting.clone()).collect();
            let goals: Vec<ResponseDistribution> = pairs.into_iter().map(|p| p.target).collect();
            let ctx = backend.context(g)?;
            let backend_name = backend.name();
            let mut cfg = ConstructConfig::new(budget, seed);
            cfg.exec = g.exec;
            let measure = DistanceMeasure::new(measure);
            let fit = construct_params(&template, slots, &goals, &measure, &cfg, |prompts| {
                let weights = vec![1.0 / prompts.len() as f64; prompts.len()];
                settings
                    .iter()
                    .map(|setting| {
                        let parts = prompts
                            .iter()
                            .map(|p| {
                                let agent = AgentModel::BackendPersona {
                                    prompt: p.clone(),
                                    backend: backend_name.into(),
                                    model: model.clone(),
                                    temperature,
                                };
                                elicit_distribution(&agent, setting, n, seed, &ctx)
                            })
                            .collect::<agentpred::Result<Vec<_>>>()?;
                        mixture_distribution(&parts, &weights)
                    })
                    .collect()
            })
            .context("parameter construction")?;
            emit(out.as_ref(), &(serde_json::to_string_pretty(&fit)? + "\n"))
        }
    }
}
