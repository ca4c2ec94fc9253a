use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::Rng as _;

use super::evaluate::{evaluate, EvalGame, EvaluationReport, NashEntry};
use super::humans::{ingest_human_csv, HumanDataset, HumanGame, HumanResponse};
use super::manifest::{GameSource, HumanSource, ModelSource, RunManifest};
use crate::agents::{elicit_distribution, AgentModel, ElicitContext, ResponseDistribution, Setting};
use crate::equilibria::{hs_select, Provenance};
use crate::error::{Error, Result};
use crate::games::{dedup_family, sample_games, FamilyConfig, GameSpec, SymmetricGame};
use crate::par::{self, Exec};
use crate::seed;

pub struct RunOutput {
    pub manifest: RunManifest,
    pub manifest_hash: String,
    pub humans: HumanDataset,
    pub games: Vec<EvalGame>,
    pub report: EvaluationReport,
}

/// Family games named by the manifest, in run order.
pub fn prepare_games(manifest: &RunManifest) -> Result<Vec<GameSpec>> {
    match &manifest.config.games {
        GameSource::Sample { offsets, scheme, count } => {
            let pop = dedup_family(&FamilyConfig::preset(*offsets), Exec::default());
            let seed = seed::derive(manifest.config.root_seed, "pipeline/games", "sample", 0);
            Ok(sample_games(&pop, *count, *scheme, seed)?.specs().copied().collect())
        }
        GameSource::Specs { ids } => ids.iter().map(|id| GameSpec::from_id(id)).collect(),
    }
}

fn simulate_humans(
    model: &AgentModel,
    per_game: u64,
    settings: &[(String, Setting)],
    root: u64,
    ctx: &ElicitContext,
) -> Result<HumanDataset> {
    let model_seed = seed::derive(root, "pipeline/humans", "model", 0);
    let games = par::map(Exec::default(), settings, |(id, setting)| {
        let dist = elicit_distribution(model, setting, per_game, model_seed, ctx)?;
        let mut rng = seed::derived_rng(root, "pipeline/humans", id, 0);
        let responses = (0..per_game)
            .map(|j| {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let idx = dist.probs.iter().position(|p| {
                    acc += p;
                    u < acc
                });
                let idx = idx.unwrap_or_else(|| dist.probs.iter().rposition(|p| *p > 0.0).unwrap_or(0));
                HumanResponse { subject: format!("sim{:04}", j + 1), action: setting.actions[idx].clone() }
            })
            .collect();
        HumanGame::new(id.clone(), setting.clone(), responses)
    });
    Ok(HumanDataset {
        source: "simulated".into(),
        games: games.into_iter().collect::<Result<_>>()?,
        notes: vec![format!("drawn from a {} model", model.label())],
        filter_report: Default::default(),
    })
}

fn model_distributions(
    name: &str,
    source: &ModelSource,
    settings: &[(String, Setting)],
    base: &Path,
    root: u64,
    ctx: &ElicitContext,
) -> Result<Vec<ResponseDistribution>> {
    match source {
        ModelSource::Agent { model, draws } => {
            let s = seed::derive(root, "pipeline/models", name, 0);
            par::map(Exec::default(), settings, |(_, setting)| elicit_distribution(model, setting, *draws, s, ctx))
                .into_iter()
                .collect()
        }
        ModelSource::File { path } => {
            let table: BTreeMap<String, ResponseDistribution> = serde_json::from_slice(&std::fs::read(base.join(path))?)?;
            settings
                .iter()
                .map(|(id, setting)| {
                    let d = table
                        .get(id)
                        .ok_or_else(|| Error::MissingModelDistribution { game: id.clone(), model: name.into() })?;
                    if d.actions != setting.actions {
                        return Err(Error::MismatchedSettings);
                    }
                    Ok(d.clone())
                })
                .collect()
        }
    }
}

fn nash_entry(spec: &GameSpec, setting: &Setting, manifest: &RunManifest) -> Result<NashEntry> {
    let game = SymmetricGame::from_spec(spec)?;
    let outcome = hs_select(&game, &manifest.config.selector)?;
    Ok(match outcome.strategy() {
        Some(s) if outcome.provenance != Provenance::Unresolved => NashEntry::Selected {
            distribution: ResponseDistribution::from_probs(setting, s.to_f64(), 1.0)?,
            pure: s.is_pure(),
            provenance: outcome.provenance,
        },
        _ => NashEntry::Unresolved {
            reason: outcome.diagnostics.unresolved_reason.unwrap_or_else(|| "no equilibrium selected".into()),
        },
    })
}

/// Executes a manifest; file paths resolve against `base`.
pub fn run_manifest(manifest: &RunManifest, base: &Path, ctx: &ElicitContext) -> Result<RunOutput> {
    let mut manifest = manifest.clone();
    manifest.resolve_inputs(base)?;
    let hash = manifest.hash();
    let cfg = &manifest.config;
    let root = cfg.root_seed;

    let specs = prepare_games(&manifest)?;
    let all_settings: Vec<(String, Setting)> = specs.iter().map(|s| (s.id(), Setting::from_spec(s))).collect();
    let humans = match &cfg.humans {
        HumanSource::Csv { path, filters } => {
            let map: BTreeMap<String, Setting> = all_settings.iter().cloned().collect();
            ingest_human_csv(&base.join(path), &map, *filters)?
        }
        HumanSource::Simulated { model, responses_per_game } => {
            simulate_humans(model, *responses_per_game, &all_settings, root, ctx)?
        }
    };

    // Keep manifest order, dropping games nobody answered.
    let kept: Vec<(GameSpec, (String, Setting))> = specs
        .iter()
        .zip(&all_settings)
        .filter(|(_, (id, _))| humans.game(id).is_some())
        .map(|(s, st)| (*s, st.clone()))
        .collect();
    let settings: Vec<(String, Setting)> = kept.iter().map(|(_, st)| st.clone()).collect();

    let optimized = model_distributions("optimized", &cfg.optimized, &settings, base, root, ctx)?;
    let baseline = model_distributions("baseline", &cfg.baseline, &settings, base, root, ctx)?;
    let random = AgentModel::RandomPure { seed: seed::derive(root, "pipeline/random_pure", "model", 0) };
    let nash: Vec<NashEntry> = par::map(Exec::default(), &kept, |(spec, (_, setting))| nash_entry(spec, setting, &manifest))
        .into_iter()
        .collect::<Result<_>>()?;

    let mut games = Vec::with_capacity(kept.len());
    for (i, ((spec, (id, setting)), nash)) in kept.iter().zip(nash).enumerate() {
        games.push(EvalGame {
            game_id: id.clone(),
            spec: Some(*spec),
            responses: humans.game(id).expect("kept games have responses").actions(),
            optimized: optimized[i].clone(),
            baseline: baseline[i].clone(),
            nash,
            uniform: ResponseDistribution::uniform(setting),
            random_pure: elicit_distribution(&random, setting, 1, root, ctx)?,
        });
    }
    let report = evaluate(&games, cfg, &hash)?;
    Ok(RunOutput { manifest, manifest_hash: hash, humans, games, report })
}

/// Writes manifest.json, report.json, report.md, per_game.csv and
/// humans.csv; each embeds the manifest hash.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    let manifest = serde_json::json!({ "manifest_hash": out.manifest_hash, "manifest": out.manifest });
    put("manifest.json", serde_json::to_string_pretty(&manifest)? + "\n")?;
    put("report.json", out.report.to_json()?)?;
    put("report.md", out.report.to_markdown())?;
    put("per_game.csv", out.report.per_game_csv()?)?;
    let mut humans = format!("# manifest {}\n", out.manifest_hash).into_bytes();
    out.humans.write_csv(&mut humans)?;
    put("humans.csv", String::from_utf8(humans).expect("csv output is utf-8"))?;
    Ok(written)
}
