use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use agentpred::agents::{ResponseDistribution, Setting};
use agentpred::games::{GameSpec, SymmetricGame};
use agentpred::pipeline::{ingest_human_csv, HumanDataset, IngestFilters};
use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1)))
        .collect()
}

/// JSON files of a directory in file-name order.
pub fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// A spec object, an `{actions, payoff}` object, or a bare payoff matrix.
pub fn read_game(path: &Path) -> Result<SymmetricGame> {
    let value: serde_json::Value = read_json(path)?;
    if let Ok(spec) = serde_json::from_value::<GameSpec>(value.clone()) {
        return Ok(SymmetricGame::from_spec(&spec)?);
    }
    if let Ok(game) = serde_json::from_value::<SymmetricGame>(value.clone()) {
        return Ok(game);
    }
    if let Ok(rows) = serde_json::from_value::<Vec<Vec<i64>>>(value) {
        return Ok(SymmetricGame::from_matrix(rows)?);
    }
    bail!("{} is not a game spec, game object or payoff matrix", path.display())
}

/// Specs from a JSONL file; lines may be specs, sample draws, `{"id": ..}`
/// objects or id strings.
pub fn read_specs(path: &Path) -> Result<Vec<GameSpec>> {
    let values: Vec<serde_json::Value> = read_jsonl(path)?;
    values
        .into_iter()
        .map(|v| {
            if let Some(spec) = v.get("spec") {
                return Ok(serde_json::from_value(spec.clone())?);
            }
            match v.as_str().or_else(|| v.get("id").and_then(|i| i.as_str())) {
                Some(id) => Ok(GameSpec::from_id(id)?),
                None => Ok(serde_json::from_value(v)?),
            }
        })
        .collect()
}

/// Settings from a JSON array of settings or a JSONL file of family specs,
/// keyed by game id or setting name.
pub fn read_settings(path: &Path) -> Result<Vec<(String, Setting)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('[') {
        let settings: Vec<Setting> = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        return Ok(settings.into_iter().map(|s| (s.display_name().to_string(), s)).collect());
    }
    Ok(read_specs(path)?.iter().map(|s| (s.id(), Setting::from_spec(s))).collect())
}

/// Model distributions from a JSON map keyed by game id, or a directory
/// holding one `<game id>.json` per game.
pub fn read_models(path: &Path) -> Result<BTreeMap<String, ResponseDistribution>> {
    if path.is_dir() {
        return json_files(path)?
            .into_iter()
            .map(|f| {
                let id = f.file_stem().and_then(|s| s.to_str()).context("non-utf8 file name")?.to_string();
                Ok((id, read_json(&f)?))
            })
            .collect();
    }
    read_json(path)
}

/// Settings for ingestion: family ids become family games, other ids take
/// the action set of the model distribution.
pub fn settings_for(models: &BTreeMap<String, ResponseDistribution>) -> Result<BTreeMap<String, Setting>> {
    models
        .iter()
        .map(|(id, d)| {
            let setting = match GameSpec::from_id(id) {
                Ok(spec) => Setting::from_spec(&spec),
                Err(_) => Setting::new(format!("setting {id}"), d.actions.clone(), None)?,
            };
            Ok((id.clone(), setting))
        })
        .collect()
}

pub fn read_humans(path: &Path, models: &BTreeMap<String, ResponseDistribution>) -> Result<HumanDataset> {
    Ok(ingest_human_csv(path, &settings_for(models)?, IngestFilters::default())?)
}
