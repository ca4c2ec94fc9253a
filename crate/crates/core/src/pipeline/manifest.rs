use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::humans::IngestFilters;
use super::TOOL_VERSION;
use crate::agents::{AgentModel, Level0Rule, TieRule};
use crate::equilibria::SelectorConfig;
use crate::error::Result;
use crate::games::{OffsetPreset, WeightScheme, TEMPLATE_VERSION};
use crate::seed::sha256_hex;
use crate::stats::{Factor, HcFlavor, EPSILON_GRID, HEADLINE_EPSILON};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GameSource {
    /// Weighted draw from the deduplicated family.
    Sample { offsets: OffsetPreset, scheme: WeightScheme, count: usize },
    /// Explicit family game ids.
    Specs { ids: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HumanSource {
    Csv {
        path: PathBuf,
        #[serde(default)]
        filters: IngestFilters,
    },
    /// Responses drawn from a model; for demonstrations and calibration.
    Simulated { model: AgentModel, responses_per_game: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSource {
    Agent { model: AgentModel, draws: u64 },
    /// JSON object mapping game id to a response distribution.
    File { path: PathBuf },
}

fn default_selector() -> SelectorConfig {
    SelectorConfig::new()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub root_seed: u64,
    pub epsilons: Vec<f64>,
    pub headline_epsilon: f64,
    pub bootstrap_draws: usize,
    pub permutation_iterations: usize,
    pub level: f64,
    pub games: GameSource,
    pub humans: HumanSource,
    pub optimized: ModelSource,
    pub baseline: ModelSource,
    #[serde(default = "default_selector")]
    pub selector: SelectorConfig,
    #[serde(default)]
    pub regress_by: Vec<Factor>,
    #[serde(default)]
    pub hc: HcFlavor,
}

/// A run's full configuration plus content hashes of everything it reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// Informational; excluded from the hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
    pub config: RunConfig,
    /// Input name to sha256 of its contents; filled by `resolve_inputs`.
    #[serde(default)]
    pub inputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(config: RunConfig) -> Self {
        RunManifest { tool_version: TOOL_VERSION.into(), created_at: None, config, inputs: BTreeMap::new() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }

    /// Fully offline run on sampled family games with simulated humans and
    /// mechanical level-k models.
    pub fn demo(root_seed: u64) -> Self {
        let lk = |level| AgentModel::MechanicalLevelK { level, level0: Level0Rule::MaxGuaranteed, ties: TieRule::Highest };
        RunManifest::new(RunConfig {
            root_seed,
            epsilons: EPSILON_GRID.to_vec(),
            headline_epsilon: HEADLINE_EPSILON,
            bootstrap_draws: 2_000,
            permutation_iterations: 10_000,
            level: 0.95,
            games: GameSource::Sample { offsets: OffsetPreset::To19, scheme: WeightScheme::Paper, count: 24 },
            humans: HumanSource::Simulated {
                model: AgentModel::Mixture {
                    components: vec![lk(0), lk(1), lk(2), lk(3), AgentModel::Uniform],
                    weights: vec![0.1, 0.3, 0.25, 0.15, 0.2],
                },
                responses_per_game: 30,
            },
            optimized: ModelSource::Agent {
                model: AgentModel::Mixture { components: vec![lk(1), lk(2), lk(3)], weights: vec![0.4, 0.35, 0.25] },
                draws: 100,
            },
            baseline: ModelSource::Agent { model: lk(0), draws: 100 },
            selector: SelectorConfig::new(),
            regress_by: vec![Factor::PointsRule],
            hc: HcFlavor::Hc1,
        })
    }

    /// Hashes file inputs (relative to `base`) and bundled data.
    pub fn resolve_inputs(&mut self, base: &Path) -> Result<()> {
        let mut inputs = BTreeMap::new();
        inputs.insert("instruction_template".into(), format!("version {TEMPLATE_VERSION}"));
        let mut file = |name: &str, path: &Path| -> Result<()> {
            let full = base.join(path);
            inputs.insert(name.to_string(), sha256_hex(&std::fs::read(&full)?));
            Ok(())
        };
        if let HumanSource::Csv { path, .. } = &self.config.humans {
            file("humans", path)?;
        }
        if let ModelSource::File { path } = &self.config.optimized {
            file("optimized", path)?;
        }
        if let ModelSource::File { path } = &self.config.baseline {
            file("baseline", path)?;
        }
        self.inputs = inputs;
        Ok(())
    }

    /// sha256 over tool version, configuration and input hashes.
    pub fn hash(&self) -> String {
        #[derive(Serialize)]
        struct Hashed<'a> {
            tool_version: &'a str,
            config: &'a RunConfig,
            inputs: &'a BTreeMap<String, String>,
        }
        let body = serde_json::to_vec(&Hashed { tool_version: &self.tool_version, config: &self.config, inputs: &self.inputs })
            .expect("manifest serializes");
        sha256_hex(&body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_timestamp_only() {
        let mut m = RunManifest::demo(7);
        let h = m.hash();
        m.created_at = Some("2026-01-01T00:00:00Z".into());
        assert_eq!(m.hash(), h);
        m.config.root_seed = 8;
        assert_ne!(m.hash(), h);
        let json = serde_json::to_string(&m).unwrap();
        let back: RunManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
