use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::apportion::scale_mixture_to_population;
use super::backend::{ChatBackend, ChatMessage, ChatRequest};
use super::cache::{ResponseCache, Transcript, TranscriptTurn};
use super::distribution::ResponseDistribution;
use super::levelk::{mechanical_levelk, Level0Rule, TieRule};
use super::parse::parse_response;
use super::personas::library;
use super::prompt::PromptSpec;
use super::setting::Setting;
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::seed;

/// Anything that yields a response distribution for a setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentModel {
    BackendPersona {
        prompt: PromptSpec,
        backend: String,
        model: String,
        temperature: f64,
    },
    Mixture {
        components: Vec<AgentModel>,
        weights: Vec<f64>,
    },
    MechanicalLevelK {
        level: u32,
        level0: Level0Rule,
        #[serde(default)]
        ties: TieRule,
    },
    Uniform,
    RandomPure {
        seed: u64,
    },
    /// Fixed distributions keyed by setting id.
    Tabulated {
        distributions: BTreeMap<String, ResponseDistribution>,
    },
}

impl AgentModel {
    pub fn tabulated(dists: impl IntoIterator<Item = ResponseDistribution>) -> Self {
        AgentModel::Tabulated {
            distributions: dists.into_iter().map(|d| (d.setting_id.clone(), d)).collect(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AgentModel::BackendPersona { .. } => "backend_persona",
            AgentModel::Mixture { .. } => "mixture",
            AgentModel::MechanicalLevelK { .. } => "mechanical_levelk",
            AgentModel::Uniform => "uniform",
            AgentModel::RandomPure { .. } => "random_pure",
            AgentModel::Tabulated { .. } => "tabulated",
        }
    }
}

/// Backends, cache and concurrency settings shared by elicitation calls.
#[derive(Clone)]
pub struct ElicitContext {
    backends: BTreeMap<String, Arc<dyn ChatBackend>>,
    pub cache: Option<ResponseCache>,
    pub exec: Exec,
    /// Draws sent to a backend at once.
    pub in_flight: usize,
    /// Refuse to contact remote backends.
    pub offline: bool,
}

impl Default for ElicitContext {
    fn default() -> Self {
        ElicitContext { backends: BTreeMap::new(), cache: None, exec: Exec::default(), in_flight: 8, offline: false }
    }
}

impl ElicitContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_backend(mut self, name: impl Into<String>, backend: Arc<dyn ChatBackend>) -> Self {
        self.backends.insert(name.into(), backend);
        self
    }

    pub fn with_cache(mut self, cache: ResponseCache) -> Self {
        self.cache = Some(cache);
        self
    }

    fn backend(&self, name: &str) -> Result<&Arc<dyn ChatBackend>> {
        self.backends
            .get(name)
            .ok_or_else(|| Error::BackendUnavailable(format!("no backend registered as {name:?}")))
    }
}

fn cot_turn(template: &str, instructions: &str, thoughts: Option<&str>) -> String {
    let text = template.replace("{instructions}", instructions);
    match thoughts {
        Some(t) => text.replace("{thoughts}", t),
        None => text,
    }
}

struct PersonaDraw<'a> {
    backend: &'a dyn ChatBackend,
    backend_name: &'a str,
    system: String,
    prompt_hash: String,
    model: &'a str,
    temperature: f64,
}

impl PersonaDraw<'_> {
    fn run(&self, setting: &Setting, draw: u64, root: u64, ctx: &ElicitContext) -> Result<Option<super::Action>> {
        let key = ResponseCache::key(self.backend_name, &self.prompt_hash, &setting.id, draw);
        if let Some(cache) = &ctx.cache {
            if let Some(t) = cache.get(&key)? {
                return Ok(t.parsed);
            }
        }
        if ctx.offline && self.backend.is_remote() {
            return Err(Error::BackendUnavailable("offline mode forbids remote backends".into()));
        }
        let cot = &library().cot;
        let request_seed = seed::derive(root, "agents/draw", &setting.id, draw);
        let first = vec![
            ChatMessage::system(&self.system),
            ChatMessage::user(cot_turn(&cot.first, &setting.instruction_text, None)),
        ];
        let req1 = ChatRequest {
            model: self.model.to_string(),
            messages: first.clone(),
            temperature: self.temperature,
            seed: Some(request_seed),
        };
        let thoughts = self.backend.complete(&req1)?;
        let second = vec![
            ChatMessage::system(&self.system),
            ChatMessage::user(cot_turn(&cot.second, &setting.instruction_text, Some(thoughts.trim()))),
        ];
        let req2 = ChatRequest { messages: second.clone(), ..req1 };
        let answer = self.backend.complete(&req2)?;
        let parsed = parse_response(&answer, setting);
        if let Some(cache) = &ctx.cache {
            let transcript = Transcript {
                backend: self.backend_name.to_string(),
                model: self.model.to_string(),
                prompt_hash: self.prompt_hash.clone(),
                setting_id: setting.id.clone(),
                draw,
                turns: vec![
                    TranscriptTurn { messages: first, response: thoughts },
                    TranscriptTurn { messages: second, response: answer },
                ],
                parsed: parsed.clone(),
            };
            cache.put(&key, &transcript)?;
        }
        Ok(parsed)
    }
}

/// Draws `n` responses (or the exact distribution, for deterministic
/// models). Invalid backend answers are dropped without resampling, so the
/// returned total may be below `n`.
pub fn elicit_distribution(
    model: &AgentModel,
    setting: &Setting,
    n: u64,
    root_seed: u64,
    ctx: &ElicitContext,
) -> Result<ResponseDistribution> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    match model {
        AgentModel::Uniform => {
            let mut rng = seed::derived_rng(root_seed, "agents/uniform", &setting.id, 0);
            let mut counts = vec![0u64; setting.k()];
            for _ in 0..n {
                counts[rng.random_range(0..setting.k())] += 1;
            }
            ResponseDistribution::from_counts(setting, counts)
        }
        AgentModel::RandomPure { seed: s } => {
            let mut rng = seed::derived_rng(*s, "agents/random_pure", &setting.id, 0);
            Ok(ResponseDistribution::point_mass(setting, rng.random_range(0..setting.k()), n))
        }
        AgentModel::MechanicalLevelK { level, level0, ties } => {
            let game = setting
                .game()
                .ok_or_else(|| Error::invalid(format!("setting {} has no payoff matrix", setting.display_name())))?;
            let probs = mechanical_levelk(&game, *level, *level0, *ties);
            match probs.iter().position(|&p| p == 1.0) {
                Some(i) => Ok(ResponseDistribution::point_mass(setting, i, n)),
                None => ResponseDistribution::from_probs(setting, probs, n as f64),
            }
        }
        AgentModel::Tabulated { distributions } => distributions
            .get(&setting.id)
            .cloned()
            .ok_or_else(|| Error::MissingModelDistribution {
                game: setting.display_name().to_string(),
                model: "tabulated".into(),
            }),
        AgentModel::Mixture { components, weights } => {
            if components.len() != weights.len() || components.is_empty() {
                return Err(Error::invalid("mixture needs one weight per component"));
            }
            let alloc = scale_mixture_to_population(weights, n);
            let mut mass = vec![0.0f64; setting.k()];
            for (i, (c, &m)) in components.iter().zip(&alloc).enumerate() {
                if m == 0 {
                    continue;
                }
                let d = elicit_distribution(c, setting, m, seed::derive(root_seed, "agents/mixture", &setting.id, i as u64), ctx)?;
                for (acc, p) in mass.iter_mut().zip(&d.probs) {
                    *acc += p * d.total;
                }
            }
            let total: f64 = mass.iter().sum();
            let integral = mass.iter().all(|m| (m - m.round()).abs() < 1e-9);
            if integral {
                ResponseDistribution::from_counts(setting, mass.iter().map(|m| m.round() as u64).collect())
            } else {
                ResponseDistribution::from_probs(setting, mass, total)
            }
        }
        AgentModel::BackendPersona { prompt, backend, model, temperature } => {
            let b = ctx.backend(backend)?;
            let system = prompt.render()?;
            let prompt_hash = seed::sha256_hex(format!("{model}\n{temperature}\n{system}").as_bytes());
            let job = PersonaDraw {
                backend: b.as_ref(),
                backend_name: backend,
                system,
                prompt_hash,
                model,
                temperature: *temperature,
            };
            let draws: Vec<u64> = (0..n).collect();
            let mut parsed = Vec::with_capacity(n as usize);
            for batch in draws.chunks(ctx.in_flight.max(1)) {
                let out = par::map(ctx.exec, batch, |&d| job.run(setting, d, root_seed, ctx));
                for r in out {
                    parsed.push(r?);
                }
            }
            let mut counts = vec![0u64; setting.k()];
            for a in parsed.into_iter().flatten() {
                if let Some(i) = setting.index_of(&a) {
                    counts[i] += 1;
                }
            }
            if counts.iter().all(|&c| c == 0) {
                return Err(Error::AllResponsesInvalid { setting: setting.display_name().to_string() });
            }
            ResponseDistribution::from_counts(setting, counts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::backend::FnBackend;
    use crate::games::variants::BASIC_SPEC;

    fn persona(backend: &str) -> AgentModel {
        AgentModel::BackendPersona {
            prompt: PromptSpec::plain("You are careful."),
            backend: backend.into(),
            model: "test-model".into(),
            temperature: 1.0,
        }
    }

    #[test]
    fn uniform_is_reproducible() {
        let s = Setting::from_spec(&BASIC_SPEC);
        let ctx = ElicitContext::new();
        let a = elicit_distribution(&AgentModel::Uniform, &s, 1000, 5, &ctx).unwrap();
        let b = elicit_distribution(&AgentModel::Uniform, &s, 1000, 5, &ctx).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total, 1000.0);
    }

    #[test]
    fn levelk_via_setting() {
        let s = Setting::from_spec(&BASIC_SPEC);
        let m = AgentModel::MechanicalLevelK { level: 3, level0: Level0Rule::MaxGuaranteed, ties: TieRule::Highest };
        let d = elicit_distribution(&m, &s, 10, 0, &ElicitContext::new()).unwrap();
        assert_eq!(d.prob_of(&super::super::Action::Int(17)), Some(1.0));
    }

    #[test]
    fn invalid_answers_are_dropped() {
        let s = Setting::from_spec(&BASIC_SPEC);
        let backend = Arc::new(FnBackend::new("scripted", |req: &ChatRequest| {
            let seed = req.seed.unwrap_or(0);
            if req.messages[1].content.contains("previously had") {
                Ok(if seed % 4 == 0 { "maybe 19.5".into() } else { format!("I request {}", 11 + seed % 10) })
            } else {
                Ok("Thinking about 11 and 20.".into())
            }
        }));
        let ctx = ElicitContext::new().with_backend("scripted", backend.clone());
        let d = elicit_distribution(&persona("scripted"), &s, 40, 1, &ctx).unwrap();
        assert!(d.total < 40.0 && d.total > 0.0);
        assert_eq!(backend.calls(), 80);
    }

    #[test]
    fn warm_cache_skips_backend() {
        let dir = tempfile::tempdir().unwrap();
        let s = Setting::from_spec(&BASIC_SPEC);
        let backend = Arc::new(FnBackend::new("scripted", |_req: &ChatRequest| Ok("18".into())));
        let ctx = ElicitContext::new()
            .with_backend("scripted", backend.clone())
            .with_cache(ResponseCache::new(dir.path()).unwrap());
        let cold = elicit_distribution(&persona("scripted"), &s, 12, 1, &ctx).unwrap();
        let calls = backend.calls();
        let warm = elicit_distribution(&persona("scripted"), &s, 12, 1, &ctx).unwrap();
        assert_eq!(cold, warm);
        assert_eq!(backend.calls(), calls);
    }

    #[test]
    fn all_invalid_is_an_error() {
        let s = Setting::from_spec(&BASIC_SPEC);
        let backend = Arc::new(FnBackend::new("scripted", |_req: &ChatRequest| Ok("no idea".into())));
        let ctx = ElicitContext::new().with_backend("scripted", backend);
        assert!(matches!(
            elicit_distribution(&persona("scripted"), &s, 5, 1, &ctx),
            Err(Error::AllResponsesInvalid { .. })
        ));
        assert!(matches!(
            elicit_distribution(&persona("missing"), &s, 5, 1, &ctx),
            Err(Error::BackendUnavailable(_))
        ));
    }
}
