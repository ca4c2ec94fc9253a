use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use agentpred::agents::{elicit_distribution, AgentModel, ElicitContext, FixtureBackend, ResponseCache};
use anyhow::{bail, Result};
use clap::{Args, ValueEnum};

use crate::{emit, io, Globals};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    /// Recorded completions only.
    Fixture,
    /// OpenAI-compatible endpoint; key in AGENTPRED_API_KEY.
    Http,
}

#[derive(Args)]
pub struct BackendArgs {
    #[arg(long, value_enum, default_value = "fixture")]
    pub backend: BackendKind,
    /// JSONL of recorded completions for the fixture backend.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// Directory for content-addressed transcripts.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long, env = "AGENTPRED_BASE_URL", default_value = "https://api.openai.com/v1")]
    pub base_url: String,
}

impl BackendArgs {
    pub fn name(&self) -> &'static str {
        match self.backend {
            BackendKind::Fixture => "fixture",
            BackendKind::Http => "http",
        }
    }

    pub fn context(&self, g: &Globals) -> Result<ElicitContext> {
        let mut ctx = ElicitContext::new();
        ctx.exec = g.exec;
        ctx.offline = g.offline;
        ctx = match self.backend {
            BackendKind::Fixture => {
                let fixture = match &self.fixtures {
                    Some(p) => FixtureBackend::load(p)?,
                    None => FixtureBackend::new(),
                };
                ctx.with_backend("fixture", Arc::new(fixture))
            }
            BackendKind::Http => {
                if g.offline {
                    bail!("--offline forbids the http backend");
                }
                http_backend(ctx, &self.base_url)?
            }
        };
        if let Some(dir) = &self.cache {
            ctx = ctx.with_cache(ResponseCache::new(dir)?);
        }
        Ok(ctx)
    }
}

#[cfg(feature = "http")]
fn http_backend(ctx: ElicitContext, base_url: &str) -> Result<ElicitContext> {
    use agentpred::agents::HttpBackend;
    let backend = HttpBackend::from_env(base_url, HttpBackend::DEFAULT_KEY_VAR)?;
    Ok(ctx.with_backend("http", Arc::new(backend)))
}

#[cfg(not(feature = "http"))]
fn http_backend(_: ElicitContext, _: &str) -> Result<ElicitContext> {
    bail!("this build has no http backend; rebuild with --features http")
}

#[derive(Args)]
pub struct ElicitArgs {
    /// Agent model as JSON.
    #[arg(long)]
    model: PathBuf,
    /// JSON array of settings, or JSONL of family specs.
    #[arg(long)]
    settings: PathBuf,
    #[arg(long, default_value_t = 100)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    backend: BackendArgs,
    /// Distributions keyed by game id (JSON object).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn elicit(args: ElicitArgs, g: &Globals) -> Result<()> {
    let model: AgentModel = io::read_json(&args.model)?;
    let settings = io::read_settings(&args.settings)?;
    let ctx = args.backend.context(g)?;
    let mut out = BTreeMap::new();
    for (id, setting) in &settings {
        out.insert(id.clone(), elicit_distribution(&model, setting, args.n, args.seed, &ctx)?);
    }
    emit(args.out.as_ref(), &(serde_json::to_string_pretty(&out)? + "\n"))
}
