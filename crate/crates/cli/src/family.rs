use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use agentpred::games::{
    dedup_family, enumerate_family, render_instructions, sample_games, FamilyConfig, GameSpec, OffsetPreset,
    SymmetricGame, WeightScheme,
};
use agentpred::seed::sha256_hex;
use anyhow::{bail, Result};
use clap::{Args, Subcommand};
use serde_json::json;

use crate::{emit, io, Globals};

#[derive(Subcommand)]
pub enum FamilyCmd {
    /// Write every raw spec as JSONL.
    Enumerate {
        #[arg(long, default_value = "4-19", value_parser = parse_offsets)]
        offsets: OffsetPreset,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one representative per payoff-matrix class, plus a manifest.
    Dedup {
        #[arg(long, default_value = "4-19", value_parser = parse_offsets)]
        offsets: OffsetPreset,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted draw without replacement from the deduplicated family.
    Sample {
        #[arg(long, default_value = "4-19", value_parser = parse_offsets)]
        offsets: OffsetPreset,
        #[arg(long, default_value_t = 1500)]
        n: usize,
        #[arg(long, default_value = "paper", value_parser = parse_scheme)]
        scheme: WeightScheme,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_offsets(s: &str) -> Result<OffsetPreset, String> {
    OffsetPreset::parse(s).map_err(|e| e.to_string())
}

fn parse_scheme(s: &str) -> Result<WeightScheme, String> {
    WeightScheme::parse(s).map_err(|e| e.to_string())
}

/// Writes JSONL to `out` (or stdout) and a `<out>.manifest.json` sidecar.
fn write_frame(out: Option<&PathBuf>, body: &str, manifest: serde_json::Value) -> Result<()> {
    emit(out, body)?;
    let mut manifest = manifest;
    manifest["content_sha256"] = json!(sha256_hex(body.as_bytes()));
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    match out {
        Some(path) => {
            let mut side = path.clone().into_os_string();
            side.push(".manifest.json");
            std::fs::write(PathBuf::from(side), text)?;
        }
        None => eprint!("{text}"),
    }
    Ok(())
}

pub fn family(cmd: FamilyCmd, g: &Globals) -> Result<()> {
    match cmd {
        FamilyCmd::Enumerate { offsets, out } => {
            let config = FamilyConfig::preset(offsets);
            let sink: Box<dyn Write> = match &out {
                Some(p) => Box::new(std::fs::File::create(p)?),
                None => Box::new(std::io::stdout().lock()),
            };
            let mut w = BufWriter::new(sink);
            for spec in enumerate_family(&config) {
                serde_json::to_writer(&mut w, &spec)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
            eprintln!("raw specs: {}", config.len());
        }
        FamilyCmd::Dedup { offsets, out } => {
            let started = Instant::now();
            let config = FamilyConfig::preset(offsets);
            let pop = dedup_family(&config, g.exec);
            let mut body = Vec::new();
            pop.write_jsonl(&mut body)?;
            let manifest = json!({
                "kind": "population",
                "offsets": offsets.label(),
                "config": config,
                "raw": pop.raw_len(),
                "unique": pop.len(),
                "population_digest": pop.digest,
            });
            write_frame(out.as_ref(), &String::from_utf8(body)?, manifest)?;
            eprintln!("raw {} unique {} in {:.1?}", pop.raw_len(), pop.len(), started.elapsed());
        }
        FamilyCmd::Sample { offsets, n, scheme, seed, out } => {
            let pop = dedup_family(&FamilyConfig::preset(offsets), g.exec);
            let frame = sample_games(&pop, n, scheme, seed)?;
            let mut body = String::new();
            for d in &frame.draws {
                body.push_str(&serde_json::to_string(&json!({ "id": d.spec.id(), "spec": d.spec, "weight": d.weight_exact }))?);
                body.push('\n');
            }
            let manifest = json!({
                "kind": "sample",
                "offsets": offsets.label(),
                "population_digest": frame.population_digest,
                "scheme": frame.scheme,
                "seed": frame.seed,
                "n": frame.draws.len(),
            });
            write_frame(out.as_ref(), &body, manifest)?;
        }
    }
    Ok(())
}

#[derive(Args)]
pub struct GameRef {
    /// JSON file holding one game spec.
    #[arg(long, conflicts_with = "id")]
    spec: Option<PathBuf>,
    /// Game id such as L11-U20-G1-B20-n-r5.
    #[arg(long)]
    id: Option<String>,
}

impl GameRef {
    fn resolve(&self) -> Result<GameSpec> {
        match (&self.spec, &self.id) {
            (Some(p), _) => {
                let v: serde_json::Value = io::read_json(p)?;
                Ok(serde_json::from_value(v.get("spec").cloned().unwrap_or(v))?)
            }
            (None, Some(id)) => Ok(GameSpec::from_id(id)?),
            (None, None) => bail!("pass --spec FILE or --id ID"),
        }
    }
}

#[derive(Subcommand)]
pub enum GameCmd {
    /// Print the participant instructions.
    Render {
        #[command(flatten)]
        game: GameRef,
    },
    /// Print the row player's payoff matrix.
    Matrix {
        #[command(flatten)]
        game: GameRef,
        #[arg(long)]
        json: bool,
    },
}

pub fn game(cmd: GameCmd) -> Result<()> {
    match cmd {
        GameCmd::Render { game } => println!("{}", render_instructions(&game.resolve()?)),
        GameCmd::Matrix { game, json } => {
            let spec = game.resolve()?;
            let m = SymmetricGame::from_spec(&spec)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&m)?);
                return Ok(());
            }
            let width = m.rows().flatten().chain(m.actions()).map(|v| v.to_string().len()).max().unwrap_or(1);
            print!("{:>width$} |", "");
            for a in m.actions() {
                print!(" {a:>width$}");
            }
            println!();
            for (a, row) in m.actions().iter().zip(m.rows()) {
                print!("{a:>width$} |");
                for v in row {
                    print!(" {v:>width$}");
                }
                println!();
            }
        }
    }
    Ok(())
}
