use std::path::{Path, PathBuf};

use agentpred::pipeline::{run_manifest, write_outputs, RunManifest};
use anyhow::{bail, Result};
use clap::Args;

use crate::Globals;

#[derive(Args)]
pub struct RunArgs {
    #[arg(long, conflicts_with = "demo")]
    manifest: Option<PathBuf>,
    /// Built-in offline manifest on sampled games with simulated humans.
    #[arg(long)]
    demo: bool,
    /// Root seed for --demo.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: RunArgs, g: &Globals) -> Result<()> {
    let (manifest, base) = match (&args.manifest, args.demo) {
        (Some(path), _) => {
            let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")).to_path_buf();
            (RunManifest::load(path)?, base)
        }
        (None, true) => (RunManifest::demo(args.seed), PathBuf::from(".")),
        (None, false) => bail!("pass --manifest FILE or --demo"),
    };
    let mut ctx = agentpred::agents::ElicitContext::new();
    ctx.offline = g.offline;
    ctx.exec = g.exec;
    let out = run_manifest(&manifest, &base, &ctx)?;
    for path in write_outputs(&out, &args.out)? {
        eprintln!("wrote {}", path.display());
    }
    println!("manifest {}", out.manifest_hash);
    println!("{} games, {} responses", out.report.games, out.report.responses);
    Ok(())
}
