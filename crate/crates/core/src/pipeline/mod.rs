//! End-to-end runs: bundled data, human-response ingestion, manifests and
//! report emission.

mod check;
pub mod datasets;
mod evaluate;
mod humans;
mod manifest;
pub mod published;
mod run;

pub use check::{quick_checks, CheckLine};
pub use evaluate::{
    evaluate, ComparisonBlock, EvalGame, EvaluationReport, GridEntry, NamedCoverage, NamedRegression, NashEntry,
    NashSummary, COMPARISONS,
};
pub use humans::{ingest_human_csv, FilterReport, HumanDataset, HumanGame, HumanResponse, IngestFilters};
pub use manifest::{GameSource, HumanSource, ModelSource, RunConfig, RunManifest};
pub use run::{prepare_games, run_manifest, write_outputs, RunOutput};

/// Version recorded in manifests and reports.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
