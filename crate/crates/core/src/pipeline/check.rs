//! Fast acceptance checks backing the CLI's `--check` mode.

use serde::{Deserialize, Serialize};

use super::datasets::{ar_nash_prediction, ar_row, counts_match_percent, reconstruct_counts};
use super::manifest::RunManifest;
use super::published::{mixed_pure_splits, reproduce_grid};
use super::run::run_manifest;
use crate::agents::{ElicitContext, ResponseDistribution, Setting};
use crate::equilibria::{hs_select, SelectorConfig};
use crate::games::variants::ArVariant;
use crate::games::{population_weights, FamilyConfig, OffsetPreset, Population, WeightScheme};
use crate::stats::{smooth, AggregateConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckLine {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CheckLine { name: name.into(), passed, detail: detail.into() }
    }
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn family_counts() -> CheckLine {
    let a = FamilyConfig::preset(OffsetPreset::To19).len();
    let b = FamilyConfig::preset(OffsetPreset::To20).len();
    CheckLine::new("family raw counts", a == 1_689_600 && b == 1_795_200, format!("{a} / {b}"))
}

fn realized_weights() -> CheckLine {
    // One representative per raw spec, so weights are the raw masses.
    let config = FamilyConfig {
        lower_bounds: vec![1],
        offsets: vec![4],
        gaps: vec![1],
        bonus_sizes: vec![1],
        ..FamilyConfig::default()
    };
    let pop = Population {
        specs: (0..config.len()).map(|i| config.spec_at(i)).collect(),
        class_of: (0..config.len() as u32).collect(),
        digest: String::new(),
        config,
    };
    let w = population_weights(&pop, WeightScheme::Paper);
    let total: num_rational::Ratio<i128> = w.iter().sum();
    CheckLine::new("realized sampling weights sum to one", total == 1.into(), format!("{total}"))
}

fn ar_equilibria() -> CheckLine {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for v in ArVariant::ALL {
        let want = ar_nash_prediction(v);
        match hs_select(&v.game(), &SelectorConfig::new()).ok().and_then(|o| o.strategy().map(|s| s.to_f64())) {
            Some(got) => worst = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(worst, f64::max),
            None => ok = false,
        }
    }
    CheckLine::new("money-request equilibria", ok && worst <= 1e-9, format!("max cell error {worst:.1e}"))
}

fn ar_counts() -> CheckLine {
    let ok = ArVariant::ALL.iter().all(|&v| {
        let row = ar_row(v);
        counts_match_percent(&reconstruct_counts(row), &row.percent)
    });
    CheckLine::new("human counts reproduce printed shares", ok, "basic, cycle, costless")
}

fn smoothing() -> CheckLine {
    let setting = Setting::from_game(&ArVariant::Basic.game(), "");
    let detail = |s: &crate::stats::SmoothedModel| format!("{:.2} / {:.2}", s.probs[3], s.probs[0]);
    match smooth(&ResponseDistribution::point_mass(&setting, 3, 1), 0.2) {
        Ok(s) => CheckLine::new("smoothing", (s.probs[3] - 0.82).abs() < 1e-12 && (s.probs[0] - 0.02).abs() < 1e-12, detail(&s)),
        Err(e) => CheckLine::new("smoothing", false, e.to_string()),
    }
}

fn published_grid(seed: u64) -> CheckLine {
    let mut cfg = AggregateConfig::new(seed);
    cfg.bootstrap_draws = 500;
    cfg.permutation_iterations = 1_000;
    match reproduce_grid(&cfg) {
        Ok(rows) => {
            let bad: Vec<String> =
                rows.iter().filter(|r| !r.matches).map(|r| format!("{}@{}", r.comparison, r.epsilon)).collect();
            CheckLine::new(
                "published table arithmetic",
                bad.is_empty(),
                if bad.is_empty() { format!("{} rows", rows.len()) } else { bad.join(", ") },
            )
        }
        Err(e) => CheckLine::new("published table arithmetic", false, e.to_string()),
    }
}

fn subgroup_split() -> CheckLine {
    let splits = mixed_pure_splits();
    CheckLine::new("mixed/pure subgroup sizes", splits == [609], format!("{splits:?}"))
}

fn determinism(seed: u64) -> CheckLine {
    let run = || -> crate::Result<String> {
        let out = run_manifest(&RunManifest::demo(seed), std::path::Path::new("."), &ElicitContext::new())?;
        Ok(out.report.to_json()? + &out.report.to_markdown() + &out.report.per_game_csv()?)
    };
    match (run(), run()) {
        (Ok(a), Ok(b)) => CheckLine::new("demo run determinism", a == b, format!("{} report bytes", a.len())),
        (Err(e), _) | (_, Err(e)) => CheckLine::new("demo run determinism", false, e.to_string()),
    }
}

/// Runs every quick check; all are offline and take a few seconds.
pub fn quick_checks(seed: u64) -> Vec<CheckLine> {
    vec![
        family_counts(),
        realized_weights(),
        ar_equilibria(),
        ar_counts(),
        smoothing(),
        published_grid(seed),
        subgroup_split(),
        determinism(seed),
    ]
}
