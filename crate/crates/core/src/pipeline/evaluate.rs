use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::manifest::RunConfig;
use super::TOOL_VERSION;
use crate::agents::{Action, ResponseDistribution};
use crate::equilibria::Provenance;
use crate::error::{Error, Result};
use crate::games::GameSpec;
use crate::par::{self, Exec};
use crate::seed;
use crate::stats::{
    aggregate, game_llr, report as render, smooth, subgroup_regression, support_coverage, AggregateConfig,
    ComparisonReport, CoverageSummary, GameComparison, OlsFit,
};

/// Reference models the optimized model is compared against.
pub const COMPARISONS: [&str; 6] = ["baseline", "hs_nash", "hs_nash_mixed", "hs_nash_pure", "random_pure", "uniform"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NashEntry {
    Selected { distribution: ResponseDistribution, pure: bool, provenance: Provenance },
    Unresolved { reason: String },
}

/// Everything needed to score one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalGame {
    pub game_id: String,
    pub spec: Option<GameSpec>,
    pub responses: Vec<Action>,
    pub optimized: ResponseDistribution,
    pub baseline: ResponseDistribution,
    pub nash: NashEntry,
    pub uniform: ResponseDistribution,
    pub random_pure: ResponseDistribution,
}

impl EvalGame {
    fn reference(&self, comparison: &str) -> Option<&ResponseDistribution> {
        let nash = match &self.nash {
            NashEntry::Selected { distribution, pure, .. } => Some((distribution, *pure)),
            NashEntry::Unresolved { .. } => None,
        };
        match comparison {
            "baseline" => Some(&self.baseline),
            "hs_nash" => nash.map(|(d, _)| d),
            "hs_nash_mixed" => nash.filter(|(_, pure)| !pure).map(|(d, _)| d),
            "hs_nash_pure" => nash.filter(|(_, pure)| *pure).map(|(d, _)| d),
            "random_pure" => Some(&self.random_pure),
            "uniform" => Some(&self.uniform),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBlock {
    pub name: String,
    pub games: usize,
    /// Games left out because the reference model is undefined for them.
    pub excluded: usize,
    pub report: Option<ComparisonReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub epsilon: f64,
    pub comparisons: Vec<ComparisonBlock>,
}

impl GridEntry {
    pub fn block(&self, name: &str) -> Option<&ComparisonBlock> {
        self.comparisons.iter().find(|b| b.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCoverage {
    pub model: String,
    pub summary: CoverageSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedRegression {
    pub epsilon: f64,
    pub comparison: String,
    pub fit: Option<OlsFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NashSummary {
    pub resolved: usize,
    pub mixed: usize,
    pub pure: usize,
    /// Ids of games dropped from equilibrium comparisons.
    pub unresolved: Vec<String>,
    pub provenance: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerGameRow {
    pub epsilon: f64,
    pub comparison: String,
    pub game_id: String,
    pub responses: usize,
    pub llr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub manifest_hash: String,
    pub tool_version: String,
    pub games: usize,
    pub responses: usize,
    pub headline_epsilon: f64,
    pub nash: NashSummary,
    pub grid: Vec<GridEntry>,
    pub coverage: Vec<NamedCoverage>,
    pub regressions: Vec<NamedRegression>,
    /// Written to CSV only.
    #[serde(skip)]
    pub per_game: Vec<PerGameRow>,
}

fn compare(games: &[&EvalGame], name: &str, epsilon: f64) -> Result<Vec<GameComparison>> {
    par::map(Exec::default(), games, |g| {
        let reference = g.reference(name).expect("subset holds games with a reference");
        let a = smooth(&g.optimized, epsilon)?;
        let b = smooth(reference, epsilon)?;
        game_llr(&g.game_id, &g.responses, &a, &b)
    })
    .into_iter()
    .collect()
}

fn nash_summary(games: &[EvalGame]) -> NashSummary {
    let mut s = NashSummary::default();
    for g in games {
        match &g.nash {
            NashEntry::Selected { pure, provenance, .. } => {
                s.resolved += 1;
                if *pure {
                    s.pure += 1;
                } else {
                    s.mixed += 1;
                }
                *s.provenance.entry(format!("{provenance:?}")).or_default() += 1;
            }
            NashEntry::Unresolved { .. } => s.unresolved.push(g.game_id.clone()),
        }
    }
    s
}

/// Smooth, score, aggregate and summarize every configured comparison.
pub fn evaluate(games: &[EvalGame], cfg: &RunConfig, manifest_hash: &str) -> Result<EvaluationReport> {
    if games.is_empty() {
        return Err(Error::invalid("no games with human responses to evaluate"));
    }
    let mut grid = Vec::new();
    let mut per_game = Vec::new();
    let mut regressions = Vec::new();
    for (ei, &epsilon) in cfg.epsilons.iter().enumerate() {
        let mut blocks = Vec::new();
        for (ci, name) in COMPARISONS.iter().enumerate() {
            let subset: Vec<&EvalGame> = games.iter().filter(|g| g.reference(name).is_some()).collect();
            let comps = compare(&subset, name, epsilon)?;
            for c in &comps {
                per_game.push(PerGameRow {
                    epsilon,
                    comparison: name.to_string(),
                    game_id: c.game_id.clone(),
                    responses: c.responses,
                    llr: c.llr,
                });
            }
            let (report, note) = if comps.len() >= 2 {
                let agg = AggregateConfig {
                    bootstrap_draws: cfg.bootstrap_draws,
                    permutation_iterations: cfg.permutation_iterations,
                    level: cfg.level,
                    seed: seed::derive(cfg.root_seed, "pipeline/aggregate", name, (ei * COMPARISONS.len() + ci) as u64),
                    exec: Exec::default(),
                };
                (Some(aggregate(&comps, &agg)?), None)
            } else {
                (None, Some("fewer than two games".to_string()))
            };
            if !cfg.regress_by.is_empty() && matches!(*name, "baseline" | "hs_nash") {
                regressions.push(regression(&subset, &comps, epsilon, name, cfg));
            }
            blocks.push(ComparisonBlock {
                name: name.to_string(),
                games: subset.len(),
                excluded: games.len() - subset.len(),
                report,
                note,
            });
        }
        grid.push(GridEntry { epsilon, comparisons: blocks });
    }

    let coverage_for = |model: &str, pick: &dyn Fn(&EvalGame) -> Option<&ResponseDistribution>| -> Result<Option<NamedCoverage>> {
        let rows: Vec<(&[Action], &ResponseDistribution)> =
            games.iter().filter_map(|g| pick(g).map(|d| (g.responses.as_slice(), d))).collect();
        if rows.is_empty() {
            return Ok(None);
        }
        Ok(Some(NamedCoverage { model: model.into(), summary: support_coverage(&rows)? }))
    };
    let coverage = [
        coverage_for("optimized", &|g| Some(&g.optimized))?,
        coverage_for("baseline", &|g| Some(&g.baseline))?,
        coverage_for("hs_nash", &|g| g.reference("hs_nash"))?,
    ]
    .into_iter()
    .flatten()
    .collect();

    Ok(EvaluationReport {
        manifest_hash: manifest_hash.into(),
        tool_version: TOOL_VERSION.into(),
        games: games.len(),
        responses: games.iter().map(|g| g.responses.len()).sum(),
        headline_epsilon: cfg.headline_epsilon,
        nash: nash_summary(games),
        grid,
        coverage,
        regressions,
        per_game,
    })
}

fn regression(subset: &[&EvalGame], comps: &[GameComparison], epsilon: f64, name: &str, cfg: &RunConfig) -> NamedRegression {
    let rows: Option<Vec<(f64, GameSpec)>> = subset.iter().zip(comps).map(|(g, c)| g.spec.map(|s| (c.llr, s))).collect();
    let (fit, note) = match rows {
        None => (None, Some("games without family parameters".to_string())),
        Some(rows) => match subgroup_regression(&rows, &cfg.regress_by, cfg.hc) {
            Ok(fit) => (Some(fit), None),
            Err(e) => (None, Some(e.to_string())),
        },
    };
    NamedRegression { epsilon, comparison: name.into(), fit, note }
}

fn title(name: &str) -> &str {
    match name {
        "baseline" => "Baseline",
        "hs_nash" => "Selected equilibrium",
        "hs_nash_mixed" => "  mixed",
        "hs_nash_pure" => "  pure",
        "random_pure" => "Random pure strategy",
        "uniform" => "Uniform",
        other => other,
    }
}

impl EvaluationReport {
    pub fn entry(&self, epsilon: f64) -> Option<&GridEntry> {
        self.grid.iter().find(|g| (g.epsilon - epsilon).abs() < 1e-12)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Evaluation report\n");
        let _ = writeln!(out, "manifest `{}`, version {}\n", self.manifest_hash, self.tool_version);
        let _ = writeln!(out, "{} games, {} human responses.\n", self.games, self.responses);
        let _ = writeln!(
            out,
            "Equilibrium reference: {} resolved ({} mixed, {} pure), {} unresolved and excluded from equilibrium comparisons.\n",
            self.nash.resolved,
            self.nash.mixed,
            self.nash.pure,
            self.nash.unresolved.len()
        );
        for entry in &self.grid {
            let _ = writeln!(out, "## Optimized vs other models, eps = {}\n", entry.epsilon);
            let rows: Vec<(String, &ComparisonReport)> = entry
                .comparisons
                .iter()
                .filter_map(|b| b.report.as_ref().map(|r| (format!("{} ({})", title(&b.name), b.games), r)))
                .collect();
            out.push_str(&render::comparison_table(&rows));
            for b in entry.comparisons.iter().filter(|b| b.report.is_none()) {
                let _ = writeln!(out, "\n{}: {}", title(&b.name), b.note.as_deref().unwrap_or("not computed"));
            }
            out.push('\n');
        }
        let _ = writeln!(out, "## Robustness across eps\n");
        let eps: Vec<f64> = self.grid.iter().map(|g| g.epsilon).collect();
        let rows: Vec<(String, Vec<&ComparisonReport>)> = COMPARISONS
            .iter()
            .filter_map(|name| {
                let reports: Option<Vec<&ComparisonReport>> =
                    self.grid.iter().map(|g| g.block(name).and_then(|b| b.report.as_ref())).collect();
                reports.map(|r| (title(name).trim().to_string(), r))
            })
            .collect();
        out.push_str(&render::grid_table(&eps, &rows));
        if !self.coverage.is_empty() {
            let _ = writeln!(out, "\n## Human responses within model support (eps = 0)\n");
            let rows: Vec<(String, &CoverageSummary)> = self.coverage.iter().map(|c| (c.model.clone(), &c.summary)).collect();
            out.push_str(&render::coverage_table(&rows));
        }
        for r in &self.regressions {
            let _ = writeln!(out, "\n## Log ratio regression vs {}, eps = {}\n", title(&r.comparison), r.epsilon);
            match &r.fit {
                Some(fit) => out.push_str(&render::regression_table(fit)),
                None => {
                    let _ = writeln!(out, "not estimated: {}", r.note.as_deref().unwrap_or("unknown"));
                }
            }
        }
        out
    }

    /// Per-game ratios; the first line names the manifest.
    pub fn per_game_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["epsilon", "comparison", "game_id", "responses", "llr"])?;
        for r in &self.per_game {
            w.write_record([
                r.epsilon.to_string(),
                r.comparison.clone(),
                r.game_id.clone(),
                r.responses.to_string(),
                format!("{:.12}", r.llr),
            ])?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(format!("# manifest {}\n{}", self.manifest_hash, String::from_utf8(body).expect("csv output is utf-8")))
    }
}
