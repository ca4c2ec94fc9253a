//! Markdown and CSV renderings of evaluation results.

use std::fmt::Write as _;

use super::aggregate::ComparisonReport;
use super::coverage::CoverageSummary;
use super::llr::GameComparison;
use super::ols::OlsFit;
use super::normal_cdf;
use crate::error::Result;

fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

fn z_p(estimate: f64, se: f64) -> f64 {
    if se > 0.0 {
        2.0 * (1.0 - normal_cdf((estimate / se).abs()))
    } else if estimate != 0.0 {
        0.0
    } else {
        1.0
    }
}

fn fmt_p(p: Option<f64>) -> String {
    match p {
        Some(p) if p < 1e-4 => "<0.0001".into(),
        Some(p) => format!("{p:.4}"),
        None => "n/a".into(),
    }
}

/// Mean ratio with stars and bootstrap SE, e.g. `1.227*** (0.050)`.
pub fn estimate_cell(r: &ComparisonReport) -> String {
    format!("{:.3}{} ({:.3})", r.mean_llr, stars(z_p(r.mean_llr, r.bootstrap_se)), r.bootstrap_se)
}

/// Best-predictor share with stars against one half.
pub fn proportion_cell(r: &ComparisonReport) -> String {
    let b = &r.best_predictor;
    format!("{:.3}{} ({:.3})", b.proportion, stars(z_p(b.proportion - 0.5, b.std_error)), b.std_error)
}

pub fn comparison_table(rows: &[(String, &ComparisonReport)]) -> String {
    let mut out = String::from(
        "| Comparison | Mean log ratio (SE) | 95% CI | Ratio | Best predictor (SE) | Exact CI | Wilcoxon p | Permutation p | Games |\n\
         |---|---|---|---|---|---|---|---|---|\n",
    );
    for (label, r) in rows {
        let _ = writeln!(
            out,
            "| {label} | {} | [{:.3}, {:.3}] | {:.2} | {} | [{:.3}, {:.3}] | {} | {} | {} |",
            estimate_cell(r),
            r.ci_lower,
            r.ci_upper,
            r.ratio,
            proportion_cell(r),
            r.best_predictor.lower,
            r.best_predictor.upper,
            fmt_p(r.wilcoxon_p),
            fmt_p(Some(r.permutation_p)),
            r.games,
        );
    }
    out
}

/// One row per comparison, one column per smoothing level.
pub fn grid_table(epsilons: &[f64], rows: &[(String, Vec<&ComparisonReport>)]) -> String {
    let mut out = String::from("| Comparison |");
    for e in epsilons {
        let _ = write!(out, " eps = {e} |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(epsilons.len()));
    out.push('\n');
    for (label, reports) in rows {
        let _ = write!(out, "| {label} |");
        for r in reports {
            let _ = write!(out, " {} / {} |", estimate_cell(r), proportion_cell(r));
        }
        out.push('\n');
    }
    out
}

pub fn regression_table(fit: &OlsFit) -> String {
    let mut out = String::from("| Term | Coefficient (SE) | p |\n|---|---|---|\n");
    for i in 0..fit.names.len() {
        let p = fit.p_values[i];
        let _ = writeln!(
            out,
            "| {} | {:.3}{} ({:.3}) | {} |",
            fit.names[i],
            fit.coefficients[i],
            stars(p),
            fit.std_errors[i],
            fmt_p(Some(p))
        );
    }
    let _ = writeln!(out, "| Observations | {} | |", fit.observations);
    let _ = writeln!(out, "| R² | {:.3} | |", fit.r_squared);
    out
}

pub fn coverage_table(rows: &[(String, &CoverageSummary)]) -> String {
    let mut out = String::from(
        "| Model | % on max-prob action | % on top-3 | % on positive prob. | % games any in support | % games all in support |\n\
         |---|---|---|---|---|---|\n",
    );
    for (label, c) in rows {
        let _ = writeln!(
            out,
            "| {label} | {:.1} | {:.1} | {:.1} | {:.1} | {:.1} |",
            100.0 * c.on_argmax,
            100.0 * c.on_top3,
            100.0 * c.on_positive,
            100.0 * c.games_any_in_support,
            100.0 * c.games_all_in_support,
        );
    }
    out
}

/// game_id, responses, llr per row.
pub fn comparisons_csv(comparisons: &[GameComparison]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["game_id", "responses", "llr"])?;
    for c in comparisons {
        w.write_record([c.game_id.as_str(), &c.responses.to_string(), &format!("{:.12}", c.llr)])?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
