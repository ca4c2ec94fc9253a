//! Summary statistics printed in published comparison tables, and checks
//! that the inference engine reproduces their arithmetic.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::stats::{aggregate, binomial_std_error, AggregateConfig, ComparisonReport, GameComparison};

const PUBLISHED: &str = include_str!("../../data/published_stats.json");

/// Half a unit in the third decimal.
pub const PRINTED_PRECISION: f64 = 0.0005;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PublishedRow {
    pub mean: f64,
    pub se: f64,
    pub proportion: f64,
    pub proportion_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedRow {
    pub comparison: String,
    #[serde(flatten)]
    pub row: PublishedRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedGrid {
    pub epsilon: f64,
    pub rows: Vec<NamedRow>,
}

impl PublishedGrid {
    pub fn row(&self, comparison: &str) -> Option<&PublishedRow> {
        self.rows.iter().find(|r| r.comparison == comparison).map(|r| &r.row)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedConstant {
    pub epsilon: f64,
    /// (estimate, robust SE) of the intercept.
    pub baseline: (f64, f64),
    pub hs_nash: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedCoverage {
    pub model: String,
    /// Percentages in coverage-summary field order.
    pub values: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedStats {
    pub games: usize,
    pub headline_epsilon: f64,
    pub grid: Vec<PublishedGrid>,
    pub subgroup_constants: Vec<PublishedConstant>,
    pub coverage: Vec<PublishedCoverage>,
}

impl PublishedStats {
    pub fn at(&self, epsilon: f64) -> Option<&PublishedGrid> {
        self.grid.iter().find(|g| (g.epsilon - epsilon).abs() < 1e-12)
    }
}

pub fn published_stats() -> &'static PublishedStats {
    static STATS: OnceLock<PublishedStats> = OnceLock::new();
    STATS.get_or_init(|| serde_json::from_str(PUBLISHED).expect("bundled statistics parse"))
}

/// Comparisons that cover every game; the mixed and pure rows are subsets.
pub const OVERALL_ROWS: [&str; 4] = ["baseline", "hs_nash", "random_pure", "uniform"];

/// Per-game ratios with the given mean, sample standard error of the mean
/// and share of strictly positive values. Built from normal quantiles with
/// the sign boundary placed by the share, then rescaled separately on each
/// side of zero.
pub fn synthesize_llrs(mean: f64, se: f64, proportion: f64, games: usize) -> Result<Vec<f64>> {
    let n = games;
    let positives = (proportion * n as f64).round() as usize;
    if n < 3 || positives == 0 || positives >= n || mean <= 0.0 || se <= 0.0 {
        return Err(Error::invalid("synthesis needs n >= 3, mixed signs and positive mean and SE"));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let z: Vec<f64> = (0..n).map(|i| normal.inverse_cdf((i as f64 + 0.5) / n as f64)).collect();
    let cut = 0.5 * (z[n - positives - 1] + z[n - positives]);
    let v: Vec<f64> = z.iter().map(|x| x - cut).collect();
    let (pos, neg): (Vec<f64>, Vec<f64>) = v.iter().partition(|x| **x > 0.0);
    let (a, b) = (pos.iter().sum::<f64>(), neg.iter().sum::<f64>());
    let (a2, b2) = (pos.iter().map(|x| x * x).sum::<f64>(), neg.iter().map(|x| x * x).sum::<f64>());

    // Scale positives by α and the rest by β:
    // αA + βB = nμ and α²A2 + β²B2 = (n − 1)s² + nμ² with s = se·√n.
    let nf = n as f64;
    let sd = se * nf.sqrt();
    let target = (nf - 1.0) * sd * sd + nf * mean * mean;
    let ra = a2 / (a * a);
    let qa = b * b * ra + b2;
    let qb = -2.0 * nf * mean * b * ra;
    let qc = nf * nf * mean * mean * ra - target;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(Error::invalid("no two-sided scaling reaches the requested spread"));
    }
    let beta = [(-qb + disc.sqrt()) / (2.0 * qa), (-qb - disc.sqrt()) / (2.0 * qa)]
        .into_iter()
        .find(|&beta| beta > 0.0 && (nf * mean - beta * b) / a > 0.0)
        .ok_or_else(|| Error::invalid("no sign-preserving scaling"))?;
    let alpha = (nf * mean - beta * b) / a;
    Ok(v.iter().map(|&x| if x > 0.0 { alpha * x } else { beta * x }).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureCheck {
    pub epsilon: f64,
    pub comparison: String,
    pub published: PublishedRow,
    pub report: ComparisonReport,
    /// Mean, sample SE, share and share SE agree to printed precision.
    pub matches: bool,
}

fn close(x: f64, printed: f64) -> bool {
    (x - printed).abs() <= PRINTED_PRECISION + 1e-9
}

/// Runs the aggregation on per-game ratios synthesized from each
/// full-sample published row.
pub fn reproduce_grid(cfg: &AggregateConfig) -> Result<Vec<FixtureCheck>> {
    let stats = published_stats();
    let mut out = Vec::new();
    for grid in &stats.grid {
        for name in OVERALL_ROWS {
            let row = *grid.row(name).ok_or_else(|| Error::invalid(format!("missing published row {name}")))?;
            let values = synthesize_llrs(row.mean, row.se, row.proportion, stats.games)?;
            let comps: Vec<GameComparison> = values
                .iter()
                .enumerate()
                .map(|(i, &v)| GameComparison { game_id: format!("g{i:04}"), responses: 1, llr: v, terms: vec![v] })
                .collect();
            let report = aggregate(&comps, cfg)?;
            let matches = close(report.mean_llr, row.mean)
                && close(report.sample_se, row.se)
                && close(report.best_predictor.proportion, row.proportion)
                && close(report.best_predictor.std_error, row.proportion_se);
            out.push(FixtureCheck { epsilon: grid.epsilon, comparison: name.into(), published: row, report, matches });
        }
    }
    Ok(out)
}

/// Sizes of the mixed-equilibrium subset for which the mixed, pure and
/// combined rows agree at every smoothing level: the combined mean lies in
/// the size-weighted range of the subset means, and some success counts
/// reproduce all three printed shares and their standard errors.
pub fn mixed_pure_splits() -> Vec<usize> {
    let stats = published_stats();
    let n = stats.games;
    let ok_share = |k: usize, size: usize, row: &PublishedRow| {
        close(k as f64 / size as f64, row.proportion) && close(binomial_std_error(k, size), row.proportion_se)
    };
    let candidates = |size: usize, row: &PublishedRow| -> Vec<usize> {
        let centre = (row.proportion * size as f64).round() as usize;
        (centre.saturating_sub(3)..=(centre + 3).min(size)).filter(|&k| ok_share(k, size, row)).collect()
    };
    (1..n)
        .filter(|&mixed| {
            let pure = n - mixed;
            let w = mixed as f64 / n as f64;
            stats.grid.iter().all(|g| {
                let (Some(all), Some(m), Some(p)) = (g.row("hs_nash"), g.row("hs_nash_mixed"), g.row("hs_nash_pure")) else {
                    return false;
                };
                let lo = w * m.mean + (1.0 - w) * p.mean - PRINTED_PRECISION;
                let hi = lo + 2.0 * PRINTED_PRECISION;
                if lo > all.mean + PRINTED_PRECISION || hi < all.mean - PRINTED_PRECISION {
                    return false;
                }
                let mixed_hits = candidates(mixed, m);
                let pure_hits = candidates(pure, p);
                mixed_hits.iter().any(|km| pure_hits.iter().any(|kp| close((km + kp) as f64 / n as f64, all.proportion)))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthesized_values_hit_targets() {
        let v = synthesize_llrs(1.227, 0.050, 0.715, 1477).unwrap();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((mean - 1.227).abs() < 1e-9);
        assert!(((var / n).sqrt() - 0.050).abs() < 1e-9);
        assert_eq!(v.iter().filter(|x| **x > 0.0).count(), 1056);
    }
}
