use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::llr::GameComparison;
use super::permutation::sign_permutation_test_with;
use super::proportion::{best_predictor_proportion, ProportionInterval};
use super::sample_variance;
use super::wilcoxon::wilcoxon_signed_rank;
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::seed;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateConfig {
    pub bootstrap_draws: usize,
    pub permutation_iterations: usize,
    pub level: f64,
    pub seed: u64,
    #[serde(default)]
    pub exec: Exec,
}

impl AggregateConfig {
    pub fn new(seed: u64) -> Self {
        AggregateConfig { bootstrap_draws: 10_000, permutation_iterations: 100_000, level: 0.95, seed, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceDecomposition {
    /// Sample variance of the per-game ratios.
    pub between_game: f64,
    /// Mean over games of within-game term variance divided by responses.
    pub within_game: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub games: usize,
    pub responses: usize,
    pub mean_llr: f64,
    /// exp(mean_llr): the per-observation likelihood ratio.
    pub ratio: f64,
    pub bootstrap_se: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub sample_se: f64,
    pub best_predictor: ProportionInterval,
    /// Absent when fewer than five games have a nonzero ratio.
    pub wilcoxon_p: Option<f64>,
    pub permutation_p: f64,
    pub variance: VarianceDecomposition,
    pub bootstrap_draws: usize,
    pub permutation_iterations: usize,
    pub seed: u64,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Resampled means over games, one derived stream per resample.
fn bootstrap_means(values: &[f64], draws: usize, root: u64, exec: Exec) -> Vec<f64> {
    let n = values.len();
    par::map_range(exec, draws, |b| {
        let mut rng = seed::derived_rng(root, "stats/bootstrap", "resample", b as u64);
        (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64
    })
}

pub fn aggregate(comparisons: &[GameComparison], cfg: &AggregateConfig) -> Result<ComparisonReport> {
    if comparisons.len() < 2 {
        return Err(Error::invalid("aggregation needs at least two games"));
    }
    let values: Vec<f64> = comparisons.iter().map(|c| c.llr).collect();
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;

    let mut means = bootstrap_means(&values, cfg.bootstrap_draws, cfg.seed, cfg.exec);
    let bootstrap_se = sample_variance(&means).sqrt();
    means.sort_by(f64::total_cmp);
    let alpha = 1.0 - cfg.level;
    let between = sample_variance(&values);
    let within = comparisons.iter().map(|c| c.within_variance() / c.responses as f64).sum::<f64>() / n as f64;

    let wilcoxon_p = match wilcoxon_signed_rank(&values) {
        Ok(p) => Some(p),
        Err(Error::AllZeros | Error::Invalid(_)) => None,
        Err(e) => return Err(e),
    };
    let permutation_seed = seed::derive(cfg.seed, "stats/aggregate", "permutation", 0);
    Ok(ComparisonReport {
        games: n,
        responses: comparisons.iter().map(|c| c.responses).sum(),
        mean_llr: mean,
        ratio: mean.exp(),
        bootstrap_se,
        ci_lower: percentile(&means, alpha / 2.0),
        ci_upper: percentile(&means, 1.0 - alpha / 2.0),
        sample_se: (between / n as f64).sqrt(),
        best_predictor: best_predictor_proportion(comparisons, cfg.level)?,
        wilcoxon_p,
        permutation_p: sign_permutation_test_with(&values, cfg.permutation_iterations, permutation_seed, cfg.exec)?,
        variance: VarianceDecomposition { between_game: between, within_game: within },
        bootstrap_draws: cfg.bootstrap_draws,
        permutation_iterations: cfg.permutation_iterations,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(id: &str, terms: Vec<f64>) -> GameComparison {
        let llr = terms.iter().sum::<f64>() / terms.len() as f64;
        GameComparison { game_id: id.into(), responses: terms.len(), llr, terms }
    }

    #[test]
    fn constant_comparisons_have_zero_se() {
        let comps: Vec<_> = (0..6).map(|i| comp(&i.to_string(), vec![0.5, 0.5])).collect();
        let mut cfg = AggregateConfig::new(1);
        cfg.bootstrap_draws = 500;
        cfg.permutation_iterations = 500;
        let r = aggregate(&comps, &cfg).unwrap();
        assert_eq!(r.mean_llr, 0.5);
        assert!(r.bootstrap_se < 1e-15);
        assert_eq!(r.best_predictor.proportion, 1.0);
        assert_eq!(r.variance.within_game, 0.0);
    }
}
