//! Likelihood-ratio comparisons between response models and the tests and
//! summaries built on them.

mod aggregate;
mod coverage;
mod llr;
mod ols;
mod permutation;
mod proportion;
pub mod report;
mod smooth;
mod wilcoxon;

pub use aggregate::{aggregate, AggregateConfig, ComparisonReport, VarianceDecomposition};
pub use coverage::{support_coverage, CoverageSummary};
pub use llr::{game_llr, GameComparison};
pub use ols::{ols_robust, subgroup_regression, Design, Factor, HcFlavor, OlsFit};
pub use permutation::{sign_permutation_exact, sign_permutation_test, sign_permutation_test_with};
pub use proportion::{best_predictor_proportion, binomial_std_error, clopper_pearson, ProportionInterval};
pub use smooth::{smooth, SmoothedModel};
pub use wilcoxon::wilcoxon_signed_rank;

/// Smoothing levels of the robustness grid; 0.2 is the headline.
pub const EPSILON_GRID: [f64; 4] = [0.05, 0.1, 0.2, 0.3];
pub const HEADLINE_EPSILON: f64 = 0.2;

/// Sample variance with the n − 1 divisor; zero below two values.
pub(crate) fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}
