use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use super::llr::GameComparison;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionInterval {
    pub successes: usize,
    pub trials: usize,
    pub proportion: f64,
    /// sqrt(p(1 − p)/n).
    pub std_error: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

/// Quantile of Beta(a, b) by bisection on the regularized incomplete beta.
fn beta_quantile(a: f64, b: f64, q: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// sqrt(p(1 − p)/n) at p = x/n.
pub fn binomial_std_error(successes: usize, trials: usize) -> f64 {
    let p = successes as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Exact binomial interval from beta quantiles.
pub fn clopper_pearson(successes: usize, trials: usize, level: f64) -> Result<ProportionInterval> {
    if trials == 0 || successes > trials || !(0.0..1.0).contains(&level) {
        return Err(Error::invalid("clopper-pearson needs 0 <= x <= n, n > 0 and a level in (0, 1)"));
    }
    let (x, n) = (successes as f64, trials as f64);
    let alpha = 1.0 - level;
    let lower = if successes == 0 { 0.0 } else { beta_quantile(x, n - x + 1.0, alpha / 2.0) };
    let upper = if successes == trials { 1.0 } else { beta_quantile(x + 1.0, n - x, 1.0 - alpha / 2.0) };
    let p = x / n;
    Ok(ProportionInterval {
        successes,
        trials,
        proportion: p,
        std_error: binomial_std_error(successes, trials),
        lower,
        upper,
        level,
    })
}

/// Share of games where model A wins strictly.
pub fn best_predictor_proportion(comparisons: &[GameComparison], level: f64) -> Result<ProportionInterval> {
    let wins = comparisons.iter().filter(|c| c.llr > 0.0).count();
    clopper_pearson(wins, comparisons.len(), level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_edges() {
        let all = clopper_pearson(10, 10, 0.95).unwrap();
        assert!((all.lower - 0.025f64.powf(0.1)).abs() < 1e-10);
        let none = clopper_pearson(0, 10, 0.95).unwrap();
        assert!((none.upper - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-10);
    }
}
