//! Logit homotopy from the best response to a prior (α = 0) to the game
//! itself (α = 1), followed with annealed precision and snapped to the
//! nearest exact equilibrium.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::strategy::{EquilibriumProfile, MixedStrategy};
use crate::error::{Error, Result};
use crate::games::SymmetricGame;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub steps: usize,
    pub lambda_start: f64,
    pub lambda_end: f64,
    /// First nonzero α; the grid is geometric from here to 1.
    pub alpha_floor: f64,
    pub tolerance: f64,
    pub max_newton: usize,
    pub max_subdivisions: u32,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            steps: 200,
            lambda_start: 1.0,
            lambda_end: 1e4,
            alpha_floor: 1e-3,
            tolerance: 1e-11,
            max_newton: 60,
            max_subdivisions: 12,
        }
    }
}

struct Path<'a> {
    a: DMatrix<f64>,
    prior_payoff: DVector<f64>,
    cfg: &'a TraceConfig,
}

fn log_sum_exp(v: &DVector<f64>) -> f64 {
    let m = v.max();
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl Path<'_> {
    fn alpha(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.cfg.alpha_floor.powf(1.0 - t)
        }
    }

    fn lambda(&self, t: f64) -> f64 {
        self.cfg.lambda_start * (self.cfg.lambda_end / self.cfg.lambda_start).powf(t)
    }

    fn scaled_utility(&self, sigma: &DVector<f64>, alpha: f64, lambda: f64) -> DVector<f64> {
        (&self.prior_payoff * (1.0 - alpha) + (&self.a * sigma) * alpha) * lambda
    }

    fn residual(&self, z: &DVector<f64>, alpha: f64, lambda: f64) -> DVector<f64> {
        let sigma = z.map(f64::exp);
        let lu = self.scaled_utility(&sigma, alpha, lambda);
        let lse = log_sum_exp(&lu);
        z - lu.add_scalar(-lse)
    }

    fn newton(&self, z0: &DVector<f64>, alpha: f64, lambda: f64) -> Option<DVector<f64>> {
        let n = z0.len();
        let mut z = z0.clone();
        let mut g = self.residual(&z, alpha, lambda);
        for _ in 0..self.cfg.max_newton {
            let norm = g.amax();
            if norm < self.cfg.tolerance {
                return Some(z);
            }
            let sigma = z.map(f64::exp);
            let lu = self.scaled_utility(&sigma, alpha, lambda);
            let lse = log_sum_exp(&lu);
            let s = lu.add_scalar(-lse).map(f64::exp);
            // J = I − λα (I − 1 sᵀ) A diag(σ)
            let a_diag = &self.a * DMatrix::from_diagonal(&sigma);
            let proj = DMatrix::identity(n, n) - DMatrix::from_element(n, 1, 1.0) * s.transpose();
            let jac = DMatrix::identity(n, n) - proj * a_diag * (lambda * alpha);
            let step = jac.lu().solve(&(-&g))?;
            let mut t = 1.0;
            loop {
                let trial = &z + &step * t;
                let gt = self.residual(&trial, alpha, lambda);
                if gt.iter().all(|v| v.is_finite()) && gt.amax() < norm {
                    z = trial;
                    g = gt;
                    break;
                }
                t *= 0.5;
                if t < 1e-10 {
                    return None;
                }
            }
        }
        (g.amax() < self.cfg.tolerance).then_some(z)
    }

    /// Advances from `t0` to `t1`, halving the interval on failure.
    fn advance(&self, z: &DVector<f64>, t0: f64, t1: f64, depth: u32) -> Result<DVector<f64>> {
        if let Some(next) = self.newton(z, self.alpha(t1), self.lambda(t1)) {
            return Ok(next);
        }
        if depth >= self.cfg.max_subdivisions {
            return Err(Error::NoConvergence { alpha: self.alpha(t1) });
        }
        let mid = 0.5 * (t0 + t1);
        let half = self.advance(z, t0, mid, depth + 1)?;
        self.advance(&half, mid, t1, depth + 1)
    }
}

/// Endpoint of the traced path as a floating-point distribution.
pub fn logit_path_endpoint(game: &SymmetricGame, prior: &MixedStrategy, cfg: &TraceConfig) -> Result<Vec<f64>> {
    let n = game.n();
    if prior.len() != n {
        return Err(Error::invalid("prior length differs from the action count"));
    }
    let (lo, hi) = (game.min_payoff() as f64, game.max_payoff() as f64);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let a = DMatrix::from_fn(n, n, |i, j| (game.payoff(i, j) as f64 - lo) / span);
    let prior_v = DVector::from_vec(prior.to_f64());
    let prior_payoff = &a * &prior_v;
    let path = Path { a, prior_payoff, cfg };

    let lu0 = path.scaled_utility(&prior_v, 0.0, path.lambda(0.0));
    let mut z = lu0.add_scalar(-log_sum_exp(&lu0));
    let steps = cfg.steps.max(1);
    for k in 1..=steps {
        let (t0, t1) = ((k - 1) as f64 / steps as f64, k as f64 / steps as f64);
        z = path.advance(&z, t0, t1, 0)?;
    }
    Ok(z.iter().map(|v| v.exp()).collect())
}

/// Traces from `prior` and returns the candidate equilibrium closest to the
/// endpoint (largest total-variation distance over the two players; ties go
/// to the earlier candidate).
pub fn logit_trace(
    game: &SymmetricGame,
    prior: &MixedStrategy,
    candidates: &[EquilibriumProfile],
    cfg: &TraceConfig,
) -> Result<EquilibriumProfile> {
    if candidates.is_empty() {
        return Err(Error::invalid("no equilibria to snap to"));
    }
    let end = logit_path_endpoint(game, prior, cfg)?;
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, e) in candidates.iter().enumerate() {
        let d = e.row.tv_distance(&end).max(e.col.tv_distance(&end));
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    Ok(candidates[best].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stag_hunt_traces_to_hare() {
        let g = SymmetricGame::from_matrix(vec![vec![4, 0], vec![3, 3]]).unwrap();
        let end = logit_path_endpoint(&g, &MixedStrategy::uniform(2), &TraceConfig::default()).unwrap();
        assert!(end[1] > 1.0 - 1e-9, "{end:?}");
    }

    #[test]
    fn dominant_strategy_endpoint() {
        let g = SymmetricGame::from_matrix(vec![vec![3, 0], vec![5, 1]]).unwrap();
        let end = logit_path_endpoint(&g, &MixedStrategy::uniform(2), &TraceConfig::default()).unwrap();
        assert!(end[1] > 1.0 - 1e-9);
        assert!((end.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}
