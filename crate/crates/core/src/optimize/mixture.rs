use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng as _;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::distance::{distance_probs, spacings, DistanceKind, DistanceMeasure};
use super::simplex::project_to_simplex;
use crate::agents::ResponseDistribution;
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::seed;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Solve the linear program for piecewise-linear measures after descent.
    pub polish: bool,
    pub exec: Exec,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig { restarts: 16, max_iterations: 400, polish: true, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub start: Vec<f64>,
    /// Objective after every accepted iterate, starting at the start point.
    pub objectives: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureFit {
    pub weights: Vec<f64>,
    pub objective: f64,
    pub measure: DistanceMeasure,
    pub candidates: Vec<String>,
    pub restarts: Vec<RestartTrace>,
    pub best_restart: usize,
    pub polished: bool,
}

impl MixtureFit {
    /// The mixed distribution Σ w·candidate.
    pub fn mixture(&self, candidates: &[ResponseDistribution]) -> Result<ResponseDistribution> {
        crate::agents::mixture_distribution(candidates, &self.weights)
    }
}

struct Problem1<'a> {
    target: &'a [f64],
    cands: Vec<&'a [f64]>,
    measure: DistanceMeasure,
    spacing: Vec<f64>,
}

impl Problem1<'_> {
    fn mix(&self, w: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.target.len()];
        for (wi, c) in w.iter().zip(&self.cands) {
            for (qk, ck) in q.iter_mut().zip(c.iter()) {
                *qk += wi * ck;
            }
        }
        q
    }

    fn objective(&self, w: &[f64]) -> f64 {
        distance_probs(self.target, &self.mix(w), &self.measure, &self.spacing).unwrap_or(f64::INFINITY)
    }

    /// Residual rows (coefficient, target value, per-candidate values) of a
    /// piecewise-linear measure.
    fn linear_rows(&self) -> Vec<(f64, f64, Vec<f64>)> {
        let k = self.target.len();
        match self.measure.kind {
            DistanceKind::MeanAbsoluteError => (0..k)
                .map(|j| (1.0 / k as f64, self.target[j], self.cands.iter().map(|c| c[j]).collect()))
                .collect(),
            DistanceKind::CdfAbsolute | DistanceKind::EarthMover1d => {
                let mut fp = 0.0;
                let mut fc = vec![0.0; self.cands.len()];
                let mut rows = Vec::with_capacity(k.saturating_sub(1));
                for j in 0..k.saturating_sub(1) {
                    fp += self.target[j];
                    for (f, c) in fc.iter_mut().zip(&self.cands) {
                        *f += c[j];
                    }
                    let coef = if self.measure.kind == DistanceKind::CdfAbsolute { 1.0 } else { self.spacing[j] };
                    rows.push((coef, fp, fc.clone()));
                }
                rows
            }
            DistanceKind::ForwardKl => Vec::new(),
        }
    }

    /// Gradient of the objective, with |r| replaced by sqrt(r² + δ²).
    fn gradient(&self, w: &[f64], rows: &[(f64, f64, Vec<f64>)], delta: f64) -> Vec<f64> {
        let n = self.cands.len();
        let mut g = vec![0.0; n];
        if self.measure.kind == DistanceKind::ForwardKl {
            let k = self.target.len() as f64;
            let eps = self.measure.smoothing.unwrap_or(0.0);
            let q = self.mix(w);
            for (j, &p) in self.target.iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                let qs = ((1.0 - eps) * q[j] + eps / k).max(1e-300);
                for (gi, c) in g.iter_mut().zip(&self.cands) {
                    *gi -= p / qs * (1.0 - eps) * c[j];
                }
            }
        } else {
            for (coef, a, b) in rows {
                let r: f64 = a - b.iter().zip(w).map(|(bi, wi)| bi * wi).sum::<f64>();
                let s = coef * r / (r * r + delta * delta).sqrt();
                for (gi, bi) in g.iter_mut().zip(b) {
                    *gi -= s * bi;
                }
            }
        }
        g
    }

    fn descend(&self, start: Vec<f64>, max_iter: usize) -> RestartTrace {
        let rows = self.linear_rows();
        let mut w = start.clone();
        let mut f = self.objective(&w);
        let mut objectives = vec![f];
        let mut step = 0.5;
        let mut delta = 1e-3;
        for _ in 0..max_iter {
            let g = self.gradient(&w, &rows, delta);
            let trial: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - step * gi).collect();
            let cand = project_to_simplex(&trial);
            let fc = self.objective(&cand);
            if fc < f {
                w = cand;
                f = fc;
                objectives.push(f);
                step *= 1.5;
            } else {
                step *= 0.5;
                if step < 1e-12 {
                    if self.measure.kind.is_polyhedral() && delta > 1e-9 {
                        delta *= 0.1;
                        step = 0.5;
                    } else {
                        break;
                    }
                }
            }
        }
        RestartTrace { start, objectives, weights: w }
    }

    fn solve_lp(&self) -> Option<Vec<f64>> {
        let rows = self.linear_rows();
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let ws: Vec<_> = self.cands.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
        for (coef, a, b) in &rows {
            let t = lp.add_var(*coef, (0.0, f64::INFINITY));
            let mut ge: Vec<_> = vec![(t, 1.0)];
            let mut le: Vec<_> = vec![(t, 1.0)];
            for (v, bi) in ws.iter().zip(b) {
                ge.push((*v, *bi));
                le.push((*v, -*bi));
            }
            lp.add_constraint(ge.as_slice(), ComparisonOp::Ge, *a);
            lp.add_constraint(le.as_slice(), ComparisonOp::Ge, -*a);
        }
        let sum: Vec<_> = ws.iter().map(|v| (*v, 1.0)).collect();
        lp.add_constraint(sum.as_slice(), ComparisonOp::Eq, 1.0);
        let sol = lp.solve().ok()?;
        let raw: Vec<f64> = ws.iter().map(|v| sol[*v].max(0.0)).collect();
        let total: f64 = raw.iter().sum();
        (total > 0.0).then(|| raw.iter().map(|x| x / total).collect())
    }
}

fn start_point(n: usize, root: u64, restart: usize) -> Vec<f64> {
    if restart == 0 {
        return vec![1.0 / n as f64; n];
    }
    let mut rng = seed::derived_rng(root, "optimize/select", "restart", restart as u64);
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.iter().map(|x| x / total).collect()
}

/// Fit simplex weights over raw probability vectors.
pub fn select_mixture_probs(
    candidates: &[&[f64]],
    target: &[f64],
    measure: &DistanceMeasure,
    spacing: &[f64],
    seed: u64,
    cfg: &SelectConfig,
) -> Result<(Vec<f64>, f64, Vec<RestartTrace>, usize, bool)> {
    if candidates.is_empty() {
        return Err(Error::invalid("mixture selection needs at least one candidate"));
    }
    if candidates.iter().any(|c| c.len() != target.len()) {
        return Err(Error::MismatchedSettings);
    }
    let prob = Problem1 { target, cands: candidates.to_vec(), measure: *measure, spacing: spacing.to_vec() };
    let n = candidates.len();
    let restarts = cfg.restarts.max(1);
    let traces = par::map_range(cfg.exec, restarts, |r| prob.descend(start_point(n, seed, r), cfg.max_iterations));

    let mut best_restart = 0;
    for (i, t) in traces.iter().enumerate() {
        if t.objectives.last() < traces[best_restart].objectives.last() {
            best_restart = i;
        }
    }
    let mut weights = traces[best_restart].weights.clone();
    let mut objective = *traces[best_restart].objectives.last().unwrap_or(&f64::INFINITY);
    let mut polished = false;
    if cfg.polish && measure.kind.is_polyhedral() {
        if let Some(w) = prob.solve_lp() {
            let f = prob.objective(&w);
            if f <= objective {
                weights = w;
                objective = f;
                polished = true;
            }
        }
    }
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let f = prob.objective(&e);
        if f < objective {
            weights = e;
            objective = f;
            polished = true;
        }
    }
    if !objective.is_finite() {
        let idx = target.iter().zip(0..).find(|(p, k)| **p > 0.0 && candidates.iter().all(|c| c[*k] <= 0.0));
        return Err(Error::SupportViolation { index: idx.map_or(0, |(_, k)| k) });
    }
    Ok((weights, objective, traces, best_restart, polished))
}

pub fn select_mixture(
    candidates: &[ResponseDistribution],
    target: &ResponseDistribution,
    measure: &DistanceMeasure,
    seed: u64,
    cfg: &SelectConfig,
) -> Result<MixtureFit> {
    if candidates.iter().any(|c| c.actions != target.actions) {
        return Err(Error::MismatchedSettings);
    }
    let probs: Vec<&[f64]> = candidates.iter().map(|c| c.probs.as_slice()).collect();
    let spacing = spacings(&target.actions);
    let (weights, objective, restarts, best_restart, polished) =
        select_mixture_probs(&probs, &target.probs, measure, &spacing, seed, cfg)?;
    Ok(MixtureFit {
        weights,
        objective,
        measure: *measure,
        candidates: candidates.iter().map(|c| c.setting_id.clone()).collect(),
        restarts,
        best_restart,
        polished,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(cands: &[&[f64]], target: &[f64], kind: DistanceKind) -> (Vec<f64>, f64, Vec<RestartTrace>) {
        let spacing = vec![1.0; target.len() - 1];
        let (w, f, t, _, _) =
            select_mixture_probs(cands, target, &DistanceMeasure::new(kind), &spacing, 7, &SelectConfig::default()).unwrap();
        (w, f, t)
    }

    #[test]
    fn recovers_two_component_mix() {
        let a = [0.6, 0.3, 0.1, 0.0];
        let b = [0.0, 0.2, 0.3, 0.5];
        let target: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.3 * x + 0.7 * y).collect();
        for kind in [DistanceKind::CdfAbsolute, DistanceKind::MeanAbsoluteError, DistanceKind::ForwardKl] {
            let (w, f, traces) = fit(&[&a, &b], &target, kind);
            assert!((w[0] - 0.3).abs() < 1e-3 && (w[1] - 0.7).abs() < 1e-3, "{kind:?} {w:?}");
            assert!(f < 1e-6);
            for t in traces {
                assert!(t.objectives.windows(2).all(|p| p[1] <= p[0]));
            }
        }
    }

    #[test]
    fn single_candidate_gets_all_weight() {
        let (w, _, _) = fit(&[&[0.5, 0.5]], &[0.2, 0.8], DistanceKind::CdfAbsolute);
        assert_eq!(w, vec![1.0]);
    }
}
