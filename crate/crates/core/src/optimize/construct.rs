use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::distance::{mean_distance, DistanceMeasure};
use super::gp::{expected_improvement, Gp};
use crate::agents::{PromptSpec, ResponseDistribution};
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::seed;

/// Boxes at most this large are scored point by point during guided search.
const ENUMERATE_LIMIT: u128 = 200_000;
const RANDOM_CANDIDATES: usize = 4096;
const EI_MARGIN: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntBox {
    /// Inclusive (min, max) per dimension.
    pub ranges: Vec<(i64, i64)>,
}

impl IntBox {
    pub fn new(ranges: Vec<(i64, i64)>) -> Result<Self> {
        if ranges.is_empty() || ranges.iter().any(|(lo, hi)| lo > hi) {
            return Err(Error::invalid("integer box needs nonempty ranges with min <= max"));
        }
        Ok(IntBox { ranges })
    }

    pub fn dims(&self) -> usize {
        self.ranges.len()
    }

    pub fn size(&self) -> u128 {
        self.ranges.iter().fold(1u128, |acc, (lo, hi)| acc.saturating_mul((hi - lo + 1) as u128))
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.dims() && p.iter().zip(&self.ranges).all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    fn normalize(&self, p: &[i64]) -> Vec<f64> {
        p.iter()
            .zip(&self.ranges)
            .map(|(&v, &(lo, hi))| if hi == lo { 0.5 } else { (v - lo) as f64 / (hi - lo) as f64 })
            .collect()
    }

    fn round(&self, u: &[f64]) -> Vec<i64> {
        u.iter()
            .zip(&self.ranges)
            .map(|(&x, &(lo, hi))| (lo as f64 + x * (hi - lo) as f64).round().clamp(lo as f64, hi as f64) as i64)
            .collect()
    }

    fn point_at(&self, mut idx: u128) -> Vec<i64> {
        let mut p = vec![0; self.dims()];
        for d in (0..self.dims()).rev() {
            let (lo, hi) = self.ranges[d];
            let r = (hi - lo + 1) as u128;
            p[d] = lo + (idx % r) as i64;
            idx /= r;
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub init: usize,
    pub guided: usize,
}

impl Budget {
    /// Parses "init+guided", e.g. "5+15".
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s.split_once('+').ok_or_else(|| Error::invalid(format!("budget {s:?} is not init+guided")))?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| Error::invalid(format!("bad budget {s:?}")));
        Ok(Budget { init: num(a)?, guided: num(b)? })
    }

    pub fn total(&self) -> usize {
        self.init + self.guided
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget { init: 5, guided: 15 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstructConfig {
    pub budget: Budget,
    pub seed: u64,
    /// Stop once reached; failing to reach it is `BudgetExhausted`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_objective: Option<f64>,
    #[serde(default)]
    pub exec: Exec,
}

impl ConstructConfig {
    pub fn new(budget: Budget, seed: u64) -> Self {
        ConstructConfig { budget, seed, target_objective: None, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Init,
    Guided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub point: Vec<i64>,
    pub objective: f64,
    pub phase: Phase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_improvement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamFit {
    pub bounds: IntBox,
    pub slot_width: usize,
    pub best: Vec<i64>,
    pub best_objective: f64,
    pub log: Vec<Evaluation>,
    pub budget: Budget,
    pub evaluations: usize,
}

impl ParamFit {
    pub fn best_by_slot(&self) -> Vec<Vec<i64>> {
        self.best.chunks(self.slot_width.max(1)).map(<[i64]>::to_vec).collect()
    }
}

fn latin_hypercube(bx: &IntBox, n: usize, rng: &mut seed::Rng) -> Vec<Vec<i64>> {
    let mut cols: Vec<Vec<i64>> = Vec::with_capacity(bx.dims());
    for &(lo, hi) in &bx.ranges {
        let width = (hi - lo + 1) as f64;
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(rng);
        cols.push(
            strata
                .iter()
                .map(|&s| {
                    let u = (s as f64 + rng.random::<f64>()) / n as f64;
                    (lo + (u * width).floor() as i64).min(hi)
                })
                .collect(),
        );
    }
    (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

fn random_point(bx: &IntBox, rng: &mut seed::Rng) -> Vec<i64> {
    bx.ranges.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect()
}

struct Search<'a, F> {
    bx: &'a IntBox,
    objective: F,
    exec: Exec,
    log: Vec<Evaluation>,
    seen: HashSet<Vec<i64>>,
}

impl<F: Fn(&[i64]) -> Result<f64> + Sync> Search<'_, F> {
    fn evaluate(&mut self, batch: Vec<(Vec<i64>, Option<f64>)>, phase: Phase) -> Result<()> {
        let values = par::map(self.exec, &batch, |(p, _)| (self.objective)(p));
        for ((point, ei), value) in batch.into_iter().zip(values) {
            self.seen.insert(point.clone());
            self.log.push(Evaluation { point, objective: value?, phase, expected_improvement: ei });
        }
        Ok(())
    }

    fn best(&self) -> Option<&Evaluation> {
        self.log.iter().fold(None, |acc: Option<&Evaluation>, e| match acc {
            Some(b) if b.objective <= e.objective => Some(b),
            _ => Some(e),
        })
    }

    /// Highest expected improvement among unevaluated integer points.
    fn propose(&self, rng: &mut seed::Rng) -> Option<(Vec<i64>, f64)> {
        let finite: Vec<&Evaluation> = self.log.iter().filter(|e| e.objective.is_finite()).collect();
        let xs: Vec<Vec<f64>> = finite.iter().map(|e| self.bx.normalize(&e.point)).collect();
        let ys: Vec<f64> = finite.iter().map(|e| e.objective).collect();
        let incumbent = ys.iter().copied().fold(f64::INFINITY, f64::min);
        let Some(gp) = Gp::fit(&xs, &ys) else {
            return self.unseen_random(rng).map(|p| (p, 0.0));
        };
        let margin = EI_MARGIN * ys.iter().map(|y| (y - incumbent).abs()).fold(0.0, f64::max).max(1e-12);
        let score = |p: &[i64]| {
            let (mu, sd) = gp.predict(&self.bx.normalize(p));
            expected_improvement(mu, sd, incumbent, margin)
        };

        let size = self.bx.size();
        let mut best: Option<(Vec<i64>, f64)> = None;
        let mut consider = |p: Vec<i64>, ei: f64| {
            if best.as_ref().is_none_or(|(_, b)| ei > *b) {
                best = Some((p, ei));
            }
        };
        if size <= ENUMERATE_LIMIT {
            let n = size as usize;
            let scored = par::map_range(self.exec, n, |i| {
                let p = self.bx.point_at(i as u128);
                if self.seen.contains(&p) { None } else { Some((score(&p), p)) }
            });
            for (ei, p) in scored.into_iter().flatten() {
                consider(p, ei);
            }
        } else {
            let pts: Vec<Vec<f64>> =
                (0..RANDOM_CANDIDATES).map(|_| (0..self.bx.dims()).map(|_| rng.random::<f64>()).collect()).collect();
            let scored = par::map(self.exec, &pts, |u| {
                let (mu, sd) = gp.predict(u);
                expected_improvement(mu, sd, incumbent, margin)
            });
            let mut order: Vec<usize> = (0..pts.len()).collect();
            order.sort_by(|&a, &b| scored[b].total_cmp(&scored[a]).then(a.cmp(&b)));
            for i in order {
                let p = self.bx.round(&pts[i]);
                if !self.seen.contains(&p) {
                    let ei = score(&p);
                    consider(p, ei);
                    break;
                }
            }
            // Coordinate refinement around the incumbent's neighbours.
            if let Some(b) = self.best() {
                for d in 0..self.bx.dims() {
                    for step in [-1i64, 1] {
                        let mut p = b.point.clone();
                        p[d] += step;
                        if self.bx.contains(&p) && !self.seen.contains(&p) {
                            let ei = score(&p);
                            consider(p, ei);
                        }
                    }
                }
            }
        }
        best.or_else(|| self.unseen_random(rng).map(|p| (p, 0.0)))
    }

    fn unseen_random(&self, rng: &mut seed::Rng) -> Option<Vec<i64>> {
        if self.seen.len() as u128 >= self.bx.size() {
            return None;
        }
        if self.bx.size() <= ENUMERATE_LIMIT {
            let free: Vec<u128> = (0..self.bx.size()).filter(|&i| !self.seen.contains(&self.bx.point_at(i))).collect();
            return free.get(rng.random_range(0..free.len())).map(|&i| self.bx.point_at(i));
        }
        (0..10_000).map(|_| random_point(self.bx, rng)).find(|p| !self.seen.contains(p))
    }
}

/// Seeded Latin-hypercube start followed by Gaussian-process expected
/// improvement proposals, each projected to the nearest unevaluated integer
/// point.
pub fn minimize_integer_box<F>(bx: &IntBox, slot_width: usize, cfg: &ConstructConfig, objective: F) -> Result<ParamFit>
where
    F: Fn(&[i64]) -> Result<f64> + Sync,
{
    let mut rng = seed::derived_rng(cfg.seed, "optimize/construct", "search", 0);
    let mut search = Search { bx, objective, exec: cfg.exec, log: Vec::new(), seen: HashSet::new() };

    let mut init = Vec::new();
    let mut pending: HashSet<Vec<i64>> = HashSet::new();
    for p in latin_hypercube(bx, cfg.budget.init, &mut rng) {
        let mut p = p;
        let mut tries = 0;
        while pending.contains(&p) && tries < 1000 {
            p = random_point(bx, &mut rng);
            tries += 1;
        }
        if pending.insert(p.clone()) {
            init.push((p, None));
        }
    }
    search.evaluate(init, Phase::Init)?;

    let reached = |s: &Search<'_, F>| match (cfg.target_objective, s.best()) {
        (Some(t), Some(b)) => b.objective <= t,
        _ => false,
    };
    for _ in 0..cfg.budget.guided {
        if reached(&search) {
            break;
        }
        let Some((p, ei)) = search.propose(&mut rng) else { break };
        search.evaluate(vec![(p, Some(ei))], Phase::Guided)?;
    }

    let best = search.best().cloned();
    let (best_point, best_objective) = best.map_or((Vec::new(), f64::INFINITY), |b| (b.point, b.objective));
    if let Some(target) = cfg.target_objective {
        if best_objective > target {
            return Err(Error::BudgetExhausted {
                evaluations: search.log.len(),
                best_objective,
                best_point,
            });
        }
    }
    Ok(ParamFit {
        bounds: bx.clone(),
        slot_width,
        best: best_point,
        best_objective,
        evaluations: search.log.len(),
        log: search.log,
        budget: cfg.budget,
    })
}

/// Searches trait values for `slots` copies of `template`. The evaluator
/// receives one bound prompt per slot and returns one distribution per
/// target setting, in target order.
pub fn construct_params<E>(
    template: &PromptSpec,
    slots: usize,
    targets: &[ResponseDistribution],
    measure: &DistanceMeasure,
    cfg: &ConstructConfig,
    evaluator: E,
) -> Result<ParamFit>
where
    E: Fn(&[PromptSpec]) -> Result<Vec<ResponseDistribution>> + Sync,
{
    let width = template.parameters.len();
    if slots == 0 || width == 0 {
        return Err(Error::invalid("construction needs at least one slot and one trait parameter"));
    }
    let ranges = (0..slots).flat_map(|_| template.parameters.iter().map(|p| (p.min, p.max))).collect();
    let bx = IntBox::new(ranges)?;
    minimize_integer_box(&bx, width, cfg, |point| {
        let prompts = point.chunks(width).map(|vals| template.with_values(vals)).collect::<Result<Vec<_>>>()?;
        let preds = evaluator(&prompts)?;
        mean_distance(targets, &preds, measure)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_budget_finds_optimum() {
        let bx = IntBox::new(vec![(1, 10)]).unwrap();
        let cfg = ConstructConfig::new(Budget { init: 20, guided: 0 }, 3);
        let fit = minimize_integer_box(&bx, 1, &cfg, |p| Ok(((p[0] - 7) as f64).abs())).unwrap();
        assert_eq!(fit.best, vec![7]);
        assert_eq!(fit.evaluations, 10);
    }

    #[test]
    fn log_is_in_box_and_unique() {
        let bx = IntBox::new(vec![(1, 10), (1, 10), (1, 10)]).unwrap();
        let cfg = ConstructConfig::new(Budget::default(), 11);
        let fit = minimize_integer_box(&bx, 3, &cfg, |p| Ok(p.iter().map(|v| (v - 4) as f64).map(|d| d * d).sum())).unwrap();
        assert_eq!(fit.log.len(), 20);
        let set: HashSet<_> = fit.log.iter().map(|e| e.point.clone()).collect();
        assert_eq!(set.len(), 20);
        assert!(fit.log.iter().all(|e| bx.contains(&e.point)));
        assert!(fit.log.iter().all(|e| e.objective >= fit.best_objective));
    }

    #[test]
    fn unreached_target_reports_best() {
        let bx = IntBox::new(vec![(1, 5)]).unwrap();
        let mut cfg = ConstructConfig::new(Budget { init: 2, guided: 1 }, 1);
        cfg.target_objective = Some(-1.0);
        match minimize_integer_box(&bx, 1, &cfg, |p| Ok(p[0] as f64)) {
            Err(Error::BudgetExhausted { evaluations: 3, best_point, .. }) => assert_eq!(best_point.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_budget() {
        assert_eq!(Budget::parse("5+15").unwrap(), Budget { init: 5, guided: 15 });
        assert!(Budget::parse("20").is_err());
    }
}
