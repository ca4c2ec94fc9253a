use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::family::{FamilyConfig, Population};
use super::spec::{BonusRule, GameSpec, PointsRule};
use crate::error::{Error, Result};

type Q = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    /// Equal mass on every representative.
    Uniform,
    /// Gap-free bonus rules 0.086 each, gap-using rules share the rest;
    /// costless points rule 0.095, the other five share the rest; all
    /// remaining parameters uniform over raw specs.
    Paper,
}

impl WeightScheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WeightScheme::Uniform),
            "paper" => Ok(WeightScheme::Paper),
            other => Err(Error::invalid(format!("unknown weight scheme {other:?}"))),
        }
    }
}

fn bonus_rule_mass(rule: BonusRule) -> Q {
    if rule.uses_gap() {
        // (1 − 7 · 43/500) / 4
        Q::new(199, 2000)
    } else {
        Q::new(43, 500)
    }
}

fn points_rule_mass(rule: PointsRule) -> Q {
    if rule == PointsRule::CostlessMinus2 {
        Q::new(19, 200)
    } else {
        Q::new(181, 1000)
    }
}

/// Probability of one raw spec under the realized scheme, renormalised over the
/// rules present in `config`.
fn raw_mass(config: &FamilyConfig, spec: &GameSpec) -> Q {
    let bonus_total: Q = config.bonus_rules.iter().map(|&r| bonus_rule_mass(r)).sum();
    let points_total: Q = config.points_rules.iter().map(|&r| points_rule_mass(r)).sum();
    let uniform_cells = (config.lower_bounds.len()
        * config.offsets.len()
        * config.gaps.len()
        * config.bonus_sizes.len()) as i128;
    bonus_rule_mass(spec.bonus_rule) / bonus_total * points_rule_mass(spec.points_rule) / points_total
        / Q::from_integer(uniform_cells)
}

/// Exact probability of every representative under `scheme`. Sums to 1.
pub fn population_weights(pop: &Population, scheme: WeightScheme) -> Vec<Q> {
    match scheme {
        WeightScheme::Uniform => vec![Q::new(1, pop.len() as i128); pop.len()],
        WeightScheme::Paper => {
            // Raw masses depend only on (points rule, bonus rule), so sum
            // counts per class and rule pair, then scale once.
            let mut w = vec![Q::zero(); pop.len()];
            let per_rule: Vec<Vec<Q>> = config_rule_masses(&pop.config);
            let nb = pop.config.bonus_rules.len();
            let np = pop.config.points_rules.len();
            for (raw, &class) in pop.class_of.iter().enumerate() {
                let b = raw % nb;
                let p = (raw / nb) % np;
                w[class as usize] += per_rule[p][b];
            }
            w
        }
    }
}

fn config_rule_masses(config: &FamilyConfig) -> Vec<Vec<Q>> {
    config
        .points_rules
        .iter()
        .map(|&p| {
            config
                .bonus_rules
                .iter()
                .map(|&b| {
                    let probe = GameSpec {
                        lower_bound: 1,
                        upper_bound: 5,
                        gap: 1,
                        bonus_size: 1,
                        points_rule: p,
                        bonus_rule: b,
                    };
                    raw_mass(config, &probe)
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDraw {
    pub spec: GameSpec,
    /// Population probability of this game.
    pub weight: f64,
    /// Same probability as an exact "p/q" string.
    pub weight_exact: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSampleFrame {
    pub population_digest: String,
    pub scheme: WeightScheme,
    pub seed: u64,
    pub draws: Vec<SampleDraw>,
}

impl GameSampleFrame {
    pub fn specs(&self) -> impl Iterator<Item = &GameSpec> {
        self.draws.iter().map(|d| &d.spec)
    }
}

/// Weighted draw without replacement (exponential-key method); draws are
/// returned in selection order.
pub fn sample_games(pop: &Population, n: usize, scheme: WeightScheme, seed: u64) -> Result<GameSampleFrame> {
    if n > pop.len() {
        return Err(Error::SampleTooLarge { requested: n, available: pop.len() });
    }
    let exact = population_weights(pop, scheme);
    let weights: Vec<f64> = exact.iter().map(|q| q.to_f64().expect("finite weight")).collect();
    let mut rng = crate::seed::rng(seed);
    let mut keyed: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let u: f64 = 1.0 - rng.random::<f64>();
            (u.ln() / w, i)
        })
        .collect();
    let by_key = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
    if n < keyed.len() && n > 0 {
        keyed.select_nth_unstable_by(n - 1, by_key);
    }
    keyed.truncate(n);
    keyed.sort_by(by_key);
    let draws = keyed
        .into_iter()
        .map(|(_, i)| SampleDraw {
            spec: pop.specs[i],
            weight: weights[i],
            weight_exact: format!("{}/{}", exact[i].numer(), exact[i].denom()),
        })
        .collect();
    Ok(GameSampleFrame { population_digest: pop.digest.clone(), scheme, seed, draws })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::dedup_family;
    use crate::par::Exec;
    use num_traits::One;

    fn small() -> Population {
        let cfg = FamilyConfig {
            lower_bounds: vec![1, 2, 3],
            offsets: vec![4, 5],
            gaps: vec![1, 2, 3, 4],
            bonus_sizes: vec![1, 2, 3],
            ..FamilyConfig::default()
        };
        dedup_family(&cfg, Exec::Sequential)
    }

    #[test]
    fn constants_match_rounded_values() {
        let full = FamilyConfig::default();
        let bonus: Q = full.bonus_rules.iter().map(|&r| bonus_rule_mass(r)).sum();
        let points: Q = full.points_rules.iter().map(|&r| points_rule_mass(r)).sum();
        assert!(bonus.is_one() && points.is_one());
        assert!((bonus_rule_mass(BonusRule::Equal).to_f64().unwrap() - 0.086).abs() < 5e-4);
        assert!((points_rule_mass(PointsRule::N).to_f64().unwrap() - 0.18).abs() < 5e-3);
    }

    #[test]
    fn weights_sum_to_one_and_are_positive() {
        let pop = small();
        for scheme in [WeightScheme::Uniform, WeightScheme::Paper] {
            let w = population_weights(&pop, scheme);
            assert!(w.iter().sum::<Q>().is_one());
            assert!(w.iter().all(|q| *q > Q::zero()));
        }
    }

    #[test]
    fn exhaustive_uniform_draw() {
        let pop = small();
        let frame = sample_games(&pop, pop.len(), WeightScheme::Uniform, 3).unwrap();
        let mut got: Vec<_> = frame.specs().copied().collect();
        got.sort();
        let mut want = pop.specs.clone();
        want.sort();
        assert_eq!(got, want);
        assert!(matches!(
            sample_games(&pop, pop.len() + 1, WeightScheme::Uniform, 3),
            Err(Error::SampleTooLarge { .. })
        ));
    }

    #[test]
    fn seeded_draws_repeat() {
        let pop = small();
        let a = sample_games(&pop, 50, WeightScheme::Paper, 9).unwrap();
        let b = sample_games(&pop, 50, WeightScheme::Paper, 9).unwrap();
        let c = sample_games(&pop, 50, WeightScheme::Paper, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.draws, c.draws);
    }
}
