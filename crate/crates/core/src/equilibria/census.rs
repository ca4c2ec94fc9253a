use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::select::{hs_select, Provenance, SelectorConfig};
use crate::error::Result;
use crate::games::{GameSpec, SymmetricGame};
use crate::par::{self, Exec};

/// Selection categories tallied over a population of games.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionCensus {
    pub games: usize,
    pub unique_symmetric: usize,
    pub payoff_dominant: usize,
    pub risk_dominant: usize,
    pub traced: usize,
    pub unresolved: usize,
    pub pure: usize,
    pub mixed: usize,
    pub degenerate: usize,
    pub by_provenance: BTreeMap<String, usize>,
    pub unresolved_ids: Vec<String>,
}

pub fn selection_census(specs: &[GameSpec], config: &SelectorConfig, exec: Exec) -> Result<SelectionCensus> {
    let outcomes = par::map(exec, specs, |s| SymmetricGame::from_spec(s).and_then(|g| hs_select(&g, config)));
    let mut c = SelectionCensus { games: specs.len(), ..Default::default() };
    for (spec, outcome) in specs.iter().zip(outcomes) {
        let o = outcome?;
        *c.by_provenance.entry(format!("{:?}", o.provenance)).or_default() += 1;
        c.degenerate += usize::from(o.diagnostics.degenerate);
        match o.provenance {
            Provenance::UniqueSymmetric => c.unique_symmetric += 1,
            Provenance::PayoffDominant => c.payoff_dominant += 1,
            Provenance::RiskDominant => c.risk_dominant += 1,
            Provenance::Traced | Provenance::TracedCoerced | Provenance::FallbackFirst => c.traced += 1,
            Provenance::Unresolved => {
                c.unresolved += 1;
                c.unresolved_ids.push(spec.id());
            }
        }
        match o.strategy() {
            Some(s) if s.is_pure() => c.pure += 1,
            Some(_) => c.mixed += 1,
            None => {}
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{BonusRule, PointsRule};

    #[test]
    fn tallies_add_up() {
        let specs: Vec<GameSpec> = [BonusRule::GapLower, BonusRule::Equal, BonusRule::SumOdd]
            .into_iter()
            .map(|r| GameSpec { lower_bound: 11, upper_bound: 20, gap: 1, bonus_size: 20, points_rule: PointsRule::N, bonus_rule: r })
            .collect();
        let c = selection_census(&specs, &SelectorConfig::new(), Exec::Sequential).unwrap();
        assert_eq!(c.games, 3);
        assert_eq!(c.unique_symmetric + c.payoff_dominant + c.risk_dominant + c.traced + c.unresolved, 3);
        assert_eq!(c.pure + c.mixed + c.unresolved, 3);
    }
}
