use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::components::{equilibrium_components, EquilibriumComponent};
use super::nash::{enumerate_nash, verify_profile, NashConfig};
use super::risk::risk_dominance_index;
use super::strategy::{EquilibriumProfile, MixedStrategy};
use super::tracing::{logit_path_endpoint, TraceConfig};
use crate::error::{Error, Result};
use crate::games::SymmetricGame;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    pub nash: NashConfig,
    pub trace: TraceConfig,
    /// Disable to skip the security-vector filter entirely.
    #[serde(default = "yes")]
    pub pareto_filter: bool,
}

fn yes() -> bool {
    true
}

impl SelectorConfig {
    pub fn new() -> Self {
        SelectorConfig { pareto_filter: true, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    UniqueSymmetric,
    PayoffDominant,
    RiskDominant,
    Traced,
    TracedCoerced,
    FallbackFirst,
    Unresolved,
}

/// One domination found by the security filter. `protected` marks a
/// component holding a symmetric equilibrium that was kept although a
/// purely asymmetric component dominated it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoEvent {
    pub component: usize,
    pub dominated_by: usize,
    pub protected: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub equilibria: usize,
    pub symmetric_equilibria: usize,
    pub pure_equilibria: usize,
    pub components: usize,
    pub pareto_survivors: usize,
    pub symmetric_survivors: usize,
    pub degenerate: bool,
    /// Category reached before any tracing (unique / payoff / risk).
    pub stage: Option<Provenance>,
    pub unresolved_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    /// Symmetric equilibrium; absent only when unresolved.
    pub selected: Option<EquilibriumProfile>,
    pub provenance: Provenance,
    pub winner_component: Option<usize>,
    pub pareto_trace: Vec<ParetoEvent>,
    pub diagnostics: Diagnostics,
}

impl SelectionOutcome {
    pub fn strategy(&self) -> Option<&MixedStrategy> {
        self.selected.as_ref().map(|e| &e.row)
    }
}

fn dominates(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> bool {
    a.0 > b.0 && a.1 > b.1
}

/// Indices of components kept by the security filter, plus its trace.
fn pareto_filter(components: &[EquilibriumComponent]) -> (Vec<usize>, Vec<ParetoEvent>) {
    let mut kept = Vec::new();
    let mut trace = Vec::new();
    for (k, ck) in components.iter().enumerate() {
        let mut deleted = false;
        for (l, cl) in components.iter().enumerate() {
            if l == k || !dominates(&cl.security, &ck.security) {
                continue;
            }
            let protected = ck.contains_symmetric && !cl.contains_symmetric;
            trace.push(ParetoEvent { component: k, dominated_by: l, protected });
            deleted |= !protected;
        }
        if !deleted {
            kept.push(k);
        }
    }
    (kept, trace)
}

/// (row, row) when it is itself an equilibrium, else the first symmetric
/// equilibrium of `preferred`, else of the whole game.
fn symmetric_report(
    game: &SymmetricGame,
    row: &MixedStrategy,
    preferred: &EquilibriumComponent,
    all: &[EquilibriumProfile],
) -> EquilibriumProfile {
    let candidate = EquilibriumProfile::new(game, row.clone(), row.clone());
    if verify_profile(game, &candidate) {
        return candidate;
    }
    preferred
        .first_symmetric()
        .or_else(|| all.iter().find(|e| e.is_symmetric()))
        .cloned()
        .unwrap_or(candidate)
}

pub fn hs_select(game: &SymmetricGame, config: &SelectorConfig) -> Result<SelectionOutcome> {
    let set = match enumerate_nash(game, &config.nash) {
        Ok(set) => set,
        Err(Error::Unresolved(reason)) => {
            return Ok(SelectionOutcome {
                selected: None,
                provenance: Provenance::Unresolved,
                winner_component: None,
                pareto_trace: Vec::new(),
                diagnostics: Diagnostics { unresolved_reason: Some(reason), ..Default::default() },
            })
        }
        Err(e) => return Err(e),
    };
    let eqs = &set.equilibria;
    let symmetric: Vec<&EquilibriumProfile> = eqs.iter().filter(|e| e.is_symmetric()).collect();
    let mut diag = Diagnostics {
        equilibria: eqs.len(),
        symmetric_equilibria: symmetric.len(),
        pure_equilibria: eqs.iter().filter(|e| e.is_pure()).count(),
        degenerate: set.degenerate,
        ..Default::default()
    };

    let components = equilibrium_components(eqs);
    diag.components = components.len();
    if symmetric.len() == 1 {
        let chosen = symmetric[0].clone();
        let winner = components.iter().position(|c| c.members.contains(&chosen));
        diag.stage = Some(Provenance::UniqueSymmetric);
        return Ok(SelectionOutcome {
            selected: Some(chosen),
            provenance: Provenance::UniqueSymmetric,
            winner_component: winner,
            pareto_trace: Vec::new(),
            diagnostics: diag,
        });
    }

    let (kept, trace) = if config.pareto_filter {
        pareto_filter(&components)
    } else {
        ((0..components.len()).collect(), Vec::new())
    };
    diag.pareto_survivors = kept.len();
    let sym_kept: Vec<usize> = kept.iter().copied().filter(|&k| components[k].contains_symmetric).collect();
    diag.symmetric_survivors = sym_kept.len();

    let (winner, stage) = match sym_kept.len() {
        0 => (kept[0], Provenance::PayoffDominant),
        1 => (sym_kept[0], Provenance::PayoffDominant),
        _ => {
            let mut best = sym_kept[0];
            let mut best_r: Option<BigRational> = None;
            for &k in &sym_kept {
                let e = components[k].first_symmetric().expect("component has a symmetric member");
                let r = risk_dominance_index(&e.row, game);
                if best_r.as_ref().is_none_or(|b| r < *b) {
                    best_r = Some(r);
                    best = k;
                }
            }
            (best, Provenance::RiskDominant)
        }
    };
    diag.stage = Some(stage);
    let comp = &components[winner];

    if comp.members.len() == 1 && comp.members[0].is_symmetric() {
        return Ok(SelectionOutcome {
            selected: Some(comp.members[0].clone()),
            provenance: stage,
            winner_component: Some(winner),
            pareto_trace: trace,
            diagnostics: diag,
        });
    }

    let prior = MixedStrategy::uniform(game.n());
    let (selected, provenance) = match logit_path_endpoint(game, &prior, &config.trace) {
        Ok(end) => {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, e) in eqs.iter().enumerate() {
                let d = e.row.tv_distance(&end).max(e.col.tv_distance(&end));
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            let snapped = &eqs[best];
            if snapped.is_symmetric() {
                (snapped.clone(), Provenance::Traced)
            } else {
                (symmetric_report(game, &snapped.row, comp, eqs), Provenance::TracedCoerced)
            }
        }
        Err(Error::NoConvergence { .. }) => {
            (symmetric_report(game, &comp.members[0].row, comp, eqs), Provenance::FallbackFirst)
        }
        Err(e) => return Err(e),
    };
    Ok(SelectionOutcome {
        selected: Some(selected),
        provenance,
        winner_component: Some(winner),
        pareto_trace: trace,
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn game(rows: Vec<Vec<i64>>) -> SymmetricGame {
        SymmetricGame::from_matrix(rows).unwrap()
    }

    #[test]
    fn stag_hunt_payoff_dominant() {
        let out = hs_select(&game(vec![vec![4, 0], vec![3, 3]]), &SelectorConfig::new()).unwrap();
        assert_eq!(out.provenance, Provenance::PayoffDominant);
        let sel = out.selected.unwrap();
        assert!(sel.row.probs()[0].is_one());
        assert_eq!(sel.payoffs.0, BigRational::from_integer(4.into()));
    }

    #[test]
    fn chicken_unique_symmetric() {
        let out = hs_select(&game(vec![vec![0, 3], vec![2, 0]]), &SelectorConfig::new()).unwrap();
        assert_eq!(out.provenance, Provenance::UniqueSymmetric);
        assert!(out.selected.unwrap().is_symmetric());
    }

    #[test]
    fn protection_keeps_symmetric_component() {
        let g = game(vec![vec![0, 3], vec![2, 0]]);
        let set = enumerate_nash(&g, &NashConfig::default()).unwrap();
        let comps = equilibrium_components(&set.equilibria);
        let (kept, trace) = pareto_filter(&comps);
        let sym = comps.iter().position(|c| c.contains_symmetric).unwrap();
        assert!(kept.contains(&sym));
        assert!(trace.iter().any(|e| e.component == sym && e.protected));
    }

    #[test]
    fn tied_component_is_traced() {
        let out = hs_select(&game(vec![vec![1, 1], vec![1, 1]]), &SelectorConfig::new()).unwrap();
        assert!(matches!(out.provenance, Provenance::Traced | Provenance::TracedCoerced));
        assert!(out.selected.unwrap().is_symmetric());
    }
}
