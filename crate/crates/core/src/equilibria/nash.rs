use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::strategy::{EquilibriumProfile, MixedStrategy};
use super::vertex::{enumerate_vertices, Vertex};
use crate::error::{Error, Result};
use crate::games::SymmetricGame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NashConfig {
    pub max_actions: usize,
    /// Lexicographic bases the vertex search may visit before giving up.
    pub max_bases: usize,
    /// Polytope vertices admitted to the pairing stage.
    pub max_vertices: usize,
}

impl Default for NashConfig {
    fn default() -> Self {
        NashConfig { max_actions: 20, max_bases: 250_000, max_vertices: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NashSet {
    /// Every extreme equilibrium, sorted by (row support, column support,
    /// row strategy, column strategy).
    pub equilibria: Vec<EquilibriumProfile>,
    /// Some polytope vertex carries more labels than actions, so equilibria
    /// may form continua whose extreme points are listed.
    pub degenerate: bool,
    /// Actions removed by iterated strict dominance.
    pub eliminated: Vec<usize>,
    pub bases_visited: usize,
}

/// Indices surviving iterated elimination of strictly dominated pure
/// strategies (identical for both players by symmetry).
pub(crate) fn undominated(game: &SymmetricGame) -> Vec<usize> {
    let mut alive: Vec<usize> = (0..game.n()).collect();
    loop {
        let dominated = alive.iter().copied().find(|&i| {
            alive.iter().any(|&k| k != i && alive.iter().all(|&j| game.payoff(k, j) > game.payoff(i, j)))
        });
        match dominated {
            Some(i) => alive.retain(|&a| a != i),
            None => return alive,
        }
    }
}

/// Exact best-response check for both players.
pub fn verify_profile(game: &SymmetricGame, profile: &EquilibriumProfile) -> bool {
    let n = game.n();
    if profile.row.len() != n || profile.col.len() != n {
        return false;
    }
    let check = |own: &MixedStrategy, other: &MixedStrategy, value: &BigRational| {
        let vs = other.payoffs_against(game);
        vs.iter().zip(own.probs()).all(|(v, p)| if p.is_zero() { v <= value } else { v == value })
    };
    check(&profile.row, &profile.col, &profile.payoffs.0) && check(&profile.col, &profile.row, &profile.payoffs.1)
}

fn lift(v: &Vertex, alive: &[usize], n: usize) -> MixedStrategy {
    let mut w = vec![BigRational::zero(); n];
    for (k, &a) in alive.iter().enumerate() {
        w[a] = BigRational::new(v.numer[k].clone(), BigInt::from(1));
    }
    MixedStrategy::normalized(w)
}

pub fn enumerate_nash(game: &SymmetricGame, config: &NashConfig) -> Result<NashSet> {
    let n = game.n();
    if n > config.max_actions || n > 32 {
        return Err(Error::invalid(format!("{n} actions exceeds the cap of {}", config.max_actions.min(32))));
    }
    let alive = undominated(game);
    let eliminated: Vec<usize> = (0..n).filter(|i| !alive.contains(i)).collect();
    let m = alive.len();
    let floor = alive
        .iter()
        .flat_map(|&i| alive.iter().map(move |&j| game.payoff(i, j)))
        .min()
        .expect("at least one action survives");
    let shifted: Vec<Vec<i64>> = alive
        .iter()
        .map(|&i| alive.iter().map(|&j| game.payoff(i, j) - floor + 1).collect())
        .collect();

    let found = enumerate_vertices(&shifted, config.max_bases).map_err(|b| {
        Error::Unresolved(format!("vertex search exceeded {} bases", b.bases_visited - 1))
    })?;
    let vertices: Vec<&Vertex> = found.vertices.iter().filter(|v| !v.is_origin()).collect();
    if vertices.len() > config.max_vertices {
        return Err(Error::Unresolved(format!(
            "{} vertices exceed the pairing cap of {}",
            vertices.len(),
            config.max_vertices
        )));
    }
    let degenerate = vertices.iter().any(|v| v.labels() as usize > m);
    let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };

    let mut equilibria = Vec::new();
    for x in &vertices {
        for y in &vertices {
            if (x.zero | y.tight) == full && (x.tight | y.zero) == full {
                let row = lift(x, &alive, n);
                let col = lift(y, &alive, n);
                let profile = EquilibriumProfile::new(game, row, col);
                if !verify_profile(game, &profile) {
                    return Err(Error::Unresolved("a candidate failed exact verification".into()));
                }
                equilibria.push(profile);
            }
        }
    }
    equilibria.sort_by(|a, b| {
        (a.row.support(), a.col.support(), &a.row, &a.col).cmp(&(b.row.support(), b.col.support(), &b.row, &b.col))
    });
    equilibria.dedup();
    Ok(NashSet { equilibria, degenerate, eliminated, bases_visited: found.bases_visited })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn solve(rows: Vec<Vec<i64>>) -> NashSet {
        enumerate_nash(&SymmetricGame::from_matrix(rows).unwrap(), &NashConfig::default()).unwrap()
    }

    #[test]
    fn coordination_game_has_three() {
        let set = solve(vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(set.equilibria.len(), 3);
        assert!(set.equilibria.iter().all(EquilibriumProfile::is_symmetric));
        let half = BigRational::new(1.into(), 2.into());
        assert!(set.equilibria.iter().any(|e| e.row.probs() == [half.clone(), half.clone()]));
        assert!(!set.degenerate);
    }

    #[test]
    fn prisoners_dilemma_eliminates() {
        let set = solve(vec![vec![3, 0], vec![5, 1]]);
        assert_eq!(set.eliminated, vec![0]);
        assert_eq!(set.equilibria.len(), 1);
        assert!(set.equilibria[0].row.probs()[1].is_one());
    }

    #[test]
    fn chicken_has_asymmetric_pair() {
        let set = solve(vec![vec![0, 3], vec![2, 0]]);
        assert_eq!(set.equilibria.len(), 3);
        assert_eq!(set.equilibria.iter().filter(|e| e.is_symmetric()).count(), 1);
    }

    #[test]
    fn constant_game_is_degenerate() {
        let set = solve(vec![vec![1, 1], vec![1, 1]]);
        assert!(set.degenerate);
        // Extreme points of the full square of profiles.
        assert_eq!(set.equilibria.len(), 4);
    }
}
