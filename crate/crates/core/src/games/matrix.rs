use serde::{Deserialize, Serialize};

use super::spec::GameSpec;
use crate::error::{Error, Result};

/// Row player's integer payoff matrix of a symmetric two-player game. The
/// column player's payoff at `(i, j)` is the row payoff at `(j, i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GameRepr", into = "GameRepr")]
pub struct SymmetricGame {
    actions: Vec<i64>,
    payoff: Vec<i64>,
    spec: Option<GameSpec>,
}

#[derive(Serialize, Deserialize)]
struct GameRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spec: Option<GameSpec>,
    actions: Vec<i64>,
    payoff: Vec<Vec<i64>>,
}

impl TryFrom<GameRepr> for SymmetricGame {
    type Error = Error;
    fn try_from(r: GameRepr) -> Result<Self> {
        let mut g = SymmetricGame::new(r.actions, r.payoff)?;
        g.spec = r.spec;
        Ok(g)
    }
}

impl From<SymmetricGame> for GameRepr {
    fn from(g: SymmetricGame) -> Self {
        let payoff = g.rows().map(<[i64]>::to_vec).collect();
        GameRepr { spec: g.spec, actions: g.actions, payoff }
    }
}

impl SymmetricGame {
    pub fn new(actions: Vec<i64>, payoff: Vec<Vec<i64>>) -> Result<Self> {
        let n = actions.len();
        if n == 0 {
            return Err(Error::invalid("a game needs at least one action"));
        }
        if payoff.len() != n || payoff.iter().any(|r| r.len() != n) {
            return Err(Error::invalid(format!("payoff matrix must be {n}x{n}")));
        }
        let mut sorted = actions.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != n {
            return Err(Error::invalid("action labels must be distinct"));
        }
        Ok(SymmetricGame {
            actions,
            payoff: payoff.into_iter().flatten().collect(),
            spec: None,
        })
    }

    /// Actions labelled 0..n.
    pub fn from_matrix(payoff: Vec<Vec<i64>>) -> Result<Self> {
        let n = payoff.len() as i64;
        Self::new((0..n).collect(), payoff)
    }

    pub fn from_spec(spec: &GameSpec) -> Result<Self> {
        spec.validate()?;
        let actions: Vec<i64> = spec.actions().collect();
        let mut payoff = Vec::with_capacity(actions.len() * actions.len());
        for &own in &actions {
            let base = spec.guaranteed_unchecked(own);
            for &other in &actions {
                let bonus = if spec.bonus_fires(own, other) { spec.bonus_size } else { 0 };
                payoff.push(base + bonus);
            }
        }
        Ok(SymmetricGame { actions, payoff, spec: Some(*spec) })
    }

    pub fn n(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[i64] {
        &self.actions
    }

    pub fn spec(&self) -> Option<&GameSpec> {
        self.spec.as_ref()
    }

    pub fn with_spec(mut self, spec: Option<GameSpec>) -> Self {
        self.spec = spec;
        self
    }

    pub fn payoff(&self, i: usize, j: usize) -> i64 {
        self.payoff[i * self.n() + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        let n = self.n();
        &self.payoff[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.payoff.chunks(self.n())
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.rows().map(<[i64]>::to_vec).collect()
    }

    pub fn index_of(&self, action: i64) -> Option<usize> {
        self.actions.iter().position(|&a| a == action)
    }

    pub fn min_payoff(&self) -> i64 {
        *self.payoff.iter().min().expect("nonempty")
    }

    pub fn max_payoff(&self) -> i64 {
        *self.payoff.iter().max().expect("nonempty")
    }

    /// Same game with `c` added to every payoff.
    pub fn shifted(&self, c: i64) -> Self {
        SymmetricGame {
            actions: self.actions.clone(),
            payoff: self.payoff.iter().map(|v| v + c).collect(),
            spec: None,
        }
    }

    /// Stable hex digest of the action labels and payoffs.
    pub fn digest(&self) -> String {
        let mut bytes = Vec::with_capacity(16 * (self.payoff.len() + self.actions.len()));
        bytes.extend((self.n() as u64).to_le_bytes());
        for a in &self.actions {
            bytes.extend(a.to_le_bytes());
        }
        for v in &self.payoff {
            bytes.extend(v.to_le_bytes());
        }
        crate::seed::sha256_hex(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{BonusRule, PointsRule};

    fn ar_basic() -> GameSpec {
        GameSpec {
            lower_bound: 11,
            upper_bound: 20,
            gap: 1,
            bonus_size: 20,
            points_rule: PointsRule::N,
            bonus_rule: BonusRule::GapLower,
        }
    }

    #[test]
    fn undercut_bonus_entries() {
        let g = SymmetricGame::from_spec(&ar_basic()).unwrap();
        let (i19, i20) = (g.index_of(19).unwrap(), g.index_of(20).unwrap());
        assert_eq!(g.payoff(i19, i20), 39);
        assert_eq!(g.payoff(i20, i19), 20);
    }

    #[test]
    fn worked_example_entry() {
        let spec = GameSpec {
            lower_bound: 5,
            upper_bound: 14,
            gap: 6,
            bonus_size: 10,
            points_rule: PointsRule::NMinus2,
            bonus_rule: BonusRule::GapAbsolute,
        };
        let g = SymmetricGame::from_spec(&spec).unwrap();
        assert_eq!(g.payoff(0, 6), 13);
    }

    #[test]
    fn coordinate_low() {
        let spec = GameSpec { lower_bound: 5, upper_bound: 9, bonus_rule: BonusRule::CoordinateLow, ..ar_basic() };
        let g = SymmetricGame::from_spec(&spec).unwrap();
        assert_eq!(g.payoff(0, 0), 25);
        assert_eq!(g.payoff(0, 1), 5);
    }

    #[test]
    fn json_round_trip() {
        let g = SymmetricGame::from_spec(&ar_basic()).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let back: SymmetricGame = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
        assert!(serde_json::from_str::<SymmetricGame>(r#"{"actions":[1,2],"payoff":[[1]]}"#).is_err());
    }
}
