use serde::{Deserialize, Serialize};

use crate::games::SymmetricGame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level0Rule {
    /// Action with the highest payoff guaranteed against any opponent.
    MaxGuaranteed,
    Uniform,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    #[default]
    Highest,
    UniformOverTies,
}

/// Worst-case payoff of each action (row minima). For family games this is
/// the guaranteed-points schedule since no bonus fires against every action.
pub fn guaranteed_payoffs(game: &SymmetricGame) -> Vec<i64> {
    game.rows().map(|r| *r.iter().min().expect("nonempty row")).collect()
}

fn pick(values: &[f64], ties: TieRule) -> Vec<f64> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * best.abs().max(1.0);
    let tied: Vec<usize> = (0..values.len()).filter(|&i| values[i] >= best - tol).collect();
    let mut out = vec![0.0; values.len()];
    match ties {
        TieRule::Highest => out[*tied.last().expect("some maximiser")] = 1.0,
        TieRule::UniformOverTies => {
            for &i in &tied {
                out[i] = 1.0 / tied.len() as f64;
            }
        }
    }
    out
}

/// Distribution of a level-`k` reasoner over the game's actions.
pub fn mechanical_levelk(game: &SymmetricGame, k: u32, level0: Level0Rule, ties: TieRule) -> Vec<f64> {
    let n = game.n();
    let mut dist = match level0 {
        Level0Rule::MaxGuaranteed => {
            let g: Vec<f64> = guaranteed_payoffs(game).iter().map(|&v| v as f64).collect();
            pick(&g, ties)
        }
        Level0Rule::Uniform => vec![1.0 / n as f64; n],
    };
    for _ in 0..k {
        let expected: Vec<f64> = (0..n)
            .map(|i| game.row(i).iter().zip(&dist).map(|(&u, p)| u as f64 * p).sum())
            .collect();
        dist = pick(&expected, ties);
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::variants;

    fn mode(d: &[f64]) -> usize {
        d.iter().position(|&p| p == 1.0).unwrap()
    }

    #[test]
    fn basic_ladder() {
        let g = variants::basic();
        for k in 0..=9u32 {
            let d = mechanical_levelk(&g, k, Level0Rule::MaxGuaranteed, TieRule::Highest);
            assert_eq!(g.actions()[mode(&d)], 20 - k as i64);
        }
    }

    #[test]
    fn costless_level0() {
        let g = variants::costless();
        let d = mechanical_levelk(&g, 0, Level0Rule::MaxGuaranteed, TieRule::Highest);
        assert_eq!(mode(&d), 9);
    }
}
