use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::games::SymmetricGame;

/// Probability vector over a game's actions, held exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MixedStrategy {
    probs: Vec<BigRational>,
}

impl MixedStrategy {
    pub fn new(probs: Vec<BigRational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("empty strategy"));
        }
        if probs.iter().any(Signed::is_negative) {
            return Err(Error::invalid("negative probability"));
        }
        if !probs.iter().sum::<BigRational>().is_one() {
            return Err(Error::invalid("probabilities must sum to one"));
        }
        Ok(MixedStrategy { probs })
    }

    pub fn pure(n: usize, k: usize) -> Self {
        let probs = (0..n)
            .map(|i| if i == k { BigRational::one() } else { BigRational::zero() })
            .collect();
        MixedStrategy { probs }
    }

    pub fn uniform(n: usize) -> Self {
        MixedStrategy { probs: vec![BigRational::new(BigInt::one(), BigInt::from(n)); n] }
    }

    /// Normalises a nonnegative, not-all-zero vector.
    pub(crate) fn normalized(weights: Vec<BigRational>) -> Self {
        let total: BigRational = weights.iter().sum();
        MixedStrategy { probs: weights.into_iter().map(|w| w / &total).collect() }
    }

    pub fn from_ratios(pairs: &[(i64, i64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(p, q)| BigRational::new(p.into(), q.into())).collect())
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len()).filter(|&i| !self.probs[i].is_zero()).collect()
    }

    pub fn is_pure(&self) -> bool {
        self.support().len() == 1
    }

    /// Expected payoff of every pure action against this strategy.
    pub fn payoffs_against(&self, game: &SymmetricGame) -> Vec<BigRational> {
        (0..game.n())
            .map(|i| {
                game.row(i)
                    .iter()
                    .zip(&self.probs)
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(&u, p)| p * BigInt::from(u))
                    .sum()
            })
            .collect()
    }

    /// Half the L1 distance to a floating-point distribution.
    pub fn tv_distance(&self, other: &[f64]) -> f64 {
        0.5 * self.to_f64().iter().zip(other).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

pub(crate) fn ratio_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::invalid(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<BigInt>().map_err(|_| bad())?, q.trim().parse::<BigInt>().map_err(|_| bad())?),
        None => (s.trim().parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
    };
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

impl fmt::Display for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.probs.iter().map(ratio_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for MixedStrategy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.probs.iter().map(ratio_string))
    }
}

impl<'de> Deserialize<'de> for MixedStrategy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        let probs = raw
            .iter()
            .map(|s| parse_ratio(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        MixedStrategy::new(probs).map_err(serde::de::Error::custom)
    }
}

pub(crate) mod ratio_pair {
    use super::*;

    pub fn serialize<S: Serializer>(v: &(BigRational, BigRational), s: S) -> std::result::Result<S::Ok, S::Error> {
        (ratio_string(&v.0), ratio_string(&v.1)).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<(BigRational, BigRational), D::Error> {
        let (a, b) = <(String, String)>::deserialize(d)?;
        Ok((
            parse_ratio(&a).map_err(serde::de::Error::custom)?,
            parse_ratio(&b).map_err(serde::de::Error::custom)?,
        ))
    }
}

/// A strategy pair with both players' expected payoffs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EquilibriumProfile {
    pub row: MixedStrategy,
    pub col: MixedStrategy,
    #[serde(with = "ratio_pair")]
    pub payoffs: (BigRational, BigRational),
}

impl EquilibriumProfile {
    pub fn new(game: &SymmetricGame, row: MixedStrategy, col: MixedStrategy) -> Self {
        let u1: BigRational = row.probs.iter().zip(col.payoffs_against(game)).map(|(p, v)| p * v).sum();
        let u2: BigRational = col.probs.iter().zip(row.payoffs_against(game)).map(|(p, v)| p * v).sum();
        EquilibriumProfile { row, col, payoffs: (u1, u2) }
    }

    pub fn is_symmetric(&self) -> bool {
        self.row == self.col
    }

    pub fn is_pure(&self) -> bool {
        self.row.is_pure() && self.col.is_pure()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serde_as_ratio_strings() {
        let s = MixedStrategy::from_ratios(&[(1, 4), (3, 4), (0, 1)]).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"["1/4","3/4","0"]"#);
        assert_eq!(serde_json::from_str::<MixedStrategy>(&json).unwrap(), s);
        assert!(serde_json::from_str::<MixedStrategy>(r#"["1/2","1/4"]"#).is_err());
    }

    #[test]
    fn profile_payoffs() {
        let g = SymmetricGame::from_matrix(vec![vec![2, 0], vec![1, 1]]).unwrap();
        let p = EquilibriumProfile::new(&g, MixedStrategy::pure(2, 0), MixedStrategy::pure(2, 1));
        assert_eq!(p.payoffs, (BigRational::zero(), BigRational::one()));
    }
}
