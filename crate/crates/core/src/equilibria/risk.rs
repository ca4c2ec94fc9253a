use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::strategy::MixedStrategy;
use crate::games::SymmetricGame;

/// Σ_{i≠j} σᵢσⱼ (Uᵢᵢ − Uⱼᵢ)(Uᵢᵢ − Uᵢⱼ). Lower means less exposed to
/// strategic uncertainty. Not sign-definite off equilibrium.
pub fn risk_dominance_index(sigma: &MixedStrategy, game: &SymmetricGame) -> BigRational {
    let p = sigma.probs();
    let support = sigma.support();
    let mut total = BigRational::zero();
    for &i in &support {
        for &j in &support {
            if i == j {
                continue;
            }
            let uii = game.payoff(i, i);
            let term = (uii - game.payoff(j, i)) * (uii - game.payoff(i, j));
            total += &p[i] * &p[j] * BigInt::from(term);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_expansion() {
        let g = SymmetricGame::from_matrix(vec![vec![2, 0], vec![1, 1]]).unwrap();
        let r = risk_dominance_index(&MixedStrategy::uniform(2), &g);
        assert_eq!(r, BigRational::new(1.into(), 2.into()));
        assert!(risk_dominance_index(&MixedStrategy::pure(2, 1), &g).is_zero());
    }
}
