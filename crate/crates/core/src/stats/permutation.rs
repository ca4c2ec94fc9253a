use rand::Rng as _;

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::seed;

const BLOCK: usize = 1024;
const EXACT_MAX: usize = 25;

fn tolerance(values: &[f64]) -> f64 {
    1e-12 * values.iter().map(|v| v.abs()).sum::<f64>().max(1.0)
}

/// Two-sided Monte Carlo p-value for the mean under random sign flips,
/// (1 + hits)/(1 + iterations).
pub fn sign_permutation_test(values: &[f64], iterations: usize, seed: u64) -> Result<f64> {
    sign_permutation_test_with(values, iterations, seed, Exec::default())
}

/// As [`sign_permutation_test`]; blocks of flips are seeded by block index,
/// so the result does not depend on `exec`.
pub fn sign_permutation_test_with(values: &[f64], iterations: usize, seed: u64, exec: Exec) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("permutation test needs at least one value"));
    }
    let observed = values.iter().sum::<f64>().abs();
    let tol = tolerance(values);
    let blocks = iterations.div_ceil(BLOCK);
    let hits: usize = par::map_range(exec, blocks, |b| {
        let mut rng = seed::derived_rng(seed, "stats/permutation", "block", b as u64);
        let len = BLOCK.min(iterations - b * BLOCK);
        (0..len)
            .filter(|_| {
                let s: f64 = values.iter().map(|v| if rng.random::<bool>() { *v } else { -*v }).sum();
                s.abs() >= observed - tol
            })
            .count()
    })
    .into_iter()
    .sum();
    Ok((1 + hits) as f64 / (1 + iterations) as f64)
}

/// Exact p-value over all 2ⁿ sign patterns.
pub fn sign_permutation_exact(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n == 0 || n > EXACT_MAX {
        return Err(Error::invalid(format!("exact sign enumeration supports 1..={EXACT_MAX} values")));
    }
    let observed = values.iter().sum::<f64>().abs();
    let tol = tolerance(values);
    let total = 1u64 << n;
    let hits = (0..total)
        .filter(|mask| {
            let s: f64 = values.iter().enumerate().map(|(i, v)| if mask >> i & 1 == 1 { -*v } else { *v }).sum();
            s.abs() >= observed - tol
        })
        .count();
    Ok(hits as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_matches_enumeration() {
        let v = [1.0; 5];
        assert_eq!(sign_permutation_exact(&v).unwrap(), 2.0 / 32.0);
        let mc = sign_permutation_test(&v, 100_000, 9).unwrap();
        assert!((mc - 2.0 / 32.0).abs() < 0.005);
        assert_eq!(sign_permutation_test(&[0.0; 4], 100, 1).unwrap(), 1.0);
    }

    #[test]
    fn exec_does_not_change_result() {
        let v = [0.3, -0.1, 0.7, 0.2, 0.05, -0.4];
        let a = sign_permutation_test_with(&v, 5000, 3, Exec::Sequential).unwrap();
        let b = sign_permutation_test_with(&v, 5000, 3, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
