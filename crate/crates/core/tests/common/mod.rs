//! Independent reference implementations used by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;
pub type Profile = (Vec<Q>, Vec<Q>);

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Square integer matrix with `n` in 2..=max_n and entries 0..=9.
pub fn random_game(rng: &mut ChaCha8Rng, max_n: usize) -> Vec<Vec<i64>> {
    let n = rng.random_range(2..=max_n);
    (0..n).map(|_| (0..n).map(|_| rng.random_range(0..=9)).collect()).collect()
}

/// Solves `m x = b` exactly; None when singular.
fn solve(mut m: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &m[i][i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Vertices of {z >= 0, M z <= 1} with their label sets. Labels 0..n are
/// the nonnegativity constraints when `sign_first`, else the inequality
/// rows; the other family takes labels n..2n.
fn polytope_vertices(m: &[Vec<Q>], sign_first: bool) -> Vec<(Vec<Q>, BTreeSet<usize>)> {
    let n = m.len();
    let mut out: Vec<(Vec<Q>, BTreeSet<usize>)> = Vec::new();
    // Constraint c < n is z_c = 0; c >= n is row (c - n) of M tight.
    for tight in subsets(2 * n, n) {
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for &c in &tight {
            if c < n {
                let mut row = vec![Q::zero(); n];
                row[c] = Q::one();
                a.push(row);
                b.push(Q::zero());
            } else {
                a.push(m[c - n].clone());
                b.push(Q::one());
            }
        }
        let Some(z) = solve(a, b) else { continue };
        if z.iter().any(|v| v.is_negative()) {
            continue;
        }
        let slack: Vec<Q> = m.iter().map(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum::<Q>()).collect();
        if slack.iter().any(|s| *s > Q::one()) {
            continue;
        }
        if out.iter().any(|(v, _)| *v == z) {
            continue;
        }
        let mut labels = BTreeSet::new();
        for i in 0..n {
            let zero_label = if sign_first { i } else { n + i };
            let row_label = if sign_first { n + i } else { i };
            if z[i].is_zero() {
                labels.insert(zero_label);
            }
            if slack[i] == Q::one() {
                labels.insert(row_label);
            }
        }
        out.push((z, labels));
    }
    out
}

fn normalize(z: &[Q]) -> Vec<Q> {
    let s: Q = z.iter().sum();
    z.iter().map(|v| v / &s).collect()
}

/// Every extreme equilibrium of the symmetric game with row payoffs `u`,
/// as completely labelled vertex pairs of the two best-response polytopes.
pub fn nash_oracle(u: &[Vec<i64>]) -> BTreeSet<Profile> {
    let n = u.len();
    // Positive payoffs keep the polytopes bounded; shifts do not move equilibria.
    let shift = 1 - u.iter().flatten().min().copied().unwrap_or(0);
    let a: Vec<Vec<Q>> = u.iter().map(|r| r.iter().map(|&v| q(v + shift)).collect()).collect();
    // Row strategy x: column player's payoffs b[i][j] = a[j][i]; constraint rows are columns j.
    let p = polytope_vertices(&a, true);
    let qv = polytope_vertices(&a, false);
    let all: BTreeSet<usize> = (0..2 * n).collect();
    let mut out = BTreeSet::new();
    for (x, lx) in &p {
        if x.iter().all(Zero::is_zero) {
            continue;
        }
        for (y, ly) in &qv {
            if y.iter().all(Zero::is_zero) {
                continue;
            }
            if lx.union(ly).copied().collect::<BTreeSet<_>>() == all {
                out.insert((normalize(x), normalize(y)));
            }
        }
    }
    out
}

/// No pure deviation improves either player's payoff.
pub fn is_equilibrium(u: &[Vec<i64>], row: &[Q], col: &[Q]) -> bool {
    let n = u.len();
    let row_payoff = |k: usize| (0..n).map(|j| q(u[k][j]) * &col[j]).sum::<Q>();
    let col_payoff = |k: usize| (0..n).map(|i| q(u[k][i]) * &row[i]).sum::<Q>();
    let v_row: Q = (0..n).map(|i| &row[i] * row_payoff(i)).sum();
    let v_col: Q = (0..n).map(|j| &col[j] * col_payoff(j)).sum();
    (0..n).all(|k| row_payoff(k) <= v_row && col_payoff(k) <= v_col)
}

/// Two-sided signed-rank p-value by enumerating every sign pattern.
pub fn wilcoxon_by_enumeration(values: &[f64]) -> f64 {
    let v: Vec<f64> = values.iter().copied().filter(|x| *x != 0.0).collect();
    let n = v.len();
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    // Mid-ranks by direct counting.
    let rank: Vec<f64> = abs
        .iter()
        .map(|a| {
            let below = abs.iter().filter(|b| *b < a).count() as f64;
            let equal = abs.iter().filter(|b| *b == a).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let stat = |mask: u32| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| rank[i]).sum::<f64>();
    let observed: u32 = (0..n).filter(|&i| v[i] > 0.0).map(|i| 1 << i).sum();
    let w = stat(observed);
    let total = 1u32 << n;
    let (mut lo, mut hi) = (0u32, 0u32);
    for mask in 0..total {
        let s = stat(mask);
        if s <= w + 1e-9 {
            lo += 1;
        }
        if s >= w - 1e-9 {
            hi += 1;
        }
    }
    (2.0 * lo.min(hi) as f64 / total as f64).min(1.0)
}

/// Two-sided sign-flip p-value for the sum, by enumeration.
pub fn sign_flip_by_enumeration(values: &[f64]) -> f64 {
    let n = values.len();
    let observed = values.iter().sum::<f64>().abs();
    let total = 1u32 << n;
    let hits = (0..total)
        .filter(|mask| {
            let s: f64 = values.iter().enumerate().map(|(i, v)| if mask >> i & 1 == 1 { v.abs() } else { -v.abs() }).sum();
            s.abs() >= observed - 1e-9
        })
        .count();
    hits as f64 / total as f64
}

/// Minimum of `f` over the simplex grid with spacing 1/steps, for three weights.
pub fn simplex_grid_min(steps: usize, f: impl Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
    let mut best = (f64::INFINITY, Vec::new());
    for i in 0..=steps {
        for j in 0..=steps - i {
            let w = [i as f64 / steps as f64, j as f64 / steps as f64, (steps - i - j) as f64 / steps as f64];
            let v = f(&w);
            if v < best.0 {
                best = (v, w.to_vec());
            }
        }
    }
    best
}

/// Three linearly independent strictly positive distributions over `k` actions.
pub fn independent_candidates(rng: &mut ChaCha8Rng, k: usize) -> Vec<Vec<f64>> {
    loop {
        let c: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0f64).powi(3)).collect();
                let s: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / s).collect()
            })
            .collect();
        // Gram determinant bounded away from zero.
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let g = |i: usize, j: usize| dot(&c[i], &c[j]);
        let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
        if det > 1e-4 {
            return c;
        }
    }
}

pub fn mix(cands: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    (0..cands[0].len()).map(|a| cands.iter().zip(w).map(|(c, wi)| wi * c[a]).sum()).collect()
}
