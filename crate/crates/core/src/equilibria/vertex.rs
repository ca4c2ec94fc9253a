//! Vertex enumeration of {x ≥ 0 : U x ≤ 1} for a positive integer matrix U,
//! by depth-first traversal of lexicographically feasible bases with exact
//! integer (fraction-free) pivoting.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A vertex with its coordinates as integer numerators over a shared
/// positive denominator (in lowest terms).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Vertex {
    pub numer: Vec<BigInt>,
    pub denom: BigInt,
    /// Bit k set when x_k = 0.
    pub zero: u64,
    /// Bit k set when (U x)_k = 1.
    pub tight: u64,
}

impl Vertex {
    pub fn labels(&self) -> u32 {
        self.zero.count_ones() + self.tight.count_ones()
    }

    pub fn is_origin(&self) -> bool {
        self.numer.iter().all(Zero::is_zero)
    }
}

pub(crate) struct Enumeration {
    pub vertices: Vec<Vertex>,
    pub bases_visited: usize,
}

#[derive(Debug)]
pub(crate) struct BudgetExceeded {
    pub bases_visited: usize,
}

struct Tableau {
    m: usize,
    /// Row-major, m rows × (2m + 1) columns: [U | I | 1].
    cells: Vec<BigInt>,
    det: BigInt,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(u: &[Vec<i64>]) -> Self {
        let m = u.len();
        let w = 2 * m + 1;
        let mut cells = vec![BigInt::zero(); m * w];
        for r in 0..m {
            for c in 0..m {
                cells[r * w + c] = BigInt::from(u[r][c]);
            }
            cells[r * w + m + r] = BigInt::one();
            cells[r * w + 2 * m] = BigInt::one();
        }
        Tableau { m, cells, det: BigInt::one(), basis: (m..2 * m).collect() }
    }

    fn width(&self) -> usize {
        2 * self.m + 1
    }

    fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.cells[r * self.width() + c]
    }

    fn mask(&self) -> u64 {
        self.basis.iter().fold(0u64, |acc, &v| acc | (1 << v))
    }

    /// Leaving row for entering column `col` under the lexicographic ratio
    /// test on (rhs, slack columns).
    fn leaving_row(&self, col: usize) -> Option<usize> {
        let m = self.m;
        let mut best: Option<usize> = None;
        for r in 0..m {
            if !self.at(r, col).is_positive() {
                continue;
            }
            best = Some(match best {
                None => r,
                Some(b) => {
                    let (pr, pb) = (self.at(r, col), self.at(b, col));
                    let keys = std::iter::once(2 * m).chain(m..2 * m);
                    let mut choice = b;
                    for k in keys {
                        let lhs = self.at(r, k) * pb;
                        let rhs = self.at(b, k) * pr;
                        if lhs != rhs {
                            if lhs < rhs {
                                choice = r;
                            }
                            break;
                        }
                    }
                    choice
                }
            });
        }
        best
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let p = self.at(row, col).clone();
        let pivot_row: Vec<BigInt> = self.cells[row * w..(row + 1) * w].to_vec();
        for r in 0..self.m {
            if r == row {
                continue;
            }
            let f = self.cells[r * w + col].clone();
            for c in 0..w {
                let v = &self.cells[r * w + c] * &p - &f * &pivot_row[c];
                self.cells[r * w + c] = v / &self.det;
            }
        }
        self.det = p;
        self.basis[row] = col;
    }

    fn vertex(&self) -> Vertex {
        let m = self.m;
        let mut values = vec![BigInt::zero(); 2 * m];
        for (r, &v) in self.basis.iter().enumerate() {
            values[v] = self.at(r, 2 * m).clone();
        }
        let mut zero = 0u64;
        let mut tight = 0u64;
        for k in 0..m {
            if values[k].is_zero() {
                zero |= 1 << k;
            }
            if values[m + k].is_zero() {
                tight |= 1 << k;
            }
        }
        let mut g = self.det.clone();
        for v in &values[..m] {
            g = g.gcd(v);
        }
        let numer = values[..m].iter().map(|v| v / &g).collect();
        Vertex { numer, denom: &self.det / &g, zero, tight }
    }
}

/// Enumerates every vertex of the polytope. `u` must be square, strictly
/// positive and at most 32×32.
pub(crate) fn enumerate_vertices(u: &[Vec<i64>], max_bases: usize) -> Result<Enumeration, BudgetExceeded> {
    let m = u.len();
    assert!(m <= 32, "vertex enumeration supports at most 32 actions");
    let mut t = Tableau::new(u);
    let mut seen_bases: HashSet<u64> = HashSet::new();
    let mut seen_vertices: HashSet<Vertex> = HashSet::new();
    let mut vertices = Vec::new();

    seen_bases.insert(t.mask());
    let v0 = t.vertex();
    seen_vertices.insert(v0.clone());
    vertices.push(v0);

    // Each frame: next column to try, and the pivot that created it.
    let mut stack: Vec<(usize, Option<(usize, usize)>)> = vec![(0, None)];
    while let Some(frame) = stack.last_mut() {
        let mut advanced = false;
        while frame.0 < 2 * m {
            let col = frame.0;
            frame.0 += 1;
            if t.basis.contains(&col) {
                continue;
            }
            let Some(row) = t.leaving_row(col) else { continue };
            let leaving = t.basis[row];
            let mask = t.mask() & !(1 << leaving) | (1 << col);
            if !seen_bases.insert(mask) {
                continue;
            }
            if seen_bases.len() > max_bases {
                return Err(BudgetExceeded { bases_visited: seen_bases.len() });
            }
            t.pivot(row, col);
            let v = t.vertex();
            if seen_vertices.insert(v.clone()) {
                vertices.push(v);
            }
            stack.push((0, Some((row, leaving))));
            advanced = true;
            break;
        }
        if !advanced {
            let (_, undo) = stack.pop().expect("nonempty stack");
            if let Some((row, leaving)) = undo {
                t.pivot(row, leaving);
            }
        }
    }
    Ok(Enumeration { vertices, bases_visited: seen_bases.len() })
}
