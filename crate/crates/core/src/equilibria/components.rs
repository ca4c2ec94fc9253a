use std::collections::HashMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::strategy::{ratio_pair, EquilibriumProfile, MixedStrategy};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumComponent {
    /// Members in enumeration order.
    pub members: Vec<EquilibriumProfile>,
    /// Component-wise minima of member payoffs.
    #[serde(with = "ratio_pair")]
    pub security: (BigRational, BigRational),
    pub contains_symmetric: bool,
}

impl EquilibriumComponent {
    pub fn first_symmetric(&self) -> Option<&EquilibriumProfile> {
        self.members.iter().find(|e| e.is_symmetric())
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

/// Connected components under "equal row strategy or equal column
/// strategy". Components are ordered by their first member.
pub fn equilibrium_components(equilibria: &[EquilibriumProfile]) -> Vec<EquilibriumComponent> {
    let mut parent: Vec<usize> = (0..equilibria.len()).collect();
    let mut by_row: HashMap<&MixedStrategy, usize> = HashMap::new();
    let mut by_col: HashMap<&MixedStrategy, usize> = HashMap::new();
    for (i, e) in equilibria.iter().enumerate() {
        if let Some(&j) = by_row.get(&e.row) {
            union(&mut parent, i, j);
        } else {
            by_row.insert(&e.row, i);
        }
        if let Some(&j) = by_col.get(&e.col) {
            union(&mut parent, i, j);
        } else {
            by_col.insert(&e.col, i);
        }
    }
    let mut order: Vec<usize> = Vec::new();
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..equilibria.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_insert_with(|| {
            order.push(r);
            Vec::new()
        });
        groups.get_mut(&r).expect("just inserted").push(i);
    }
    order
        .into_iter()
        .map(|r| {
            let members: Vec<EquilibriumProfile> = groups[&r].iter().map(|&i| equilibria[i].clone()).collect();
            let u1 = members.iter().map(|e| &e.payoffs.0).min().expect("nonempty").clone();
            let u2 = members.iter().map(|e| &e.payoffs.1).min().expect("nonempty").clone();
            let contains_symmetric = members.iter().any(EquilibriumProfile::is_symmetric);
            EquilibriumComponent { members, security: (u1, u2), contains_symmetric }
        })
        .collect()
}
