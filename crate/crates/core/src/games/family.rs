use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::spec::{BonusRule, GameSpec, PointsRule};
use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// Upper-bound offsets (upper − lower) admitted by the family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum OffsetPreset {
    /// Offsets 4..=19; reproduces the 1,689,600 raw count.
    #[default]
    #[serde(rename = "4-19")]
    To19,
    #[serde(rename = "4-20")]
    To20,
}

impl OffsetPreset {
    pub fn offsets(self) -> Vec<i64> {
        match self {
            OffsetPreset::To19 => (4..=19).collect(),
            OffsetPreset::To20 => (4..=20).collect(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "4-19" => Ok(OffsetPreset::To19),
            "4-20" => Ok(OffsetPreset::To20),
            other => Err(Error::invalid(format!("unknown offset preset {other:?}"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OffsetPreset::To19 => "4-19",
            OffsetPreset::To20 => "4-20",
        }
    }
}

/// Parameter values enumerated by the family. Enumeration is lexicographic
/// over (lower, offset, gap, bonus size, points rule, bonus rule), in the
/// order the values are listed here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub lower_bounds: Vec<i64>,
    pub offsets: Vec<i64>,
    pub gaps: Vec<i64>,
    pub bonus_sizes: Vec<i64>,
    pub points_rules: Vec<PointsRule>,
    pub bonus_rules: Vec<BonusRule>,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self::preset(OffsetPreset::default())
    }
}

impl FamilyConfig {
    pub fn preset(offsets: OffsetPreset) -> Self {
        FamilyConfig {
            lower_bounds: (1..=20).collect(),
            offsets: offsets.offsets(),
            gaps: (1..=4).collect(),
            bonus_sizes: (1..=20).collect(),
            points_rules: PointsRule::ALL.to_vec(),
            bonus_rules: BonusRule::ALL.to_vec(),
        }
    }

    fn radices(&self) -> [usize; 6] {
        [
            self.lower_bounds.len(),
            self.offsets.len(),
            self.gaps.len(),
            self.bonus_sizes.len(),
            self.points_rules.len(),
            self.bonus_rules.len(),
        ]
    }

    /// Number of raw parameter combinations.
    pub fn len(&self) -> usize {
        self.radices().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `index`-th spec in enumeration order.
    pub fn spec_at(&self, index: usize) -> GameSpec {
        let r = self.radices();
        let mut rest = index;
        let mut digit = [0usize; 6];
        for k in (0..6).rev() {
            digit[k] = rest % r[k];
            rest /= r[k];
        }
        let lower = self.lower_bounds[digit[0]];
        GameSpec {
            lower_bound: lower,
            upper_bound: lower + self.offsets[digit[1]],
            gap: self.gaps[digit[2]],
            bonus_size: self.bonus_sizes[digit[3]],
            points_rule: self.points_rules[digit[4]],
            bonus_rule: self.bonus_rules[digit[5]],
        }
    }
}

pub fn enumerate_family(config: &FamilyConfig) -> impl ExactSizeIterator<Item = GameSpec> + '_ {
    (0..config.len()).map(move |i| config.spec_at(i))
}

/// Deduplicated family: one representative per class of specs with equal
/// action sets and equal payoff matrices.
#[derive(Debug, Clone)]
pub struct Population {
    pub config: FamilyConfig,
    pub specs: Vec<GameSpec>,
    /// Representative index of every raw spec, in enumeration order.
    pub class_of: Vec<u32>,
    pub digest: String,
}

impl Population {
    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn raw_len(&self) -> usize {
        self.class_of.len()
    }

    /// Number of raw specs collapsed into each representative.
    pub fn class_sizes(&self) -> Vec<u32> {
        let mut sizes = vec![0u32; self.specs.len()];
        for &c in &self.class_of {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// One canonical JSON spec per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for s in &self.specs {
            serde_json::to_writer(&mut w, s)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn fingerprint(spec: &GameSpec) -> u64 {
    // Only used for in-memory grouping; collisions are resolved by exact
    // comparison.
    let mut h = std::collections::hash_map::DefaultHasher::new();
    spec.lower_bound.hash(&mut h);
    spec.upper_bound.hash(&mut h);
    for own in spec.actions() {
        let base = spec.guaranteed_unchecked(own);
        for other in spec.actions() {
            let v = base + if spec.bonus_fires(own, other) { spec.bonus_size } else { 0 };
            v.hash(&mut h);
        }
    }
    h.finish()
}

fn same_matrix(a: &GameSpec, b: &GameSpec) -> bool {
    if a.lower_bound != b.lower_bound || a.upper_bound != b.upper_bound {
        return false;
    }
    a.actions().all(|own| {
        let (ga, gb) = (a.guaranteed_unchecked(own), b.guaranteed_unchecked(own));
        a.actions().all(|other| {
            let va = ga + if a.bonus_fires(own, other) { a.bonus_size } else { 0 };
            let vb = gb + if b.bonus_fires(own, other) { b.bonus_size } else { 0 };
            va == vb
        })
    })
}

/// Groups `n` specs (accessed by index) into matrix-equality classes.
/// Returns representative indices in first-occurrence order and the class
/// of every input.
fn dedup_indexed<F>(n: usize, get: F, exec: Exec) -> (Vec<usize>, Vec<u32>)
where
    F: Fn(usize) -> GameSpec + Sync + Send,
{
    let prints = par::map_chunks(exec, n, 4096, |r| r.map(|i| fingerprint(&get(i))).collect());
    let mut buckets: HashMap<u64, Vec<u32>> = HashMap::with_capacity(n / 2);
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = Vec::with_capacity(n);
    for (i, fp) in prints.into_iter().enumerate() {
        let bucket = buckets.entry(fp).or_default();
        let spec = get(i);
        let hit = bucket
            .iter()
            .copied()
            .find(|&c| same_matrix(&get(reps[c as usize]), &spec));
        let class = match hit {
            Some(c) => c,
            None => {
                let c = reps.len() as u32;
                reps.push(i);
                bucket.push(c);
                c
            }
        };
        class_of.push(class);
    }
    (reps, class_of)
}

/// Deduplicates an explicit list of specs, keeping first occurrences.
pub fn dedup_specs(specs: &[GameSpec], exec: Exec) -> (Vec<GameSpec>, Vec<u32>) {
    let (reps, class_of) = dedup_indexed(specs.len(), |i| specs[i], exec);
    (reps.into_iter().map(|i| specs[i]).collect(), class_of)
}

pub fn dedup_family(config: &FamilyConfig, exec: Exec) -> Population {
    let (reps, class_of) = dedup_indexed(config.len(), |i| config.spec_at(i), exec);
    let specs: Vec<GameSpec> = reps.into_iter().map(|i| config.spec_at(i)).collect();
    let mut buf = Vec::new();
    for s in &specs {
        serde_json::to_writer(&mut buf, s).expect("spec serializes");
        buf.push(b'\n');
    }
    let digest = crate::seed::sha256_hex(&buf);
    Population { config: config.clone(), specs, class_of, digest }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::SymmetricGame;

    #[test]
    fn raw_counts() {
        assert_eq!(FamilyConfig::preset(OffsetPreset::To19).len(), 1_689_600);
        assert_eq!(FamilyConfig::preset(OffsetPreset::To20).len(), 1_795_200);
    }

    #[test]
    fn order_is_lexicographic() {
        let cfg = FamilyConfig::default();
        let a = cfg.spec_at(0);
        assert_eq!((a.lower_bound, a.upper_bound, a.gap, a.bonus_size), (1, 5, 1, 1));
        assert_eq!(a.bonus_rule, BonusRule::GapLower);
        assert_eq!(cfg.spec_at(1).bonus_rule, BonusRule::GapHigher);
        assert_eq!(cfg.spec_at(11).points_rule, PointsRule::NMinus1);
        let last = cfg.spec_at(cfg.len() - 1);
        assert_eq!((last.lower_bound, last.upper_bound, last.gap, last.bonus_size), (20, 39, 4, 20));
        let specs: Vec<_> = enumerate_family(&cfg).take(5000).collect();
        assert!(specs.windows(2).all(|w| (w[0].lower_bound, w[0].upper_bound, w[0].gap, w[0].bonus_size, w[0].points_rule, w[0].bonus_rule)
            < (w[1].lower_bound, w[1].upper_bound, w[1].gap, w[1].bonus_size, w[1].points_rule, w[1].bonus_rule)));
    }

    #[test]
    fn restricted_gap_free_family() {
        let cfg = FamilyConfig {
            lower_bounds: vec![5],
            offsets: vec![9],
            gaps: vec![1],
            bonus_sizes: vec![10],
            points_rules: vec![PointsRule::N],
            bonus_rules: BonusRule::ALL.into_iter().filter(|r| !r.uses_gap()).collect(),
        };
        assert_eq!(enumerate_family(&cfg).count(), 7);
        let all_gaps = FamilyConfig { gaps: vec![1, 2, 3, 4], ..cfg };
        assert_eq!(all_gaps.len(), 28);
        assert_eq!(dedup_family(&all_gaps, Exec::Sequential).len(), 7);
    }

    #[test]
    fn unattainable_bonus_collapses() {
        // |diff| > 4 never happens with five actions.
        let cfg = FamilyConfig {
            lower_bounds: vec![3],
            offsets: vec![4],
            gaps: vec![4],
            bonus_sizes: (1..=20).collect(),
            points_rules: vec![PointsRule::N],
            bonus_rules: vec![BonusRule::MoreThan],
        };
        let pop = dedup_family(&cfg, Exec::Sequential);
        assert_eq!(pop.len(), 1);
        assert_eq!(pop.specs[0].bonus_size, 1);
    }

    #[test]
    fn representatives_have_distinct_matrices() {
        let cfg = FamilyConfig {
            lower_bounds: vec![1, 2],
            offsets: vec![4, 5],
            gaps: vec![1, 2, 3, 4],
            bonus_sizes: vec![1, 2],
            ..FamilyConfig::default()
        };
        let pop = dedup_family(&cfg, Exec::Parallel);
        let mut seen = std::collections::HashSet::new();
        for s in &pop.specs {
            let g = SymmetricGame::from_spec(s).unwrap();
            assert!(seen.insert((g.actions().to_vec(), g.to_rows())));
        }
        for (i, c) in pop.class_of.iter().enumerate() {
            let raw = SymmetricGame::from_spec(&cfg.spec_at(i)).unwrap();
            let rep = SymmetricGame::from_spec(&pop.specs[*c as usize]).unwrap();
            assert_eq!(raw.to_rows(), rep.to_rows());
        }
        let seq = dedup_family(&cfg, Exec::Sequential);
        assert_eq!(seq.specs, pop.specs);
        assert_eq!(seq.digest, pop.digest);
    }
}
