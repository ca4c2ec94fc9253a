use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PointsRule {
    NMinus2,
    NMinus1,
    N,
    NPlus1,
    NPlus2,
    CostlessMinus2,
}

impl PointsRule {
    pub const ALL: [PointsRule; 6] = [
        PointsRule::NMinus2,
        PointsRule::NMinus1,
        PointsRule::N,
        PointsRule::NPlus1,
        PointsRule::NPlus2,
        PointsRule::CostlessMinus2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PointsRule::NMinus2 => "n_minus_2",
            PointsRule::NMinus1 => "n_minus_1",
            PointsRule::N => "n",
            PointsRule::NPlus1 => "n_plus_1",
            PointsRule::NPlus2 => "n_plus_2",
            PointsRule::CostlessMinus2 => "costless_minus_2",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.label() == s)
    }
}

/// The eleven bonus conditions, numbered 1..=11 in enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BonusRule {
    /// own = other − gap
    GapLower,
    /// own = other + gap
    GapHigher,
    /// |own − other| = gap
    GapAbsolute,
    /// |own − other| > gap
    MoreThan,
    Equal,
    Unequal,
    SumEven,
    SumOdd,
    /// own + other = upper bound
    SumUpper,
    /// own + other < upper bound
    LessUpper,
    /// both choose the lower bound
    CoordinateLow,
}

impl BonusRule {
    pub const ALL: [BonusRule; 11] = [
        BonusRule::GapLower,
        BonusRule::GapHigher,
        BonusRule::GapAbsolute,
        BonusRule::MoreThan,
        BonusRule::Equal,
        BonusRule::Unequal,
        BonusRule::SumEven,
        BonusRule::SumOdd,
        BonusRule::SumUpper,
        BonusRule::LessUpper,
        BonusRule::CoordinateLow,
    ];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get(usize::from(n).checked_sub(1)?).copied()
    }

    pub fn uses_gap(self) -> bool {
        matches!(
            self,
            BonusRule::GapLower | BonusRule::GapHigher | BonusRule::GapAbsolute | BonusRule::MoreThan
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            BonusRule::GapLower => "gap_lower",
            BonusRule::GapHigher => "gap_higher",
            BonusRule::GapAbsolute => "gap_absolute",
            BonusRule::MoreThan => "more_than",
            BonusRule::Equal => "equal",
            BonusRule::Unequal => "unequal",
            BonusRule::SumEven => "sum_even",
            BonusRule::SumOdd => "sum_odd",
            BonusRule::SumUpper => "sum_upper",
            BonusRule::LessUpper => "less_upper",
            BonusRule::CoordinateLow => "coordinate_low",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.label() == s)
    }

    pub fn fires(self, own: i64, other: i64, gap: i64, lower: i64, upper: i64) -> bool {
        match self {
            BonusRule::GapLower => own == other - gap,
            BonusRule::GapHigher => own == other + gap,
            BonusRule::GapAbsolute => (own - other).abs() == gap,
            BonusRule::MoreThan => (own - other).abs() > gap,
            BonusRule::Equal => own == other,
            BonusRule::Unequal => own != other,
            BonusRule::SumEven => (own + other) % 2 == 0,
            BonusRule::SumOdd => (own + other) % 2 != 0,
            BonusRule::SumUpper => own + other == upper,
            BonusRule::LessUpper => own + other < upper,
            BonusRule::CoordinateLow => own == lower && other == lower,
        }
    }
}

/// One point of the six-parameter family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GameSpec {
    pub lower_bound: i64,
    pub upper_bound: i64,
    pub gap: i64,
    pub bonus_size: i64,
    pub points_rule: PointsRule,
    pub bonus_rule: BonusRule,
}

impl GameSpec {
    /// Same game with the gap set to 1 when the bonus rule ignores it.
    pub fn canonical(mut self) -> Self {
        if !self.bonus_rule.uses_gap() {
            self.gap = 1;
        }
        self
    }

    pub fn n_actions(&self) -> usize {
        (self.upper_bound - self.lower_bound + 1) as usize
    }

    pub fn actions(&self) -> impl Iterator<Item = i64> {
        self.lower_bound..=self.upper_bound
    }

    pub fn validate(&self) -> Result<()> {
        if self.upper_bound < self.lower_bound {
            return Err(Error::invalid(format!(
                "upper bound {} below lower bound {}",
                self.upper_bound, self.lower_bound
            )));
        }
        if self.gap < 1 || self.bonus_size < 0 {
            return Err(Error::invalid("gap must be >= 1 and bonus size >= 0"));
        }
        Ok(())
    }

    pub fn guaranteed_points(&self, action: i64) -> Result<i64> {
        if action < self.lower_bound || action > self.upper_bound {
            return Err(Error::ActionOutOfRange {
                action,
                lower: self.lower_bound,
                upper: self.upper_bound,
            });
        }
        Ok(self.guaranteed_unchecked(action))
    }

    pub(crate) fn guaranteed_unchecked(&self, action: i64) -> i64 {
        match self.points_rule {
            PointsRule::NMinus2 => action - 2,
            PointsRule::NMinus1 => action - 1,
            PointsRule::N => action,
            PointsRule::NPlus1 => action + 1,
            PointsRule::NPlus2 => action + 2,
            PointsRule::CostlessMinus2 => {
                if action == self.upper_bound {
                    self.upper_bound
                } else {
                    self.upper_bound - 2
                }
            }
        }
    }

    pub fn bonus_fires(&self, own: i64, other: i64) -> bool {
        self.bonus_rule
            .fires(own, other, self.gap, self.lower_bound, self.upper_bound)
    }

    /// Stable short identifier, e.g. `L11-U20-G1-B20-n-r1`.
    pub fn id(&self) -> String {
        format!(
            "L{}-U{}-G{}-B{}-{}-r{}",
            self.lower_bound,
            self.upper_bound,
            self.gap,
            self.bonus_size,
            self.points_rule.label(),
            self.bonus_rule.number()
        )
    }

    /// Inverse of [`GameSpec::id`].
    pub fn from_id(id: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("malformed game id {id:?}"));
        let parts: Vec<&str> = id.split('-').collect();
        let [l, u, g, b, points, rule] = parts.as_slice() else { return Err(bad()) };
        let num = |s: &str, prefix: char| s.strip_prefix(prefix).and_then(|v| v.parse::<i64>().ok()).ok_or_else(bad);
        let rule = rule.strip_prefix('r').and_then(|v| v.parse::<u8>().ok()).and_then(BonusRule::from_number).ok_or_else(bad)?;
        let spec = GameSpec {
            lower_bound: num(l, 'L')?,
            upper_bound: num(u, 'U')?,
            gap: num(g, 'G')?,
            bonus_size: num(b, 'B')?,
            points_rule: PointsRule::from_label(points).ok_or_else(bad)?,
            bonus_rule: rule,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(points: PointsRule, lower: i64, upper: i64) -> GameSpec {
        GameSpec {
            lower_bound: lower,
            upper_bound: upper,
            gap: 1,
            bonus_size: 5,
            points_rule: points,
            bonus_rule: BonusRule::Equal,
        }
    }

    #[test]
    fn guaranteed_points_rules() {
        assert_eq!(spec(PointsRule::N, 5, 10).guaranteed_points(7).unwrap(), 7);
        assert_eq!(spec(PointsRule::CostlessMinus2, 5, 14).guaranteed_points(9).unwrap(), 12);
        assert_eq!(spec(PointsRule::CostlessMinus2, 5, 14).guaranteed_points(14).unwrap(), 14);
        assert_eq!(spec(PointsRule::NMinus2, 1, 6).guaranteed_points(1).unwrap(), -1);
        assert!(matches!(
            spec(PointsRule::N, 5, 10).guaranteed_points(11),
            Err(Error::ActionOutOfRange { .. })
        ));
    }

    #[test]
    fn rule_numbers_round_trip() {
        for r in BonusRule::ALL {
            assert_eq!(BonusRule::from_number(r.number()), Some(r));
            assert_eq!(BonusRule::from_label(r.label()), Some(r));
        }
        assert_eq!(BonusRule::ALL.iter().filter(|r| r.uses_gap()).count(), 4);
    }

    #[test]
    fn id_round_trips() {
        let s = spec(PointsRule::CostlessMinus2, 7, 19);
        assert_eq!(GameSpec::from_id(&s.id()).unwrap(), s);
        assert!(GameSpec::from_id("L11-U20-G1-B20-n").is_err());
        assert!(GameSpec::from_id("L11-U20-G1-B20-n-r12").is_err());
    }
}
