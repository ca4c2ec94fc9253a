//! The 11-20 money-request game and its cycle and costless variants.

use serde::{Deserialize, Serialize};

use super::matrix::SymmetricGame;
use super::spec::{BonusRule, GameSpec, PointsRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArVariant {
    Basic,
    Cycle,
    Costless,
}

impl ArVariant {
    pub const ALL: [ArVariant; 3] = [ArVariant::Basic, ArVariant::Cycle, ArVariant::Costless];

    pub fn label(self) -> &'static str {
        match self {
            ArVariant::Basic => "basic",
            ArVariant::Cycle => "cycle",
            ArVariant::Costless => "costless",
        }
    }

    pub fn game(self) -> SymmetricGame {
        match self {
            ArVariant::Basic => basic(),
            ArVariant::Cycle => cycle(),
            ArVariant::Costless => costless(),
        }
    }

    pub fn instructions(self) -> &'static str {
        match self {
            ArVariant::Basic => "You and another player are playing a game in which each player requests an amount of money. The amount must be (an integer) between 11 and 20 shekels. Each player will receive the amount he requests. A player will receive an additional amount of 20 shekels if he asks for exactly one shekel less than the other player. What amount of money would you request?",
            ArVariant::Cycle => "You and another player are playing a game in which each player requests an amount of money. The amount must be (an integer) between 11 and 20 shekels. Each player will receive the amount he requests. A player will receive an additional amount of 20 shekels if he asks for exactly one shekel less than the other player, or if he asks for 20 shekels and the other player asks for 11 shekels. What amount of money would you request?",
            ArVariant::Costless => "You and another player are playing a game in which each player requests an amount of money. The amount must be (an integer) between 11 and 20 shekels. A player who requests 20 shekels will receive 20 shekels. A player who requests any other amount will receive 17 shekels. A player will receive an additional amount of 20 shekels if he asks for exactly one shekel less than the other player. What amount of money would you request?",
        }
    }
}

pub const BASIC_SPEC: GameSpec = GameSpec {
    lower_bound: 11,
    upper_bound: 20,
    gap: 1,
    bonus_size: 20,
    points_rule: PointsRule::N,
    bonus_rule: BonusRule::GapLower,
};

pub fn basic() -> SymmetricGame {
    SymmetricGame::from_spec(&BASIC_SPEC).expect("basic spec is valid")
}

/// Basic game plus a bonus for requesting 20 against an opponent's 11.
pub fn cycle() -> SymmetricGame {
    let mut rows = basic().to_rows();
    rows[9][0] += 20;
    SymmetricGame::new((11..=20).collect(), rows).expect("square matrix")
}

/// 17 for any request below 20, 20 for requesting 20, plus the undercut bonus.
pub fn costless() -> SymmetricGame {
    let actions: Vec<i64> = (11..=20).collect();
    let rows = actions
        .iter()
        .map(|&own| {
            let base = if own == 20 { 20 } else { 17 };
            actions.iter().map(|&other| base + if own == other - 1 { 20 } else { 0 }).collect()
        })
        .collect();
    SymmetricGame::new(actions, rows).expect("square matrix")
}
