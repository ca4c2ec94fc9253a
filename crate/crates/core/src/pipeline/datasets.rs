//! Response data printed in published tables, bundled for offline runs.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::humans::{HumanDataset, HumanGame, HumanResponse};
use crate::agents::{scale_mixture_to_population, Action, PayoffSemantics, ResponseDistribution, Setting};
use crate::error::{Error, Result};
use crate::games::variants::ArVariant;

const AR_HUMANS: &str = include_str!("../../data/ar_humans.json");
const CR_TWO_STAGE: &str = include_str!("../../data/cr_two_stage.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArHumanRow {
    pub game: String,
    pub n: u64,
    /// Whole-percent shares per action, as printed.
    pub percent: Vec<u32>,
    pub nash_percent: Vec<u32>,
}

#[derive(Debug, Deserialize)]
struct ArFile {
    actions: Vec<i64>,
    sets: Vec<ArHumanRow>,
}

fn ar_file() -> &'static ArFile {
    static FILE: OnceLock<ArFile> = OnceLock::new();
    FILE.get_or_init(|| serde_json::from_str(AR_HUMANS).expect("bundled money-request data parses"))
}

pub fn ar_rows() -> &'static [ArHumanRow] {
    &ar_file().sets
}

pub fn ar_row(variant: ArVariant) -> &'static ArHumanRow {
    ar_rows().iter().find(|r| r.game == variant.label()).expect("every variant is bundled")
}

/// Counts consistent with the printed percentages: largest-remainder
/// apportionment of n, ties to the lower action.
pub fn reconstruct_counts(row: &ArHumanRow) -> Vec<u64> {
    let weights: Vec<f64> = row.percent.iter().map(|&p| f64::from(p)).collect();
    scale_mixture_to_population(&weights, row.n)
}

/// True when each count rounds back to its printed whole percentage.
pub fn counts_match_percent(counts: &[u64], percent: &[u32]) -> bool {
    let n: u64 = counts.iter().sum();
    n > 0 && counts.len() == percent.len()
        && counts.iter().zip(percent).all(|(&c, &p)| (100.0 * c as f64 / n as f64).round() as u32 == p)
}

pub fn ar_setting(variant: ArVariant) -> Setting {
    Setting::from_game(&variant.game(), variant.instructions()).named(format!("ar-{}", variant.label()))
}

/// Reconstructed individual responses for one variant.
pub fn ar_human_dataset(variant: ArVariant) -> Result<HumanDataset> {
    let row = ar_row(variant);
    let setting = ar_setting(variant);
    let counts = reconstruct_counts(row);
    if !counts_match_percent(&counts, &row.percent) {
        return Err(Error::invalid(format!("reconstructed counts for {} disagree with the printed shares", row.game)));
    }
    let mut responses = Vec::new();
    for (a, &c) in ar_file().actions.iter().zip(&counts) {
        for _ in 0..c {
            responses.push(HumanResponse { subject: format!("r{:03}", responses.len() + 1), action: Action::Int(*a) });
        }
    }
    let game = HumanGame::new(format!("ar-{}", row.game), setting, responses)?;
    Ok(HumanDataset {
        source: "ar-published".into(),
        games: vec![game],
        notes: vec!["counts reconstructed from whole-percent shares by largest remainder".into()],
        filter_report: Default::default(),
    })
}

pub fn ar_human_distribution(variant: ArVariant) -> Result<ResponseDistribution> {
    ResponseDistribution::from_counts(&ar_setting(variant), reconstruct_counts(ar_row(variant)))
}

/// Printed equilibrium prediction as probabilities.
pub fn ar_nash_prediction(variant: ArVariant) -> Vec<f64> {
    ar_row(variant).nash_percent.iter().map(|&p| f64::from(p) / 100.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrShares {
    pub out: f64,
    pub enter: f64,
    pub left: f64,
    pub right: f64,
}

/// A two-stage allocation game: A takes `out` or lets B pick `left` or
/// `right`. Pairs are (to A, to B).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrGame {
    pub name: String,
    pub panel: String,
    pub out: (i64, i64),
    pub left: (i64, i64),
    pub right: (i64, i64),
    pub share: CrShares,
}

impl CrGame {
    pub fn setting_b(&self) -> Setting {
        let text = format!(
            "You are Person B. Person A could have ended the game with {} for Person A and {} for you, \
             but you will not learn what Person A chose until payoffs are realized. \
             Left gives {} to Person A and {} to you. Right gives {} to Person A and {} to you. \
             Do you choose Left or Right?",
            self.out.0, self.out.1, self.left.0, self.left.1, self.right.0, self.right.1
        );
        Setting::new(
            text,
            vec![Action::Label("Left".into()), Action::Label("Right".into())],
            Some(PayoffSemantics::Allocation { options: [self.left, self.right] }),
        )
        .expect("two labelled actions form a valid setting")
        .named(format!("{}-b", self.name))
    }

    pub fn setting_a(&self) -> Setting {
        let text = format!(
            "You are Person A. Out gives {} to you and {} to Person B. \
             Enter lets Person B choose between Left ({} to you, {} to Person B) \
             and Right ({} to you, {} to Person B). Do you choose Out or Enter?",
            self.out.0, self.out.1, self.left.0, self.left.1, self.right.0, self.right.1
        );
        Setting::new(text, vec![Action::Label("Out".into()), Action::Label("Enter".into())], None)
            .expect("two labelled actions form a valid setting")
            .named(format!("{}-a", self.name))
    }

    pub fn human_b(&self) -> Result<ResponseDistribution> {
        ResponseDistribution::from_probs(&self.setting_b(), vec![self.share.left, self.share.right], 0.0)
    }

    pub fn human_a(&self) -> Result<ResponseDistribution> {
        ResponseDistribution::from_probs(&self.setting_a(), vec![self.share.out, self.share.enter], 0.0)
    }
}

#[derive(Debug, Deserialize)]
struct CrFile {
    games: Vec<CrGame>,
}

pub fn cr_two_stage() -> &'static [CrGame] {
    static FILE: OnceLock<CrFile> = OnceLock::new();
    &FILE.get_or_init(|| serde_json::from_str(CR_TWO_STAGE).expect("bundled allocation data parses")).games
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_counts_total_108() {
        let d = ar_human_dataset(ArVariant::Basic).unwrap();
        assert_eq!(d.games[0].responses.len(), 108);
        for v in ArVariant::ALL {
            let row = ar_row(v);
            assert!(counts_match_percent(&reconstruct_counts(row), &row.percent), "{}", row.game);
        }
    }

    #[test]
    fn allocation_table_is_complete() {
        let games = cr_two_stage();
        assert_eq!(games.len(), 20);
        for g in games {
            assert!((g.share.out + g.share.enter - 1.0).abs() < 1e-9);
            assert!((g.share.left + g.share.right - 1.0).abs() < 1e-9);
        }
    }
}
