use serde::{Deserialize, Serialize};

use crate::agents::{Action, ResponseDistribution};
use crate::error::{Error, Result};

/// How often human responses land where an unsmoothed model puts mass.
/// Shares are fractions in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageSummary {
    pub games: usize,
    pub responses: usize,
    pub on_argmax: f64,
    pub on_top3: f64,
    pub on_positive: f64,
    pub games_any_in_support: f64,
    pub games_all_in_support: f64,
}

/// Indices sorted by probability, ties toward the later (higher) action.
fn ranked(model: &ResponseDistribution) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..model.k()).collect();
    idx.sort_by(|&a, &b| model.probs[b].total_cmp(&model.probs[a]).then(b.cmp(&a)));
    idx
}

pub fn support_coverage(games: &[(&[Action], &ResponseDistribution)]) -> Result<CoverageSummary> {
    let (mut responses, mut argmax, mut top3, mut positive, mut any, mut all) = (0usize, 0, 0, 0, 0, 0);
    for (ys, model) in games {
        let order = ranked(model);
        let top: Vec<usize> = order.iter().copied().take(3).filter(|&i| model.probs[i] > 0.0).collect();
        let mut in_support = 0;
        for y in *ys {
            let i = model
                .actions
                .iter()
                .position(|a| a == y)
                .ok_or_else(|| Error::invalid(format!("response {y} not in model {}", model.setting_id)))?;
            responses += 1;
            argmax += usize::from(i == order[0]);
            top3 += usize::from(top.contains(&i));
            if model.probs[i] > 0.0 {
                positive += 1;
                in_support += 1;
            }
        }
        any += usize::from(in_support > 0);
        all += usize::from(in_support == ys.len() && !ys.is_empty());
    }
    if responses == 0 {
        return Err(Error::invalid("coverage needs at least one response"));
    }
    let r = responses as f64;
    let g = games.len() as f64;
    Ok(CoverageSummary {
        games: games.len(),
        responses,
        on_argmax: argmax as f64 / r,
        on_top3: top3 as f64 / r,
        on_positive: positive as f64 / r,
        games_any_in_support: any as f64 / g,
        games_all_in_support: all as f64 / g,
    })
}
