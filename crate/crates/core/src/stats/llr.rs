use serde::{Deserialize, Serialize};

use super::smooth::SmoothedModel;
use crate::agents::Action;
use crate::error::{Error, Result};

/// Mean log-likelihood ratio of two models on one game's human responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameComparison {
    pub game_id: String,
    pub responses: usize,
    /// Positive favours model A.
    pub llr: f64,
    /// log A(y) − log B(y) per response, in input order.
    pub terms: Vec<f64>,
}

impl GameComparison {
    /// Variance of the per-response terms (n − 1 divisor).
    pub fn within_variance(&self) -> f64 {
        super::sample_variance(&self.terms)
    }
}

fn log_prob(model: &SmoothedModel, game: &str, y: &Action) -> Result<f64> {
    let p = model
        .prob_of(y)
        .ok_or_else(|| Error::invalid(format!("response {y} is not an action of game {game}")))?;
    if p <= 0.0 {
        return Err(Error::ZeroLikelihood { game: game.to_string(), action: y.to_string() });
    }
    Ok(p.ln())
}

pub fn game_llr(game_id: &str, responses: &[Action], a: &SmoothedModel, b: &SmoothedModel) -> Result<GameComparison> {
    if a.actions() != b.actions() {
        return Err(Error::MismatchedSettings);
    }
    if responses.is_empty() {
        return Err(Error::invalid(format!("game {game_id} has no responses")));
    }
    let terms = responses
        .iter()
        .map(|y| Ok(log_prob(a, game_id, y)? - log_prob(b, game_id, y)?))
        .collect::<Result<Vec<f64>>>()?;
    let llr = terms.iter().sum::<f64>() / terms.len() as f64;
    Ok(GameComparison { game_id: game_id.to_string(), responses: terms.len(), llr, terms })
}
