use serde::{Deserialize, Serialize};

use crate::agents::{Action, ResponseDistribution};
use crate::error::{Error, Result};

/// (1 − ε)·P + ε/K over the base distribution's K actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothedModel {
    pub base: ResponseDistribution,
    pub epsilon: f64,
    pub probs: Vec<f64>,
}

impl SmoothedModel {
    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn actions(&self) -> &[Action] {
        &self.base.actions
    }

    pub fn prob_of(&self, action: &Action) -> Option<f64> {
        self.base.actions.iter().position(|a| a == action).map(|i| self.probs[i])
    }
}

pub fn smooth(p: &ResponseDistribution, epsilon: f64) -> Result<SmoothedModel> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::invalid(format!("epsilon {epsilon} outside [0, 1)")));
    }
    let k = p.k() as f64;
    let probs = p.probs.iter().map(|&q| (1.0 - epsilon) * q + epsilon / k).collect();
    Ok(SmoothedModel { base: p.clone(), epsilon, probs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::Setting;

    #[test]
    fn pure_strategy_cells() {
        let s = Setting::new("t", (1..=10).map(Action::Int).collect(), None).unwrap();
        let p = ResponseDistribution::point_mass(&s, 3, 1);
        let m = smooth(&p, 0.2).unwrap();
        assert!((m.probs[3] - 0.82).abs() < 1e-15);
        assert!((m.probs[0] - 0.02).abs() < 1e-15);
        assert_eq!(smooth(&p, 0.0).unwrap().probs, p.probs);
        assert!(smooth(&p, 1.0).is_err());
    }
}
