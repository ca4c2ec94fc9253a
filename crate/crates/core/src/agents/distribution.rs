use serde::{Deserialize, Serialize};

use super::setting::{Action, Setting};
use crate::error::{Error, Result};

/// Probability mass over a setting's ordered action set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseDistribution {
    pub setting_id: String,
    pub actions: Vec<Action>,
    pub probs: Vec<f64>,
    /// Raw counts when the distribution comes from discrete draws.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<u64>>,
    /// Number of responses, or the weighted effective count for mixtures.
    pub total: f64,
}

impl ResponseDistribution {
    pub fn from_counts(setting: &Setting, counts: Vec<u64>) -> Result<Self> {
        Self::from_counts_parts(&setting.id, &setting.actions, counts)
    }

    pub(crate) fn from_counts_parts(setting_id: &str, actions: &[Action], counts: Vec<u64>) -> Result<Self> {
        if counts.len() != actions.len() {
            return Err(Error::MismatchedSettings);
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::invalid("no responses"));
        }
        let probs = counts.iter().map(|&c| c as f64 / n as f64).collect();
        Ok(ResponseDistribution {
            setting_id: setting_id.to_string(),
            actions: actions.to_vec(),
            probs,
            counts: Some(counts),
            total: n as f64,
        })
    }

    /// Normalises nonnegative weights; `total` is recorded as given.
    pub fn from_probs(setting: &Setting, probs: Vec<f64>, total: f64) -> Result<Self> {
        if probs.len() != setting.k() {
            return Err(Error::MismatchedSettings);
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid("probabilities must be finite and nonnegative"));
        }
        let s: f64 = probs.iter().sum();
        if s <= 0.0 {
            return Err(Error::invalid("probabilities sum to zero"));
        }
        Ok(ResponseDistribution {
            setting_id: setting.id.clone(),
            actions: setting.actions.clone(),
            probs: probs.into_iter().map(|p| p / s).collect(),
            counts: None,
            total,
        })
    }

    pub fn uniform(setting: &Setting) -> Self {
        let k = setting.k();
        Self::from_probs(setting, vec![1.0; k], k as f64).expect("uniform is valid")
    }

    pub fn point_mass(setting: &Setting, index: usize, n: u64) -> Self {
        let mut counts = vec![0; setting.k()];
        counts[index] = n.max(1);
        Self::from_counts(setting, counts).expect("point mass is valid")
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn prob_of(&self, action: &Action) -> Option<f64> {
        self.actions.iter().position(|a| a == action).map(|i| self.probs[i])
    }

    pub fn same_support_as(&self, other: &ResponseDistribution) -> bool {
        self.setting_id == other.setting_id && self.actions == other.actions
    }

    /// Index of the largest probability; ties go to the later action.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p >= self.probs[best] {
                best = i;
            }
        }
        best
    }
}

/// Convex combination of distributions over one setting.
pub fn mixture_distribution(components: &[ResponseDistribution], weights: &[f64]) -> Result<ResponseDistribution> {
    let first = components.first().ok_or_else(|| Error::invalid("empty mixture"))?;
    if weights.len() != components.len() {
        return Err(Error::invalid("one weight per component required"));
    }
    if components.iter().any(|c| !c.same_support_as(first)) {
        return Err(Error::MismatchedSettings);
    }
    if weights.iter().any(|w| !w.is_finite() || *w < -1e-12) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("mixture weights must lie on the simplex"));
    }
    let mut probs = vec![0.0; first.k()];
    let mut total = 0.0;
    for (c, &w) in components.iter().zip(weights) {
        let w = w.max(0.0);
        for (p, q) in probs.iter_mut().zip(&c.probs) {
            *p += w * q;
        }
        total += w * c.total;
    }
    Ok(ResponseDistribution {
        setting_id: first.setting_id.clone(),
        actions: first.actions.clone(),
        probs,
        counts: None,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setting() -> Setting {
        Setting::new("pick", (1..=3).map(Action::Int).collect(), None).unwrap()
    }

    #[test]
    fn identity_and_even_split() {
        let s = setting();
        let a = ResponseDistribution::point_mass(&s, 0, 10);
        let b = ResponseDistribution::point_mass(&s, 2, 10);
        let m = mixture_distribution(&[a.clone(), b.clone()], &[1.0, 0.0]).unwrap();
        assert_eq!(m.probs, a.probs);
        let m = mixture_distribution(&[a, b], &[0.5, 0.5]).unwrap();
        assert_eq!(m.probs, vec![0.5, 0.0, 0.5]);
    }

    #[test]
    fn mismatched_settings() {
        let s = setting();
        let other = Setting::new("other", (1..=3).map(Action::Int).collect(), None).unwrap();
        let a = ResponseDistribution::uniform(&s);
        let b = ResponseDistribution::uniform(&other);
        assert!(matches!(mixture_distribution(&[a, b], &[0.5, 0.5]), Err(Error::MismatchedSettings)));
    }

    #[test]
    fn argmax_prefers_later_action() {
        let s = setting();
        let d = ResponseDistribution::from_probs(&s, vec![0.4, 0.4, 0.2], 1.0).unwrap();
        assert_eq!(d.argmax(), 1);
    }
}
