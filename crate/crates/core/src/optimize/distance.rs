use serde::{Deserialize, Serialize};

use crate::agents::{Action, ResponseDistribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceKind {
    /// Σ P log(P/Q) with the human distribution P as reference.
    ForwardKl,
    /// Σ_k |F_P(k) − F_Q(k)| over action positions.
    CdfAbsolute,
    /// Mean over actions of |P − Q|; for binary settings this is the
    /// absolute gap in the first option's share.
    MeanAbsoluteError,
    /// CDF gaps weighted by the spacing between integer action labels.
    EarthMover1d,
}

impl DistanceKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "kl" | "forward-kl" => Ok(DistanceKind::ForwardKl),
            "cdf-abs" | "cdf-absolute" => Ok(DistanceKind::CdfAbsolute),
            "mae" | "mean-absolute-error" => Ok(DistanceKind::MeanAbsoluteError),
            "emd" | "earth-mover-1d" => Ok(DistanceKind::EarthMover1d),
            other => Err(Error::invalid(format!("unknown distance {other:?}"))),
        }
    }

    /// Piecewise-linear in the model distribution.
    pub fn is_polyhedral(self) -> bool {
        !matches!(self, DistanceKind::ForwardKl)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceMeasure {
    pub kind: DistanceKind,
    /// Uniform mixing applied to the model side before a KL evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
}

impl DistanceMeasure {
    pub fn new(kind: DistanceKind) -> Self {
        DistanceMeasure { kind, smoothing: None }
    }

    pub fn smoothed(kind: DistanceKind, epsilon: f64) -> Self {
        DistanceMeasure { kind, smoothing: Some(epsilon) }
    }
}

/// Gaps between consecutive integer labels; unit for labelled actions.
pub(crate) fn spacings(actions: &[Action]) -> Vec<f64> {
    let ints: Option<Vec<i64>> = actions
        .iter()
        .map(|a| match a {
            Action::Int(v) => Some(*v),
            Action::Label(_) => None,
        })
        .collect();
    match ints {
        Some(v) if v.len() > 1 => v.windows(2).map(|w| (w[1] - w[0]).abs() as f64).collect(),
        _ => vec![1.0; actions.len().saturating_sub(1)],
    }
}

pub fn distance_probs(p: &[f64], q: &[f64], measure: &DistanceMeasure, spacing: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::MismatchedSettings);
    }
    let k = p.len();
    Ok(match measure.kind {
        DistanceKind::ForwardKl => {
            let eps = measure.smoothing.unwrap_or(0.0);
            let mut total = 0.0;
            for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
                if pi <= 0.0 {
                    continue;
                }
                let qs = (1.0 - eps) * qi + eps / k as f64;
                if qs <= 0.0 {
                    return Err(Error::SupportViolation { index: i });
                }
                total += pi * (pi / qs).ln();
            }
            total.max(0.0)
        }
        DistanceKind::CdfAbsolute | DistanceKind::EarthMover1d => {
            let unit = measure.kind == DistanceKind::CdfAbsolute;
            let (mut fp, mut fq, mut total) = (0.0, 0.0, 0.0);
            for i in 0..k.saturating_sub(1) {
                fp += p[i];
                fq += q[i];
                let w = if unit { 1.0 } else { spacing.get(i).copied().unwrap_or(1.0) };
                total += w * (fp - fq).abs();
            }
            total
        }
        DistanceKind::MeanAbsoluteError => p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / k as f64,
    })
}

/// d(P, Q) with `p` as the reference distribution.
pub fn distance(p: &ResponseDistribution, q: &ResponseDistribution, measure: &DistanceMeasure) -> Result<f64> {
    if p.actions != q.actions {
        return Err(Error::MismatchedSettings);
    }
    distance_probs(&p.probs, &q.probs, measure, &spacings(&p.actions))
}

/// Average distance over paired settings.
pub fn mean_distance(targets: &[ResponseDistribution], preds: &[ResponseDistribution], measure: &DistanceMeasure) -> Result<f64> {
    if targets.len() != preds.len() || targets.is_empty() {
        return Err(Error::MismatchedSettings);
    }
    let mut total = 0.0;
    for (t, p) in targets.iter().zip(preds) {
        total += distance(t, p, measure)?;
    }
    Ok(total / targets.len() as f64)
}

/// d(target, baseline) − d(target, fitted); positive when the fit is closer.
pub fn improvement_over_baseline(
    target: &ResponseDistribution,
    fitted: &ResponseDistribution,
    baseline: &ResponseDistribution,
    measure: &DistanceMeasure,
) -> Result<f64> {
    Ok(distance(target, baseline, measure)? - distance(target, fitted, measure)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kl_of_point_mass() {
        let m = DistanceMeasure::new(DistanceKind::ForwardKl);
        let d = distance_probs(&[1.0, 0.0], &[0.5, 0.5], &m, &[1.0]).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-15);
        assert!(matches!(
            distance_probs(&[0.5, 0.5], &[1.0, 0.0], &m, &[1.0]),
            Err(Error::SupportViolation { index: 1 })
        ));
        let s = DistanceMeasure::smoothed(DistanceKind::ForwardKl, 0.1);
        assert!(distance_probs(&[0.5, 0.5], &[1.0, 0.0], &s, &[1.0]).unwrap().is_finite());
    }

    #[test]
    fn cdf_and_emd() {
        let p = [0.5, 0.5, 0.0];
        let q = [0.0, 0.5, 0.5];
        let cdf = distance_probs(&p, &q, &DistanceMeasure::new(DistanceKind::CdfAbsolute), &[1.0, 1.0]).unwrap();
        assert!((cdf - 1.0).abs() < 1e-15);
        let emd = distance_probs(&p, &q, &DistanceMeasure::new(DistanceKind::EarthMover1d), &[2.0, 3.0]).unwrap();
        assert!((emd - 2.5).abs() < 1e-15);
        let mae = distance_probs(&[0.3, 0.7], &[0.6, 0.4], &DistanceMeasure::new(DistanceKind::MeanAbsoluteError), &[1.0]).unwrap();
        assert!((mae - 0.3).abs() < 1e-12);
    }
}
