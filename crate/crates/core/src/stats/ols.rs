use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::games::{BonusRule, GameSpec, PointsRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HcFlavor {
    Hc0,
    #[default]
    Hc1,
}

/// Column-wise regression design; starts with an intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub names: Vec<String>,
    columns: Vec<Vec<f64>>,
    rows: usize,
}

impl Design {
    pub fn intercept(rows: usize) -> Self {
        Design { names: vec!["const".into()], columns: vec![vec![1.0; rows]], rows }
    }

    pub fn numeric(mut self, name: &str, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.rows {
            return Err(Error::invalid(format!("column {name} has {} rows, expected {}", values.len(), self.rows)));
        }
        self.names.push(name.to_string());
        self.columns.push(values);
        Ok(self)
    }

    /// One indicator per observed level other than `reference`, in sorted order.
    pub fn categorical(mut self, name: &str, values: &[String], reference: &str) -> Result<Self> {
        if values.len() != self.rows {
            return Err(Error::invalid(format!("factor {name} has {} rows, expected {}", values.len(), self.rows)));
        }
        let mut levels: Vec<&String> = values.iter().filter(|v| v.as_str() != reference).collect();
        levels.sort();
        levels.dedup();
        for level in levels {
            self.names.push(format!("{name}={level}"));
            self.columns.push(values.iter().map(|v| f64::from(u8::from(v == level))).collect());
        }
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.columns.len(), |i, j| self.columns[j][i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub observations: usize,
    pub r_squared: f64,
    pub flavor: HcFlavor,
}

/// Least squares with heteroskedasticity-robust sandwich errors.
pub fn ols_robust(y: &[f64], design: &Design, flavor: HcFlavor) -> Result<OlsFit> {
    let n = design.rows();
    let k = design.columns.len();
    if y.len() != n {
        return Err(Error::invalid("outcome length differs from design rows"));
    }
    if n <= k {
        return Err(Error::RankDeficient);
    }
    let x = design.matrix();
    let sv = x.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if smax <= 0.0 || smin / smax < 1e-10 {
        return Err(Error::RankDeficient);
    }
    let yv = DVector::from_column_slice(y);
    let xtx = x.transpose() * &x;
    let inv = xtx.try_inverse().ok_or(Error::RankDeficient)?;
    let beta = &inv * x.transpose() * &yv;
    let resid = &yv - &x * &beta;

    let mut meat = DMatrix::<f64>::zeros(k, k);
    for i in 0..n {
        let xi = x.row(i).transpose();
        meat += &xi * xi.transpose() * resid[i].powi(2);
    }
    let mut cov = &inv * meat * &inv;
    if flavor == HcFlavor::Hc1 {
        cov *= n as f64 / (n - k) as f64;
    }

    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let rss: f64 = resid.iter().map(|e| e * e).sum();
    let t_dist = StudentsT::new(0.0, 1.0, (n - k) as f64).map_err(|e| Error::invalid(e.to_string()))?;

    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let std_errors: Vec<f64> = (0..k).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let t_stats: Vec<f64> = coefficients.iter().zip(&std_errors).map(|(b, s)| if *s > 0.0 { b / s } else { f64::NAN }).collect();
    let p_values = t_stats.iter().map(|t| if t.is_nan() { f64::NAN } else { 2.0 * (1.0 - t_dist.cdf(t.abs())) }).collect();
    Ok(OlsFit {
        names: design.names.clone(),
        coefficients,
        std_errors,
        t_stats,
        p_values,
        observations: n,
        r_squared: if tss > 0.0 { 1.0 - rss / tss } else { 0.0 },
        flavor,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    PointsRule,
    BonusRule,
}

impl Factor {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "points_rule" => Ok(Factor::PointsRule),
            "bonus_rule" => Ok(Factor::BonusRule),
            other => Err(Error::invalid(format!("unknown regression factor {other:?}"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Factor::PointsRule => "points_rule",
            Factor::BonusRule => "bonus_rule",
        }
    }

    /// Reference levels: the unmodified points rule and the low
    /// coordination bonus.
    fn reference(self) -> &'static str {
        match self {
            Factor::PointsRule => PointsRule::N.label(),
            Factor::BonusRule => BonusRule::CoordinateLow.label(),
        }
    }

    fn level(self, spec: &GameSpec) -> String {
        match self {
            Factor::PointsRule => spec.points_rule.label().to_string(),
            Factor::BonusRule => spec.bonus_rule.label().to_string(),
        }
    }
}

/// Regresses per-game ratios on game-rule indicators.
pub fn subgroup_regression(rows: &[(f64, GameSpec)], by: &[Factor], flavor: HcFlavor) -> Result<OlsFit> {
    let mut design = Design::intercept(rows.len());
    for &f in by {
        let levels: Vec<String> = rows.iter().map(|(_, s)| f.level(s)).collect();
        design = design.categorical(f.name(), &levels, f.reference())?;
    }
    let y: Vec<f64> = rows.iter().map(|(v, _)| *v).collect();
    ols_robust(&y, &design, flavor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intercept_only_matches_sample_se() {
        let y = [1.0, 2.0, 4.0, 7.0, 11.0];
        let fit = ols_robust(&y, &Design::intercept(5), HcFlavor::Hc1).unwrap();
        let mean = 5.0;
        let s2 = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 4.0;
        assert!((fit.coefficients[0] - mean).abs() < 1e-12);
        assert!((fit.std_errors[0] - (s2 / 5.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn collinear_design_is_rejected() {
        let d = Design::intercept(4).numeric("twice", vec![2.0; 4]).unwrap();
        assert!(matches!(ols_robust(&[1.0, 2.0, 3.0, 4.0], &d, HcFlavor::Hc1), Err(Error::RankDeficient)));
    }
}
