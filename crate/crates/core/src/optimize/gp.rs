use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use statrs::function::erf::erfc;

const LENGTH_SCALES: [f64; 9] = [0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.5];
const NOISES: [f64; 3] = [1e-6, 1e-3, 1e-2];

fn matern52(r: f64, ls: f64) -> f64 {
    let s = 5f64.sqrt() * r / ls;
    (1.0 + s + s * s / 3.0) * (-s).exp()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Zero-mean Gaussian process on standardized outputs with a Matérn-5/2
/// kernel; length scale and noise picked by marginal likelihood over a grid.
pub(crate) struct Gp {
    x: Vec<Vec<f64>>,
    alpha: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    length_scale: f64,
    mean: f64,
    scale: f64,
}

impl Gp {
    pub(crate) fn fit(x: &[Vec<f64>], y: &[f64]) -> Option<Gp> {
        let n = y.len();
        if n == 0 {
            return None;
        }
        let mean = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        let z = DVector::from_iterator(n, y.iter().map(|v| (v - mean) / scale));

        let mut best: Option<(f64, Gp)> = None;
        for &ls in &LENGTH_SCALES {
            for &noise in &NOISES {
                let k = DMatrix::from_fn(n, n, |i, j| matern52(dist(&x[i], &x[j]), ls) + if i == j { noise } else { 0.0 });
                let Some(chol) = Cholesky::new(k) else { continue };
                let alpha = chol.solve(&z);
                let log_det: f64 = chol.l_dirty().diagonal().iter().take(n).map(|d| d.ln()).sum::<f64>() * 2.0;
                let lml = -0.5 * z.dot(&alpha) - 0.5 * log_det;
                if best.as_ref().is_none_or(|(b, _)| lml > *b) {
                    best = Some((lml, Gp { x: x.to_vec(), alpha, chol, length_scale: ls, mean, scale }));
                }
            }
        }
        best.map(|(_, gp)| gp)
    }

    /// Posterior mean and standard deviation in original units.
    pub(crate) fn predict(&self, p: &[f64]) -> (f64, f64) {
        let kv = DVector::from_iterator(self.x.len(), self.x.iter().map(|xi| matern52(dist(xi, p), self.length_scale)));
        let mu = kv.dot(&self.alpha);
        let v = self.chol.solve(&kv);
        let var = (1.0 - kv.dot(&v)).max(1e-12);
        (self.mean + self.scale * mu, self.scale * var.sqrt())
    }
}

/// Expected improvement below `best` (minimization).
pub(crate) fn expected_improvement(mu: f64, sd: f64, best: f64, xi: f64) -> f64 {
    let gain = best - mu - xi;
    if sd <= 0.0 {
        return gain.max(0.0);
    }
    let z = gain / sd;
    let cdf = 0.5 * erfc(-z / std::f64::consts::SQRT_2);
    let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    gain * cdf + sd * pdf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_observations() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 / 4.0]).collect();
        let y: Vec<f64> = x.iter().map(|p| (p[0] - 0.4).powi(2)).collect();
        let gp = Gp::fit(&x, &y).unwrap();
        for (p, v) in x.iter().zip(&y) {
            let (mu, _) = gp.predict(p);
            assert!((mu - v).abs() < 1e-2);
        }
        assert!(expected_improvement(0.0, 1.0, 0.0, 0.0) > 0.39);
    }
}
