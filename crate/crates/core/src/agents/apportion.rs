/// Largest-remainder apportionment of `n` agents by `weights`. Remainder
/// ties go to the earlier persona.
pub fn scale_mixture_to_population(weights: &[f64], n: u64) -> Vec<u64> {
    let total: f64 = weights.iter().sum();
    if weights.is_empty() || total <= 0.0 {
        return vec![0; weights.len()];
    }
    let quotas: Vec<f64> = weights.iter().map(|w| w.max(0.0) / total * n as f64).collect();
    let mut counts: Vec<u64> = quotas.iter().map(|q| (q + 1e-9).floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    let rem = |i: usize| (quotas[i] - counts[i] as f64).max(0.0);
    order.sort_by(|&a, &b| {
        let (ra, rb) = (rem(a), rem(b));
        if (ra - rb).abs() < 1e-9 {
            a.cmp(&b)
        } else {
            rb.total_cmp(&ra)
        }
    });
    for &i in order.iter().take(n.saturating_sub(assigned) as usize) {
        counts[i] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_examples() {
        assert_eq!(scale_mixture_to_population(&[0.5, 0.5], 100), vec![50, 50]);
        assert_eq!(scale_mixture_to_population(&[1.0, 0.0], 3), vec![3, 0]);
        let w = [0.065, 0.0, 0.0, 0.0, 0.0, 0.469, 0.013, 0.339, 0.114, 0.0];
        assert_eq!(scale_mixture_to_population(&w, 100), vec![7, 0, 0, 0, 0, 47, 1, 34, 11, 0]);
    }
}
