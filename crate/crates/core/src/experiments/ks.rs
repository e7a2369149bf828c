//! Two-sample Kolmogorov–Smirnov test.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    /// `sup |F_a − F_b|`.
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
}

/// Kolmogorov distribution tail `Q(λ) = 2 Σ (−1)^{j−1} e^{−2j²λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let jf = f64::from(j);
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample KS statistic with the small-sample corrected asymptotic p-value
/// `Q((√nₑ + 0.12 + 0.11/√nₑ)·D)`, `nₑ = n_a n_b / (n_a + n_b)`. Ties are
/// handled by stepping both empirical CDFs past equal values together.
pub fn compare_distributions(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::InvalidArgument("sample contains NaN".into()));
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let s = ne.sqrt();
    Ok(KsResult { statistic: d, p_value: kolmogorov_q((s + 0.12 + 0.11 / s) * d) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{trial_rng, Stream};
    use rand::Rng;
    use rand_distr::Exp1;

    #[test]
    fn identical_samples() {
        let x = [0.3, 0.1, 0.7, 0.7, 2.0];
        let r = compare_distributions(&x, &x).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(compare_distributions(&[], &x).is_err());
    }

    #[test]
    fn disjoint_samples() {
        let r = compare_distributions(&[1.0, 2.0, 3.0], &[4.0, 5.0]).unwrap();
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn q_known_values() {
        // Q(1.36) ≈ 0.049, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_q(1.36) - 0.0494).abs() < 5e-4);
        assert!((kolmogorov_q(1.63) - 0.0098).abs() < 3e-4);
    }

    #[test]
    fn power_and_size() {
        let mut rng = trial_rng(4, Stream::Verify, 0);
        let mut draw = |scale: f64| -> Vec<f64> { (0..10_000).map(|_| scale * rng.sample::<f64, _>(Exp1)).collect() };
        let a = draw(1.0);
        let b = draw(0.5);
        let c = draw(1.0);
        assert!(compare_distributions(&a, &b).unwrap().p_value < 0.01);
        assert!(compare_distributions(&a, &c).unwrap().p_value > 0.01);
    }
}
