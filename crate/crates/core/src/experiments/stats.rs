//! Summary statistics over trial records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of a summary table. Derived scalars (norms, z-scores, analytic
/// reference values) leave the sample-only columns empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub metric: String,
    pub count: u64,
    pub mean: f64,
    pub variance: Option<f64>,
    pub stderr: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub q05: Option<f64>,
    pub q50: Option<f64>,
    pub q95: Option<f64>,
}

impl SummaryRow {
    /// Full sample statistics of `xs`.
    pub fn from_samples(metric: &str, xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::EmptySample);
        }
        let count = xs.len() as u64;
        let nf = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / nf;
        let variance = (xs.len() > 1).then(|| xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0));
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            metric: metric.to_string(),
            count,
            mean,
            variance,
            stderr: variance.map(|v| (v / nf).sqrt()),
            min: sorted.first().copied(),
            max: sorted.last().copied(),
            q05: Some(quantile_sorted(&sorted, 0.05)),
            q50: Some(quantile_sorted(&sorted, 0.50)),
            q95: Some(quantile_sorted(&sorted, 0.95)),
        })
    }

    /// A derived value with an optional standard error.
    pub fn scalar(metric: &str, count: u64, value: f64, stderr: Option<f64>) -> Self {
        Self {
            metric: metric.to_string(),
            count,
            mean: value,
            variance: None,
            stderr,
            min: None,
            max: None,
            q05: None,
            q50: None,
            q95: None,
        }
    }

    /// `(mean − target) / stderr`.
    pub fn z_against(&self, target: f64) -> Option<f64> {
        self.stderr.filter(|&s| s > 0.0).map(|s| (self.mean - target) / s)
    }
}

/// Linear interpolation between order statistics (R type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Ordered collection of summary rows.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub rows: Vec<SummaryRow>,
}

impl TrialSummary {
    pub fn push(&mut self, row: SummaryRow) {
        self.rows.push(row);
    }

    pub fn sample(&mut self, metric: &str, xs: &[f64]) -> Result<()> {
        self.rows.push(SummaryRow::from_samples(metric, xs)?);
        Ok(())
    }

    pub fn get(&self, metric: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }
}

/// `‖X‖_p = (E|X|^p)^{1/p}` with a delta-method standard error.
pub fn lp_norm(xs: &[f64], p: u32) -> Result<(f64, f64)> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    if p == 0 {
        return Err(Error::InvalidArgument("norm order must be at least 1".into()));
    }
    let pf = f64::from(p);
    let powed: Vec<f64> = xs.iter().map(|x| x.abs().powf(pf)).collect();
    let nf = xs.len() as f64;
    let m = powed.iter().sum::<f64>() / nf;
    let norm = m.powf(1.0 / pf);
    let se = if xs.len() > 1 && m > 0.0 {
        let var = powed.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (nf - 1.0);
        // d/dm m^{1/p} = m^{1/p − 1} / p
        norm / (pf * m) * (var / nf).sqrt()
    } else {
        0.0
    };
    Ok((norm, se))
}

/// Sample variance and the standard error of that estimate,
/// `sqrt((m4 − s⁴) / N)`.
pub fn variance_with_se(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::EmptySample);
    }
    let nf = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
    Ok((var, ((m4 - var * var).max(0.0) / nf).sqrt()))
}

/// Statistics of `T_n` relative to `θ`: positive and negative parts,
/// `L^p` norms of `T_n − θ`, `P(T_n ≤ θ)` and scaled versions.
pub fn passage_rows(ts: &[f64], theta: f64, n: u32, orders: &[u32]) -> Result<Vec<SummaryRow>> {
    let dev: Vec<f64> = ts.iter().map(|t| t - theta).collect();
    let plus: Vec<f64> = dev.iter().map(|d| d.max(0.0)).collect();
    let minus: Vec<f64> = dev.iter().map(|d| (-d).max(0.0)).collect();
    let below: Vec<f64> = ts.iter().map(|&t| f64::from(u8::from(t <= theta))).collect();
    let count = ts.len() as u64;
    let nf = f64::from(n);
    let mut rows = vec![
        SummaryRow::from_samples("t_plus", &plus)?,
        SummaryRow::from_samples("t_minus", &minus)?,
        SummaryRow::from_samples("p_below_theta", &below)?,
    ];
    for &p in orders {
        let (norm, se) = lp_norm(&dev, p)?;
        rows.push(SummaryRow::scalar(&format!("norm_l{p}"), count, norm, Some(se)));
        rows.push(SummaryRow::scalar(&format!("n_norm_l{p}"), count, nf * norm, Some(nf * se)));
    }
    let (tm, tm_se) = lp_norm(&minus, 1)?;
    rows.push(SummaryRow::scalar("n_t_minus_l1", count, nf * tm, Some(nf * tm_se)));
    if ts.len() > 1 {
        let (var, se) = variance_with_se(ts)?;
        rows.push(SummaryRow::scalar("n2_var", count, nf * nf * var, Some(nf * nf * se)));
    }
    Ok(rows)
}
