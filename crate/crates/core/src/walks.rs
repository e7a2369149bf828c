//! Rate-n simple random walk on Q_n over `[0, t_end]` conditioned to end at 1̂.
//!
//! Coordinates flip independently as rate-1 Poisson processes, so conditioning
//! on the endpoint makes each flip count an odd-conditioned Poisson variate and,
//! given the count, the flip times i.i.d. uniform.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypercube::Vertex;

const TAIL_CUTOFF: f64 = 1e-15;
const INVERSION_MAX_RATE: f64 = 30.0;

/// `P(k) = rate^k / (k! sinh rate)` for odd `k`.
pub fn odd_poisson_pmf(rate: f64, k: u64) -> f64 {
    if k % 2 == 0 {
        return 0.0;
    }
    let ln = k as f64 * rate.ln() - ln_factorial(k) - rate.sinh().ln();
    ln.exp()
}

fn ln_factorial(k: u64) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Poisson(rate) conditioned to be odd.
pub fn sample_odd_poisson<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Result<u64> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidArgument(format!("rate must be positive, got {rate}")));
    }
    if rate > INVERSION_MAX_RATE {
        let pois = Poisson::new(rate).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        loop {
            let k = pois.sample(rng) as u64;
            if k % 2 == 1 {
                return Ok(k);
            }
        }
    }
    let u: f64 = rng.random();
    let r2 = rate * rate;
    let mut k = 1u64;
    let mut term = rate / rate.sinh();
    let mut cum = term;
    while cum < u && 1.0 - cum > TAIL_CUTOFF {
        term *= r2 / ((k + 1) * (k + 2)) as f64;
        k += 2;
        cum += term;
    }
    Ok(k)
}

/// One endpoint-conditioned walk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkPath {
    pub n: u32,
    pub t_end: f64,
    /// `(time, coordinate)`, strictly increasing in time.
    pub events: Vec<(f64, u32)>,
    /// Flip count per coordinate.
    pub counts: Vec<u64>,
}

impl WalkPath {
    /// True when every coordinate flipped an odd number of times.
    pub fn ends_at_one(&self) -> bool {
        self.counts.iter().all(|c| c % 2 == 1)
    }

    /// Endpoint as a bitmask, for `n ≤ 32`.
    pub fn endpoint(&self) -> Option<Vertex> {
        (self.n <= 32).then(|| self.events.iter().fold(0, |v, &(_, i)| v ^ (1 << i)))
    }

    /// Vertex sequence starting at 0̂, for `n ≤ 32`.
    pub fn vertices(&self) -> Option<Vec<Vertex>> {
        if self.n > 32 {
            return None;
        }
        let mut v = 0;
        let mut out = vec![0];
        for &(_, i) in &self.events {
            v ^= 1 << i;
            out.push(v);
        }
        Some(out)
    }
}

pub fn sample_conditioned_walk<R: Rng + ?Sized>(n: u32, t_end: f64, rng: &mut R) -> Result<WalkPath> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    let mut counts = Vec::with_capacity(n as usize);
    let mut events = Vec::new();
    for i in 0..n {
        let k = sample_odd_poisson(t_end, rng)?;
        counts.push(k);
        for _ in 0..k {
            events.push((uniform_time(t_end, rng), i));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    while let Some(j) = events.windows(2).position(|w| w[0].0 == w[1].0) {
        events[j + 1].0 = uniform_time(t_end, rng);
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }
    Ok(WalkPath { n, t_end, events, counts })
}

fn uniform_time<R: Rng + ?Sized>(t_end: f64, rng: &mut R) -> f64 {
    loop {
        let t = t_end * rng.random::<f64>();
        if t > 0.0 {
            return t;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkStats {
    pub length: u64,
    pub counts: Vec<u64>,
    pub backsteps: u64,
    pub length_over_n: f64,
    pub oriented: bool,
}

pub fn walk_stats(p: &WalkPath) -> WalkStats {
    let length = p.events.len() as u64;
    let n = u64::from(p.n);
    WalkStats {
        length,
        counts: p.counts.clone(),
        backsteps: length.saturating_sub(n) / 2,
        length_over_n: length as f64 / n as f64,
        oriented: p.counts.iter().all(|&c| c == 1),
    }
}
