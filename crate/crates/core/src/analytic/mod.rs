//! Closed forms and quadratures for the BTP expectation machinnery on Q_n.
//!
//! `m(k, t) = sinh(t)^k cosh(t)^(n−k)` is the expected number of particles at
//! a vertex of Hamming weight `k` at time `t` for a process started at 0̂.
//! The expected contest totals at 1̂ reduce to one-dimensional integrals:
//!
//! ```text
//! A(1̂,u)     = ∫₀ᵘ (u−t) (n + n(n−1) tanh²t) e^{n f(t)} dt,  f = ln(sinh(u−t) cosh t)
//! A(1̂,u)+B   = ½ ∫₀ᵘ (u−t) (n g(t) + n(n−1) h(t)) e^{n F(t)} dt
//! ```
//!
//! with `F = ln(sinh(u−t)cosh²t + cosh(u−t)sinh²t)`, `g = 2e^{u−t}cosh 2t·e^{−F}`
//! and `h = e^{2(u−t)} sinh²2t·e^{−2F}`. Both integrands are evaluated in log
//! space, so n in the tens of thousands is fine.

mod constants;
pub mod identities;
pub mod oracle;

use serde::{Deserialize, Serialize};

pub use constants::{constants, theta, Constants};

use crate::error::{Error, Result};
use crate::hypercube::Vertex;
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticConfig {
    /// Relative quadrature tolerance.
    pub tol: f64,
    pub max_subdivisions: usize,
}

impl Default for AnalyticConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_subdivisions: 2000 }
    }
}

impl AnalyticConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-6) {
            return Err(Error::InvalidArgument(format!("tol {} not in (0, 1e-6]", self.tol)));
        }
        if self.max_subdivisions < 32 {
            return Err(Error::InvalidArgument("max_subdivisions must be at least 32".into()));
        }
        Ok(())
    }
}

/// A quadrature output with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticValue {
    pub value: f64,
    pub est_error: f64,
    pub n: u32,
    pub u: f64,
}

fn check_order(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    Ok(())
}

fn check_time(t: f64, what: &str) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be finite and non-negative, got {t}")))
    }
}

/// `ln m(k, t)`; `−∞` when `k > 0` and `t = 0`.
pub fn log_occupancy_mean(k: u32, t: f64, n: u32) -> f64 {
    debug_assert!(k <= n);
    let mut acc = 0.0;
    if k > 0 {
        acc += f64::from(k) * ln_sinh(t);
    }
    if k < n {
        acc += f64::from(n - k) * ln_cosh(t);
    }
    acc
}

pub(crate) fn ln_sinh(t: f64) -> f64 {
    if t < 20.0 {
        t.sinh().ln()
    } else {
        t - std::f64::consts::LN_2 + (-(-2.0 * t).exp()).ln_1p()
    }
}

pub(crate) fn ln_cosh(t: f64) -> f64 {
    if t < 20.0 {
        t.cosh().ln()
    } else {
        t - std::f64::consts::LN_2 + (-2.0 * t).exp().ln_1p()
    }
}

/// `m(k, t) = sinh(t)^k cosh(t)^(n−k)`.
pub fn occupancy_mean(k: u32, t: f64, n: u32) -> Result<f64> {
    check_order(n)?;
    if k > n {
        return Err(Error::InvalidArgument(format!("weight {k} exceeds dimension {n}")));
    }
    check_time(t, "t")?;
    let v = t.sinh().powi(k as i32) * t.cosh().powi((n - k) as i32);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow("occupancy_mean"))
    }
}

pub const CONVOLUTION_MAX_N: u32 = 20;

/// `Σ_w m(w, s) m(v ⊕ w, t)` for any `v` of weight `k`, summed explicitly over
/// all 2^n vertices `w`. Equals `m(k, s + t)`.
pub fn convolve_occupancy(k: u32, s: f64, t: f64, n: u32) -> Result<f64> {
    if n > CONVOLUTION_MAX_N {
        return Err(Error::TooLarge { what: "explicit convolution", n, limit: CONVOLUTION_MAX_N });
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("weight {k} exceeds dimension {n}")));
    }
    check_time(s, "s")?;
    check_time(t, "t")?;
    let ms = weight_table(s, n)?;
    let mt = weight_table(t, n)?;
    let v: Vertex = (1u32 << k) - 1;
    let total = (0..1u32 << n).map(|w| ms[w.count_ones() as usize] * mt[(v ^ w).count_ones() as usize]).sum();
    Ok(total)
}

/// `m(k, t)` for `k = 0..=n`.
pub(crate) fn weight_table(t: f64, n: u32) -> Result<Vec<f64>> {
    (0..=n).map(|k| occupancy_mean(k, t, n)).collect()
}

/// Breakpoints clustered geometrically at both ends of `[0, u]` on the 1/n
/// scale, where the integrands concentrate for large n.
fn breakpoints(n: u32, u: f64) -> Vec<f64> {
    let step = 1.0 / f64::from(n);
    let mut left = vec![0.0];
    let mut d = step;
    while d < 0.5 * u {
        left.push(d);
        d *= 4.0;
    }
    let mut pts: Vec<f64> = left.to_vec();
    pts.push(0.5 * u);
    pts.extend(left.iter().rev().map(|&x| u - x));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * u);
    pts
}

/// Integrates `exp(log_f)` over `[0, u]`, factoring out the largest sampled
/// exponent so the integrand stays in range.
fn integrate_log<F: Fn(f64) -> f64>(log_f: F, n: u32, u: f64, cfg: &AnalyticConfig) -> Result<(f64, f64)> {
    let breaks = breakpoints(n, u);
    let scale = breaks
        .windows(2)
        .flat_map(|w| [w[0], 0.5 * (w[0] + w[1])])
        .map(&log_f)
        .filter(|x| x.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !scale.is_finite() {
        return Ok((0.0, 0.0));
    }
    let factor = scale.exp();
    if !factor.is_finite() {
        return Err(Error::Overflow("expected contest count"));
    }
    let r = quadrature::integrate(|t| (log_f(t) - scale).exp(), &breaks, 0.25 * cfg.tol, cfg.max_subdivisions)
        .map_err(|e| match e {
            Error::NoConvergence { estimate, error, subdivisions } => {
                Error::NoConvergence { estimate: estimate * factor, error: error * factor, subdivisions }
            }
            other => other,
        })?;
    Ok((r.value * factor, r.error * factor))
}

fn check_inputs(n: u32, u: f64, cfg: &AnalyticConfig) -> Result<()> {
    check_order(n)?;
    cfg.validate()?;
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::InvalidArgument(format!("u must be positive, got {u}")));
    }
    Ok(())
}

/// Expected `Σ a(x)` over particles at 1̂ by time `u`.
pub fn a_expected(n: u32, u: f64, cfg: &AnalyticConfig) -> Result<AnalyticValue> {
    check_inputs(n, u, cfg)?;
    let nf = f64::from(n);
    let log_f = |t: f64| {
        let rest = u - t;
        if rest <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let th = t.tanh();
        rest.ln() + (nf + nf * (nf - 1.0) * th * th).ln() + nf * (ln_sinh(rest) + ln_cosh(t))
    };
    let (value, est_error) = integrate_log(log_f, n, u, cfg)?;
    Ok(AnalyticValue { value, est_error, n, u })
}

/// Expected `Σ (a(x) + b(x))` over particles at 1̂ by time `u`.
pub fn ab_expected(n: u32, u: f64, cfg: &AnalyticConfig) -> Result<AnalyticValue> {
    check_inputs(n, u, cfg)?;
    let nf = f64::from(n);
    let log_f = |t: f64| {
        let z = u - t;
        if z <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let (st, ct) = (t.sinh(), t.cosh());
        let base = z.sinh() * ct * ct + z.cosh() * st * st;
        let g = 2.0 * z.exp() * (2.0 * t).cosh() / base;
        let s2 = z.exp() * (2.0 * t).sinh() / base;
        let h = s2 * s2;
        (0.5 * z).ln() + (nf * g + nf * (nf - 1.0) * h).ln() + nf * base.ln()
    };
    let (value, est_error) = integrate_log(log_f, n, u, cfg)?;
    Ok(AnalyticValue { value, est_error, n, u })
}

/// `B = (A + B) − A`, errors summed.
pub fn b_expected(n: u32, u: f64, cfg: &AnalyticConfig) -> Result<AnalyticValue> {
    let ab = ab_expected(n, u, cfg)?;
    let a = a_expected(n, u, cfg)?;
    let value = ab.value - a.value;
    let est_error = ab.est_error + a.est_error;
    if est_error > cfg.tol * value.abs() {
        return Err(Error::NoConvergence { estimate: value, error: est_error, subdivisions: cfg.max_subdivisions });
    }
    Ok(AnalyticValue { value, est_error, n, u })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SBounds {
    pub lower: f64,
    pub upper: f64,
    /// The A value the lower end was derived from.
    pub a: AnalyticValue,
}

/// `max(0, m(1̂,u) − A(1̂,u)) ≤ S(1̂,u) ≤ m(1̂,u)`.
pub fn s_bounds(n: u32, u: f64, cfg: &AnalyticConfig) -> Result<SBounds> {
    let a = a_expected(n, u, cfg)?;
    let m = occupancy_mean(n, u, n)?;
    Ok(SBounds { lower: (m - a.value).max(0.0), upper: m, a })
}

/// `S_lb · exp(−B / S_lb)`, a lower bound on the probability that an
/// uncontested particle sits at 1̂ by time `u`. Valid because `x ↦ x e^{−B/x}`
/// is increasing for `x > 0`.
pub fn success_lower_bound(n: u32, u: f64, cfg: &AnalyticConfig) -> Result<AnalyticValue> {
    let s = s_bounds(n, u, cfg)?;
    if s.lower <= 0.0 {
        return Err(Error::DegenerateBound { s_lower: s.lower });
    }
    let b = b_expected(n, u, cfg)?;
    let value = bound_from(s.lower, b.value);
    // d/dS = e^{-B/S}(1 + B/S), d/dB = -e^{-B/S}
    let e = (-b.value / s.lower).exp();
    let est_error = e * (1.0 + b.value / s.lower) * s.a.est_error + e * b.est_error;
    Ok(AnalyticValue { value, est_error, n, u })
}

/// `s · e^{−b/s}`.
#[inline]
pub fn bound_from(s: f64, b: f64) -> f64 {
    s * (-b / s).exp()
}

/// `(t / sinh t)^n`: the fraction of expected particles at 1̂ whose ancestral
/// line is oriented.
pub fn oriented_mass_ratio(n: u32, t: f64) -> Result<f64> {
    check_order(n)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    Ok((f64::from(n) * (t / t.sinh()).ln()).exp())
}
