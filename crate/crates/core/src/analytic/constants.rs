use std::f64::consts::SQRT_2;

use serde::Serialize;

/// Limiting constants, all in units of the mean edge passage time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    /// ln(1 + √2), the unique root of sinh(θ) = 1.
    pub theta: f64,
    /// Large-n limit of A(1̂, θ): θ/√2.
    pub a_limit: f64,
    /// Large-n limit of B(1̂, θ): θ + 1/(3 − 2√2).
    pub b_limit: f64,
    /// Large-n limit of A + B: θe^θ/√2 + 1/(3 − 2√2).
    pub ab_limit: f64,
    /// Large-n lower limit of S(1̂, θ): 1 − θ/√2.
    pub s_lower_limit: f64,
    /// s·e^(−b/s) at the limits above.
    pub p_lower_limit: f64,
    /// Asymptotic geodesic length per dimension: √2·θ.
    pub geodesic_slope: f64,
}

#[inline]
pub fn theta() -> f64 {
    1f64.asinh()
}

pub fn constants() -> Constants {
    let theta = theta();
    let tail = 1.0 / (3.0 - 2.0 * SQRT_2);
    let a_limit = theta / SQRT_2;
    let ab_limit = theta * theta.exp() / SQRT_2 + tail;
    let s_lower_limit = 1.0 - a_limit;
    let b_limit = theta + tail;
    Constants {
        theta,
        a_limit,
        b_limit,
        ab_limit,
        s_lower_limit,
        p_lower_limit: s_lower_limit * (-b_limit / s_lower_limit).exp(),
        geodesic_slope: SQRT_2 * theta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn theta_is_asinh_one() {
        let c = constants();
        assert!((c.theta.sinh() - 1.0).abs() <= 1e-15);
        assert_relative_eq!(c.theta, (1.0 + SQRT_2).ln(), max_relative = 1e-15);
        assert!((c.theta - 0.881_373_587_0).abs() < 1e-10);
    }

    #[test]
    fn limits_are_consistent() {
        let c = constants();
        // e^θ = 1 + √2, so θe^θ/√2 − θ/√2 = θ exactly.
        assert!((c.b_limit - (c.ab_limit - c.a_limit)).abs() <= 4.0 * f64::EPSILON * c.ab_limit);
        assert!((6.709..6.710).contains(&c.b_limit));
        assert!((0.376..0.377).contains(&c.s_lower_limit));
        assert!((1.2464..1.2465).contains(&c.geodesic_slope));
    }
}
