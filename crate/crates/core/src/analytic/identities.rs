//! Numerical checks of the identities satisfied by `m(k, t)`. Each returns the
//! worst discrepancy over its grid so callers can compare against their own
//! tolerance.

use crate::error::Result;
use crate::hypercube::Vertex;

use super::{convolve_occupancy, occupancy_mean, theta};

/// Max over the grid of `|m'(k,t) − (k m(k−1,t) + (n−k) m(k+1,t))|`, with `m'`
/// from a fourth-order central difference.
pub fn master_equation_residual(n: u32, times: &[f64]) -> Result<f64> {
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for &t in times {
        for k in 0..=n {
            let m = |dt: f64| occupancy_mean(k, t + dt, n);
            let fd = (-m(2.0 * h)? + 8.0 * m(h)? - 8.0 * m(-h)? + m(-2.0 * h)?) / (12.0 * h);
            let down = if k > 0 { f64::from(k) * occupancy_mean(k - 1, t, n)? } else { 0.0 };
            let up = if k < n { f64::from(n - k) * occupancy_mean(k + 1, t, n)? } else { 0.0 };
            worst = worst.max((fd - (down + up)).abs());
        }
    }
    Ok(worst)
}

/// Max relative gap between the finite-difference `m''(v,t)` and the explicit
/// double-neighbour sum `Σ_i Σ_j m(v + e_i + e_j, t)`.
pub fn second_derivative_residual(n: u32, times: &[f64]) -> Result<f64> {
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for &t in times {
        for k in 0..=n {
            let v: Vertex = (1 << k) - 1;
            let m = |dt: f64| occupancy_mean(k, t + dt, n);
            let fd = (-m(2.0 * h)? + 16.0 * m(h)? - 30.0 * m(0.0)? + 16.0 * m(-h)? - m(-2.0 * h)?) / (12.0 * h * h);
            let mut sum = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let w = v ^ (1 << i) ^ (1 << j);
                    sum += occupancy_mean(w.count_ones(), t, n)?;
                }
            }
            worst = worst.max((fd - sum).abs() / sum.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Max relative error of `Σ_w m(w,s) m(v+w,t) = m(v,s+t)` over a grid.
pub fn convolution_residual(n: u32, grid: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &s in grid {
        for &t in grid {
            for k in 0..=n {
                let lhs = convolve_occupancy(k, s, t, n)?;
                let rhs = occupancy_mean(k, s + t, n)?;
                worst = worst.max((lhs - rhs).abs() / rhs.abs());
            }
        }
    }
    Ok(worst)
}

/// Largest value of `ln sinh(θ−t) + √2 t` over `points` evenly spaced points
/// of `[0, θ)`; non-positive when the bound holds.
pub fn log_sinh_bound_gap(points: usize) -> f64 {
    let th = theta();
    (0..points)
        .map(|i| th * i as f64 / points as f64)
        .map(|t| (th - t).sinh().ln() + std::f64::consts::SQRT_2 * t)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Standard grid `0.1, 0.2, …, 1.0`.
pub fn tenths() -> Vec<f64> {
    (1..=10).map(|i| f64::from(i) / 10.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold() {
        let grid = tenths();
        for n in 1..=6 {
            assert!(master_equation_residual(n, &grid).unwrap() <= 1e-6);
            assert!(second_derivative_residual(n, &grid).unwrap() <= 1e-6);
        }
        for n in 1..=4 {
            assert!(convolution_residual(n, &grid).unwrap() <= 1e-10);
        }
        // equality at t = 0, so the gap is ~0 from below
        assert!(log_sinh_bound_gap(10_000) <= 4.0 * f64::EPSILON);
    }
}
