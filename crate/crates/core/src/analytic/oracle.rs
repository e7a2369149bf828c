//! Brute-force evaluation of the unreduced double-sum, double-integral forms
//! of the expected contest totals at 1̂. Every vertex sum is carried out
//! explicitly and the simplex `s + t ≤ u` is integrated by nested composite
//! Simpson, so this shares nothing with the reduced quadrature except `m`.

use crate::error::{Error, Result};
use crate::hypercube::Vertex;
use crate::quadrature::simpson;

use super::weight_table;

pub const ORACLE_MAX_N: u32 = 3;
pub const DEFAULT_PANELS: usize = 160;

fn check(n: u32, u: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if n > ORACLE_MAX_N {
        return Err(Error::TooLarge { what: "brute-force contest oracle", n, limit: ORACLE_MAX_N });
    }
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::InvalidArgument(format!("u must be positive, got {u}")));
    }
    Ok(())
}

/// `∫∫_{s+t≤u} g(s, t) ds dt`, outer over `t`, inner over `s ∈ [0, u−t]`.
fn simplex<G: Fn(f64, f64) -> f64>(g: G, u: f64, panels: usize) -> f64 {
    simpson(|t| simpson(|s| g(s, t), 0.0, u - t, panels), 0.0, u, panels)
}

/// `Σ_v Σ_i Σ_j ∫∫ m(v,s) m(1̂−v, u−s−t) m(e_i+e_j, t)`.
pub fn a_brute_force(n: u32, u: f64, panels: usize) -> Result<f64> {
    check(n, u)?;
    let size: Vertex = 1 << n;
    let one = size - 1;
    let g = |s: f64, t: f64| {
        let ms = weight_table(s, n).expect("bounded");
        let mr = weight_table((u - s - t).max(0.0), n).expect("bounded");
        let mt = weight_table(t, n).expect("bounded");
        let pair: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (1u32 << i) ^ (1u32 << j)))
            .map(|d| mt[d.count_ones() as usize])
            .sum();
        let outer: f64 = (0..size).map(|v| ms[v.count_ones() as usize] * mr[(one ^ v).count_ones() as usize]).sum();
        outer * pair
    };
    Ok(simplex(g, u, panels))
}

/// `Σ_v Σ_w Σ_i Σ_j ∫∫ m(v,s) m(1̂−w, u−s−t) ·
///   (m(w−v,t) m(w−v−e_i+e_j,t) + m(w−v−e_i,t) m(w−v+e_j,t))`.
pub fn ab_brute_force(n: u32, u: f64, panels: usize) -> Result<f64> {
    check(n, u)?;
    let size: Vertex = 1 << n;
    let one = size - 1;
    let g = |s: f64, t: f64| {
        let ms = weight_table(s, n).expect("bounded");
        let mr = weight_table((u - s - t).max(0.0), n).expect("bounded");
        let mt = weight_table(t, n).expect("bounded");
        let m = |x: Vertex| mt[x.count_ones() as usize];
        let mut total = 0.0;
        for v in 0..size {
            for w in 0..size {
                let delta = w ^ v;
                let mut inner = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let (ei, ej) = (1u32 << i, 1u32 << j);
                        inner += m(delta) * m(delta ^ ei ^ ej) + m(delta ^ ei) * m(delta ^ ej);
                    }
                }
                total += ms[v.count_ones() as usize] * mr[(one ^ w).count_ones() as usize] * inner;
            }
        }
        total
    };
    Ok(simplex(g, u, panels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{a_expected, ab_expected, theta, AnalyticConfig};
    use approx::assert_relative_eq;

    #[test]
    fn n1_closed_form() {
        // n = 1: Σ_v m(v,s) m(1̂−v,u−s−t) = sinh(u−t), pair sum = cosh t, so
        // A = ∫₀ᵘ (u−t) sinh(u−t) cosh t dt = (u sinh u cosh u ... ) evaluated by
        // parts; compare against a fine Simpson of the 1-D form instead.
        let u = 0.9;
        let one_d = simpson(|t| (u - t) * (u - t).sinh() * t.cosh(), 0.0, u, 4000);
        let bf = a_brute_force(1, u, DEFAULT_PANELS).unwrap();
        assert_relative_eq!(bf, one_d, max_relative = 1e-8);
    }

    #[test]
    fn reduced_forms_agree_with_brute_force() {
        let cfg = AnalyticConfig::default();
        for n in 1..=3 {
            for u in [theta(), 0.5, 1.3] {
                let a = a_expected(n, u, &cfg).unwrap().value;
                let a_bf = a_brute_force(n, u, DEFAULT_PANELS).unwrap();
                assert_relative_eq!(a, a_bf, max_relative = 1e-6);
                let ab = ab_expected(n, u, &cfg).unwrap().value;
                let ab_bf = ab_brute_force(n, u, DEFAULT_PANELS).unwrap();
                assert_relative_eq!(ab, ab_bf, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn refuses_large_n() {
        assert!(a_brute_force(4, 1.0, 8).is_err());
    }
}
