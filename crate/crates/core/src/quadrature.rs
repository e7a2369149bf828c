//! Adaptive Gauss–Kronrod (7/15) quadrature with a caller-supplied initial
//! partition, plus composite Simpson for the brute-force oracles.
//!
//! The refinement order is fully determined by the integrand and the initial
//! breakpoints (largest error first, ties broken by position), and the final
//! sum runs over intervals in left-to-right order, so results are bitwise
//! reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod nodes and weights, quoted at full published precision.
#[allow(clippy::excessive_precision)]
mod table {

    pub(super) const XGK: [f64; 8] = [
        0.991_455_371_120_812_639_206_854_697_526_329,
        0.949_107_912_342_758_524_526_189_684_047_851,
        0.864_864_423_359_769_072_789_712_788_640_926,
        0.741_531_185_599_394_439_863_864_773_280_788,
        0.586_087_235_467_691_130_294_144_845_693_013,
        0.405_845_151_377_397_166_906_606_412_076_961,
        0.207_784_955_007_898_467_600_689_403_773_245,
        0.0,
    ];

    pub(super) const WGK: [f64; 8] = [
        0.022_935_322_010_529_224_963_732_008_058_970,
        0.063_092_092_629_978_553_290_700_663_189_204,
        0.104_790_010_322_250_183_839_876_322_541_518,
        0.140_653_259_715_525_918_745_189_590_510_238,
        0.169_004_726_639_267_902_826_583_426_598_550,
        0.190_350_578_064_785_409_913_256_402_421_014,
        0.204_432_940_075_298_892_414_161_999_234_649,
        0.209_482_141_084_727_828_012_999_174_891_714,
    ];

    // Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
    pub(super) const WG: [f64; 4] = [
        0.129_484_966_168_869_693_270_611_432_679_082,
        0.279_705_391_489_276_667_901_467_771_423_780,
        0.381_830_050_505_118_944_950_369_775_488_975,
        0.417_959_183_673_469_387_755_102_040_816_327,
    ];
}
use table::{WG, WGK, XGK};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One 15-point Kronrod panel with the |K15 - G7| error estimate.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

/// Integrates `f` over `[breaks[0], breaks[last]]` to relative tolerance
/// `rel_tol`, starting from the given (strictly increasing) breakpoints.
///
/// On failure the error carries the best estimate reached.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rel_tol: f64, max_subdivisions: usize) -> Result<QuadResult> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("breakpoints must be strictly increasing".into()));
    }
    let mut heap = BinaryHeap::with_capacity(max_subdivisions + breaks.len());
    let mut done = Vec::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let (value, error) = gk15(&f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Piece { a: w[0], b: w[1], value, error });
    }
    let mut subdivisions = heap.len();

    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::NoConvergence { estimate: total, error: total_err, subdivisions });
        }
        if total_err <= rel_tol * total.abs() {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if worst.error == 0.0 {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if subdivisions >= max_subdivisions || mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            let (estimate, error) = sum_pieces(heap.into_vec(), done);
            return Err(Error::NoConvergence { estimate, error, subdivisions });
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        subdivisions += 1;
        for p in
            [Piece { a: worst.a, b: mid, value: v1, error: e1 }, Piece { a: mid, b: worst.b, value: v2, error: e2 }]
        {
            if p.error == 0.0 {
                done.push(p);
            } else {
                heap.push(p);
            }
        }
    }
    let (value, error) = sum_pieces(heap.into_vec(), done);
    Ok(QuadResult { value, error, subdivisions })
}

fn sum_pieces(mut pieces: Vec<Piece>, done: Vec<Piece>) -> (f64, f64) {
    pieces.extend(done);
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    pieces.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

/// Composite Simpson rule with `panels` (rounded up to even) sub-intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let m = (panels.max(2) + 1) & !1;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let (v, e) = gk15(&|x: f64| x.powi(6) - 3.0 * x, 0.0, 2.0);
        assert_relative_eq!(v, 128.0 / 7.0 - 6.0, max_relative = 1e-14);
        assert!(e < 1e-10);
    }

    #[test]
    fn sharp_exponential_with_breakpoints() {
        let n = 1.0e4;
        let f = |x: f64| (-n * x).exp();
        let breaks = [0.0, 1.0 / n, 4.0 / n, 16.0 / n, 64.0 / n, 1.0];
        let r = integrate(f, &breaks, 1e-10, 500).unwrap();
        assert_relative_eq!(r.value, (1.0 - (-n).exp()) / n, max_relative = 1e-10);
    }

    #[test]
    fn oscillatory_needs_subdivision() {
        let r = integrate(|x: f64| (30.0 * x).sin().powi(2), &[0.0, 3.0], 1e-10, 500).unwrap();
        let exact = 1.5 - (180.0f64).sin() / 120.0;
        assert_relative_eq!(r.value, exact, max_relative = 1e-9);
        assert!(r.subdivisions > 1);
    }

    #[test]
    fn non_convergence_reports_estimate() {
        let err = integrate(|x: f64| 1.0 / x.sqrt(), &[0.0, 1.0], 1e-14, 3).unwrap_err();
        match err {
            Error::NoConvergence { estimate, subdivisions, .. } => {
                assert!(estimate > 1.0);
                assert_eq!(subdivisions, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_breakpoints() {
        assert!(integrate(|x: f64| x, &[1.0, 1.0], 1e-8, 50).is_err());
    }

    #[test]
    fn simpson_cubic_exact() {
        assert_relative_eq!(simpson(|x: f64| x * x * x, 0.0, 2.0, 2), 4.0, max_relative = 1e-14);
        assert_relative_eq!(simpson(f64::exp, 0.0, 1.0, 200), 1f64.exp() - 1.0, max_relative = 1e-9);
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x * 7.0).cos() * (-x).exp();
        let a = integrate(f, &[0.0, 0.3, 5.0], 1e-12, 1000).unwrap();
        let b = integrate(f, &[0.0, 0.3, 5.0], 1e-12, 1000).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
