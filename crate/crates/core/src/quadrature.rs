//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands, plus the
//! compactifying map used for integrals over `[0, ∞)`.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Subdivision cap for [`integrate_adaptive`].
pub const MAX_INTERVALS: usize = 20_000;

/// Default absolute tolerance on the mapped integrand.
pub const DEFAULT_TOL: f64 = 1e-10;

// 15-point Kronrod abscissae (nonnegative half) and weights; the odd entries
// are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureEstimate {
    pub value: Complex64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub intervals: usize,
    /// `abs_error <= tol` was reached before the subdivision cap.
    pub met_tolerance: bool,
    pub tol: f64,
}

impl QuadratureEstimate {
    /// `Err(ToleranceNotMet)` when the requested tolerance was not reached.
    pub fn check(&self) -> Result<&Self> {
        if self.met_tolerance {
            Ok(self)
        } else {
            Err(Error::ToleranceNotMet {
                tol: self.tol,
                abs_error: self.abs_error,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One G7/K15 pass. The error is `|K15 - G7|`, floored at the roundoff
/// level of the absolute integral.
fn kronrod15<F: Fn(f64) -> Complex64>(g: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        kronrod += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let raw = ((kronrod - gauss) * half).norm();
    let floor = 50.0 * f64::EPSILON * resabs * half.abs();
    let error = if raw.is_finite() { raw.max(floor) } else { f64::INFINITY };
    Segment { a, b, value, error }
}

/// `t ↦ g(t / (1 - t)) / (1 - t)^2`, carrying `[0, ∞)` onto `[0, 1)`.
pub fn map_to_unit<F: Fn(f64) -> Complex64>(g: F) -> impl Fn(f64) -> Complex64 {
    move |t: f64| {
        let s = 1.0 - t;
        g(t / s) / (s * s)
    }
}

/// Globally adaptive G7/K15 integration of `g` over `[a, b]`.
///
/// The worst interval is bisected until the summed error estimate is at most
/// `tol` or [`MAX_INTERVALS`] is reached. Endpoints are never evaluated.
pub fn integrate_adaptive<F: Fn(f64) -> Complex64>(g: F, a: f64, b: f64, tol: f64) -> QuadratureEstimate {
    integrate_adaptive_capped(g, a, b, tol, MAX_INTERVALS)
}

pub fn integrate_adaptive_capped<F: Fn(f64) -> Complex64>(
    g: F,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
) -> QuadratureEstimate {
    let first = kronrod15(&g, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    // intervals too narrow to split further keep their estimate here
    let mut frozen: Vec<Segment> = Vec::new();
    let mut total_error = first.error;
    heap.push(first);

    while total_error > tol && heap.len() + frozen.len() < max_intervals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            frozen.push(worst);
            continue;
        }
        let left = kronrod15(&g, worst.a, mid);
        let right = kronrod15(&g, mid, worst.b);
        evaluations += 30;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // re-sum to shed accumulated cancellation in the running total
    let (value, abs_error, intervals) = heap
        .iter()
        .chain(frozen.iter())
        .fold((Complex64::new(0.0, 0.0), 0.0, 0), |(v, e, n), s| {
            (v + s.value, e + s.error, n + 1)
        });
    QuadratureEstimate {
        value,
        abs_error,
        evaluations,
        intervals,
        met_tolerance: abs_error <= tol,
        tol,
    }
}

/// `∫_0^∞ g(x) dx` through [`map_to_unit`] and [`integrate_adaptive`].
pub fn improper_integral<F: Fn(f64) -> Complex64>(g: F, tol: f64) -> QuadratureEstimate {
    integrate_adaptive(map_to_unit(g), 0.0, 1.0, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, LN_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mapped_integrand_values() {
        let g = map_to_unit(|x| c(1.0 / (x * x + 1.0), 0.0));
        assert!((g(0.5) - c(2.0, 0.0)).norm() < 1e-15);
        let h = |x: f64| c(x.cos(), x.sin());
        assert_eq!(map_to_unit(h)(0.0), h(0.0));
    }

    #[test]
    fn constant_on_unit_interval() {
        let est = integrate_adaptive(|_| c(1.0, 0.0), 0.0, 1.0, 1e-13);
        assert!((est.value - c(1.0, 0.0)).norm() <= 1e-14);
        assert!(est.met_tolerance);
        assert_eq!(est.evaluations, 15);
    }

    #[test]
    fn improper_examples() {
        let tol = 1e-10;
        let est = improper_integral(|x| c(1.0 / (x * x + 1.0), 0.0), tol);
        assert!(est.met_tolerance);
        assert!((est.value - c(FRAC_PI_2, 0.0)).norm() <= tol);

        let est = improper_integral(|x| c(1.0 / ((x + 1.0) * (x + 1.0)), 0.0), tol);
        assert!((est.value - c(1.0, 0.0)).norm() <= tol);

        let est = improper_integral(|x| c(1.0 / ((x + 1.0) * (x + 2.0)), 0.0), tol);
        assert!((est.value - c(LN_2, 0.0)).norm() <= tol);

        let est = improper_integral(|x| c(0.0, 1.0 / (x * x + 1.0)), tol);
        assert!((est.value - c(0.0, FRAC_PI_2)).norm() <= tol);
    }

    #[test]
    fn mapped_reciprocal_square_integrates_to_one() {
        let est = integrate_adaptive(map_to_unit(|x| c(1.0 / ((x + 1.0) * (x + 1.0)), 0.0)), 0.0, 1.0, 1e-12);
        assert!((est.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cap_reports_tolerance_not_met() {
        let est = integrate_adaptive_capped(|x| c(x.abs().sqrt().recip(), 0.0), 0.0, 1.0, 1e-14, 8);
        assert!(!est.met_tolerance);
        assert!(est.intervals <= 8);
        assert!(matches!(est.check(), Err(Error::ToleranceNotMet { .. })));
    }

    #[test]
    fn endpoint_is_never_evaluated() {
        let est = improper_integral(
            |x| {
                assert!(x.is_finite());
                c((-x).exp(), 0.0)
            },
            1e-12,
        );
        assert!((est.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn error_estimates_are_honest_on_analytic_set() {
        type Case = (fn(f64) -> Complex64, Complex64);
        let cases: [Case; 3] = [
            (|x| c(1.0 / (x * x + 1.0), 0.0), c(FRAC_PI_2, 0.0)),
            (|x| c(1.0 / ((x + 1.0) * (x + 2.0)), 0.0), c(LN_2, 0.0)),
            (|x| c(0.0, 1.0 / (x * x + 1.0)), c(0.0, FRAC_PI_2)),
        ];
        for (g, exact) in cases {
            for tol in [1e-6, 1e-8, 1e-10, 1e-12] {
                let est = improper_integral(g, tol);
                assert!((est.value - exact).norm() <= 10.0 * est.abs_error, "{est:?}");
            }
        }
    }

    #[test]
    fn tighter_tolerance_never_uses_fewer_evaluations() {
        let g = |x: f64| c(1.0 / ((x + 1.0) * (x + 2.0)), 1.0 / (x * x + 1.0));
        let mut prev = 0;
        for k in 0..20 {
            let tol = 1e-4 / 2f64.powi(k);
            let est = improper_integral(g, tol);
            assert!(est.evaluations >= prev);
            prev = est.evaluations;
        }
    }
}
