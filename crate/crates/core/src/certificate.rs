//! Rouché comparison on the finite keyhole contour.
//!
//! The contour is a small left semicircle `|z| = ε`, the segments
//! `x ± iε`, and the arc `|z| = R`. Parameters for `h(z) = αz + β` come from
//! the sufficient inequalities
//!
//! ```text
//! α − β > (nB)^(2/n) R,   αε < β,   (α + 1)ε + (2B)^(1/n) < β,   α ≥ (nB)^(1/n)
//! ```
//!
//! and the certificate itself checks `|f_k(z)| < |h(z)|` at sampled points.
//! Sampling is evidence, not proof.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::branch::{BranchId, Edge, ShiftedProblem, ZERO_FLOOR};
use crate::error::{Error, Result};

pub const DEFAULT_SAMPLES_PER_ARC: usize = 256;
pub const MIN_SAMPLES_PER_ARC: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateParams {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// Outer radius.
    pub radius: f64,
}

/// The four parameter inequalities, each with its two sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    /// `α − β` vs `(nB)^(2/n) R`
    pub outer: (f64, f64),
    /// `αε` vs `β`
    pub h_zero_inside: (f64, f64),
    /// `(α + 1)ε + (2B)^(1/n)` vs `β`
    pub semicircle: (f64, f64),
    /// `α` vs `(nB)^(1/n)`
    pub segments: (f64, f64),
}

impl InequalityCheck {
    pub fn all_hold(&self) -> bool {
        self.outer.0 > self.outer.1
            && self.h_zero_inside.0 < self.h_zero_inside.1
            && self.semicircle.0 < self.semicircle.1
            && self.segments.0 >= self.segments.1
    }
}

impl CertificateParams {
    pub fn inequalities(&self, sp: &ShiftedProblem) -> InequalityCheck {
        let n = sp.degree() as f64;
        let b = sp.bound_b();
        let nb = n * b;
        InequalityCheck {
            outer: (self.alpha - self.beta, nb.powf(2.0 / n) * self.radius),
            h_zero_inside: (self.alpha * self.epsilon, self.beta),
            semicircle: ((self.alpha + 1.0) * self.epsilon + (2.0 * b).powf(1.0 / n), self.beta),
            segments: (self.alpha, nb.powf(1.0 / n)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Arc {
    Semicircle,
    UpperSegment,
    LowerSegment,
    OuterArc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcReport {
    pub arc: Arc,
    /// `max |f_k| / |h|` over the samples, indexed by branch.
    pub max_ratio: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub params: CertificateParams,
    pub inequalities: InequalityCheck,
    pub samples_per_arc: usize,
    pub arcs: Vec<ArcReport>,
    /// Oracle roots of `f` strictly inside the contour.
    pub roots_inside: usize,
    /// The zero `−β/α` of `h` lies inside the contour.
    pub h_zero_inside: bool,
    pub pass: bool,
}

impl CertificateReport {
    pub fn max_ratio(&self) -> f64 {
        self.arcs
            .iter()
            .flat_map(|a| a.max_ratio.iter().copied())
            .fold(0.0, f64::max)
    }
}

/// Picks `R`, then `β`, then `α`, then `ε` so that all four inequalities hold.
pub fn select_parameters(sp: &ShiftedProblem) -> CertificateParams {
    let n = sp.degree() as f64;
    let b = sp.bound_b();
    let nb = n * b;
    let max_root = sp.shifted_roots().iter().map(|r| r.norm()).fold(0.0, f64::max);
    let radius = 1.0 + 2.0 * max_root;
    let small = (2.0 * b).powf(1.0 / n);
    let beta = small + 2.0;
    let mut alpha = nb.powf(1.0 / n).max(beta + nb.powf(2.0 / n) * radius + 1.0);
    if alpha - beta <= nb.powf(2.0 / n) * radius {
        alpha = beta + nb.powf(2.0 / n) * radius + 1.0;
    }
    // keep the small semicircle clear of every root of f and of W
    let nearest = sp
        .shifted_roots()
        .iter()
        .chain(sp.radicand_roots())
        .map(|r| r.norm())
        .fold(f64::INFINITY, f64::min);
    let epsilon = (0.5 * (beta - small) / (alpha + 1.0))
        .min(0.5 * beta / alpha)
        .min(0.5 * nearest);
    CertificateParams {
        alpha,
        beta,
        epsilon,
        radius,
    }
}

/// Chebyshev–Lobatto points on `[0, len]`.
fn chebyshev(len: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |j| 0.5 * len * (1.0 - (PI * j as f64 / (count - 1) as f64).cos()))
}

fn angles(from: f64, to: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |j| from + (to - from) * j as f64 / (count - 1) as f64)
}

/// Samples `|f_k| < |h|` on every arc of the finite contour.
pub fn verify_certificate(
    sp: &ShiftedProblem,
    params: &CertificateParams,
    samples_per_arc: usize,
) -> Result<CertificateReport> {
    if samples_per_arc < MIN_SAMPLES_PER_ARC {
        return Err(Error::InvalidConfig(format!(
            "samples_per_arc must be at least {MIN_SAMPLES_PER_ARC}, got {samples_per_arc}"
        )));
    }
    let n = sp.degree();
    let w = sp.radicand();
    let floor = ZERO_FLOOR * w.scale();
    let eps = params.epsilon;
    let radius = params.radius;
    let h = |z: Complex64| params.alpha * z + params.beta;

    // (z, continued arg W(z)) for each arc
    let mut arcs: Vec<(Arc, Vec<(Complex64, f64)>)> = Vec::with_capacity(4);

    let hop = |x: f64, edge: Edge| -> Result<(Complex64, f64)> {
        let z = Complex64::new(x, if edge == Edge::Upper { eps } else { -eps });
        let wx = w.eval(Complex64::new(x, 0.0));
        let wz = w.eval(z);
        if wz.norm() < floor {
            return Err(Error::ContourTouchesZero { at: z });
        }
        Ok((z, sp.edge_phi(x, edge) + (wz * wx.conj()).arg()))
    };

    let walk = |start: (Complex64, f64), points: Vec<Complex64>| -> Result<Vec<(Complex64, f64)>> {
        let mut out = Vec::with_capacity(points.len());
        let (mut prev, mut phi) = start;
        for z in points {
            if w.eval(z).norm() < floor {
                return Err(Error::ContourTouchesZero { at: z });
            }
            phi = crate::branch::continued_arg_with_floor(w, &[prev, z], phi, floor)
                .map_err(|_| Error::ContourTouchesZero { at: z })?;
            out.push((z, phi));
            prev = z;
        }
        Ok(out)
    };

    let top = hop(0.0, Edge::Upper)?;
    let semicircle: Vec<Complex64> = angles(FRAC_PI_2, 3.0 * FRAC_PI_2, samples_per_arc)
        .map(|t| Complex64::from_polar(eps, t))
        .collect();
    arcs.push((Arc::Semicircle, walk(top, semicircle)?));

    let reach = (radius * radius - eps * eps).sqrt();
    let upper: Vec<(Complex64, f64)> = chebyshev(reach, samples_per_arc)
        .map(|x| hop(x, Edge::Upper))
        .collect::<Result<_>>()?;
    let lower: Vec<(Complex64, f64)> = chebyshev(reach, samples_per_arc)
        .map(|x| hop(x, Edge::Lower))
        .collect::<Result<_>>()?;
    let corner = *upper.last().expect("at least 16 samples");
    arcs.push((Arc::UpperSegment, upper));
    arcs.push((Arc::LowerSegment, lower));

    let theta0 = (eps / radius).asin();
    let outer: Vec<Complex64> = angles(theta0, TAU - theta0, samples_per_arc)
        .map(|t| Complex64::from_polar(radius, t))
        .collect();
    arcs.push((Arc::OuterArc, walk(corner, outer)?));

    let mut reports = Vec::with_capacity(4);
    for (arc, points) in &arcs {
        let mut max_ratio = vec![0.0f64; n];
        for &(z, phi) in points {
            let hz = h(z).norm();
            if hz <= f64::MIN_POSITIVE {
                return Err(Error::ContourTouchesZero { at: z });
            }
            for k in BranchId::all(n) {
                let ratio = sp.branch_value(k, z, phi).norm() / hz;
                max_ratio[k.index()] = max_ratio[k.index()].max(ratio);
            }
        }
        reports.push(ArcReport { arc: *arc, max_ratio });
    }

    let roots_inside = sp
        .shifted_roots()
        .iter()
        .filter(|r| r.norm() < radius && r.norm() > eps && !(r.re >= 0.0 && r.im.abs() <= eps))
        .count();
    let h_zero = params.beta / params.alpha;
    let h_zero_inside = eps < h_zero && h_zero < radius;
    let pass = h_zero_inside && reports.iter().all(|a| a.max_ratio.iter().all(|&r| r < 1.0));
    Ok(CertificateReport {
        params: *params,
        inequalities: params.inequalities(sp),
        samples_per_arc,
        arcs: reports,
        roots_inside,
        h_zero_inside,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn quadratic_problem() -> ShiftedProblem {
        ShiftedProblem::new(&Polynomial::from_real(&[1.0, 0.0, -1.0]).unwrap(), 3.0).unwrap()
    }

    #[test]
    fn quadratic_parameters() {
        let sp = quadratic_problem();
        let p = select_parameters(&sp);
        assert!((p.radius - 9.0).abs() < 1e-12);
        assert!((p.beta - 6.0).abs() < 1e-12);
        assert!((p.alpha - 151.0).abs() < 1e-9);
        assert!(p.epsilon > 0.0 && p.epsilon <= 1.0 / 152.0 + 1e-15);
        assert!(p.inequalities(&sp).all_hold());
    }

    #[test]
    fn linear_parameters() {
        let sp = ShiftedProblem::new(&Polynomial::from_real(&[1.0, 2.0]).unwrap(), 4.0).unwrap();
        let p = select_parameters(&sp);
        assert!(p.alpha >= 6.0);
        assert!(p.alpha - p.beta > 36.0 * p.radius);
        assert!(p.alpha * p.epsilon < p.beta);
    }

    #[test]
    fn quadratic_certificate_passes() {
        let sp = quadratic_problem();
        let params = select_parameters(&sp);
        let report = verify_certificate(&sp, &params, 256).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.arcs.len(), 4);
        assert_eq!(report.roots_inside, 2);
        let outer = report.arcs.iter().find(|a| a.arc == Arc::OuterArc).unwrap();
        // |f_k| <= R + sqrt(6R + 8) against |h| >= αR - β
        let bound = (9.0 + (6.0f64 * 9.0 + 8.0).sqrt()) / (151.0 * 9.0 - 6.0);
        assert!(outer.max_ratio.iter().all(|&r| r <= bound + 1e-9));
    }

    #[test]
    fn small_beta_fails_on_semicircle() {
        let sp = quadratic_problem();
        let mut params = select_parameters(&sp);
        params.beta = 0.5 * (2.0 * sp.bound_b()).sqrt();
        params.epsilon = params.epsilon.min(0.1 * params.beta / params.alpha);
        let report = verify_certificate(&sp, &params, 256).unwrap();
        assert!(!report.pass);
        let semi = report.arcs.iter().find(|a| a.arc == Arc::Semicircle).unwrap();
        assert!(semi.max_ratio.iter().any(|&r| r >= 1.0));
        assert!(!params.inequalities(&sp).all_hold());
    }

    #[test]
    fn rejects_sparse_sampling() {
        let sp = quadratic_problem();
        let params = select_parameters(&sp);
        assert!(matches!(
            verify_certificate(&sp, &params, 8),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn doubling_samples_keeps_pass() {
        let sp = quadratic_problem();
        let params = select_parameters(&sp);
        for s in [16, 32, 64, 128, 256, 512] {
            assert!(verify_certificate(&sp, &params, s).unwrap().pass);
        }
    }
}
