//! Single-valued branches of `W(z)^(1/n)` on the plane slit along `[0, ∞)`.
//!
//! For a shifted monic `f(z) = z^n + b_1 z^(n-1) + ... + b_n`, the radicand is
//! `W(z) = -(b_1 z^(n-1) + ... + b_n)` and the branch functions are
//! `f_k(z) = z - |W(z)|^(1/n) exp(i (φ(z) + 2πk) / n)`, where `φ` is a
//! continuous argument of `W`. On the cut, `φ` is tracked along the upper
//! edge and the lower edge differs by `2πZ`, `Z` being the number of radicand
//! zeros enclosed by the keyhole.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle;
use crate::poly::{bound_m, taylor_shift, Polynomial};

/// Initial step in path parameter for argument continuation.
pub const PATH_STEP: f64 = 0.05;
/// A continuation step is bisected when the argument moves by this much or more.
pub const MAX_ARG_STEP: f64 = FRAC_PI_2;
/// `|W|` below `ZERO_FLOOR * scale(W)` counts as hitting a zero.
pub const ZERO_FLOOR: f64 = 1e-13;
/// Relative distance of radicand zeros to the cut below which a shift is rejected.
pub const RADICAND_MARGIN: f64 = 1e-6;

const MAX_BISECTIONS: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Upper,
    Lower,
}

/// Index `k` of the `n`-th root determination, `0 <= k < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BranchId(usize);

impl BranchId {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k < n {
            Ok(Self(k))
        } else {
            Err(Error::InvalidConfig(format!("branch index {k} out of range 0..{n}")))
        }
    }

    pub fn index(self) -> usize {
        self.0
    }

    /// All branches of an `n`-th root.
    pub fn all(n: usize) -> impl Iterator<Item = BranchId> {
        (0..n).map(BranchId)
    }
}

/// Continuous argument of `W` sampled along one edge of the cut.
///
/// Samples are stored by ray parameter `u ∈ [0, 2]` with `x = u` on `[0, 1]`
/// and `x = 1 / (2 - u)` beyond, so the point at infinity is the last sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgTrack {
    pub edge: Edge,
    /// `(x, phi)` pairs, `x` ascending; the final `x` is `+∞`.
    pub samples: Vec<(f64, f64)>,
    pub base_phi: f64,
}

/// Everything the root formula needs about one shift `A`.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftedProblem {
    #[serde(skip)]
    original: Polynomial,
    shift: f64,
    #[serde(skip)]
    shifted: Polynomial,
    #[serde(skip)]
    radicand: Polynomial,
    /// radicand with coefficients reversed, `z^(n-1) W(1/z)`
    #[serde(skip)]
    reversed: Polynomial,
    branch_shift: usize,
    bound_b: f64,
    bound_m: f64,
    #[serde(skip)]
    shifted_roots: Vec<Complex64>,
    #[serde(skip)]
    radicand_roots: Vec<Complex64>,
    upper: ArgTrack,
    lower: ArgTrack,
    phi_at_i: f64,
    phi_at_minus_i: f64,
}

/// `W(z) = -(b_1 z^(n-1) + ... + b_n)` for monic `f` of degree `n`.
pub fn radicand(f: &Polynomial) -> Polynomial {
    let f = f.monic();
    if f.degree() == 0 {
        return Polynomial::zero();
    }
    Polynomial::new(f.coeffs()[1..].iter().map(|c| -c).collect()).expect("nonempty")
}

/// Distance from `z` to the ray `[0, ∞)`.
fn distance_to_cut(z: Complex64) -> f64 {
    if z.re >= 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

/// Number of radicand zeros off the cut. Fails when a zero sits within
/// `margin * (1 + |zero|)` of `[0, ∞)`.
pub fn branch_shift_count(radicand_roots: &[Complex64], margin: f64) -> Result<usize> {
    for &r in radicand_roots {
        let allowed = margin * (1.0 + r.norm());
        if distance_to_cut(r) < allowed {
            return Err(Error::RadicandOnAxis {
                zero: r,
                margin: allowed,
            });
        }
    }
    Ok(radicand_roots.len())
}

/// Principal value of `arg(b / a)`, in `(-π, π]`.
fn arg_step(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}

/// Argument change of `W` along the straight segment `p → q`, bisecting
/// until each piece moves less than [`MAX_ARG_STEP`] and halves agree with
/// the whole.
fn segment_arg_change(
    w: &Polynomial,
    p: Complex64,
    wp: Complex64,
    q: Complex64,
    wq: Complex64,
    floor: f64,
    depth: u32,
) -> Result<f64> {
    let whole = arg_step(wp, wq);
    let m = 0.5 * (p + q);
    let wm = w.eval(m);
    if wm.norm() < floor {
        return Err(Error::PathThroughZero {
            at: m,
            modulus: wm.norm(),
        });
    }
    let halves = arg_step(wp, wm) + arg_step(wm, wq);
    if whole.abs() < MAX_ARG_STEP && (halves - whole).abs() < 1e-9 {
        return Ok(whole);
    }
    if depth >= MAX_BISECTIONS {
        return Err(Error::PathThroughZero {
            at: m,
            modulus: wm.norm(),
        });
    }
    Ok(segment_arg_change(w, p, wp, m, wm, floor, depth + 1)? + segment_arg_change(w, m, wm, q, wq, floor, depth + 1)?)
}

/// Continuous argument of `W` at the end of `path`, starting from `phi0` at
/// `path[0]`. Consecutive path points are joined by straight segments.
pub fn continued_arg(w: &Polynomial, path: &[Complex64], phi0: f64) -> Result<f64> {
    continued_arg_with_floor(w, path, phi0, ZERO_FLOOR * w.scale())
}

pub fn continued_arg_with_floor(w: &Polynomial, path: &[Complex64], phi0: f64, floor: f64) -> Result<f64> {
    let Some(&start) = path.first() else {
        return Ok(phi0);
    };
    let mut wp = w.eval(start);
    if wp.norm() < floor {
        return Err(Error::PathThroughZero {
            at: start,
            modulus: wp.norm(),
        });
    }
    let mut phi = phi0;
    for pair in path.windows(2) {
        let wq = w.eval(pair[1]);
        if wq.norm() < floor {
            return Err(Error::PathThroughZero {
                at: pair[1],
                modulus: wq.norm(),
            });
        }
        phi += segment_arg_change(w, pair[0], wp, pair[1], wq, floor, 0)?;
        wp = wq;
    }
    Ok(phi)
}

/// Points `e^{iθ}` for `θ` from `from` to `to` in steps of at most [`PATH_STEP`].
pub fn arc_path(center: Complex64, radius: f64, from: f64, to: f64) -> Vec<Complex64> {
    let steps = (((to - from).abs() / PATH_STEP).ceil() as usize).max(1);
    (0..=steps)
        .map(|j| center + Complex64::from_polar(radius, from + (to - from) * j as f64 / steps as f64))
        .collect()
}

/// `x` for ray parameter `u`.
fn ray_x(u: f64) -> f64 {
    if u <= 1.0 {
        u
    } else if u < 2.0 {
        1.0 / (2.0 - u)
    } else {
        f64::INFINITY
    }
}

fn ray_u(x: f64) -> f64 {
    if x <= 1.0 {
        x
    } else if x.is_finite() {
        2.0 - 1.0 / x
    } else {
        2.0
    }
}

/// The `n`-th root determination `|W|^(1/n) exp(i (φ + 2πk) / n)`.
fn radical(modulus: f64, phi: f64, k: usize, n: usize) -> Complex64 {
    let nf = n as f64;
    Complex64::from_polar(modulus.powf(1.0 / nf), (phi + TAU * k as f64) / nf)
}

impl ShiftedProblem {
    /// Validates the shift and builds the argument tracks.
    ///
    /// `original` must be monic, square-free and nonzero at the origin.
    pub fn new(original: &Polynomial, shift: f64) -> Result<Self> {
        Self::with_margin(original, shift, RADICAND_MARGIN)
    }

    pub fn with_margin(original: &Polynomial, shift: f64, margin: f64) -> Result<Self> {
        let original = original.monic();
        let n = original.degree();
        if n == 0 {
            return Err(Error::ConstantPolynomial);
        }
        let m = bound_m(&original);
        if !shift.is_finite() || shift <= m {
            return Err(Error::InvalidConfig(format!("shift A = {shift} must exceed M = {m}")));
        }
        let shifted = taylor_shift(&original, shift);
        let b_n = shifted.coeffs()[n];
        if b_n.norm() == 0.0 {
            return Err(Error::InvalidConfig("shifted constant term vanishes".into()));
        }

        let dk = oracle::oracle_roots(&original);
        let shifted_roots: Vec<Complex64> = dk.roots.iter().map(|r| r - shift).collect();
        if let Some(bad) = shifted_roots.iter().find(|r| r.re.is_nan() || r.re >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "shifted root {bad} not in the open left half-plane"
            )));
        }

        let w = radicand(&shifted);
        let radicand_roots = oracle::oracle_roots(&w).roots;
        let branch_shift = branch_shift_count(&radicand_roots, margin)?;
        let reversed = Polynomial::new(w.coeffs().iter().rev().copied().collect()).expect("nonempty");
        let bound_b = shifted.coeffs()[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);

        let mut sp = Self {
            original,
            shift,
            shifted,
            radicand: w,
            reversed,
            branch_shift,
            bound_b,
            bound_m: m,
            shifted_roots,
            radicand_roots,
            upper: ArgTrack {
                edge: Edge::Upper,
                samples: vec![],
                base_phi: 0.0,
            },
            lower: ArgTrack {
                edge: Edge::Lower,
                samples: vec![],
                base_phi: 0.0,
            },
            phi_at_i: 0.0,
            phi_at_minus_i: 0.0,
        };
        sp.build_tracks()?;

        let floor = ZERO_FLOOR * sp.radicand.eval_abs(1.0);
        let phi_one_up = sp.edge_phi(1.0, Edge::Upper);
        let phi_one_low = sp.edge_phi(1.0, Edge::Lower);
        sp.phi_at_i = continued_arg_with_floor(
            &sp.radicand,
            &arc_path(0.0.into(), 1.0, 0.0, FRAC_PI_2),
            phi_one_up,
            floor,
        )?;
        sp.phi_at_minus_i = continued_arg_with_floor(
            &sp.radicand,
            &arc_path(0.0.into(), 1.0, 0.0, -FRAC_PI_2),
            phi_one_low,
            floor,
        )?;
        Ok(sp)
    }

    /// A value with the same argument as `W(x(u))`, finite for `u = 2`.
    fn ray_direction(&self, u: f64) -> Complex64 {
        if u <= 1.0 {
            self.radicand.eval(Complex64::new(u, 0.0))
        } else {
            self.reversed.eval(Complex64::new(2.0 - u, 0.0))
        }
    }

    /// Zero floor for [`Self::ray_direction`] at `u`.
    fn ray_floor(&self, u: f64) -> f64 {
        if u <= 1.0 {
            ZERO_FLOOR * self.radicand.eval_abs(u)
        } else {
            ZERO_FLOOR * self.reversed.eval_abs(2.0 - u)
        }
    }

    fn build_tracks(&mut self) -> Result<()> {
        let w0 = self.ray_direction(0.0);
        let base = w0.arg().rem_euclid(TAU);
        let mut samples = vec![(0.0, base)];
        let steps = (2.0 / PATH_STEP).round() as usize;
        let mut u_prev = 0.0;
        let mut d_prev = w0;
        let mut phi = base;
        for j in 1..=steps {
            let u = 2.0 * j as f64 / steps as f64;
            self.refine_ray(u_prev, d_prev, u, &mut phi, &mut samples, 0)?;
            u_prev = u;
            d_prev = self.ray_direction(u);
        }
        self.upper = ArgTrack {
            edge: Edge::Upper,
            samples: samples.clone(),
            base_phi: base,
        };
        let lift = TAU * self.branch_shift as f64;
        self.lower = ArgTrack {
            edge: Edge::Lower,
            samples: samples.into_iter().map(|(x, p)| (x, p + lift)).collect(),
            base_phi: base + lift,
        };
        Ok(())
    }

    fn refine_ray(
        &self,
        ua: f64,
        da: Complex64,
        ub: f64,
        phi: &mut f64,
        samples: &mut Vec<(f64, f64)>,
        depth: u32,
    ) -> Result<()> {
        let db = self.ray_direction(ub);
        if db.norm() < self.ray_floor(ub) {
            let at = Complex64::new(ray_x(ub), 0.0);
            return Err(Error::PathThroughZero { at, modulus: db.norm() });
        }
        let um = 0.5 * (ua + ub);
        let dm = self.ray_direction(um);
        let whole = arg_step(da, db);
        let halves = arg_step(da, dm) + arg_step(dm, db);
        // samples are kept dense enough that any point between two of them
        // unwraps unambiguously from the left neighbour
        if whole.abs() < MAX_ARG_STEP / 4.0 && (halves - whole).abs() < 1e-9 {
            *phi += whole;
            samples.push((ray_x(ub), *phi));
            return Ok(());
        }
        if depth >= MAX_BISECTIONS {
            let at = Complex64::new(ray_x(um), 0.0);
            return Err(Error::PathThroughZero { at, modulus: dm.norm() });
        }
        self.refine_ray(ua, da, um, phi, samples, depth + 1)?;
        self.refine_ray(um, dm, ub, phi, samples, depth + 1)
    }

    pub fn original(&self) -> &Polynomial {
        &self.original
    }

    /// The shift `A`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `f(z) = P(z + A)`.
    pub fn shifted(&self) -> &Polynomial {
        &self.shifted
    }

    pub fn radicand(&self) -> &Polynomial {
        &self.radicand
    }

    pub fn degree(&self) -> usize {
        self.shifted.degree()
    }

    /// `Z`, the branch-index offset picked up crossing the cut.
    pub fn branch_shift(&self) -> usize {
        self.branch_shift
    }

    /// `B = max |b_j|`.
    pub fn bound_b(&self) -> f64 {
        self.bound_b
    }

    pub fn bound_m(&self) -> f64 {
        self.bound_m
    }

    /// Oracle roots of `f`.
    pub fn shifted_roots(&self) -> &[Complex64] {
        &self.shifted_roots
    }

    /// Oracle roots of `W`.
    pub fn radicand_roots(&self) -> &[Complex64] {
        &self.radicand_roots
    }

    pub fn track(&self, edge: Edge) -> &ArgTrack {
        match edge {
            Edge::Upper => &self.upper,
            Edge::Lower => &self.lower,
        }
    }

    /// Continuous argument of `W(x)` on the given edge.
    pub fn edge_phi(&self, x: f64, edge: Edge) -> f64 {
        let track = self.track(edge);
        let samples = &track.samples;
        let idx = samples.partition_point(|&(sx, _)| sx <= x).saturating_sub(1);
        let (sx, sphi) = samples[idx];
        if sx == x {
            return sphi;
        }
        let (u0, u1) = (ray_u(sx), ray_u(x));
        sphi + arg_step(self.ray_direction(u0), self.ray_direction(u1))
    }

    fn modulus_on_ray(&self, x: f64) -> f64 {
        if x <= 1.0 {
            self.radicand.eval(Complex64::new(x, 0.0)).norm()
        } else {
            let n = self.degree();
            self.reversed.eval(Complex64::new(1.0 / x, 0.0)).norm() * x.powi(n as i32 - 1)
        }
    }

    /// The radical part `w_k(x) = x - f_k(x)` on an edge of the cut.
    ///
    /// The lower edge argument exceeds the upper one by `2πZ`, so it is
    /// applied as a branch index shift modulo `n`.
    pub fn edge_radical(&self, k: BranchId, x: f64, edge: Edge) -> Complex64 {
        let n = self.degree();
        let index = match edge {
            Edge::Upper => k.0,
            Edge::Lower => (k.0 + self.branch_shift) % n,
        };
        radical(self.modulus_on_ray(x), self.edge_phi(x, Edge::Upper), index, n)
    }

    /// `f_k(x)` on the upper edge, or `f_k(x e^{2πi})` on the lower edge.
    pub fn edge_value(&self, k: BranchId, x: f64, edge: Edge) -> Complex64 {
        Complex64::new(x, 0.0) - self.edge_radical(k, x, edge)
    }

    /// `(f_k(i), f_k(-i))`, continued along unit quarter circles from the
    /// upper and lower edges respectively.
    pub fn pole_values(&self, k: BranchId) -> (Complex64, Complex64) {
        let i = Complex64::i();
        let n = self.degree();
        let wp = self.radicand.eval(i).norm();
        let wm = self.radicand.eval(-i).norm();
        (
            i - radical(wp, self.phi_at_i, k.0, n),
            -i - radical(wm, self.phi_at_minus_i, k.0, n),
        )
    }

    /// `f_k(z)` given a continued argument `phi` of `W(z)`.
    pub fn branch_value(&self, k: BranchId, z: Complex64, phi: f64) -> Complex64 {
        z - radical(self.radicand.eval(z).norm(), phi, k.0, self.degree())
    }

    /// The branch whose radical equals `z` at `z`, with the residual
    /// `|z - w_k(z)|`.
    ///
    /// The argument is continued from the cut at the origin (upper edge for
    /// `Im z >= 0`, lower edge otherwise) straight up or down to a height
    /// clearing every radicand zero, across, and back to `z`.
    pub fn branch_index_of(&self, z: Complex64) -> Result<(BranchId, f64)> {
        let n = self.degree();
        let clearance = self
            .radicand_roots
            .iter()
            .map(|r| r.im.abs())
            .chain(std::iter::once(z.im.abs()))
            .fold(1.0, f64::max)
            + 1.0;
        let (edge, sign) = if z.im >= 0.0 {
            (Edge::Upper, 1.0)
        } else {
            (Edge::Lower, -1.0)
        };
        let top = Complex64::new(0.0, sign * clearance);
        let corner = Complex64::new(z.re, sign * clearance);
        let mut path = line_path(Complex64::new(0.0, 0.0), top);
        path.extend(line_path(top, corner).into_iter().skip(1));
        path.extend(line_path(corner, z).into_iter().skip(1));
        let phi = continued_arg(&self.radicand, &path, self.track(edge).base_phi)?;
        let w0 = radical(self.radicand.eval(z).norm(), phi, 0, n);
        let turns = (z / w0).arg() * n as f64 / TAU;
        let k = (turns.round() as i64).rem_euclid(n as i64) as usize;
        let residual = (z - radical(self.radicand.eval(z).norm(), phi, k, n)).norm();
        Ok((BranchId(k), residual))
    }
}

/// Straight path sampled at [`PATH_STEP`] relative spacing.
fn line_path(a: Complex64, b: Complex64) -> Vec<Complex64> {
    let len = (b - a).norm();
    let steps = ((len / PATH_STEP).ceil() as usize).clamp(1, 4096);
    (0..=steps).map(|j| a + (b - a) * (j as f64 / steps as f64)).collect()
}

/// Shortest signed angular difference, in `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(TAU) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}
