//! End-to-end pipeline: normalize, deflate, reduce to the square-free part,
//! plan the shift, evaluate the per-branch root formula, shift back, polish.
//!
//! For branch `k`, with `f_up(x) = f_k(x)` and `f_low(x) = f_k(x e^{2πi})`,
//!
//! ```text
//!        ∫ x Δ(x) dx − πi S          Δ(x) = (f_low − f_up) / ((x² + 1) f_up f_low)
//! ξ_k = ───────────────────,        S = (f_k(i) + f_k(−i)) / (f_k(i) f_k(−i))
//!          ∫ Δ(x) dx + π T           T = (f_k(i) − f_k(−i)) / (f_k(i) f_k(−i))
//! ```
//!
//! with both integrals over `[0, ∞)`. This is the solution of the linear
//! equation `contour_i(ξ) = residue_i(ξ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::branch::{BranchId, Edge, ShiftedProblem};
use crate::error::{Error, Result};
use crate::poly::{bound_m, deflate_zero_roots, multiplicity_layers, Polynomial, ToleranceConfig};
use crate::quadrature::{improper_integral, QuadratureEstimate};

/// Distance below which a root is attributed to a multiplicity layer.
pub const MULTIPLICITY_MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub quad_tol: f64,
    pub polish: bool,
    pub max_shift_escalations: usize,
    /// Relative floor for the root-formula denominator.
    pub denominator_floor: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Starting shift instead of `M + 1`; must still exceed `M`.
    pub shift: Option<f64>,
    pub tolerance: ToleranceConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            quad_tol: 1e-10,
            polish: true,
            max_shift_escalations: 8,
            denominator_floor: 1e-8,
            newton_tol: 1e-13,
            newton_max_iter: 50,
            shift: None,
            tolerance: ToleranceConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("quad_tol", self.quad_tol),
            ("denominator_floor", self.denominator_floor),
            ("newton_tol", self.newton_tol),
            ("gcd_epsilon", self.tolerance.gcd_epsilon),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidConfig("newton_max_iter must be at least 1".into()));
        }
        if let Some(a) = self.shift {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidConfig(format!("shift must be positive, got {a}")));
            }
        }
        Ok(())
    }
}

/// Per-root diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootDiagnostics {
    pub numerator_error: f64,
    pub denominator_error: f64,
    pub evaluations: usize,
    pub quadrature_converged: bool,
    /// `|P(raw root)|`
    pub raw_residual: f64,
    pub polish_iterations: usize,
    pub polish_converged: bool,
    pub shift_escalations: usize,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootReport {
    /// `None` for the root at the origin removed by deflation.
    pub branch: Option<BranchId>,
    /// Root of the shifted polynomial straight from the integral formula.
    pub xi: Option<Complex64>,
    /// `xi + A`
    pub raw_root: Complex64,
    pub polished: Option<Complex64>,
    /// `polished` when present, else `raw_root`.
    pub root: Complex64,
    /// `|P(root)|` for the monic input.
    pub residual: f64,
    pub multiplicity: usize,
    pub diagnostics: RootDiagnostics,
}

/// Result of [`solve_all`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub degree: usize,
    /// The shift used, absent when only the origin was a root.
    pub shift: Option<f64>,
    pub shift_escalations: usize,
    /// Leading coefficient divided out of the input, when it was not 1.
    pub normalized_from: Option<Complex64>,
    pub reports: Vec<RootReport>,
    /// Total multiplicity equals the degree and no two reported roots coincide.
    pub complete: bool,
}

impl Solution {
    /// Roots with multiplicity, in report order.
    pub fn roots(&self) -> Vec<Complex64> {
        self.reports
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.root, r.multiplicity))
            .collect()
    }

    /// Raw integral-formula roots of the square-free part, one per branch.
    pub fn raw_branch_roots(&self) -> Vec<Complex64> {
        self.reports
            .iter()
            .filter(|r| r.branch.is_some())
            .map(|r| r.raw_root)
            .collect()
    }
}

/// Chooses `A` (starting at `M + 1`, doubling on failure) so that every root
/// of `P(z + A)` has negative real part and the radicand keeps clear of the cut.
pub fn plan_shift(p_sf: &Polynomial, config: &SolverConfig) -> Result<ShiftedProblem> {
    plan_shift_from(p_sf, initial_shift(p_sf, config)?, config).map(|(sp, _)| sp)
}

fn initial_shift(p: &Polynomial, config: &SolverConfig) -> Result<f64> {
    let m = bound_m(p);
    match config.shift {
        Some(a) if a <= m => Err(Error::InvalidConfig(format!("shift A = {a} must exceed M = {m}"))),
        Some(a) => Ok(a),
        None => Ok(m + 1.0),
    }
}

fn plan_shift_from(p_sf: &Polynomial, start: f64, config: &SolverConfig) -> Result<(ShiftedProblem, usize)> {
    let mut a = start;
    let mut last = String::new();
    for escalation in 0..=config.max_shift_escalations {
        match ShiftedProblem::new(p_sf, a) {
            Ok(sp) => return Ok((sp, escalation)),
            Err(e) => last = e.to_string(),
        }
        if escalation < config.max_shift_escalations {
            a *= 2.0;
        }
    }
    Err(Error::ShiftPlanningFailed {
        escalations: config.max_shift_escalations,
        last_shift: a,
        reason: last,
    })
}

fn pole_floor(z: Complex64) -> f64 {
    1e-12 * (1.0 + z.norm())
}

/// `(S, T)` from the branch values at the poles `±i`.
pub fn residue_terms(sp: &ShiftedProblem, k: BranchId) -> Result<(Complex64, Complex64)> {
    let (fp, fm) = sp.pole_values(k);
    let i = Complex64::i();
    for (v, z) in [(fp, i), (fm, -i)] {
        if v.norm() < pole_floor(z - v) {
            return Err(Error::PoleValueZero { modulus: v.norm() });
        }
    }
    let prod = fp * fm;
    Ok(((fp + fm) / prod, (fp - fm) / prod))
}

/// `I_k` from the residues at `±i`: `π (i S + ξ T)`.
pub fn residue_i(sp: &ShiftedProblem, k: BranchId, xi: Complex64) -> Result<Complex64> {
    let (s, t) = residue_terms(sp, k)?;
    Ok(PI * (Complex64::i() * s + xi * t))
}

/// `(f_low − f_up) / ((x² + 1) f_up f_low)` on the cut.
fn jump_kernel(sp: &ShiftedProblem, k: BranchId, x: f64) -> Complex64 {
    let w_up = sp.edge_radical(k, x, Edge::Upper);
    let w_low = sp.edge_radical(k, x, Edge::Lower);
    let xc = Complex64::new(x, 0.0);
    (w_up - w_low) / ((x * x + 1.0) * (xc - w_up) * (xc - w_low))
}

/// `I_k` by quadrature along both edges of the cut:
/// `∫ (x − ξ)/((x² + 1) f_up) dx − ∫ (x − ξ)/((x² + 1) f_low) dx`.
pub fn contour_i(sp: &ShiftedProblem, k: BranchId, xi: Complex64, config: &SolverConfig) -> QuadratureEstimate {
    improper_integral(
        |x| (Complex64::new(x, 0.0) - xi) * jump_kernel(sp, k, x),
        config.quad_tol,
    )
}

/// Everything computed for one branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSolution {
    pub branch: BranchId,
    pub xi: Complex64,
    pub numerator: QuadratureEstimate,
    pub denominator: QuadratureEstimate,
    pub s: Complex64,
    pub t: Complex64,
}

impl BranchSolution {
    pub fn quadrature_converged(&self) -> bool {
        self.numerator.met_tolerance && self.denominator.met_tolerance
    }
}

/// Evaluates the root formula for branch `k`, keeping the quadrature
/// estimates. A missed quadrature tolerance is reported through the
/// estimates, not as an error.
pub fn solve_branch(sp: &ShiftedProblem, k: BranchId, config: &SolverConfig) -> Result<BranchSolution> {
    let (s, t) = residue_terms(sp, k)?;
    let numerator = improper_integral(|x| x * jump_kernel(sp, k, x), config.quad_tol);
    let denominator = improper_integral(|x| jump_kernel(sp, k, x), config.quad_tol);
    let i = Complex64::i();
    let top = numerator.value - PI * i * s;
    let bottom = denominator.value + PI * t;
    let floor = config.denominator_floor * top.norm().max(1.0);
    if bottom.norm().is_nan() || bottom.norm() < floor {
        return Err(Error::DegenerateDenominator {
            denominator: bottom.norm(),
            floor,
        });
    }
    Ok(BranchSolution {
        branch: k,
        xi: top / bottom,
        numerator,
        denominator,
        s,
        t,
    })
}

/// `ξ_k`, failing with `ToleranceNotMet` if either integral missed `quad_tol`.
pub fn solve_branch_root(sp: &ShiftedProblem, k: BranchId, config: &SolverConfig) -> Result<Complex64> {
    let sol = solve_branch(sp, k, config)?;
    sol.numerator.check()?;
    sol.denominator.check()?;
    Ok(sol.xi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonOutcome {
    pub root: Complex64,
    pub iterations: usize,
    pub converged: bool,
}

impl NewtonOutcome {
    pub fn into_result(self) -> Result<Complex64> {
        if self.converged {
            Ok(self.root)
        } else {
            Err(Error::NoConvergence {
                iterations: self.iterations,
            })
        }
    }
}

/// Newton's iteration on `f` from `z0`; converged once a step is below
/// `newton_tol * (1 + |z|)`.
pub fn newton_polish(f: &Polynomial, z0: Complex64, config: &SolverConfig) -> NewtonOutcome {
    let mut z = z0;
    for it in 1..=config.newton_max_iter {
        let (v, dv) = f.eval_with_derivative(z);
        if v.norm() == 0.0 {
            return NewtonOutcome {
                root: z,
                iterations: it,
                converged: true,
            };
        }
        let step = v / dv;
        if !step.is_finite() {
            return NewtonOutcome {
                root: z,
                iterations: it,
                converged: false,
            };
        }
        z -= step;
        if step.norm() < config.newton_tol * (1.0 + z.norm()) {
            return NewtonOutcome {
                root: z,
                iterations: it,
                converged: true,
            };
        }
    }
    NewtonOutcome {
        root: z,
        iterations: config.newton_max_iter,
        converged: false,
    }
}

/// Newton-step distance estimate from `z` to the nearest root of `h`.
fn root_distance(h: &Polynomial, z: Complex64) -> f64 {
    let (v, dv) = h.eval_with_derivative(z);
    if v.norm() == 0.0 {
        0.0
    } else {
        (v / dv).norm()
    }
}

/// The input after normalization, zero-root deflation and square-free
/// layering.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub monic: Polynomial,
    pub zero_multiplicity: usize,
    /// Multiplicity layers of the deflated polynomial; `layers[0]` is its
    /// square-free part. Empty when every root is at the origin.
    pub layers: Vec<Polynomial>,
}

impl Reduction {
    pub fn square_free(&self) -> Option<&Polynomial> {
        self.layers.first()
    }
}

pub fn reduce(p: &Polynomial, tol: &ToleranceConfig) -> Reduction {
    let monic = p.monic();
    let (deflated, zero_multiplicity) = deflate_zero_roots(&monic, tol);
    let layers = if deflated.degree() == 0 {
        vec![]
    } else {
        multiplicity_layers(&deflated, tol)
    };
    Reduction {
        monic,
        zero_multiplicity,
        layers,
    }
}

fn is_escalation_error(e: &Error) -> bool {
    matches!(e, Error::DegenerateDenominator { .. } | Error::PoleValueZero { .. })
}

/// Runs the whole pipeline on `p`.
pub fn solve_all(p: &Polynomial, config: &SolverConfig) -> Result<Solution> {
    config.validate()?;
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let lead = p.leading();
    let normalized_from = (lead != Complex64::new(1.0, 0.0)).then_some(lead);
    let monic = p.monic();
    let degree = monic.degree();

    let Reduction {
        zero_multiplicity: zero_mult,
        layers,
        ..
    } = reduce(&monic, &config.tolerance);
    let mut reports = Vec::new();
    if zero_mult > 0 {
        let origin = Complex64::new(0.0, 0.0);
        reports.push(RootReport {
            branch: None,
            xi: None,
            raw_root: origin,
            polished: None,
            root: origin,
            residual: monic.eval(origin).norm(),
            multiplicity: zero_mult,
            diagnostics: RootDiagnostics {
                numerator_error: 0.0,
                denominator_error: 0.0,
                evaluations: 0,
                quadrature_converged: true,
                raw_residual: monic.eval(origin).norm(),
                polish_iterations: 0,
                polish_converged: true,
                shift_escalations: 0,
                flags: vec![],
            },
        });
    }
    if layers.is_empty() {
        return Ok(Solution {
            degree,
            shift: None,
            shift_escalations: 0,
            normalized_from,
            complete: true,
            reports,
        });
    }

    let square_free = layers[0].clone();
    let n = square_free.degree();

    let mut start = initial_shift(&square_free, config)?;
    let mut escalations = 0;
    let (sp, branches) = loop {
        let (sp, used) = plan_shift_from(
            &square_free,
            start,
            &SolverConfig {
                max_shift_escalations: config.max_shift_escalations - escalations,
                ..*config
            },
        )
        .map_err(|e| match e {
            Error::ShiftPlanningFailed { last_shift, reason, .. } => Error::ShiftPlanningFailed {
                escalations: config.max_shift_escalations,
                last_shift,
                reason,
            },
            other => other,
        })?;
        escalations += used;
        let results: Vec<Result<BranchSolution>> = BranchId::all(n)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|k| solve_branch(&sp, k, config))
            .collect();
        match results.iter().find_map(|r| r.as_ref().err()) {
            Some(e) if is_escalation_error(e) => {
                if escalations >= config.max_shift_escalations {
                    return Err(Error::ShiftPlanningFailed {
                        escalations,
                        last_shift: sp.shift(),
                        reason: e.to_string(),
                    });
                }
                escalations += 1;
                start = sp.shift() * 2.0;
            }
            Some(e) => return Err(e.clone()),
            None => break (sp, results.into_iter().map(|r| r.unwrap()).collect::<Vec<_>>()),
        }
    };

    let shift = sp.shift();
    let mut branch_reports: Vec<RootReport> = branches
        .iter()
        .map(|b| {
            let raw_root = b.xi + shift;
            let mut flags = Vec::new();
            if !b.quadrature_converged() {
                flags.push("quadrature_tolerance_not_met".to_string());
            }
            let (polished, iterations, converged) = if config.polish {
                let out = newton_polish(&square_free, raw_root, config);
                if !out.converged {
                    flags.push("polish_not_converged".to_string());
                }
                (out.converged.then_some(out.root), out.iterations, out.converged)
            } else {
                (None, 0, false)
            };
            let root = polished.unwrap_or(raw_root);
            let multiplicity = layers
                .iter()
                .take_while(|h| root_distance(h, root) <= MULTIPLICITY_MATCH_TOL * (1.0 + root.norm()))
                .count()
                .max(1);
            RootReport {
                branch: Some(b.branch),
                xi: Some(b.xi),
                raw_root,
                polished,
                root,
                residual: monic.eval(root).norm(),
                multiplicity,
                diagnostics: RootDiagnostics {
                    numerator_error: b.numerator.abs_error,
                    denominator_error: b.denominator.abs_error,
                    evaluations: b.numerator.evaluations + b.denominator.evaluations,
                    quadrature_converged: b.quadrature_converged(),
                    raw_residual: monic.eval(raw_root).norm(),
                    polish_iterations: iterations,
                    polish_converged: converged,
                    shift_escalations: escalations,
                    flags,
                },
            }
        })
        .collect();

    let mut distinct = true;
    for a in 0..branch_reports.len() {
        for b in (a + 1)..branch_reports.len() {
            let (ra, rb) = (branch_reports[a].root, branch_reports[b].root);
            if (ra - rb).norm() <= MULTIPLICITY_MATCH_TOL * (1.0 + ra.norm().max(rb.norm())) {
                distinct = false;
                for idx in [a, b] {
                    let flags = &mut branch_reports[idx].diagnostics.flags;
                    if !flags.iter().any(|f| f == "duplicate_root") {
                        flags.push("duplicate_root".to_string());
                    }
                }
            }
        }
    }

    reports.extend(branch_reports);
    let total: usize = reports.iter().map(|r| r.multiplicity).sum();
    Ok(Solution {
        degree,
        shift: Some(shift),
        shift_escalations: escalations,
        normalized_from,
        complete: distinct && total == degree,
        reports,
    })
}
