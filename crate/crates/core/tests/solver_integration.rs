use std::f64::consts::TAU;

use num_complex::Complex64;
use quadroots::branch::{arc_path, continued_arg, BranchId, Edge, ShiftedProblem};
use quadroots::oracle::{match_root_sets, oracle_roots};
use quadroots::solver::{
    contour_i, plan_shift, residue_i, residue_terms, solve_all, solve_branch, solve_branch_root, SolverConfig,
};
use quadroots::{Error, Polynomial};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real(coeffs: &[f64]) -> Polynomial {
    Polynomial::from_real(coeffs).unwrap()
}

fn quadratic() -> ShiftedProblem {
    ShiftedProblem::new(&real(&[1.0, 0.0, -1.0]), 3.0).unwrap()
}

// Reference values from an independent evaluation of the same integrals with
// the closed-form edge values f(x) = x -/+ i sqrt(6x + 8) and QUADPACK.
const XI_0: f64 = 0.253_392_752_915_9;
const XI_1: f64 = -0.564_797_217_310_6;
const CONTOUR_0: f64 = 2.230_405_447_091_796;
const CONTOUR_1: f64 = -3.659_906_658_008_998_7;

#[test]
fn quadratic_formula_values_match_reference_quadrature() {
    let sp = quadratic();
    let config = SolverConfig::default();
    let xi0 = solve_branch_root(&sp, BranchId::new(0, 2).unwrap(), &config).unwrap();
    let xi1 = solve_branch_root(&sp, BranchId::new(1, 2).unwrap(), &config).unwrap();
    assert!((xi0 - c(XI_0, 0.0)).norm() < 1e-9, "{xi0}");
    assert!((xi1 - c(XI_1, 0.0)).norm() < 1e-9, "{xi1}");
}

#[test]
fn quadratic_contour_values_match_reference_quadrature() {
    let sp = quadratic();
    let config = SolverConfig::default();
    for (k, xi, expected) in [(0, -2.0, CONTOUR_0), (1, -4.0, CONTOUR_1)] {
        let est = contour_i(&sp, BranchId::new(k, 2).unwrap(), c(xi, 0.0), &config);
        assert!(est.met_tolerance);
        assert!((est.value - c(0.0, expected)).norm() < 1e-8, "{:?}", est.value);
    }
}

#[test]
fn quadratic_edge_values_have_closed_form() {
    let sp = quadratic();
    let k0 = BranchId::new(0, 2).unwrap();
    for x in [0.0, 0.3, 1.0, 7.5, 1e4] {
        let s = (6.0 * x + 8.0f64).sqrt();
        let up = sp.edge_value(k0, x, Edge::Upper);
        let low = sp.edge_value(k0, x, Edge::Lower);
        assert!((up - c(x, -s)).norm() <= 1e-12 * (1.0 + x), "{up}");
        assert!((low - c(x, s)).norm() <= 1e-12 * (1.0 + x), "{low}");
    }
}

#[test]
fn root_formula_is_the_fixed_point_of_the_residue_identity() {
    let config = SolverConfig::default();
    for coeffs in [
        vec![1.0, 0.0, -1.0],
        vec![1.0, -0.5, 0.25, 0.7],
        vec![1.0, 0.2, 0.0, -0.3, 0.9],
    ] {
        let p = real(&coeffs);
        let sp = plan_shift(&p, &config).unwrap();
        for k in BranchId::all(sp.degree()) {
            let b = solve_branch(&sp, k, &config).unwrap();
            let contour = contour_i(&sp, k, b.xi, &config).value;
            let residue = residue_i(&sp, k, b.xi).unwrap();
            assert!((contour - residue).norm() <= 1e-7 * (1.0 + residue.norm()));
        }
    }
}

#[test]
fn linear_polynomials_are_solved_exactly() {
    let config = SolverConfig::default();
    let sp = ShiftedProblem::new(&real(&[1.0, 2.0]), 4.0).unwrap();
    let xi = solve_branch_root(&sp, BranchId::new(0, 1).unwrap(), &config).unwrap();
    assert!((xi - c(-6.0, 0.0)).norm() < 1e-9);

    let root = c(0.3, -0.8);
    let p = Polynomial::new(vec![c(1.0, 0.0), -root]).unwrap();
    let sol = solve_all(
        &p,
        &SolverConfig {
            polish: false,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(sol.complete);
    assert!((sol.reports[0].raw_root - root).norm() < 1e-9);
}

#[test]
fn branch_shift_equals_full_turns_of_the_radicand() {
    for coeffs in [
        vec![1.0, 0.0, -1.0],
        vec![1.0, -0.5, 0.25, 0.7],
        vec![1.0, 0.2, 0.0, -0.3, 0.9, 0.1],
    ] {
        let p = real(&coeffs);
        let sp = plan_shift(&p, &SolverConfig::default()).unwrap();
        let radius = 2.0 + sp.radicand_roots().iter().map(|r| r.norm()).fold(0.0, f64::max);
        let turn = continued_arg(sp.radicand(), &arc_path(c(0.0, 0.0), radius, 0.0, TAU), 0.0).unwrap();
        assert!((turn - TAU * sp.branch_shift() as f64).abs() < 1e-9);
        assert_eq!(sp.branch_shift(), sp.degree() - 1);
    }
}

#[test]
fn residue_terms_for_real_input_are_conjugate_symmetric() {
    let sp = plan_shift(&real(&[1.0, -0.5, 0.25, 0.7]), &SolverConfig::default()).unwrap();
    for k in BranchId::all(sp.degree()) {
        let (fp, fm) = sp.pole_values(k);
        let (s, t) = residue_terms(&sp, k).unwrap();
        assert!(((fp + fm) / (fp * fm) - s).norm() < 1e-14);
        assert!(((fp - fm) / (fp * fm) - t).norm() < 1e-14);
    }
}

#[test]
fn interior_radicand_zero_breaks_single_valuedness_for_the_quadratic() {
    // W = -(6z + 8) vanishes at -4/3, inside the keyhole, and both roots of
    // f = z^2 + 6z + 8 belong to the same branch.
    let sp = quadratic();
    assert_eq!(sp.branch_shift(), 1);
    let labels: Vec<usize> = sp
        .shifted_roots()
        .iter()
        .map(|&r| sp.branch_index_of(r).unwrap().0.index())
        .collect();
    assert_eq!(labels, vec![0, 0]);
}

#[test]
fn solve_all_reports_every_branch_and_total_multiplicity() {
    let config = SolverConfig::default();
    for coeffs in [
        vec![1.0, 0.0, -1.0],
        vec![1.0, -0.5, 0.25, 0.7],
        vec![2.0, 0.0, 0.0, 4.0, 0.0],
    ] {
        let p = real(&coeffs);
        let sol = solve_all(&p, &config).unwrap();
        assert_eq!(sol.degree, p.degree());
        assert_eq!(sol.roots().len(), p.degree());
        for r in &sol.reports {
            assert!(r.residual.is_finite());
            if r.branch.is_some() {
                assert!(r.xi.is_some());
                assert!(r.diagnostics.evaluations > 0);
            }
        }
    }
}

#[test]
fn solve_all_is_deterministic() {
    let p = Polynomial::new(vec![c(1.0, 0.0), c(0.2, -0.4), c(-0.3, 0.1), c(0.5, 0.5), c(0.0, -0.7)]).unwrap();
    let config = SolverConfig::default();
    assert_eq!(solve_all(&p, &config).unwrap(), solve_all(&p, &config).unwrap());
}

#[test]
fn zero_roots_and_normalization_are_exact() {
    let sol = solve_all(&real(&[3.0, 6.0, 0.0, 0.0]), &SolverConfig::default()).unwrap();
    assert_eq!(sol.normalized_from, Some(c(3.0, 0.0)));
    let origin = sol.reports.iter().find(|r| r.branch.is_none()).unwrap();
    assert_eq!((origin.root, origin.multiplicity), (c(0.0, 0.0), 2));
    let linear = sol.reports.iter().find(|r| r.branch.is_some()).unwrap();
    assert!((linear.root - c(-2.0, 0.0)).norm() < 1e-10);
    assert!(sol.complete);
}

#[test]
fn polished_roots_that_converge_are_true_roots() {
    let config = SolverConfig::default();
    let p = real(&[1.0, 0.0, 0.0, 2.0]);
    let sol = solve_all(&p, &config).unwrap();
    let dk = oracle_roots(&p);
    for r in sol.reports.iter().filter(|r| r.diagnostics.polish_converged) {
        let nearest = dk
            .roots
            .iter()
            .map(|z| (z - r.root).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-10);
        assert!(r.residual < 1e-9);
    }
    if sol.complete {
        assert!(match_root_sets(&sol.roots(), &dk.roots).max_distance < 1e-8);
    }
}

#[test]
fn shift_override_is_validated_and_used() {
    let p = real(&[1.0, 0.0, -1.0]);
    let config = SolverConfig {
        shift: Some(5.0),
        ..Default::default()
    };
    assert_eq!(solve_all(&p, &config).unwrap().shift, Some(5.0));
    let bad = SolverConfig {
        shift: Some(2.0),
        ..Default::default()
    };
    assert!(matches!(solve_all(&p, &bad), Err(Error::InvalidConfig(_))));
}
