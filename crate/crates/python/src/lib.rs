//! Python bindings for `quadroots`.
//!
//! Coefficients are passed as sequences of Python numbers (int, float or
//! complex), leading coefficient first.

// pyo3 0.22 macro expansion
#![allow(clippy::useless_conversion)]

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use quadroots::branch::ShiftedProblem;
use quadroots::certificate::{select_parameters, verify_certificate, DEFAULT_SAMPLES_PER_ARC};
use quadroots::oracle::{durand_kerner as dk, match_root_sets};
use quadroots::poly::{square_free_part as sfp, taylor_shift_complex};
use quadroots::solver::{plan_shift, reduce, solve_all, SolverConfig};
use quadroots::{Error, Polynomial, ToleranceConfig};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::ZeroPolynomial | Error::ConstantPolynomial | Error::InvalidConfig(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn polynomial(coefficients: Vec<Complex64>) -> PyResult<Polynomial> {
    if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(PyValueError::new_err("coefficients must be finite"));
    }
    Polynomial::new(coefficients).map_err(to_py_err)
}

fn tolerance(tol: f64) -> PyResult<ToleranceConfig> {
    ToleranceConfig::new(tol).map_err(to_py_err)
}

/// One distinct root with its multiplicity and diagnostics.
#[pyclass(name = "RootReport", module = "pyquadroots", get_all, frozen)]
#[derive(Debug, Clone)]
pub struct PyRootReport {
    pub root: Complex64,
    /// Unpolished value from the integral formula.
    pub raw_root: Complex64,
    pub multiplicity: usize,
    pub residual: f64,
    /// Branch index, `None` for the root at the origin.
    pub branch: Option<usize>,
    pub quadrature_converged: bool,
    pub polish_converged: bool,
    pub flags: Vec<String>,
}

#[pymethods]
impl PyRootReport {
    fn __repr__(&self) -> String {
        format!(
            "RootReport(root={}, multiplicity={}, residual={:e}, branch={})",
            self.root,
            self.multiplicity,
            self.residual,
            self.branch.map_or("None".to_string(), |b| b.to_string())
        )
    }
}

#[pyclass(name = "Solution", module = "pyquadroots", get_all, frozen)]
#[derive(Debug, Clone)]
pub struct PySolution {
    pub degree: usize,
    pub shift: Option<f64>,
    pub shift_escalations: usize,
    /// Total multiplicity equals the degree and no two roots coincide.
    pub complete: bool,
    pub reports: Vec<PyRootReport>,
}

#[pymethods]
impl PySolution {
    /// Roots repeated by multiplicity.
    fn roots(&self) -> Vec<Complex64> {
        self.reports
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.root, r.multiplicity))
            .collect()
    }

    /// Unpolished formula values, one per branch.
    fn raw_roots(&self) -> Vec<Complex64> {
        self.reports
            .iter()
            .filter(|r| r.branch.is_some())
            .map(|r| r.raw_root)
            .collect()
    }

    fn __len__(&self) -> usize {
        self.reports.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(degree={}, shift={}, complete={}, roots={})",
            self.degree,
            self.shift.map_or("None".to_string(), |a| a.to_string()),
            if self.complete { "True" } else { "False" },
            self.reports.len()
        )
    }
}

/// Solves for every root of the polynomial.
#[pyfunction]
#[pyo3(signature = (coefficients, *, quad_tol = 1e-10, polish = true, shift = None, tol = 1e-10))]
pub fn solve(
    coefficients: Vec<Complex64>,
    quad_tol: f64,
    polish: bool,
    shift: Option<f64>,
    tol: f64,
) -> PyResult<PySolution> {
    let p = polynomial(coefficients)?;
    let config = SolverConfig {
        quad_tol,
        polish,
        shift,
        tolerance: tolerance(tol)?,
        ..Default::default()
    };
    let sol = solve_all(&p, &config).map_err(to_py_err)?;
    Ok(PySolution {
        degree: sol.degree,
        shift: sol.shift,
        shift_escalations: sol.shift_escalations,
        complete: sol.complete,
        reports: sol
            .reports
            .iter()
            .map(|r| PyRootReport {
                root: r.root,
                raw_root: r.raw_root,
                multiplicity: r.multiplicity,
                residual: r.residual,
                branch: r.branch.map(|b| b.index()),
                quadrature_converged: r.diagnostics.quadrature_converged,
                polish_converged: r.diagnostics.polish_converged,
                flags: r.diagnostics.flags.clone(),
            })
            .collect(),
    })
}

/// Durand–Kerner roots; returns `(roots, converged)`.
#[pyfunction]
#[pyo3(signature = (coefficients, tol = 1e-15, max_iter = 5000))]
pub fn durand_kerner(coefficients: Vec<Complex64>, tol: f64, max_iter: usize) -> PyResult<(Vec<Complex64>, bool)> {
    let p = polynomial(coefficients)?;
    if p.degree() == 0 {
        return Err(PyValueError::new_err("polynomial must have degree at least 1"));
    }
    let out = dk(&p.monic(), tol, max_iter);
    Ok((out.roots, out.converged))
}

/// Coefficients of `p(z + shift)`.
#[pyfunction]
pub fn taylor_shift(coefficients: Vec<Complex64>, shift: Complex64) -> PyResult<Vec<Complex64>> {
    Ok(taylor_shift_complex(&polynomial(coefficients)?, shift)
        .coeffs()
        .to_vec())
}

/// Monic `p / gcd(p, p')`.
#[pyfunction]
#[pyo3(signature = (coefficients, tol = 1e-10))]
pub fn square_free_part(coefficients: Vec<Complex64>, tol: f64) -> PyResult<Vec<Complex64>> {
    Ok(sfp(&polynomial(coefficients)?, &tolerance(tol)?).coeffs().to_vec())
}

/// Largest distance under the optimal pairing of two root sets.
#[pyfunction]
pub fn match_roots(a: Vec<Complex64>, b: Vec<Complex64>) -> PyResult<f64> {
    let m = match_root_sets(&a, &b);
    if !m.is_complete() {
        return Err(PyValueError::new_err("root sets differ in size"));
    }
    Ok(m.max_distance)
}

/// Samples the Rouché certificate for the square-free part of the polynomial.
#[pyfunction]
#[pyo3(signature = (coefficients, *, shift = None, samples = DEFAULT_SAMPLES_PER_ARC, tol = 1e-10))]
pub fn certificate<'py>(
    py: Python<'py>,
    coefficients: Vec<Complex64>,
    shift: Option<f64>,
    samples: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let p = polynomial(coefficients)?;
    let reduction = reduce(&p, &tolerance(tol)?);
    let sf = reduction
        .square_free()
        .ok_or_else(|| PyValueError::new_err("no nonzero roots to certify"))?;
    let sp = match shift {
        Some(a) => ShiftedProblem::new(sf, a),
        None => plan_shift(sf, &SolverConfig::default()),
    }
    .map_err(to_py_err)?;
    let params = select_parameters(&sp);
    let report = verify_certificate(&sp, &params, samples).map_err(to_py_err)?;
    let d = PyDict::new_bound(py);
    d.set_item("pass", report.pass)?;
    d.set_item("max_ratio", report.max_ratio())?;
    d.set_item("inequalities_hold", report.inequalities.all_hold())?;
    d.set_item("roots_inside", report.roots_inside)?;
    d.set_item("shift", sp.shift())?;
    d.set_item("alpha", params.alpha)?;
    d.set_item("beta", params.beta)?;
    d.set_item("epsilon", params.epsilon)?;
    d.set_item("radius", params.radius)?;
    Ok(d)
}

#[pymodule]
pub fn pyquadroots(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySolution>()?;
    m.add_class::<PyRootReport>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(durand_kerner, m)?)?;
    m.add_function(wrap_pyfunction!(taylor_shift, m)?)?;
    m.add_function(wrap_pyfunction!(square_free_part, m)?)?;
    m.add_function(wrap_pyfunction!(match_roots, m)?)?;
    m.add_function(wrap_pyfunction!(certificate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_reports_zero_roots() {
        let sol = solve(
            vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            1e-10,
            true,
            None,
            1e-10,
        )
        .unwrap();
        assert!(sol.complete);
        assert_eq!(sol.roots().len(), 3);
        assert_eq!(sol.raw_roots().len(), 1);
    }

    #[test]
    fn helpers_round_trip() {
        let p = vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)];
        let shifted = taylor_shift(p.clone(), c(3.0, 0.0)).unwrap();
        assert_eq!(shifted, vec![c(1.0, 0.0), c(6.0, 0.0), c(8.0, 0.0)]);
        let (roots, ok) = durand_kerner(p, 1e-15, 5000).unwrap();
        assert!(ok);
        assert!(match_roots(roots, vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap() < 1e-12);
        let sf = square_free_part(vec![c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)], 1e-10).unwrap();
        assert_eq!(sf.len(), 2);
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(solve(vec![c(f64::NAN, 0.0), c(1.0, 0.0)], 1e-10, true, None, 1e-10).is_err());
        assert!(solve(vec![c(1.0, 0.0), c(1.0, 0.0)], -1.0, true, None, 1e-10).is_err());
        assert!(durand_kerner(vec![c(3.0, 0.0)], 1e-15, 10).is_err());
        assert!(match_roots(vec![c(0.0, 0.0)], vec![]).is_err());
    }
}
