//! Dense univariate polynomials over `Complex64`.
//!
//! Coefficients are stored leading-first (descending degree), which is the
//! natural order for Horner evaluation and synthetic division.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A polynomial `c[0] z^n + c[1] z^(n-1) + ... + c[n]`.
///
/// The leading coefficient is nonzero except for the zero polynomial, which is
/// stored as the single coefficient `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

/// Thresholds for the floating-point algebra in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Relative magnitude below which a remainder (or trailing coefficient)
    /// counts as zero.
    pub gcd_epsilon: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { gcd_epsilon: 1e-10 }
    }
}

impl ToleranceConfig {
    pub fn new(gcd_epsilon: f64) -> Result<Self> {
        if !(gcd_epsilon > 0.0 && gcd_epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gcd_epsilon must be positive, got {gcd_epsilon}"
            )));
        }
        Ok(Self { gcd_epsilon })
    }
}

impl Polynomial {
    /// Builds a polynomial from leading-first coefficients, dropping exact
    /// leading zeros. An all-zero input yields the zero polynomial.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Self::trimmed(coeffs))
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Monic polynomial with the given roots, `prod (z - r)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![ONE];
        for &r in roots {
            coeffs.push(ZERO);
            for j in (1..coeffs.len()).rev() {
                let prev = coeffs[j - 1];
                coeffs[j] -= r * prev;
            }
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![ZERO] }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![ONE] }
    }

    fn trimmed(mut coeffs: Vec<Complex64>) -> Self {
        let lead = coeffs.iter().position(|c| *c != ZERO).unwrap_or(coeffs.len() - 1);
        coeffs.drain(..lead);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == ZERO
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs[0] == ONE
    }

    /// Largest coefficient modulus.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Divides through by the leading coefficient. The zero polynomial is
    /// returned unchanged.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.leading();
        Self {
            coeffs: self.coeffs.iter().map(|c| c / lead).collect(),
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `Σ |c_j| r^j`, the scale of rounding errors in [`Self::eval`] at `|z| = r`.
    pub fn eval_abs(&self, r: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in &self.coeffs {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        let n = self.degree();
        if n == 0 {
            return Self::zero();
        }
        let coeffs = self.coeffs[..n]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (n - i) as f64)
            .collect();
        Self::trimmed(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::trimmed(out)
    }

    /// Long division, `self = q * divisor + r` with `deg r < deg divisor`.
    ///
    /// # Panics
    /// If `divisor` is the zero polynomial.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let m = divisor.degree();
        if self.degree() < m {
            return (Self::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let qlen = self.degree() - m + 1;
        let mut quot = Vec::with_capacity(qlen);
        for i in 0..qlen {
            let q = rem[i] / lead;
            quot.push(q);
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= q * d;
            }
        }
        let r = if m == 0 { vec![ZERO] } else { rem[qlen..].to_vec() };
        (Self::trimmed(quot), Self::trimmed(r))
    }

    /// Drops leading coefficients whose modulus is below `threshold`.
    fn chop_leading(&self, threshold: f64) -> Self {
        let keep = self
            .coeffs
            .iter()
            .position(|c| c.norm() >= threshold)
            .unwrap_or(self.coeffs.len() - 1);
        let mut coeffs = self.coeffs[keep..].to_vec();
        if coeffs.len() == 1 && coeffs[0].norm() < threshold {
            coeffs[0] = ZERO;
        }
        Self { coeffs }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| match n - i {
                0 => format!("({c})"),
                1 => format!("({c})z"),
                p => format!("({c})z^{p}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Value of `p` at `z` by Horner's scheme.
pub fn eval(p: &Polynomial, z: Complex64) -> Complex64 {
    p.eval(z)
}

pub fn derivative(p: &Polynomial) -> Polynomial {
    p.derivative()
}

/// Monic approximate GCD by the Euclidean remainder sequence.
///
/// A remainder is treated as zero once its largest coefficient falls below
/// `gcd_epsilon` times the largest coefficient of the current pair.
pub fn poly_gcd(p: &Polynomial, q: &Polynomial, tol: &ToleranceConfig) -> Polynomial {
    if p.is_zero() {
        return q.monic();
    }
    if q.is_zero() {
        return p.monic();
    }
    let (mut a, mut b) = if p.degree() >= q.degree() {
        (p.monic(), q.monic())
    } else {
        (q.monic(), p.monic())
    };
    loop {
        if b.degree() == 0 {
            return Polynomial::one();
        }
        let scale = a.scale().max(b.scale());
        let (_, r) = a.div_rem(&b);
        let r = r.chop_leading(tol.gcd_epsilon * scale);
        if r.is_zero() {
            return b;
        }
        a = b;
        b = r.monic();
    }
}

/// `p / gcd(p, p')`, monic. Every root of the result is simple.
pub fn square_free_part(p: &Polynomial, tol: &ToleranceConfig) -> Polynomial {
    let p = p.monic();
    if p.degree() == 0 {
        return p;
    }
    let g = poly_gcd(&p, &p.derivative(), tol);
    p.div_rem(&g).0.monic()
}

/// The repeated-GCD chain `g_0 = p`, `g_{i+1} = gcd(g_i, g_i')`, ending at a
/// constant. A root of multiplicity `m` in `p` is a root of exactly
/// `g_0, ..., g_{m-1}`.
pub fn gcd_chain(p: &Polynomial, tol: &ToleranceConfig) -> Vec<Polynomial> {
    let mut chain = vec![p.monic()];
    while chain.last().map_or(0, Polynomial::degree) > 0 {
        let g = chain.last().unwrap();
        let next = poly_gcd(g, &g.derivative(), tol);
        chain.push(next);
    }
    chain
}

/// Square-free layers `h_i = g_{i-1} / g_i` of the GCD chain. The roots of
/// `h_i` are exactly the roots of `p` with multiplicity at least `i`, so
/// `h_1` is the square-free part.
pub fn multiplicity_layers(p: &Polynomial, tol: &ToleranceConfig) -> Vec<Polynomial> {
    gcd_chain(p, tol)
        .windows(2)
        .map(|w| w[0].div_rem(&w[1]).0.monic())
        .collect()
}

/// Strips roots at the origin: returns the reduced polynomial and the
/// multiplicity of `z = 0`. Trailing coefficients below
/// `gcd_epsilon * scale` count as zero.
pub fn deflate_zero_roots(p: &Polynomial, tol: &ToleranceConfig) -> (Polynomial, usize) {
    let threshold = tol.gcd_epsilon * p.scale();
    let c = p.coeffs();
    let mut m = 0;
    while m < p.degree() && c[c.len() - 1 - m].norm() <= threshold {
        m += 1;
    }
    let reduced = Polynomial::trimmed(c[..c.len() - m].to_vec());
    (reduced, m)
}

/// Coefficients of `p(z + shift)` by repeated synthetic division.
pub fn taylor_shift(p: &Polynomial, shift: f64) -> Polynomial {
    taylor_shift_complex(p, Complex64::new(shift, 0.0))
}

pub fn taylor_shift_complex(p: &Polynomial, shift: Complex64) -> Polynomial {
    let mut c = p.coeffs.clone();
    let n = p.degree();
    for i in 0..n {
        for j in 1..=(n - i) {
            let prev = c[j - 1];
            c[j] += shift * prev;
        }
    }
    Polynomial::trimmed(c)
}

/// `1 + max |a_j|` over the non-leading coefficients of the monic form.
pub fn bound_m(p: &Polynomial) -> f64 {
    let monic = p.monic();
    1.0 + monic.coeffs()[1..].iter().map(|c| c.norm()).fold(0.0, f64::max)
}
