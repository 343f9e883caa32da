//! Independent reference machinery: Weierstrass (Durand–Kerner) iteration
//! and root-set matching. Nothing here touches branches or quadrature.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::poly::Polynomial;

/// Angular offset of the initial guesses, keeps them off symmetric positions.
pub const INITIAL_ANGLE_OFFSET: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct DurandKerner {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Simultaneous iteration `z_j <- z_j - p(z_j) / prod_{i != j} (z_j - z_i)`.
///
/// Starts from points on the circle of radius `1 + max |a_j|` and stops once
/// every update is below `tol * (1 + |z_j|)`.
pub fn durand_kerner(p: &Polynomial, tol: f64, max_iter: usize) -> DurandKerner {
    let p = p.monic();
    let n = p.degree();
    if n == 0 {
        return DurandKerner {
            roots: vec![],
            iterations: 0,
            converged: true,
        };
    }
    let radius = 1.0 + p.coeffs()[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, INITIAL_ANGLE_OFFSET + TAU * j as f64 / n as f64))
        .collect();

    for it in 1..=max_iter {
        let mut done = true;
        for j in 0..n {
            let zj = z[j];
            let denom = z
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, &zi)| acc * (zj - zi));
            let step = if denom.norm() == 0.0 {
                // coincident iterates: nudge apart
                Complex64::new(tol.max(f64::EPSILON) * (1.0 + zj.norm()), 0.0)
            } else {
                p.eval(zj) / denom
            };
            if !step.is_finite() {
                continue;
            }
            z[j] = zj - step;
            if step.norm() > tol * (1.0 + z[j].norm()) {
                done = false;
            }
        }
        if done {
            return DurandKerner {
                roots: z,
                iterations: it,
                converged: true,
            };
        }
    }
    DurandKerner {
        roots: z,
        iterations: max_iter,
        converged: false,
    }
}

/// Roots of `p` with the default oracle settings.
pub fn oracle_roots(p: &Polynomial) -> DurandKerner {
    durand_kerner(p, 1e-15, 5000)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootMatch {
    /// `(index into a, index into b)`
    pub pairing: Vec<(usize, usize)>,
    pub max_distance: f64,
    pub unmatched_a: usize,
    pub unmatched_b: usize,
}

impl RootMatch {
    pub fn is_complete(&self) -> bool {
        self.unmatched_a == 0 && self.unmatched_b == 0
    }
}

/// Pairs two root sets: greedy nearest neighbour, then pairwise swaps while
/// they shrink the larger of the two affected distances.
pub fn match_root_sets(a: &[Complex64], b: &[Complex64]) -> RootMatch {
    let mut candidates: Vec<(f64, usize, usize)> = a
        .iter()
        .enumerate()
        .flat_map(|(i, x)| b.iter().enumerate().map(move |(j, y)| ((x - y).norm(), i, j)))
        .collect();
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut pairing = Vec::with_capacity(a.len().min(b.len()));
    for (_, i, j) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairing.push((i, j));
        }
    }

    let dist = |i: usize, j: usize| (a[i] - b[j]).norm();
    let mut improved = true;
    let mut rounds = 0;
    while improved && rounds < 64 {
        improved = false;
        rounds += 1;
        for s in 0..pairing.len() {
            for t in (s + 1)..pairing.len() {
                let (i1, j1) = pairing[s];
                let (i2, j2) = pairing[t];
                let before = dist(i1, j1).max(dist(i2, j2));
                let after = dist(i1, j2).max(dist(i2, j1));
                if after < before {
                    pairing[s] = (i1, j2);
                    pairing[t] = (i2, j1);
                    improved = true;
                }
            }
        }
    }

    let max_distance = pairing.iter().map(|&(i, j)| dist(i, j)).fold(0.0, f64::max);
    RootMatch {
        unmatched_a: a.len() - pairing.len(),
        unmatched_b: b.len() - pairing.len(),
        pairing,
        max_distance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        v
    }

    #[test]
    fn quadratic_roots() {
        let p = Polynomial::from_real(&[1.0, 6.0, 8.0]).unwrap();
        let dk = oracle_roots(&p);
        assert!(dk.converged);
        let r = sorted_re(dk.roots);
        assert!((r[0] - c(-4.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(-2.0, 0.0)).norm() < 1e-12);

        let r = sorted_re(oracle_roots(&Polynomial::from_real(&[1.0, -3.0, 2.0]).unwrap()).roots);
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cube_roots_of_unity() {
        let p = Polynomial::from_real(&[1.0, 0.0, 0.0, -1.0]).unwrap();
        let dk = oracle_roots(&p);
        let h = 3f64.sqrt() / 2.0;
        let expected = [c(1.0, 0.0), c(-0.5, h), c(-0.5, -h)];
        let m = match_root_sets(&dk.roots, &expected);
        assert!(m.is_complete());
        assert!(m.max_distance < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let p = Polynomial::from_real(&[1.0, 0.0, -2.0, 0.0, 1.0]).unwrap();
        let dk = durand_kerner(&p, 1e-300, 3);
        assert!(!dk.converged);
        assert_eq!(dk.iterations, 3);
        assert_eq!(dk.roots.len(), 4);
    }

    #[test]
    fn matching_examples() {
        let m = match_root_sets(&[c(1.0000001, 0.0), c(-2.0, 0.0)], &[c(1.0, 0.0), c(-2.0, 0.0)]);
        assert!((m.max_distance - 1e-7).abs() < 1e-12);
        assert!(m.is_complete());

        let m = match_root_sets(&[], &[]);
        assert_eq!(m.max_distance, 0.0);
        assert!(m.is_complete());

        let m = match_root_sets(&[c(1.0, 0.0), c(2.0, 0.0)], &[c(2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(m.max_distance, 0.0);
        assert_eq!(m.pairing.len(), 2);
    }

    #[test]
    fn matching_counts_unmatched() {
        let m = match_root_sets(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], &[c(2.0, 0.0)]);
        assert_eq!(m.unmatched_a, 2);
        assert_eq!(m.unmatched_b, 0);
        assert_eq!(m.pairing, vec![(1, 0)]);
    }

    #[test]
    fn swap_pass_fixes_greedy_choice() {
        // greedy takes (1,0) at 0.45 and is left with (0,1) at 1.6;
        // swapping gives 0.55 and 0.6
        let a = [c(0.0, 0.0), c(1.0, 0.0)];
        let b = [c(0.55, 0.0), c(1.6, 0.0)];
        let m = match_root_sets(&a, &b);
        assert!((m.max_distance - 0.6).abs() < 1e-12, "{m:?}");
    }
}
