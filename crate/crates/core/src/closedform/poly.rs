//! Low-degree complex polynomials (coefficients in ascending order).

use nalgebra::DMatrix;
use num_complex::Complex64;

type C = Complex64;

/// Relative size below which a leading coefficient counts as zero.
pub const DEGREE_DROP_TOL: f64 = 1e-12;

pub fn eval(coeffs: &[C], x: C) -> C {
    coeffs.iter().rev().fold(C::default(), |acc, &a| acc * x + a)
}

fn derivative(coeffs: &[C]) -> Vec<C> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * k as f64)
        .collect()
}

pub fn mul(a: &[C], b: &[C]) -> Vec<C> {
    let mut out = vec![C::default(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or_default() + b.get(k).copied().unwrap_or_default())
        .collect()
}

pub fn scale(a: &[C], s: C) -> Vec<C> {
    a.iter().map(|&x| x * s).collect()
}

/// Number of leading coefficients that are negligible relative to the largest one.
pub fn degree_drop(coeffs: &[C]) -> usize {
    let big = coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
    coeffs
        .iter()
        .rev()
        .take_while(|a| a.norm() <= DEGREE_DROP_TOL * big)
        .count()
        .min(coeffs.len().saturating_sub(1))
}

/// Finite roots, with multiplicity, after discarding negligible leading coefficients.
/// Companion-matrix eigenvalues (complex Schur form) followed by Newton polishing.
pub fn roots(coeffs: &[C]) -> Vec<C> {
    let trimmed = &coeffs[..coeffs.len() - degree_drop(coeffs)];
    let n = trimmed.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = trimmed[n];
    let companion = DMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -trimmed[i] / lead
        } else if i == j + 1 {
            C::new(1.0, 0.0)
        } else {
            C::default()
        }
    });
    let (_, t) = companion.schur().unpack();
    let d = derivative(trimmed);
    t.diagonal()
        .iter()
        .map(|&x0| polish(trimmed, &d, x0))
        .collect()
}

fn polish(p: &[C], d: &[C], mut x: C) -> C {
    for _ in 0..8 {
        let fx = eval(p, x);
        let dx = eval(d, x);
        if dx.norm() == 0.0 {
            break;
        }
        let step = fx / dx;
        let next = x - step;
        if eval(p, next).norm() >= fx.norm() {
            break;
        }
        x = next;
        if step.norm() <= 1e-16 * (1.0 + x.norm()) {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn recovers_known_roots() {
        let r = [c(1.0, 2.0), c(-0.5, 0.1), c(3.0, -1.0)];
        let p = r
            .iter()
            .fold(vec![c(1.0, 0.0)], |acc, &x| mul(&acc, &[-x, c(1.0, 0.0)]));
        let p = scale(&p, c(0.3, -2.0));
        let found = roots(&p);
        assert_eq!(found.len(), 3);
        for x in r {
            assert!(found.iter().any(|y| (x - *y).norm() < 1e-12));
        }
    }

    #[test]
    fn degree_drop_is_detected() {
        let p = [c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0), c(1e-20, 0.0)];
        assert_eq!(degree_drop(&p), 1);
        let found = roots(&p);
        assert_eq!(found.len(), 2);
        assert!(found.iter().all(|&x| eval(&p[..3], x).norm() < 1e-12));
        assert!(roots(&[c(1.0, 0.0)]).is_empty());
    }

    #[test]
    fn add_pads_shorter_operand() {
        let s = add(&[c(1.0, 0.0)], &[c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(s, vec![c(2.0, 0.0), c(2.0, 0.0)]);
    }
}
