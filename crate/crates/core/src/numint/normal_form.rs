//! Classification of commuting pairs in `SL(2, C)` and the triangular normal form.

use std::fmt;

use num_complex::Complex64;

use super::rk::Mat2;
use crate::error::{Error, Result};
use crate::ext::ExtComplex;

/// Rank threshold separating the two classes.
pub const CLASSIFICATION_THRESHOLD: f64 = 1e-6;

/// Width factor of the band around the threshold where no decision is made.
pub const AMBIGUITY_FACTOR: f64 = 10.0;

/// Tolerance on `det = 1` and on the commutator for accepting a pair.
pub const PAIR_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    CompletelyReducible,
    NotCompletelyReducible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

/// Monodromy data `(eps1, eps2, C)` of a not completely reducible pair:
/// `M1 = eps1 (I + N)`, `M2 = eps2 (I + C N)` for a nilpotent `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyData {
    pub eps1: Sign,
    pub eps2: Sign,
    pub c: ExtComplex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormalForm {
    CompletelyReducible,
    Unipotent(MonodromyData),
}

impl NormalForm {
    pub fn classification(&self) -> Classification {
        match self {
            NormalForm::CompletelyReducible => Classification::CompletelyReducible,
            NormalForm::Unipotent(_) => Classification::NotCompletelyReducible,
        }
    }

    pub fn data(&self) -> Option<MonodromyData> {
        match self {
            NormalForm::CompletelyReducible => None,
            NormalForm::Unipotent(d) => Some(*d),
        }
    }
}

fn inner(a: &Mat2, b: &Mat2) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Decides the class of a commuting pair of unimodular matrices and, when not
/// completely reducible, extracts `(eps1, eps2, C)`.
pub fn extract_normal_form(m1: &Mat2, m2: &Mat2) -> Result<NormalForm> {
    let scale = |m: &Mat2| m.norm().max(1.0);
    for (name, m) in [("M1", m1), ("M2", m2)] {
        let det_err = (m.determinant() - 1.0).norm();
        if det_err > PAIR_TOLERANCE * scale(m).powi(2) {
            return Err(Error::NonUnipotentPair(format!(
                "det {name} deviates from 1 by {det_err:e}"
            )));
        }
    }
    let comm = (m1 * m2 - m2 * m1).norm();
    if comm > PAIR_TOLERANCE * scale(m1) * scale(m2) {
        return Err(Error::NonUnipotentPair(format!(
            "commutator norm {comm:e}"
        )));
    }

    let thr = CLASSIFICATION_THRESHOLD;
    let band = |x: f64| x >= thr / AMBIGUITY_FACTOR && x <= thr * AMBIGUITY_FACTOR;
    let ambiguous = |measure: f64| Error::AmbiguousClassification {
        measure,
        threshold: thr,
        first: Classification::CompletelyReducible,
        second: Classification::NotCompletelyReducible,
    };

    // Distinct eigenvalues: tr^2/4 - det is the squared half-gap.
    let gap = |m: &Mat2| (m.trace() * m.trace() / 4.0 - m.determinant()).norm() / scale(m).powi(2);
    let split = gap(m1).max(gap(m2));
    if band(split) {
        return Err(ambiguous(split));
    }
    if split > thr {
        return Ok(NormalForm::CompletelyReducible);
    }

    let eps1 = Sign::of(m1.trace().re);
    let eps2 = Sign::of(m2.trace().re);
    let n1 = m1.map(|x| x * eps1.value()) - Mat2::identity();
    let n2 = m2.map(|x| x * eps2.value()) - Mat2::identity();
    let (r1, r2) = (n1.norm() / scale(m1), n2.norm() / scale(m2));
    let nilpotent = r1.max(r2);
    if band(nilpotent) {
        return Err(ambiguous(nilpotent));
    }
    if nilpotent < thr {
        return Ok(NormalForm::CompletelyReducible);
    }
    let c = if r1 < thr {
        ExtComplex::Infinity
    } else {
        ExtComplex::Finite(inner(&n1, &n2) / inner(&n1, &n1))
    };
    Ok(NormalForm::Unipotent(MonodromyData { eps1, eps2, c }))
}
