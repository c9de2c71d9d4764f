use std::fmt;

use num_complex::Complex64;

/// A point of the Riemann sphere: a finite complex number or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            ExtComplex::Finite(c) => Some(c),
            ExtComplex::Infinity => None,
        }
    }

    /// Chordal distance on the Riemann sphere; bounded by 1 and well defined at infinity.
    pub fn chordal_distance(&self, other: &ExtComplex) -> f64 {
        match (*self, *other) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => 0.0,
            (ExtComplex::Finite(a), ExtComplex::Infinity)
            | (ExtComplex::Infinity, ExtComplex::Finite(a)) => 1.0 / (1.0 + a.norm_sqr()).sqrt(),
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => {
                (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
            }
        }
    }

    /// `|a - b| / (1 + |a|)` for finite values, chordal distance otherwise.
    pub fn relative_distance(&self, other: &ExtComplex) -> f64 {
        match (*self, *other) {
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => (a - b).norm() / (1.0 + a.norm()),
            _ => self.chordal_distance(other),
        }
    }
}

impl From<Complex64> for ExtComplex {
    fn from(c: Complex64) -> Self {
        ExtComplex::Finite(c)
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtComplex::Finite(c) => write!(f, "{c}"),
            ExtComplex::Infinity => write!(f, "inf"),
        }
    }
}
