use num_complex::Complex64;
use thiserror::Error;

use crate::numint::Classification;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Im(tau) must be positive, got tau = {0}")]
    NonPositiveImaginaryPart(Complex64),

    #[error("target tolerance {0:e} outside the supported range [1e-15, 1e-6]")]
    InvalidTolerance(f64),

    #[error("series evaluation cannot reach tolerance {target:e}: {reason}")]
    PrecisionUnreachable { target: f64, reason: String },

    #[error("argument {z} lies within {radius:e} of a lattice pole")]
    PoleProximity { z: Complex64, radius: f64 },

    #[error("Newton polishing for inverse wp failed at w = {w} (residual {residual:e})")]
    NoConvergence { w: Complex64, residual: f64 },

    #[error("singularity p = {0} lies on (or too close to) the 2-torsion points")]
    SingularP(Complex64),

    #[error("z = {z} is within {distance:e} of the singular set")]
    SingularityProximity { z: Complex64, distance: f64 },

    #[error("no route with clearance {required:e} exists (best found {found:e})")]
    NoRouteFound { required: f64, found: f64 },

    #[error("step size underflow at z = {z} (h = {h:e})")]
    StepUnderflow { z: Complex64, h: f64 },

    #[error("integration tolerance {tol:e} unreachable within {max_steps} steps")]
    TolUnreachable { tol: f64, max_steps: usize },

    #[error("classification ambiguous (measure {measure:e} near threshold {threshold:e}): {first:?} or {second:?}")]
    AmbiguousClassification {
        measure: f64,
        threshold: f64,
        first: Classification,
        second: Classification,
    },

    #[error("matrix pair is not a commuting unipotent pair: {0}")]
    NonUnipotentPair(String),

    #[error("degenerate denominator: {0} vanishes")]
    DegenerateDenominator(String),

    #[error("every root of the a1-cubic has wp''(a1) = 0; the half-period case applies")]
    AllRootsDegenerate,

    #[error("degenerate eigenfunction ansatz: {0}")]
    DegenerateAnsatz(String),

    #[error("evaluation path from {from} to {to} crosses a branch cut")]
    BranchCutCrossing { from: Complex64, to: Complex64 },

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("continuation jump at tau = {tau}: nearest candidate {distance:e} away (bound {bound:e})")]
    ContinuationJump {
        tau: Complex64,
        distance: f64,
        bound: f64,
    },

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),
}
