//! Numerical monodromy: cycles, transport and the normal form.

mod normal_form;
mod paths;
mod rk;

pub use normal_form::{
    extract_normal_form, Classification, MonodromyData, NormalForm, Sign, AMBIGUITY_FACTOR,
    CLASSIFICATION_THRESHOLD, PAIR_TOLERANCE,
};
pub use paths::{
    build_cycles, polyline_distance, polyline_slit_distance, slit_endpoint, PathSpec, BASE_GRID,
    LOOP_VERTICES,
};
pub use rk::{transport, Mat2, MAX_STEPS, MIN_STEP};

use crate::error::Result;
use crate::glepot::GleParams;

/// Whether the four transports of [`monodromy_rep_with`] share threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// The four transported matrices in the row convention `rho(ab) = rho(a) rho(b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyMatrices {
    pub m1: Mat2,
    pub m2: Mat2,
    pub mgp: Mat2,
    pub mgm: Mat2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyRep {
    pub matrices: MonodromyMatrices,
    pub normal_form: NormalForm,
}

impl MonodromyRep {
    pub fn classification(&self) -> Classification {
        self.normal_form.classification()
    }

    pub fn data(&self) -> Option<MonodromyData> {
        self.normal_form.data()
    }
}

/// Transports along all four cycles and converts transfer matrices to monodromy matrices.
pub fn monodromy_matrices(
    params: &GleParams,
    spec: &PathSpec,
    tol: f64,
    execution: Execution,
) -> Result<MonodromyMatrices> {
    let paths = [&spec.ell1, &spec.ell2, &spec.gamma_plus, &spec.gamma_minus];
    let results: Vec<Result<Mat2>> = match execution {
        Execution::Sequential => paths.iter().map(|p| transport(p, params, tol)).collect(),
        Execution::Parallel => std::thread::scope(|scope| {
            let handles: Vec<_> = paths
                .iter()
                .map(|p| scope.spawn(move || transport(p, params, tol)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("transport thread panicked"))
                .collect()
        }),
    };
    let mut it = results.into_iter().map(|r| r.map(|t| t.transpose()));
    let mut next = || it.next().expect("four transports");
    Ok(MonodromyMatrices {
        m1: next()?,
        m2: next()?,
        mgp: next()?,
        mgm: next()?,
    })
}

/// Monodromy representation with classification, using parallel transports.
pub fn monodromy_rep(params: &GleParams, spec: &PathSpec, tol: f64) -> Result<MonodromyRep> {
    monodromy_rep_with(params, spec, tol, Execution::Parallel)
}

pub fn monodromy_rep_with(
    params: &GleParams,
    spec: &PathSpec,
    tol: f64,
    execution: Execution,
) -> Result<MonodromyRep> {
    let matrices = monodromy_matrices(params, spec, tol, execution)?;
    let normal_form = extract_normal_form(&matrices.m1, &matrices.m2)?;
    Ok(MonodromyRep {
        matrices,
        normal_form,
    })
}
