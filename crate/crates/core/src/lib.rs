//! Monodromy of the generalized Lamé equation on a torus `C / (Z + Z tau)`.
//!
//! [`elliptic`] evaluates the Weierstrass functions, [`glepot`] builds the
//! potential with apparent singularities at `±p`, [`numint`] transports solutions
//! and extracts the monodromy normal form, [`closedform`] solves the inverse
//! problem in closed form, and [`pvi`] checks the Painlevé VI connection.

pub mod closedform;
pub mod elliptic;
pub mod error;
pub mod ext;
pub mod glepot;
pub mod numint;
pub mod pvi;

pub use num_complex::Complex64;

pub use closedform::{solve_rh, CaseTag, RhSolution};
pub use elliptic::LatticeData;
pub use error::{Error, Result};
pub use ext::ExtComplex;
pub use glepot::{b_from, ApparencyReport, GleParams, LAME_N};
pub use numint::{
    build_cycles, monodromy_matrices, monodromy_rep, monodromy_rep_with, Classification,
    Execution, Mat2, MonodromyData, MonodromyMatrices, MonodromyRep, NormalForm, PathSpec, Sign,
};
pub use pvi::{PviParams, TheoremASolution};
