use thiserror::Error;

use lame_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 input error, 3 mathematical inconsistency, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 4,
            CliError::Core(e) => match e {
                CoreError::NonPositiveImaginaryPart(_)
                | CoreError::InvalidTolerance(_)
                | CoreError::SingularP(_)
                | CoreError::SingularityProximity { .. } => 2,
                CoreError::InconsistentInput(_)
                | CoreError::DegenerateDenominator(_)
                | CoreError::AllRootsDegenerate
                | CoreError::DegenerateAnsatz(_)
                | CoreError::SingularConfiguration(_) => 3,
                CoreError::PrecisionUnreachable { .. }
                | CoreError::PoleProximity { .. }
                | CoreError::NoConvergence { .. }
                | CoreError::NoRouteFound { .. }
                | CoreError::StepUnderflow { .. }
                | CoreError::TolUnreachable { .. }
                | CoreError::AmbiguousClassification { .. }
                | CoreError::NonUnipotentPair(_)
                | CoreError::BranchCutCrossing { .. }
                | CoreError::ContinuationJump { .. } => 4,
            },
        }
    }

    /// Short machine-readable kind, e.g. `NonPositiveImaginaryPart`.
    pub fn kind(&self) -> String {
        match self {
            CliError::Input(_) => "InputError".into(),
            CliError::Io(_) => "IoError".into(),
            CliError::Verification(_) => "VerificationFailed".into(),
            CliError::Core(e) => {
                let dbg = format!("{e:?}");
                dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
            }
        }
    }
}
