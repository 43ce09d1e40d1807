use thiserror::Error;

/// Errors raised by the numerical routines and file readers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoewnerError {
    #[error("point {0} lies on the open slit and no side hint was given")]
    AmbiguousSide(String),

    #[error("sampling radius {radius} is too small: residue {residue:.3e} exceeds {limit:.1e}")]
    RadiusTooSmall { radius: f64, residue: f64, limit: f64 },

    #[error("adaptive step fell below {min_step:.3e} at t = {t}")]
    StepUnderflow { t: f64, min_step: f64 },

    #[error("imaginary part decreased along the flow: {before} -> {after}")]
    ImaginaryDecrease { before: f64, after: f64 },

    #[error("boundary trace has empty support [{alpha}, {beta}]")]
    EmptySupport { alpha: f64, beta: f64 },

    #[error("degenerate zipper step {step}: {reason}")]
    DegenerateStep { step: usize, reason: String },

    #[error("invalid driving function: {0}")]
    InvalidDrive(String),

    #[error("invalid slit: {0}")]
    InvalidSlit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl LoewnerError {
    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            LoewnerError::StepUnderflow { .. }
                | LoewnerError::ImaginaryDecrease { .. }
                | LoewnerError::RadiusTooSmall { .. }
                | LoewnerError::DegenerateStep { .. }
        )
    }
}

pub type Result<T, E = LoewnerError> = std::result::Result<T, E>;
