use thiserror::Error;

/// Errors raised by the walk, analysis and characterization routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("requested {requested} steps, cap is {cap}")]
    StepCap { requested: usize, cap: usize },

    #[error("density matrix spans positions ±{half_width} but step {step} needs ±{step}")]
    Dimension { half_width: usize, step: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

impl WalkError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Self::InvalidParameter(msg.into())
    }

    /// True for errors caused by a compute cap rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Self::StepCap { .. } | Self::Dimension { .. })
    }
}

pub type Result<T, E = WalkError> = std::result::Result<T, E>;
