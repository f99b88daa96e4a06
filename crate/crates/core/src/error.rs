use thiserror::Error;

pub type Result<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A parameter violates its documented range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The operation was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The effective-mass or first-order expansion is not valid for these
    /// parameters (singular denominators, non-positive curvature).
    #[error("model breakdown: {0}")]
    Breakdown(String),

    /// Evaluation exactly at the band-edge divergence.
    #[error("singular point: evaluated at the band edge omega = {omega}")]
    Singular { omega: f64 },

    #[error("no convergence after {iterations} iterations: {detail}")]
    NoConvergence { iterations: usize, detail: String },
}

impl ModelError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        ModelError::InvalidParameter { name, reason: reason.into() }
    }

    /// True for failures of the physical approximation rather than of the
    /// caller's input.
    pub fn is_breakdown(&self) -> bool {
        matches!(self, ModelError::Breakdown(_))
    }
}
