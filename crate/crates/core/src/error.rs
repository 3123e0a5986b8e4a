use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("digraph generation failed: graph became empty after trimming round {round} (last nonempty round had {remaining} vertices)")]
    GenerationFailed { round: usize, remaining: usize },

    #[error("power iteration did not converge after {iterations} iterations (last estimate rho = {last_estimate})")]
    Convergence { iterations: usize, last_estimate: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("encoding stuck at payload position {position}: working vertex has no outgoing arc")]
    EncodingStuck { position: usize },

    #[error("sequence leaves the coding digraph at position {position}")]
    Path { position: usize },

    #[error("check value mismatch")]
    Integrity,

    #[error("candidate overflow: more than {limit} candidates")]
    CandidateOverflow { limit: usize },

    #[error("malformed digraph file: {0}")]
    Format(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
