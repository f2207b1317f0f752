use thiserror::Error;

use crate::model::{EdgeId, SetId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unbounded linear program")]
    Unbounded,

    #[error("{stage}: precondition failed: {detail}")]
    Precondition { stage: &'static str, detail: String },

    #[error("{stage}: internal invariant violated: {detail}")]
    Invariant { stage: &'static str, detail: String },

    #[error("{what} exceeds the configured cap of {cap}")]
    TooLarge { what: String, cap: u64 },

    #[error("edge {0} is not in the ground set")]
    ForeignEdge(EdgeId),

    #[error("set {0} is not η-well-connected")]
    NotWellConnected(SetId),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn invariant(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            stage,
            detail: detail.into(),
        }
    }

    pub fn precondition(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            stage,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
