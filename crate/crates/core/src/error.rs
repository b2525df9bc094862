use std::fmt;

/// Stage of the decoder that rejected its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Recovering the small-block hash of the redundancy from the repetition field.
    Repetition,
    /// Recovering the redundancy field from its small-block hash.
    Redundancy,
    /// Brute-force recovery of the synchronization vector.
    SyncVector,
    /// Block-wise recovery of the dense sequence.
    DenseDecode,
    /// Inverting the dense transformation.
    Transform,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Phase::Repetition => "repetition",
            Phase::Redundancy => "redundancy",
            Phase::SyncVector => "sync-vector",
            Phase::DenseDecode => "dense-decode",
            Phase::Transform => "transform",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("decode failure: {0}")]
    DecodeFailure(String),
    #[error("decode failure in {phase} phase: {source}")]
    Phase {
        phase: Phase,
        #[source]
        source: Box<Error>,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn decode(msg: impl Into<String>) -> Self {
        Error::DecodeFailure(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Tags the error with the decoder phase it surfaced in.
    pub fn in_phase(self, phase: Phase) -> Self {
        match self {
            Error::Phase { .. } => self,
            other => Error::Phase {
                phase,
                source: Box::new(other),
            },
        }
    }

    /// The phase tag, if any.
    pub fn phase(&self) -> Option<Phase> {
        match self {
            Error::Phase { phase, .. } => Some(*phase),
            _ => None,
        }
    }

    /// True for errors caused by corrupted or inconsistent input to a decoder.
    pub fn is_decode_failure(&self) -> bool {
        match self {
            Error::DecodeFailure(_) => true,
            Error::Phase { source, .. } => source.is_decode_failure() || matches!(**source, Error::InvalidArgument(_)),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
