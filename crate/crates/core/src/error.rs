//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown boundary label `{label}`")]
    UnknownBoundary { label: String },

    #[error("unknown puncture label `{label}`")]
    UnknownPuncture { label: String },

    #[error("label `{label}` collides with an existing label")]
    LabelCollision { label: String },

    #[error("invalid signature: {reason}")]
    InvalidSignature { reason: String },

    #[error("invalid gluing operation: {reason}")]
    InvalidOp { reason: String },

    #[error("expected genus {expected}, found genus {found}")]
    WrongGenus { expected: u8, found: u8 },

    #[error("unsupported input: {reason}")]
    Unsupported { reason: String },

    #[error("stage {stage}: {source}")]
    AtStage { stage: usize, source: Box<Error> },

    #[error("symbol `{symbol}` is outside the presentation basis")]
    BasisMismatch { symbol: String },

    #[error("no value assigned to basis symbol `{symbol}`")]
    MissingAssignment { symbol: String },

    #[error("braid word is not pure: strand {strand} ends at position {ends_at}")]
    NotPure { strand: usize, ends_at: usize },

    #[error("strand count mismatch: {left} vs {right}")]
    StrandMismatch { left: usize, right: usize },

    #[error("subset mode would leave a finite complement; an infinite complement is required")]
    InfiniteComplementViolation,

    #[error("not a flute exhaustion: {reason}")]
    WrongExhaustion { reason: String },

    #[error("curve sequence fails the escape precondition: {reason}")]
    NotEscaping { reason: String },

    #[error("assignment violates a stage relation: {detail}")]
    RelationViolation { detail: String },

    #[error("integer overflow in exact arithmetic")]
    ArithmeticOverflow,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Wrap an error with the exhaustion stage index it occurred at.
    pub fn at_stage(self, stage: usize) -> Error {
        Error::AtStage {
            stage,
            source: Box::new(self),
        }
    }

    /// Stable machine-readable code, used by report envelopes.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownBoundary { .. } => "unknown_boundary",
            Error::UnknownPuncture { .. } => "unknown_puncture",
            Error::LabelCollision { .. } => "label_collision",
            Error::InvalidSignature { .. } => "invalid_signature",
            Error::InvalidOp { .. } => "invalid_op",
            Error::WrongGenus { .. } => "wrong_genus",
            Error::Unsupported { .. } => "unsupported",
            Error::AtStage { source, .. } => source.code(),
            Error::BasisMismatch { .. } => "basis_mismatch",
            Error::MissingAssignment { .. } => "missing_assignment",
            Error::NotPure { .. } => "not_pure",
            Error::StrandMismatch { .. } => "strand_mismatch",
            Error::InfiniteComplementViolation => "infinite_complement_violation",
            Error::WrongExhaustion { .. } => "wrong_exhaustion",
            Error::NotEscaping { .. } => "not_escaping",
            Error::RelationViolation { .. } => "relation_violation",
            Error::ArithmeticOverflow => "arithmetic_overflow",
            Error::Parse(_) => "parse_error",
        }
    }
}
