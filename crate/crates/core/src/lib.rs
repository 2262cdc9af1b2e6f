//! Exact integer homology bookkeeping for pure mapping class groups of
//! finite-type stages exhausting genus-zero and genus-one surfaces.
//!
//! The crate models surface signatures and the three gluing moves (punctured
//! disk, punctured annulus, pair of pants), builds first-homology
//! presentations of the stage mapping class groups, realizes the transition
//! maps between consecutive stages, and layers three consumers on top:
//!
//! * [`braid`] — pure braid words, abelianization by pair-generator exponent
//!   sums, and an independent signed-crossing linking-number oracle;
//! * [`homs`] — integer cochains on exhaustion stages, the `phi` family on
//!   the flute surface, consistency and compact-support checking, and
//!   truncated evaluation of infinite twist products;
//! * [`obstruction`] — the genus-one trace that drives any nonzero candidate
//!   cochain into a capped contradiction or an escaping witness sequence.
//!
//! All arithmetic is exact: coefficient overflow is reported as an error,
//! never wrapped. Every value is immutable after construction and every
//! operation is a pure function, so concurrent use needs no synchronization.

pub mod braid;
pub mod error;
pub mod homology;
pub mod homs;
pub mod obstruction;
pub mod surface;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
