//! Zero-sum constants of finite abelian groups.
//!
//! The crate computes Davenport-type constants exactly for small groups,
//! extracts systems of disjoint zero-sums under staged length caps, evaluates
//! Fourier-bias density-increment thresholds over `Z_5^d`, and runs
//! exact-arithmetic verification suites for the inequality chains used in
//! the inductive bound `D(G) <= exp(G) + |G|/exp(G) - 1`.

pub mod bounds;
pub mod engine;
pub mod error;
pub mod exact;
pub mod extraction;
pub mod fourier;
pub mod group;
pub mod sequence;
pub mod verifier;
pub mod witness;

pub use error::{Error, Result};
pub use group::{AbelianGroup, GroupElement};
pub use sequence::Sequence;

/// Version string embedded in every persisted record.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
