//! Zero-sum detection and exact computation of zero-sum constants.

pub mod bitset;
pub mod constants;
pub mod disjoint;
pub mod random;
pub mod search;
pub mod subsums;

use serde::{Deserialize, Serialize};

pub use constants::{
    compute, d_k, davenport, eta, s_eq, s_exact, s_le, ConstantKind, ConstantResult,
};
pub use disjoint::{contains_k_disjoint_zero_sums, DisjointDecision};
pub use random::{random_sequence, sample_rng};
pub use search::Symmetry;
pub use subsums::{
    has_short_zero_sum, has_zero_sum_exact_length, is_zero_sum_free, min_sum_lengths,
    shortest_zero_sum, zero_sum_of_length,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    Exhaustive,
    SymmetryReduced,
    Sampled,
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Exact,
    LowerWitness,
    UpperVerified,
}

/// How a value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCertificate {
    pub status: CertificateStatus,
    pub nodes_explored: u64,
    pub seed: u64,
    pub bound_kind: BoundKind,
}

impl SearchCertificate {
    /// Exhaustive and symmetry-reduced runs always certify an exact value.
    pub fn is_consistent(&self) -> bool {
        !matches!(self.status, CertificateStatus::Exhaustive | CertificateStatus::SymmetryReduced)
            || self.bound_kind == BoundKind::Exact
    }
}

/// Exact-decision limits for [`contains_k_disjoint_zero_sums`].
pub const EXACT_TIER_MAX_LEN: usize = 20;
pub const EXACT_TIER_MAX_ORDER: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub budget_nodes: u64,
    pub symmetry: Symmetry,
    /// Candidates never grow past this length; reaching it signals an infinite constant.
    pub max_len: usize,
    /// `D_k` searches run only for groups up to this order.
    pub dk_max_order: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget_nodes: 2_000_000_000,
            symmetry: Symmetry::CoordinatePermutations,
            max_len: 256,
            dk_max_order: EXACT_TIER_MAX_ORDER,
        }
    }
}
