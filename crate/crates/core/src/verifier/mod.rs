//! Verification suites: structural searches, sampled guarantees, and
//! exact-arithmetic inequality chains.

mod chains;
mod sampling;
mod structure;

use serde::{Deserialize, Serialize};

pub use chains::{verify_p2count, verify_section3_chain, verify_section5_chain, Sec3Grid};
pub use sampling::{verify_chevalley, verify_dav333d, verify_step_extraction, greedy_fails_example};
pub use structure::{
    propb_classes, verify_lindstrom, verify_propb_structure, verify_z7_lemma, z7_constraint_holds,
    LindstromMode, Z7Flags, Z7Line,
};

use crate::engine::search::Checkpoint;
use crate::engine::subsums::{has_short_zero_sum, is_zero_sum_free};
use crate::engine::{contains_k_disjoint_zero_sums, DisjointDecision};
use crate::error::Result;
use crate::group::AbelianGroup;
use crate::sequence::Sequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Counterexample,
    BudgetExhausted,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Verified => 0,
            Status::Counterexample => 1,
            Status::BudgetExhausted => 2,
        }
    }
}

/// The property a counterexample sequence violates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "property", rename_all = "kebab-case")]
pub enum Claim {
    /// Sequences of this length without a zero-sum of length `<= cap` have shape `a^(p-1) b^(p-1) c^(p-1)`.
    ShortFreeShape { cap: u64 },
    /// Sequences of this length have a zero-sum of length `<= cap`.
    HasShortZeroSum { cap: u64 },
    /// Sequences of this length contain `k` disjoint zero-sums.
    HasDisjoint { k: u64 },
    /// No sequence of this length avoids zero-sums of length `<= 7` with at most two terms per line.
    NoZ7Configuration,
    /// The sequence is not zero-sum free.
    NotZeroSumFree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub group: String,
    pub sequence: Vec<Vec<u64>>,
    #[serde(flatten)]
    pub claim: Claim,
}

impl Counterexample {
    pub fn new(seq: &Sequence, claim: Claim) -> Self {
        Counterexample { group: seq.group().to_string(), sequence: seq.coords(), claim }
    }

    /// Re-checks, with engine primitives only, that the sequence really violates the claim.
    pub fn revalidate(&self) -> Result<bool> {
        let g: AbelianGroup = self.group.parse()?;
        let s = Sequence::from_coords(&g, &self.sequence)?;
        Ok(match &self.claim {
            Claim::ShortFreeShape { cap } => {
                !has_short_zero_sum(&s, *cap as usize) && !has_shape(&s, *cap as u32)
            }
            Claim::HasShortZeroSum { cap } => !has_short_zero_sum(&s, *cap as usize),
            Claim::HasDisjoint { k } => {
                matches!(contains_k_disjoint_zero_sums(&s, *k as usize, u64::MAX), DisjointDecision::No)
            }
            Claim::NoZ7Configuration => z7_constraint_holds(&s),
            Claim::NotZeroSumFree => is_zero_sum_free(&s),
        })
    }
}

/// Exactly three distinct elements, each of multiplicity `p - 1`.
pub fn has_shape(s: &Sequence, p: u32) -> bool {
    let mult: Vec<u32> = s.support().map(|(_, m)| m).collect();
    mult.len() == 3 && mult.iter().all(|&m| m == p - 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub parameters: serde_json::Value,
    pub status: Status,
    pub counterexample: Option<Counterexample>,
    pub nodes: u64,
    pub samples: u64,
    pub seed: u64,
    /// Individual checks performed.
    pub checks: u64,
    pub notes: Vec<String>,
    pub details: serde_json::Value,
    pub checkpoint: Option<Checkpoint>,
}

impl VerificationReport {
    pub fn new(suite: &str, parameters: serde_json::Value) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            parameters,
            status: Status::Verified,
            counterexample: None,
            nodes: 0,
            samples: 0,
            seed: 0,
            checks: 0,
            notes: Vec::new(),
            details: serde_json::Value::Null,
            checkpoint: None,
        }
    }

    /// Records a failed arithmetic check; the first failure is kept in `notes`.
    pub fn fail(&mut self, note: String) {
        if self.status != Status::Counterexample {
            self.notes.push(note);
        }
        self.status = Status::Counterexample;
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}
