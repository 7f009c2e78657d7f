//! Seeded sampling suites. Sample `i` always draws from stream `i` of the
//! seed, so reports do not depend on the thread count.

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{Claim, Counterexample, Status, VerificationReport};
use crate::engine::random::{random_sequence_with, sample_rng};
use crate::engine::constants::ShortFree;
use crate::engine::search::{run_search, Goal, SearchParams, Symmetry};
use crate::engine::{contains_k_disjoint_zero_sums, DisjointDecision};
use crate::error::Result;
use crate::extraction::{elementary_params, greedy_extract, thm_step_witness, ZeroSumSystem};
use crate::fourier::chevalley_congruences;
use crate::group::AbelianGroup;
use crate::sequence::Sequence;

enum Outcome {
    Pass,
    Fail(Sequence),
    Unknown,
}

fn disjoint_outcome(s: Sequence, k: usize, budget: u64) -> Outcome {
    match contains_k_disjoint_zero_sums(&s, k, budget) {
        DisjointDecision::Yes(_) => Outcome::Pass,
        DisjointDecision::No => Outcome::Fail(s),
        DisjointDecision::Unknown { .. } => Outcome::Unknown,
    }
}

/// Folds per-sample outcomes in sample order.
fn merge(report: &mut VerificationReport, outcomes: Vec<Outcome>, claim: Claim) {
    let mut unknown = 0u64;
    for (i, o) in outcomes.into_iter().enumerate() {
        report.checks += 1;
        match o {
            Outcome::Pass => {}
            Outcome::Unknown => unknown += 1,
            Outcome::Fail(s) => {
                if report.counterexample.is_none() {
                    report.counterexample = Some(Counterexample::new(&s, claim.clone()));
                }
                report.fail(format!("sample {i} violates the claim"));
            }
        }
    }
    if unknown > 0 && report.status == Status::Verified {
        report.status = Status::BudgetExhausted;
        report.notes.push(format!("{unknown} samples undecided within the node budget"));
    }
}

/// Every length-15 sequence over `Z_3^3` contains 3 disjoint zero-sums.
pub fn verify_dav333d(samples: u64, seed: u64, budget: u64) -> Result<VerificationReport> {
    let g = AbelianGroup::elementary(3, 3)?;
    let mut report = VerificationReport::new("dav333d", json!({ "samples": samples, "budget_nodes": budget }));
    report.samples = samples;
    report.seed = seed;
    let outcomes: Vec<Outcome> = (0..samples)
        .into_par_iter()
        .map(|i| disjoint_outcome(random_sequence_with(&g, 15, &mut sample_rng(seed, i)), 3, budget))
        .collect();
    merge(&mut report, outcomes, Claim::HasDisjoint { k: 3 });
    Ok(report)
}

/// A length-14 sequence over `Z_3^3` on which shortest-first greedy
/// extraction stops below three blocks although three disjoint zero-sums
/// exist. Candidates are the 2-term deletions of the first length-16
/// sequence without a zero-sum of length `<= 3`.
pub fn greedy_fails_example() -> Result<Option<(Sequence, ZeroSumSystem)>> {
    let g = AbelianGroup::elementary(3, 3)?;
    let params = SearchParams {
        goal: Goal::FindFirst { len: 16 },
        symmetry: Symmetry::Linear,
        max_len: 16,
        budget_nodes: u64::MAX,
        prefix: Vec::new(),
    };
    let base = match run_search(&ShortFree { group: &g, cap: 3 }, &g, &params, None, None)?.best {
        Some(b) => b,
        None => return Ok(None),
    };
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            let terms = base.iter().enumerate().filter(|&(t, _)| t != i && t != j).map(|(_, &x)| x);
            let s = Sequence::from_indices(&g, terms)?;
            if greedy_extract(&s, None).len() >= 3 {
                continue;
            }
            if let DisjointDecision::Yes(sys) = contains_k_disjoint_zero_sums(&s, 3, u64::MAX) {
                return Ok(Some((s, sys)));
            }
        }
    }
    Ok(None)
}

/// Nested prefixes of lengths 9, 12 and 15 of ordered random draws over
/// `Z_3^3` satisfy the signed zero-sum count congruences.
pub fn verify_chevalley(samples: u64, seed: u64) -> Result<VerificationReport> {
    let g = AbelianGroup::elementary(3, 3)?;
    let mut report = VerificationReport::new("chevalley", json!({ "samples": samples, "lengths": [9, 12, 15] }));
    report.samples = samples;
    report.seed = seed;
    let results: Vec<Result<Vec<(Sequence, bool)>>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let draws: Vec<usize> = (0..15).map(|_| rng.gen_range(0..g.order())).collect();
            [9, 12, 15]
                .into_iter()
                .map(|l| {
                    let s = Sequence::from_indices(&g, draws[..l].iter().copied())?;
                    let holds = chevalley_congruences(&s)?.holds;
                    Ok((s, holds))
                })
                .collect()
        })
        .collect();
    for (i, r) in results.into_iter().enumerate() {
        for (s, holds) in r? {
            report.checks += 1;
            if !holds {
                report.fail(format!("sample {i}, length {}: congruence fails", s.len()));
            }
        }
    }
    Ok(report)
}

/// Random sequences of length `M` over `Z_p^d` contain `k` disjoint
/// zero-sums, for the step witness `(M, k)`.
pub fn verify_step_extraction(p: u64, d: u32, samples: u64, seed: u64, budget: u64) -> Result<VerificationReport> {
    let g = AbelianGroup::elementary(p, d as usize)?;
    let (p, d) = elementary_params(&g)?;
    let w = thm_step_witness(p, d)?;
    let (m, k) = match (usize::try_from(&w.m), usize::try_from(&w.k)) {
        (Ok(m), Ok(k)) if m <= 4096 => (m, k),
        _ => return Err(crate::error::Error::BeyondTier(format!("M = {} is too long to sample", w.m))),
    };
    let mut report = VerificationReport::new(
        "step-extraction",
        json!({ "p": p, "d": d, "M": m, "k": k, "samples": samples, "budget_nodes": budget }),
    );
    report.samples = samples;
    report.seed = seed;
    let outcomes: Vec<Outcome> = (0..samples)
        .into_par_iter()
        .map(|i| disjoint_outcome(random_sequence_with(&g, m, &mut sample_rng(seed, i)), k, budget))
        .collect();
    merge(&mut report, outcomes, Claim::HasDisjoint { k: k as u64 });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dav333d_small_run() {
        let r = verify_dav333d(50, 7, u64::MAX).unwrap();
        assert_eq!(r.status, Status::Verified);
        assert_eq!(r.checks, 50);
    }

    #[test]
    fn constant_sequence_has_three_triples() {
        let g = AbelianGroup::elementary(3, 3).unwrap();
        let s = Sequence::with_multiplicity(&g, &[5], 15).unwrap();
        assert!(contains_k_disjoint_zero_sums(&s, 3, u64::MAX).is_yes());
        assert_eq!(greedy_extract(&s, None).len(), 5);
    }

    #[test]
    fn greedy_can_undercount() {
        let (s, sys) = greedy_fails_example().unwrap().expect("example exists");
        assert_eq!(s.len(), 14);
        assert!(greedy_extract(&s, None).len() < 3);
        assert_eq!(sys.len(), 3);
    }

    #[test]
    fn chevalley_small_run() {
        let r = verify_chevalley(20, 3).unwrap();
        assert_eq!(r.status, Status::Verified);
        assert_eq!(r.checks, 60);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = verify_step_extraction(3, 3, 10, 11, u64::MAX).unwrap();
        let b = verify_step_extraction(3, 3, 10, 11, u64::MAX).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.status, Status::Verified);
    }
}
