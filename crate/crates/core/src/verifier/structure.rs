//! Structural searches: extremal short-free sequences in `Z_p^2`, the
//! `Z_7^2` line-capacity configuration, and short zero-sums in `Z_2^d`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{has_shape, Claim, Counterexample, Status, VerificationReport};
use crate::engine::constants::ShortFree;
use crate::engine::random::{random_sequence_with, sample_rng};
use crate::engine::search::{run_search, Checkpoint, Constraint, Goal, SearchParams, Symmetry};
use crate::engine::subsums::has_short_zero_sum;
use crate::error::{Error, Result};
use crate::extraction::sqrt2_pow_floor;
use crate::group::AbelianGroup;
use crate::sequence::Sequence;

fn collect_short_free(p: u64, budget: u64, symmetry: Symmetry) -> Result<(AbelianGroup, crate::engine::search::SearchOutcome)> {
    let g = AbelianGroup::elementary(p, 2)?;
    let c = ShortFree { group: &g, cap: p as usize };
    let len = 3 * (p as usize - 1);
    let params = SearchParams {
        goal: Goal::Collect { len },
        symmetry,
        max_len: len,
        budget_nodes: budget,
        prefix: Vec::new(),
    };
    let out = run_search(&c, &g, &params, None, None)?;
    Ok((g, out))
}

/// Every length-`(3p-3)` sequence over `Z_p^2` without a zero-sum of length
/// `<= p` has shape `a^(p-1) b^(p-1) c^(p-1)`.
pub fn verify_propb_structure(p: u64, budget: u64, symmetry: Symmetry) -> Result<VerificationReport> {
    if !crate::group::is_prime(p) || p < 3 {
        return Err(Error::InvalidArgument(format!("need an odd prime, got {p}")));
    }
    let mut report = VerificationReport::new("propB", json!({ "p": p, "budget_nodes": budget, "symmetry": symmetry }));
    let (g, out) = collect_short_free(p, budget, symmetry)?;
    report.nodes = out.nodes;
    report.checks = out.collected.len() as u64;
    for seq in &out.collected {
        let s = Sequence::from_indices(&g, seq.iter().copied())?;
        if !has_shape(&s, p as u32) {
            report.counterexample = Some(Counterexample::new(&s, Claim::ShortFreeShape { cap: p }));
            report.fail(format!("sequence {:?} has another shape", s.coords()));
            break;
        }
    }
    if report.status == Status::Verified && !out.complete {
        report.status = Status::BudgetExhausted;
    }
    report.details = json!({ "extremal_sequences": out.collected.len(), "complete": out.complete });
    Ok(report)
}

/// Orbit representatives under `GL(2, p)` of the extremal sequences.
pub fn propb_classes(p: u64, budget: u64, symmetry: Symmetry) -> Result<BTreeSet<Vec<usize>>> {
    let (g, out) = collect_short_free(p, budget, symmetry)?;
    if !out.complete {
        return Err(Error::BeyondTier(format!("propB search for p = {p} ran out of budget")));
    }
    let autos = g.linear_automorphisms()?;
    Ok(out
        .collected
        .iter()
        .map(|seq| {
            autos
                .iter()
                .map(|perm| {
                    let mut img: Vec<usize> = seq.iter().map(|&x| perm[x]).collect();
                    img.sort_unstable();
                    img
                })
                .min()
                .expect("identity is an automorphism")
        })
        .collect())
}

/// Search-space reductions for the `Z_7^2` configuration search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Z7Flags {
    /// Forbid `x` and `2x` together; replacing `2x` by `x` keeps every
    /// shortest representation at least as long and keeps line counts.
    pub no_double_pairs: bool,
    /// At most one line holds two different elements; relies on the hand
    /// case analysis, so a verified run with this flag is conditional.
    pub one_mixed_line: bool,
    /// Require no zero-sum of length `<= 7`; off only for sanity runs.
    pub short_free: bool,
    pub target_len: usize,
}

impl Default for Z7Flags {
    fn default() -> Self {
        Z7Flags { no_double_pairs: true, one_mixed_line: false, short_free: true, target_len: 15 }
    }
}

/// Cyclic subgroups of `Z_7^2` and the line of each nonzero element.
#[derive(Clone, Debug)]
pub struct Z7Line {
    pub line_of: Vec<usize>,
    pub lines: Vec<Vec<usize>>,
}

impl Z7Line {
    pub fn new(g: &AbelianGroup) -> Self {
        let mut line_of = vec![usize::MAX; g.order()];
        let mut lines = Vec::new();
        for e in 1..g.order() {
            if line_of[e] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = g.cyclic_subgroup(e).into_iter().filter(|&x| x != 0).collect();
            for &m in &members {
                line_of[m] = lines.len();
            }
            lines.push(members);
        }
        Z7Line { line_of, lines }
    }
}

const EMPTY: u8 = u8::MAX;

#[derive(Clone)]
struct Z7State {
    lens: Vec<u16>,
    terms: Vec<[u8; 2]>,
    mixed: u8,
}

struct Z7Constraint<'a> {
    group: &'a AbelianGroup,
    lines: Z7Line,
    short: ShortFree<'a>,
    flags: Z7Flags,
}

impl Constraint for Z7Constraint<'_> {
    type State = Z7State;

    fn root(&self) -> Z7State {
        Z7State {
            lens: self.short.root(),
            terms: vec![[EMPTY; 2]; self.lines.lines.len()],
            mixed: 0,
        }
    }

    fn push(&self, st: &Z7State, _seq: &[usize], g: usize) -> Option<Z7State> {
        if g == 0 {
            return None;
        }
        let l = self.lines.line_of[g];
        let slot = st.terms[l];
        if slot[1] != EMPTY {
            return None;
        }
        let mut next = st.clone();
        if slot[0] != EMPTY {
            let x = slot[0] as usize;
            if self.flags.no_double_pairs && x != g && (self.group.add(x, x) == g || self.group.add(g, g) == x) {
                return None;
            }
            if x != g {
                if self.flags.one_mixed_line && st.mixed >= 1 {
                    return None;
                }
                next.mixed += 1;
            }
            next.terms[l][1] = g as u8;
        } else {
            next.terms[l][0] = g as u8;
        }
        if self.flags.short_free {
            next.lens = self.short.extend(&st.lens, g)?;
        }
        Some(next)
    }

    // Each line holds at most two terms, and only lines with an element `>= next_min` can still grow.
    fn extension_bound(&self, st: &Z7State, _seq: &[usize], next_min: usize) -> usize {
        self.lines
            .lines
            .iter()
            .zip(&st.terms)
            .filter(|(members, _)| members.iter().any(|&m| m >= next_min))
            .map(|(_, t)| t.iter().filter(|&&x| x == EMPTY).count())
            .sum()
    }

    fn descriptor(&self) -> String {
        format!(
            "z7/short{}/pairs{}/mixed{}",
            self.flags.short_free, self.flags.no_double_pairs, self.flags.one_mixed_line
        )
    }
}

/// No zero term, no zero-sum of length `<= 7`, and at most two terms on every line of `Z_7^2`.
pub fn z7_constraint_holds(s: &Sequence) -> bool {
    let g = s.group();
    if g.as_elementary() != Some((7, 2)) || s.multiplicity(0) > 0 {
        return false;
    }
    let lines = Z7Line::new(g);
    let mut count = vec![0u32; lines.lines.len()];
    for (e, m) in s.support() {
        count[lines.line_of[e]] += m;
    }
    count.iter().all(|&c| c <= 2) && !has_short_zero_sum(s, 7)
}

/// Searches `Z_7^2` for a sequence of `flags.target_len` terms with no
/// zero-sum of length `<= 7` and at most two terms per line, starting from `prefix`.
pub fn verify_z7_lemma(
    budget: u64,
    flags: Z7Flags,
    prefix: &[Vec<u64>],
    resume: Option<&Checkpoint>,
    mut sink: Option<&mut dyn FnMut(&Checkpoint) -> Result<()>>,
) -> Result<VerificationReport> {
    let g = AbelianGroup::elementary(7, 2)?;
    let prefix_idx = prefix.iter().map(|c| g.index_of(c)).collect::<Result<Vec<_>>>()?;
    let c = Z7Constraint { group: &g, lines: Z7Line::new(&g), short: ShortFree { group: &g, cap: 7 }, flags };
    let params = SearchParams {
        goal: Goal::FindFirst { len: flags.target_len },
        // the flags are invariant under GL(2, 7); a fixed prefix is not
        symmetry: if prefix_idx.is_empty() { Symmetry::Linear } else { Symmetry::None },
        max_len: flags.target_len,
        budget_nodes: budget,
        prefix: prefix_idx,
    };
    let mut last: Option<Checkpoint> = None;
    let mut record = |cp: &Checkpoint| -> Result<()> {
        last = Some(cp.clone());
        match sink.as_deref_mut() {
            Some(s) => s(cp),
            None => Ok(()),
        }
    };
    let out = run_search(&c, &g, &params, resume, Some(&mut record))?;
    let mut report = VerificationReport::new(
        "z7",
        json!({ "budget_nodes": budget, "flags": flags, "prefix": prefix }),
    );
    report.nodes = out.nodes;
    if out.found {
        let s = Sequence::from_indices(&g, out.best.clone().expect("found"))?;
        report.counterexample = Some(Counterexample::new(&s, Claim::NoZ7Configuration));
        report.fail(format!("configuration of length {} found", s.len()));
    } else if !out.complete {
        report.status = Status::BudgetExhausted;
        report.checkpoint = last;
    }
    if flags.one_mixed_line && report.status == Status::Verified {
        report.notes.push("conditional on the one-mixed-line reduction".into());
    }
    report.details = json!({ "complete": out.complete, "found": out.found });
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum LindstromMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

/// First search for a sequence of `len` terms over `Z_2^d` with no zero-sum of length `<= cap`.
fn find_short_free(g: &AbelianGroup, cap: usize, len: usize, budget: u64) -> Result<(Option<Vec<usize>>, bool, u64)> {
    let c = ShortFree { group: g, cap };
    let params = SearchParams {
        goal: Goal::FindFirst { len },
        symmetry: Symmetry::Linear,
        max_len: len,
        budget_nodes: budget,
        prefix: Vec::new(),
    };
    let out = run_search(&c, g, &params, None, None)?;
    Ok((out.found.then(|| out.best.expect("found")), out.complete, out.nodes))
}

/// Zero-sums of length `<= 3` in `2^(d-1) + 1` terms, the extremal witness of
/// length `2^(d-1)`, and zero-sums of length `<= 4` in `floor(2^((d+1)/2)) + 1` terms.
pub fn verify_lindstrom(d: u32, mode: LindstromMode, budget: u64) -> Result<VerificationReport> {
    if !(2..=16).contains(&d) {
        return Err(Error::InvalidArgument(format!("d = {d} outside 2..=16")));
    }
    let g = AbelianGroup::elementary(2, d as usize)?;
    let mut report = VerificationReport::new("lindstrom", json!({ "d": d, "mode": mode, "budget_nodes": budget }));
    let len3 = (1usize << (d - 1)) + 1;
    let len4 = usize::try_from(sqrt2_pow_floor(d + 1)).expect("small") + 1;

    let witness = Sequence::from_indices(&g, g.elements().filter(|&e| g.coords(e)[0] == 1))?;
    report.checks += 1;
    let witness_ok = witness.len() == len3 - 1 && !has_short_zero_sum(&witness, 3);
    if !witness_ok {
        report.counterexample = Some(Counterexample::new(&witness, Claim::NotZeroSumFree));
        report.fail("extremal witness has a zero-sum of length <= 3".into());
    }

    match mode {
        LindstromMode::Exhaustive => {
            for (cap, len) in [(3usize, len3), (4, len4)] {
                let (hit, complete, nodes) = find_short_free(&g, cap, len, budget)?;
                report.nodes += nodes;
                report.checks += 1;
                if let Some(seq) = hit {
                    let s = Sequence::from_indices(&g, seq)?;
                    report.counterexample = Some(Counterexample::new(&s, Claim::HasShortZeroSum { cap: cap as u64 }));
                    report.fail(format!("{len} terms without a zero-sum of length <= {cap}"));
                } else if !complete && report.status == Status::Verified {
                    report.status = Status::BudgetExhausted;
                }
            }
        }
        LindstromMode::Sampled { samples, seed } => {
            report.seed = seed;
            report.samples = samples;
            for (stream, (cap, len)) in [(3usize, len3), (4, len4)].into_iter().enumerate() {
                for i in 0..samples {
                    let mut rng = sample_rng(seed, 2 * i + stream as u64);
                    let s = random_sequence_with(&g, len, &mut rng);
                    report.checks += 1;
                    if !has_short_zero_sum(&s, cap) {
                        report.counterexample = Some(Counterexample::new(&s, Claim::HasShortZeroSum { cap: cap as u64 }));
                        report.fail(format!("sample {i}: no zero-sum of length <= {cap}"));
                        break;
                    }
                }
            }
        }
    }
    report.details = json!({ "len_cap3": len3, "len_cap4": len4, "witness_len": witness.len(), "witness_valid": witness_ok });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propb_p3() {
        let r = verify_propb_structure(3, u64::MAX, Symmetry::Linear).unwrap();
        assert_eq!(r.status, Status::Verified);
        let g = AbelianGroup::elementary(3, 2).unwrap();
        let w = Sequence::from_coords(&g, &[vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1], vec![1, 1], vec![1, 1]]).unwrap();
        assert!(!has_short_zero_sum(&w, 3));
        assert!(has_shape(&w, 3));
    }

    #[test]
    fn z7_lines() {
        let g = AbelianGroup::elementary(7, 2).unwrap();
        let l = Z7Line::new(&g);
        assert_eq!(l.lines.len(), 8);
        assert!(l.lines.iter().all(|m| m.len() == 6));
    }

    #[test]
    fn z7_sanity_without_short_free() {
        let flags = Z7Flags { short_free: false, no_double_pairs: false, ..Default::default() };
        let r = verify_z7_lemma(1_000_000, flags, &[], None, None).unwrap();
        assert_eq!(r.status, Status::Counterexample);
        let s = r.counterexample.unwrap();
        assert_eq!(s.sequence.len(), 15);
    }

    #[test]
    fn lindstrom_small() {
        let r = verify_lindstrom(3, LindstromMode::Exhaustive, u64::MAX).unwrap();
        assert_eq!(r.status, Status::Verified);
        let r = verify_lindstrom(8, LindstromMode::Sampled { samples: 10, seed: 1 }, 0).unwrap();
        assert_eq!(r.status, Status::Verified);
    }
}
