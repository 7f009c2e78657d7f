//! Exact decision of "contains `k` pairwise disjoint zero-sums".
//!
//! Greedy shortest-first extraction is tried first. Otherwise a recursion
//! on the smallest remaining element `x` either spends one copy of `x`
//! unused or removes a minimal zero-sum block containing `x`; failures are
//! memoized on the residual multiset.

use std::collections::HashSet;

use crate::engine::bitset::BitSet;
use crate::engine::subsums::min_sum_lengths;
use crate::extraction::{greedy_extract, ZeroSumSystem};
use crate::group::AbelianGroup;
use crate::sequence::Sequence;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DisjointDecision {
    Yes(ZeroSumSystem),
    No,
    /// The node budget ran out before a decision.
    Unknown { nodes: u64 },
}

impl DisjointDecision {
    pub fn is_yes(&self) -> bool {
        matches!(self, DisjointDecision::Yes(_))
    }
}

struct Solver<'a> {
    group: &'a AbelianGroup,
    budget: u64,
    nodes: u64,
    failed: HashSet<(Vec<u32>, usize)>,
}

enum Step {
    Found(Vec<Sequence>),
    Fail,
    OutOfBudget,
}

impl Solver<'_> {
    /// Minimal zero-sums of `rest` that contain one copy of `x`, shortest first.
    fn minimal_blocks(&self, rest: &Sequence, x: usize) -> Vec<Sequence> {
        let g = self.group;
        let support: Vec<(usize, u32)> = rest.support().collect();
        let mut out = Vec::new();
        let mut reach = BitSet::new(g.order());
        reach.insert(x);
        let mut chosen = vec![x];
        let mut avail: Vec<u32> = support.iter().map(|&(_, m)| m).collect();
        // the copy of x itself is not available to the completion
        if let Some(i) = support.iter().position(|&(e, _)| e == x) {
            avail[i] -= 1;
        }
        self.extend_block(&support, &mut avail, 0, &mut chosen, g.neg(x), &reach, &mut out);
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.to_vec().cmp(&b.to_vec())));
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_block(
        &self,
        support: &[(usize, u32)],
        avail: &mut [u32],
        from: usize,
        chosen: &mut Vec<usize>,
        need: usize,
        reach: &BitSet,
        out: &mut Vec<Sequence>,
    ) {
        let g = self.group;
        for i in from..support.len() {
            if avail[i] == 0 {
                continue;
            }
            let e = support[i].0;
            if e == need {
                chosen.push(e);
                out.push(Sequence::from_indices(g, chosen.iter().copied()).expect("group elements"));
                chosen.pop();
                continue;
            }
            // P + e must stay zero-sum free
            if reach.contains(g.neg(e)) {
                continue;
            }
            let mut next = reach.clone();
            next.insert(e);
            for h in reach.iter() {
                next.insert(g.add(h, e));
            }
            avail[i] -= 1;
            chosen.push(e);
            self.extend_block(support, avail, i, chosen, g.sub(need, e), &next, out);
            chosen.pop();
            avail[i] += 1;
        }
    }

    fn solve(&mut self, s: &Sequence, k: usize) -> Step {
        if k == 0 {
            return Step::Found(Vec::new());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::OutOfBudget;
        }
        let Some(shortest) = min_sum_lengths(s)[0] else {
            return Step::Fail;
        };
        if (shortest as usize) * k > s.len() {
            return Step::Fail;
        }
        let key = (s.multiplicities().to_vec(), k);
        if self.failed.contains(&key) {
            return Step::Fail;
        }
        let zero = self.group.zero();
        let result = if s.multiplicity(zero) > 0 {
            let block = Sequence::from_indices(self.group, [zero]).expect("zero");
            let rest = s.difference(&block).expect("contained");
            self.prepend(block, &rest, k - 1)
        } else {
            let x = s.support().next().expect("nonempty").0;
            let mut outcome = Step::Fail;
            for block in self.minimal_blocks(s, x) {
                let rest = s.difference(&block).expect("contained");
                match self.prepend(block, &rest, k - 1) {
                    Step::Fail => {}
                    other => {
                        outcome = other;
                        break;
                    }
                }
            }
            if let Step::Fail = outcome {
                let mut rest = s.clone();
                rest.remove_one(x);
                outcome = self.solve(&rest, k);
            }
            outcome
        };
        if let Step::Fail = result {
            self.failed.insert(key);
        }
        result
    }

    fn prepend(&mut self, block: Sequence, rest: &Sequence, k: usize) -> Step {
        match self.solve(rest, k) {
            Step::Found(mut blocks) => {
                blocks.insert(0, block);
                Step::Found(blocks)
            }
            other => other,
        }
    }
}

/// Decides whether `s` contains `k` pairwise disjoint nonempty zero-sum
/// subsequences, spending at most `budget` recursion nodes.
pub fn contains_k_disjoint_zero_sums(s: &Sequence, k: usize, budget: u64) -> DisjointDecision {
    let group = s.group();
    if k == 0 {
        return DisjointDecision::Yes(ZeroSumSystem::from_blocks(s, Vec::new()).expect("empty system"));
    }
    if s.len() < k {
        return DisjointDecision::No;
    }
    let greedy = greedy_extract(s, None);
    if greedy.blocks().len() >= k {
        let blocks = greedy.blocks()[..k].to_vec();
        return DisjointDecision::Yes(ZeroSumSystem::from_blocks(s, blocks).expect("greedy blocks"));
    }
    let mut solver = Solver { group, budget, nodes: 0, failed: HashSet::new() };
    match solver.solve(s, k) {
        Step::Found(blocks) => {
            DisjointDecision::Yes(ZeroSumSystem::from_blocks(s, blocks).expect("solver blocks"))
        }
        Step::Fail => DisjointDecision::No,
        Step::OutOfBudget => DisjointDecision::Unknown { nodes: solver.nodes },
    }
}
