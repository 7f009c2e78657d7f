//! Subset-sum dynamic programs over a group: minimal representation lengths,
//! shortest zero-sums and exact-length zero-sums, with deterministic
//! lexicographically smallest witnesses.

use crate::engine::bitset::BitSet;
use crate::group::AbelianGroup;
use crate::sequence::Sequence;

/// `table[g]` is the least number of terms in a nonempty subsequence summing
/// to `g`, or `None` when `g` is not a subsum.
pub fn min_sum_lengths(s: &Sequence) -> Vec<Option<u32>> {
    let g = s.group();
    let n = g.order();
    const INF: u32 = u32::MAX;
    // best allows the empty subsequence at 0
    let mut best = vec![INF; n];
    best[0] = 0;
    let mut zero_nonempty = INF;
    for t in s.terms() {
        let prev = best.clone();
        for (h, &len) in prev.iter().enumerate() {
            if len == INF {
                continue;
            }
            let target = g.add(h, t);
            let cand = len + 1;
            if target == 0 {
                zero_nonempty = zero_nonempty.min(cand);
            } else if cand < best[target] {
                best[target] = cand;
            }
        }
    }
    best[0] = zero_nonempty;
    best.into_iter().map(|v| (v != INF).then_some(v)).collect()
}

/// Set of nonempty subsums.
pub fn subsum_set(s: &Sequence) -> BitSet {
    let g = s.group();
    let mut reach = BitSet::new(g.order());
    for t in s.terms() {
        let mut next = reach.clone();
        next.insert(t);
        for h in reach.iter() {
            next.insert(g.add(h, t));
        }
        reach = next;
    }
    reach
}

pub fn is_zero_sum_free(s: &Sequence) -> bool {
    !subsum_set(s).contains(0)
}

/// `reach[i][c]`: sums of exactly `c` terms drawn from `terms[i..]`.
struct SuffixReach {
    reach: Vec<Vec<BitSet>>,
}

impl SuffixReach {
    fn build(g: &AbelianGroup, terms: &[usize], max_count: usize) -> Self {
        let n = terms.len();
        let mut reach = vec![vec![BitSet::new(g.order()); max_count + 1]; n + 1];
        reach[n][0].insert(0);
        for i in (0..n).rev() {
            let t = terms[i];
            let (head, tail) = reach.split_at_mut(i + 1);
            let (cur, next) = (&mut head[i], &tail[0]);
            for c in 0..=max_count {
                cur[c] = next[c].clone();
                if c > 0 {
                    for h in next[c - 1].iter() {
                        cur[c].insert(g.add(h, t));
                    }
                }
            }
        }
        SuffixReach { reach }
    }

    fn feasible(&self, from: usize, count: usize, target: usize) -> bool {
        self.reach[from][count].contains(target)
    }

    /// Lexicographically smallest choice of `count` terms summing to `target`.
    fn reconstruct(&self, g: &AbelianGroup, terms: &[usize], count: usize, target: usize) -> Option<Vec<usize>> {
        if !self.feasible(0, count, target) {
            return None;
        }
        let mut out = Vec::with_capacity(count);
        let (mut left, mut rest) = (count, target);
        for (i, &t) in terms.iter().enumerate() {
            if left == 0 {
                break;
            }
            let need = g.sub(rest, t);
            if self.feasible(i + 1, left - 1, need) {
                out.push(t);
                left -= 1;
                rest = need;
            }
        }
        debug_assert_eq!(left, 0);
        Some(out)
    }
}

/// Zero-sum subsequence of minimal length, if that length is at most `cap`.
/// Ties are broken by the lexicographically smallest sorted index list.
pub fn shortest_zero_sum(s: &Sequence, cap: Option<usize>) -> Option<(usize, Sequence)> {
    let len = min_sum_lengths(s)[0]? as usize;
    if cap.is_some_and(|c| len > c) {
        return None;
    }
    let terms = s.to_vec();
    let witness = SuffixReach::build(s.group(), &terms, len).reconstruct(s.group(), &terms, len, 0)?;
    Some((len, Sequence::from_indices(s.group(), witness).expect("terms are group elements")))
}

/// A zero-sum subsequence with exactly `n` terms, if one exists.
pub fn zero_sum_of_length(s: &Sequence, n: usize) -> Option<Sequence> {
    if n == 0 || n > s.len() {
        return None;
    }
    let terms = s.to_vec();
    let w = SuffixReach::build(s.group(), &terms, n).reconstruct(s.group(), &terms, n, 0)?;
    Some(Sequence::from_indices(s.group(), w).expect("terms are group elements"))
}

pub fn has_zero_sum_exact_length(s: &Sequence, n: usize) -> bool {
    zero_sum_of_length(s, n).is_some()
}

/// Whether some nonempty subsequence of length `<= cap` sums to zero.
pub fn has_short_zero_sum(s: &Sequence, cap: usize) -> bool {
    min_sum_lengths(s)[0].is_some_and(|l| l as usize <= cap)
}
