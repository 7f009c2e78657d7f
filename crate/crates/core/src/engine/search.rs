//! Depth-first search over multisets of group elements.
//!
//! Candidates are enumerated as index-sorted lists, so every multiset is
//! visited once. The tree is split at a fixed depth into independent tasks
//! that run on the rayon pool in batches; results are merged in task order
//! and node budgets are charged as if the tasks had run sequentially, which
//! makes outcomes and node counts independent of the thread schedule.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::AbelianGroup;

/// Incrementally maintained constraint on a sorted candidate list.
pub trait Constraint: Sync {
    type State: Clone + Send + Sync;

    fn root(&self) -> Self::State;

    /// State after appending `g`, or `None` when `seq + g` is rejected.
    fn push(&self, state: &Self::State, seq: &[usize], g: usize) -> Option<Self::State>;

    /// Upper bound on the number of further terms that can still be appended
    /// when every new term has index `>= next_min`.
    fn extension_bound(&self, _state: &Self::State, _seq: &[usize], _next_min: usize) -> usize {
        usize::MAX
    }

    /// Stable description used to match checkpoints against problems.
    fn descriptor(&self) -> String;
}

/// Symmetry filter applied to the first (smallest) element of a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    None,
    /// Permutations of coordinates with equal invariant factors.
    CoordinatePermutations,
    /// All of `GL(d, p)` on `Z_p^d`; falls back to coordinate permutations elsewhere.
    Linear,
}

impl Symmetry {
    fn allows_first(self, group: &AbelianGroup, g: usize) -> bool {
        match self {
            Symmetry::None => true,
            Symmetry::Linear if group.as_elementary().is_some() => g <= 1,
            _ => group.coordinate_orbit_min(g) == g,
        }
    }

    pub fn is_reducing(self) -> bool {
        self != Symmetry::None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Goal {
    /// Longest accepted sequence; only lengths `>= seed` are reported.
    Longest { seed: usize },
    /// Every accepted sequence with exactly this length.
    Collect { len: usize },
    /// Lexicographically first accepted sequence with this length.
    FindFirst { len: usize },
}

impl Goal {
    fn target(&self) -> usize {
        match *self {
            Goal::Longest { seed } => seed,
            Goal::Collect { len } | Goal::FindFirst { len } => len,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchParams {
    pub goal: Goal,
    pub symmetry: Symmetry,
    /// Candidates never grow beyond this length.
    pub max_len: usize,
    /// Total node budget, counting nodes spent before a resumed checkpoint.
    pub budget_nodes: u64,
    /// Elements that every candidate starts with (bypasses the symmetry filter).
    pub prefix: Vec<usize>,
}

/// Resumable position of a search: tasks `< next_task` are done.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub descriptor: String,
    pub split_depth: usize,
    pub task_count: usize,
    pub next_task: usize,
    pub nodes: u64,
    pub best: Option<Vec<usize>>,
    pub collected: Vec<Vec<usize>>,
    pub found: bool,
    pub hit_max_len: bool,
}

pub const CHECKPOINT_SCHEMA: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchOutcome {
    pub best: Option<Vec<usize>>,
    pub collected: Vec<Vec<usize>>,
    pub nodes: u64,
    /// The whole tree was explored (or the goal was met for `FindFirst`).
    pub complete: bool,
    pub found: bool,
    /// Some branch reached `max_len`; a `Longest` result is then only a lower bound.
    pub hit_max_len: bool,
}

struct Task<S> {
    seq: Vec<usize>,
    state: S,
}

struct Dfs<'a, C: Constraint> {
    c: &'a C,
    group: &'a AbelianGroup,
    params: &'a SearchParams,
    budget: u64,
    nodes: u64,
    aborted: bool,
    found: bool,
    hit_max: bool,
    best: Option<Vec<usize>>,
    collected: Vec<Vec<usize>>,
    /// Stop descending at this depth and emit a task instead.
    split_at: Option<usize>,
    tasks: Vec<Task<C::State>>,
}

impl<'a, C: Constraint> Dfs<'a, C> {
    fn new(c: &'a C, group: &'a AbelianGroup, params: &'a SearchParams, budget: u64) -> Self {
        Dfs {
            c,
            group,
            params,
            budget,
            nodes: 0,
            aborted: false,
            found: false,
            hit_max: false,
            best: None,
            collected: Vec::new(),
            split_at: None,
            tasks: Vec::new(),
        }
    }

    fn required_len(&self) -> usize {
        match self.params.goal {
            Goal::Longest { seed } => match &self.best {
                Some(b) => b.len() + 1,
                None => seed,
            },
            _ => self.params.goal.target(),
        }
    }

    fn visit(&mut self, seq: &mut Vec<usize>, state: &C::State) {
        if self.split_at == Some(seq.len()) {
            self.tasks.push(Task { seq: seq.clone(), state: state.clone() });
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        match self.params.goal {
            Goal::Longest { .. } => {
                if seq.len() >= self.required_len() {
                    self.best = Some(seq.clone());
                }
            }
            Goal::Collect { len } => {
                if seq.len() == len {
                    self.collected.push(seq.clone());
                    return;
                }
            }
            Goal::FindFirst { len } => {
                if seq.len() == len {
                    self.best = Some(seq.clone());
                    self.found = true;
                    return;
                }
            }
        }
        if seq.len() >= self.params.max_len {
            self.hit_max = true;
            return;
        }
        let start = if seq.len() > self.params.prefix.len() {
            *seq.last().unwrap()
        } else {
            0
        };
        if self.split_at.is_none() {
            let bound = self.c.extension_bound(state, seq, start);
            if seq.len().saturating_add(bound) < self.required_len() {
                return;
            }
        }
        let first = seq.len() == self.params.prefix.len();
        for g in start..self.group.order() {
            if first && !self.params.symmetry.allows_first(self.group, g) {
                continue;
            }
            if let Some(next) = self.c.push(state, seq, g) {
                seq.push(g);
                self.visit(seq, &next);
                seq.pop();
                if self.aborted || self.found {
                    return;
                }
            }
        }
    }
}

fn choose_split_depth<C: Constraint>(c: &C, group: &AbelianGroup, params: &SearchParams, root: &(Vec<usize>, C::State)) -> usize {
    // Deepen until there are enough tasks to balance; depends on the problem only.
    let base = root.0.len();
    let mut depth = base + 1;
    while depth < base + 4 && depth < params.max_len {
        let mut probe = Dfs::new(c, group, params, 1 << 16);
        probe.split_at = Some(depth);
        let mut seq = root.0.clone();
        probe.visit(&mut seq, &root.1);
        if probe.aborted || probe.found || probe.tasks.len() >= 256 {
            break;
        }
        depth += 1;
    }
    depth
}

fn better(a: &[usize], b: &[usize]) -> bool {
    a.len() > b.len() || (a.len() == b.len() && a < b)
}

/// Runs the search; `checkpoint` resumes a previous run and `sink` receives a
/// fresh checkpoint after every batch of tasks.
pub fn run_search<C: Constraint>(
    c: &C,
    group: &AbelianGroup,
    params: &SearchParams,
    resume: Option<&Checkpoint>,
    mut sink: Option<&mut dyn FnMut(&Checkpoint) -> Result<()>>,
) -> Result<SearchOutcome> {
    // Root: apply the fixed prefix.
    let mut state = c.root();
    let mut seq = Vec::new();
    for &g in &params.prefix {
        state = match c.push(&state, &seq, g) {
            Some(s) => s,
            None => {
                return Ok(SearchOutcome { nodes: 1, complete: true, ..Default::default() });
            }
        };
        seq.push(g);
    }
    let root = (seq, state);
    let split_depth = choose_split_depth(c, group, params, &root);

    // Split phase.
    let mut split = Dfs::new(c, group, params, params.budget_nodes);
    split.split_at = Some(split_depth);
    let mut s = root.0.clone();
    split.visit(&mut s, &root.1);
    let tasks = std::mem::take(&mut split.tasks);

    let descriptor = format!("{}|{:?}|{:?}|max{}|prefix{:?}", c.descriptor(), params.goal, params.symmetry, params.max_len, params.prefix);
    let mut out = SearchOutcome {
        best: split.best.clone(),
        collected: split.collected.clone(),
        nodes: split.nodes.min(params.budget_nodes),
        complete: false,
        found: split.found,
        hit_max_len: split.hit_max,
    };
    let mut next_task = 0;
    if let Some(cp) = resume {
        if cp.descriptor != descriptor || cp.split_depth != split_depth || cp.task_count != tasks.len() {
            return Err(Error::Checkpoint(format!("checkpoint is for '{}', not '{}'", cp.descriptor, descriptor)));
        }
        out.best = cp.best.clone();
        out.collected = cp.collected.clone();
        out.nodes = cp.nodes;
        out.found = cp.found;
        out.hit_max_len = cp.hit_max_len;
        next_task = cp.next_task;
    } else if split.aborted {
        return Ok(out);
    }
    if out.found {
        out.complete = true;
        return Ok(out);
    }

    let checkpoint = |out: &SearchOutcome, next_task: usize| Checkpoint {
        schema_version: CHECKPOINT_SCHEMA,
        descriptor: descriptor.clone(),
        split_depth,
        task_count: tasks.len(),
        next_task,
        nodes: out.nodes,
        best: out.best.clone(),
        collected: out.collected.clone(),
        found: out.found,
        hit_max_len: out.hit_max_len,
    };
    if resume.is_none() {
        if let Some(sink) = sink.as_deref_mut() {
            sink(&checkpoint(&out, 0))?;
        }
    }

    let batch = (rayon::current_num_threads() * 4).max(64);
    while next_task < tasks.len() {
        let end = (next_task + batch).min(tasks.len());
        let remaining = params.budget_nodes.saturating_sub(out.nodes);
        let run_task = |t: &Task<C::State>, cap: u64| {
            let mut dfs = Dfs::new(c, group, params, cap);
            let mut seq = t.seq.clone();
            dfs.visit(&mut seq, &t.state);
            dfs
        };
        let results: Vec<_> = tasks[next_task..end].par_iter().map(|t| run_task(t, remaining)).collect();
        for (offset, mut r) in results.into_iter().enumerate() {
            let remaining = params.budget_nodes.saturating_sub(out.nodes);
            if r.nodes > remaining || r.aborted {
                r = run_task(&tasks[next_task + offset], remaining);
            }
            out.nodes += r.nodes.min(remaining);
            if let Some(b) = r.best {
                if out.best.as_ref().is_none_or(|cur| better(&b, cur)) {
                    out.best = Some(b);
                }
            }
            out.collected.extend(r.collected);
            out.hit_max_len |= r.hit_max;
            if r.aborted {
                return Ok(out);
            }
            if r.found {
                out.found = true;
                out.complete = true;
                return Ok(out);
            }
        }
        next_task = end;
        if let Some(sink) = sink.as_deref_mut() {
            sink(&checkpoint(&out, next_task))?;
        }
    }
    out.complete = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Accepts strictly increasing lists (subsets) of bounded size.
    struct Subsets;
    impl Constraint for Subsets {
        type State = ();
        fn root(&self) {}
        fn push(&self, _: &(), seq: &[usize], g: usize) -> Option<()> {
            (seq.last() != Some(&g)).then_some(())
        }
        fn descriptor(&self) -> String {
            "subsets".into()
        }
    }

    #[test]
    fn collects_all_subsets_of_a_size() {
        let g = AbelianGroup::cyclic(7).unwrap();
        let params = SearchParams {
            goal: Goal::Collect { len: 3 },
            symmetry: Symmetry::None,
            max_len: 3,
            budget_nodes: u64::MAX,
            prefix: vec![],
        };
        let out = run_search(&Subsets, &g, &params, None, None).unwrap();
        assert!(out.complete);
        assert_eq!(out.collected.len(), 35);
        let mut sorted = out.collected.clone();
        sorted.sort();
        assert_eq!(sorted, out.collected);
    }

    #[test]
    fn budget_cut_is_deterministic_and_resumable() {
        let g = AbelianGroup::cyclic(11).unwrap();
        let params = SearchParams {
            goal: Goal::Longest { seed: 0 },
            symmetry: Symmetry::None,
            max_len: 11,
            budget_nodes: 300,
            prefix: vec![],
        };
        let a = run_search(&Subsets, &g, &params, None, None).unwrap();
        let b = run_search(&Subsets, &g, &params, None, None).unwrap();
        assert_eq!(a, b);
        assert!(!a.complete);
        assert_eq!(a.nodes, 300);

        let full = SearchParams { budget_nodes: u64::MAX, ..params.clone() };
        let mut checkpoints = Vec::new();
        let mut sink = |cp: &Checkpoint| {
            checkpoints.push(cp.clone());
            Ok(())
        };
        let whole = run_search(&Subsets, &g, &full, None, Some(&mut sink)).unwrap();
        assert_eq!(whole.nodes, 1 << 11);
        assert_eq!(whole.best.as_ref().unwrap().len(), 11);
        let first = checkpoints.first().unwrap().clone();
        let resumed = run_search(&Subsets, &g, &full, Some(&first), None).unwrap();
        assert_eq!(resumed, whole);
    }
}
