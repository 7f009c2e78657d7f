//! Exact computation of `D(G)`, `eta(G)`, `s(G)`, `s_{<=n}(G)`, `s_{=n}(G)`
//! and `D_k(G)` as one plus the length of a longest sequence avoiding the
//! respective zero-sum pattern.

use serde::{Deserialize, Serialize};

use crate::engine::bitset::BitSet;
use crate::engine::disjoint::{contains_k_disjoint_zero_sums, DisjointDecision};
use crate::engine::search::{run_search, Checkpoint, Constraint, Goal, SearchParams};
use crate::engine::{BoundKind, CertificateStatus, SearchCertificate, SearchConfig};
use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::sequence::Sequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum ConstantKind {
    Davenport,
    Eta,
    S,
    SLe(u64),
    SEq(u64),
    Dk(u64),
}

impl std::fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstantKind::Davenport => write!(f, "D"),
            ConstantKind::Eta => write!(f, "eta"),
            ConstantKind::S => write!(f, "s"),
            ConstantKind::SLe(n) => write!(f, "s_le:{n}"),
            ConstantKind::SEq(n) => write!(f, "s_eq:{n}"),
            ConstantKind::Dk(k) => write!(f, "d_k:{k}"),
        }
    }
}

impl std::str::FromStr for ConstantKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let num = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad parameter in constant '{s}'")))
        };
        match s.split_once(':') {
            None => match s {
                "D" | "d" | "davenport" => Ok(ConstantKind::Davenport),
                "eta" => Ok(ConstantKind::Eta),
                "s" => Ok(ConstantKind::S),
                _ => Err(Error::Parse(format!("unknown constant '{s}'"))),
            },
            Some(("s_le", n)) => Ok(ConstantKind::SLe(num(n)?)),
            Some(("s_eq", n)) => Ok(ConstantKind::SEq(num(n)?)),
            Some(("d_k", k)) => Ok(ConstantKind::Dk(num(k)?)),
            _ => Err(Error::Parse(format!("unknown constant '{s}'"))),
        }
    }
}

impl ConstantKind {
    /// Resolves `eta` and `s` to their explicit length parameter.
    pub fn normalized(self, group: &AbelianGroup) -> ConstantKind {
        match self {
            ConstantKind::Eta => ConstantKind::SLe(group.exponent()),
            ConstantKind::S => ConstantKind::SEq(group.exponent()),
            k => k,
        }
    }

    /// Whether `seq` avoids the zero-sum pattern counted by this constant,
    /// i.e. whether it is a valid lower-bound witness.
    pub fn is_avoiding(self, seq: &Sequence) -> bool {
        use crate::engine::subsums::*;
        match self.normalized(seq.group()) {
            ConstantKind::Davenport => is_zero_sum_free(seq),
            ConstantKind::SLe(n) => !has_short_zero_sum(seq, n as usize),
            ConstantKind::SEq(n) => !has_zero_sum_exact_length(seq, n as usize),
            ConstantKind::Dk(k) => matches!(
                contains_k_disjoint_zero_sums(seq, k as usize, u64::MAX),
                DisjointDecision::No
            ),
            ConstantKind::Eta | ConstantKind::S => unreachable!(),
        }
    }
}

/// Zero-sum free: keeps the set of nonempty subsums.
pub struct ZeroSumFree<'a> {
    pub group: &'a AbelianGroup,
}

impl Constraint for ZeroSumFree<'_> {
    type State = BitSet;

    fn root(&self) -> BitSet {
        BitSet::new(self.group.order())
    }

    fn push(&self, sums: &BitSet, _seq: &[usize], g: usize) -> Option<BitSet> {
        if g == 0 || sums.contains(self.group.neg(g)) {
            return None;
        }
        let mut next = sums.clone();
        next.insert(g);
        for h in sums.iter() {
            next.insert(self.group.add(h, g));
        }
        Some(next)
    }

    // Each appended term creates at least one new nonzero subsum.
    fn extension_bound(&self, sums: &BitSet, _seq: &[usize], _next_min: usize) -> usize {
        self.group.order() - 1 - sums.count()
    }

    fn descriptor(&self) -> String {
        format!("zero-sum-free/{}", self.group)
    }
}

/// No zero-sum of length `<= cap`: keeps minimal representation lengths,
/// saturated at `cap + 1`.
pub struct ShortFree<'a> {
    pub group: &'a AbelianGroup,
    pub cap: usize,
}

impl ShortFree<'_> {
    pub fn extend(&self, lens: &[u16], g: usize) -> Option<Vec<u16>> {
        let cap = self.cap as u16;
        let mut next = lens.to_vec();
        for (h, &l) in lens.iter().enumerate() {
            let base = if h == 0 { 0 } else { l };
            if base >= cap {
                continue;
            }
            let t = self.group.add(h, g);
            if base + 1 < next[t] {
                next[t] = base + 1;
            }
        }
        (next[0] > cap).then_some(next)
    }
}

impl Constraint for ShortFree<'_> {
    type State = Vec<u16>;

    fn root(&self) -> Vec<u16> {
        vec![self.cap as u16 + 1; self.group.order()]
    }

    fn push(&self, lens: &Vec<u16>, _seq: &[usize], g: usize) -> Option<Vec<u16>> {
        self.extend(lens, g)
    }

    fn descriptor(&self) -> String {
        format!("short-free<={}/{}", self.cap, self.group)
    }
}

/// No zero-sum of length exactly `n`: keeps the sums of exactly `c` terms for `c <= n`.
pub struct ExactFree<'a> {
    pub group: &'a AbelianGroup,
    pub n: usize,
}

impl Constraint for ExactFree<'_> {
    type State = Vec<BitSet>;

    fn root(&self) -> Vec<BitSet> {
        let mut layers = vec![BitSet::new(self.group.order()); self.n + 1];
        layers[0].insert(0);
        layers
    }

    fn push(&self, layers: &Vec<BitSet>, _seq: &[usize], g: usize) -> Option<Vec<BitSet>> {
        let mut next = layers.clone();
        for c in 1..=self.n {
            for h in layers[c - 1].iter() {
                next[c].insert(self.group.add(h, g));
            }
        }
        (!next[self.n].contains(0)).then_some(next)
    }

    fn descriptor(&self) -> String {
        format!("exact-free={}/{}", self.n, self.group)
    }
}

/// Lacks `k` pairwise disjoint zero-sums (exact decision at every node).
pub struct LacksDisjoint<'a> {
    pub group: &'a AbelianGroup,
    pub k: usize,
}

impl Constraint for LacksDisjoint<'_> {
    type State = ();

    fn root(&self) {}

    fn push(&self, _: &(), seq: &[usize], g: usize) -> Option<()> {
        let s = Sequence::from_indices(self.group, seq.iter().copied().chain([g])).ok()?;
        match contains_k_disjoint_zero_sums(&s, self.k, u64::MAX) {
            DisjointDecision::No => Some(()),
            _ => None,
        }
    }

    fn descriptor(&self) -> String {
        format!("lacks-{}-disjoint/{}", self.k, self.group)
    }
}

/// A computed constant with its extremal witness and provenance.
#[derive(Clone, Debug)]
pub struct ConstantResult {
    pub group: AbelianGroup,
    pub constant: ConstantKind,
    /// Exact value, or a lower bound when the certificate is not exact.
    pub value: u64,
    pub witness: Sequence,
    pub certificate: SearchCertificate,
}

/// `(p-1)` copies of each generator: a zero-sum free sequence of length `M(G) - 1`.
pub fn standard_zero_sum_free(group: &AbelianGroup) -> Sequence {
    let mut s = Sequence::empty(group);
    let r = group.rank();
    for (i, &n) in group.invariant_factors().iter().enumerate() {
        let mut coords = vec![0u64; r];
        coords[i] = 1;
        let e = group.index_of(&coords).expect("generator");
        for _ in 0..n - 1 {
            s.push(e);
        }
    }
    s
}

fn finish(
    group: &AbelianGroup,
    constant: ConstantKind,
    cfg: &SearchConfig,
    out: crate::engine::search::SearchOutcome,
    fallback: Sequence,
) -> Result<ConstantResult> {
    let witness = match out.best {
        Some(b) if b.len() >= fallback.len() => Sequence::from_indices(group, b)?,
        _ => fallback,
    };
    if out.hit_max_len {
        return Err(Error::InfiniteConstant(format!(
            "{constant} of {group}: avoiding sequences reach the length cap {}",
            cfg.max_len
        )));
    }
    let exact = out.complete;
    let status = match (exact, cfg.symmetry.is_reducing()) {
        (false, _) => CertificateStatus::BudgetExhausted,
        (true, true) => CertificateStatus::SymmetryReduced,
        (true, false) => CertificateStatus::Exhaustive,
    };
    Ok(ConstantResult {
        group: group.clone(),
        constant,
        value: witness.len() as u64 + 1,
        witness,
        certificate: SearchCertificate {
            status,
            nodes_explored: out.nodes,
            seed: 0,
            bound_kind: if exact { BoundKind::Exact } else { BoundKind::LowerWitness },
        },
    })
}

fn longest<C: Constraint>(
    group: &AbelianGroup,
    constant: ConstantKind,
    c: &C,
    cfg: &SearchConfig,
    seed: Sequence,
    resume: Option<&Checkpoint>,
    sink: Option<&mut dyn FnMut(&Checkpoint) -> Result<()>>,
) -> Result<ConstantResult> {
    let params = SearchParams {
        goal: Goal::Longest { seed: seed.len() },
        symmetry: cfg.symmetry,
        max_len: cfg.max_len,
        budget_nodes: cfg.budget_nodes,
        prefix: Vec::new(),
    };
    let out = run_search(c, group, &params, resume, sink)?;
    finish(group, constant, cfg, out, seed)
}

pub fn davenport(group: &AbelianGroup, cfg: &SearchConfig) -> Result<ConstantResult> {
    compute(group, ConstantKind::Davenport, cfg)
}

pub fn eta(group: &AbelianGroup, cfg: &SearchConfig) -> Result<ConstantResult> {
    compute(group, ConstantKind::Eta, cfg)
}

pub fn s_exact(group: &AbelianGroup, cfg: &SearchConfig) -> Result<ConstantResult> {
    compute(group, ConstantKind::S, cfg)
}

pub fn s_le(group: &AbelianGroup, n: u64, cfg: &SearchConfig) -> Result<ConstantResult> {
    compute(group, ConstantKind::SLe(n), cfg)
}

pub fn s_eq(group: &AbelianGroup, n: u64, cfg: &SearchConfig) -> Result<ConstantResult> {
    compute(group, ConstantKind::SEq(n), cfg)
}

pub fn d_k(group: &AbelianGroup, k: u64, cfg: &SearchConfig) -> Result<ConstantResult> {
    compute(group, ConstantKind::Dk(k), cfg)
}

pub fn compute(group: &AbelianGroup, constant: ConstantKind, cfg: &SearchConfig) -> Result<ConstantResult> {
    compute_resumable(group, constant, cfg, None, None)
}

/// As [`compute`], optionally resuming from and emitting checkpoints.
pub fn compute_resumable(
    group: &AbelianGroup,
    constant: ConstantKind,
    cfg: &SearchConfig,
    resume: Option<&Checkpoint>,
    sink: Option<&mut dyn FnMut(&Checkpoint) -> Result<()>>,
) -> Result<ConstantResult> {
    let exp = group.exponent();
    let empty = Sequence::empty(group);
    match constant.normalized(group) {
        ConstantKind::Davenport => {
            let c = ZeroSumFree { group };
            longest(group, constant, &c, cfg, standard_zero_sum_free(group), resume, sink)
        }
        ConstantKind::SLe(n) => {
            if n == 0 {
                return Err(Error::InvalidArgument("length parameter must be >= 1".into()));
            }
            if n < exp {
                return Err(Error::InfiniteConstant(format!(
                    "s_le:{n} of {group}: an element of order {exp} repeats forever"
                )));
            }
            let c = ShortFree { group, cap: n as usize };
            longest(group, constant, &c, cfg, empty, resume, sink)
        }
        ConstantKind::SEq(n) => {
            if n == 0 {
                return Err(Error::InvalidArgument("length parameter must be >= 1".into()));
            }
            if n % exp != 0 {
                return Err(Error::InfiniteConstant(format!(
                    "s_eq:{n} of {group}: {n} is not a multiple of exp(G) = {exp}"
                )));
            }
            let c = ExactFree { group, n: n as usize };
            longest(group, constant, &c, cfg, empty, resume, sink)
        }
        ConstantKind::Dk(k) => {
            if k == 0 {
                let certificate = SearchCertificate {
                    status: CertificateStatus::Exhaustive,
                    nodes_explored: 0,
                    seed: 0,
                    bound_kind: BoundKind::Exact,
                };
                return Ok(ConstantResult { group: group.clone(), constant, value: 0, witness: empty, certificate });
            }
            if group.order() > cfg.dk_max_order {
                return Err(Error::BeyondTier(format!(
                    "D_k search is limited to |G| <= {}",
                    cfg.dk_max_order
                )));
            }
            let c = LacksDisjoint { group, k: k as usize };
            longest(group, constant, &c, cfg, empty, resume, sink)
        }
        ConstantKind::Eta | ConstantKind::S => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::search::Symmetry;

    fn cfg() -> SearchConfig {
        SearchConfig::default()
    }

    #[test]
    fn small_davenport_values() {
        for n in 2..=12u64 {
            let g = AbelianGroup::cyclic(n).unwrap();
            let r = davenport(&g, &cfg()).unwrap();
            assert_eq!(r.value, n, "D(Z_{n})");
            assert_eq!(r.certificate.bound_kind, BoundKind::Exact);
        }
        let z5 = AbelianGroup::cyclic(5).unwrap();
        assert_eq!(davenport(&z5, &cfg()).unwrap().witness.to_vec(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn small_eta_and_s() {
        let g = AbelianGroup::elementary(3, 2).unwrap();
        let e = eta(&g, &cfg()).unwrap();
        assert_eq!(e.value, 7);
        assert!(ConstantKind::Eta.is_avoiding(&e.witness));
        let s = s_exact(&g, &cfg()).unwrap();
        assert_eq!(s.value, 9);
        assert!(ConstantKind::S.is_avoiding(&s.witness));
    }

    #[test]
    fn infinite_parameters_rejected() {
        let g = AbelianGroup::cyclic(5).unwrap();
        assert!(matches!(s_le(&g, 2, &cfg()), Err(Error::InfiniteConstant(_))));
        assert!(matches!(s_eq(&g, 2, &cfg()), Err(Error::InfiniteConstant(_))));
        assert!(s_eq(&g, 10, &cfg()).is_ok());
    }

    #[test]
    fn dk_small() {
        let z3 = AbelianGroup::cyclic(3).unwrap();
        assert_eq!(d_k(&z3, 2, &cfg()).unwrap().value, 6);
        assert_eq!(d_k(&z3, 1, &cfg()).unwrap().value, 3);
        assert_eq!(d_k(&z3, 0, &cfg()).unwrap().value, 0);
    }

    #[test]
    fn symmetry_does_not_change_values() {
        for spec in ["2^3", "3^2", "2x4", "2x2x2"] {
            let g: AbelianGroup = spec.parse().unwrap();
            let mut results = Vec::new();
            for sym in [Symmetry::None, Symmetry::CoordinatePermutations, Symmetry::Linear] {
                let c = SearchConfig { symmetry: sym, ..cfg() };
                let d = davenport(&g, &c).unwrap();
                let e = eta(&g, &c).unwrap();
                results.push((d.value, d.witness.to_vec(), e.value, e.witness.to_vec()));
            }
            assert!(results.windows(2).all(|w| w[0] == w[1]), "{spec}: {results:?}");
        }
    }

    #[test]
    fn budget_exhaustion_gives_lower_witness() {
        let g = AbelianGroup::elementary(3, 2).unwrap();
        let c = SearchConfig { budget_nodes: 5, ..cfg() };
        let r = eta(&g, &c).unwrap();
        assert_eq!(r.certificate.status, CertificateStatus::BudgetExhausted);
        assert_eq!(r.certificate.bound_kind, BoundKind::LowerWitness);
        assert!(ConstantKind::Eta.is_avoiding(&r.witness));
    }

    #[test]
    fn constant_names_round_trip() {
        for k in ["D", "eta", "s", "s_le:4", "s_eq:6", "d_k:2"] {
            let c: ConstantKind = k.parse().unwrap();
            assert_eq!(c.to_string(), k);
        }
        assert!("foo".parse::<ConstantKind>().is_err());
    }
}
