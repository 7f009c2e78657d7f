//! Systems of disjoint zero-sums: greedy and staged extraction, and the
//! closed-form guarantees that drive the staged plans.
//!
//! Length caps are `Option<u64>` throughout, `None` meaning unbounded.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::{reference_value, RefConstant};
use crate::engine::subsums::shortest_zero_sum;
use crate::error::{Error, Result};
use crate::exact::{bigint_str, ceil_int, floor_int, pow_u, rat, rat_int, rational_str, QuadSurd};
use crate::group::{is_prime, AbelianGroup};
use crate::sequence::{Sequence, SequenceRecord};

pub type Cap = Option<u64>;

/// Pairwise disjoint zero-sum blocks of a parent sequence plus the leftover terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroSumSystem {
    parent: Sequence,
    blocks: Vec<Sequence>,
    leftover: Sequence,
}

impl ZeroSumSystem {
    pub fn from_blocks(parent: &Sequence, blocks: Vec<Sequence>) -> Result<Self> {
        let mut leftover = parent.clone();
        for b in &blocks {
            leftover = leftover
                .difference(b)
                .map_err(|_| Error::Validation("blocks overlap or leave the parent".into()))?;
        }
        let sys = ZeroSumSystem { parent: parent.clone(), blocks, leftover };
        validate_system(&sys, None)?;
        Ok(sys)
    }

    pub fn parent(&self) -> &Sequence {
        &self.parent
    }

    pub fn blocks(&self) -> &[Sequence] {
        &self.blocks
    }

    pub fn leftover(&self) -> &Sequence {
        &self.leftover
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_lengths(&self) -> Vec<usize> {
        self.blocks.iter().map(Sequence::len).collect()
    }

    pub fn record(&self) -> ZeroSumSystemRecord {
        ZeroSumSystemRecord {
            parent: (&self.parent).into(),
            blocks: self.blocks.iter().map(Sequence::coords).collect(),
            leftover: self.leftover.coords(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroSumSystemRecord {
    pub parent: SequenceRecord,
    pub blocks: Vec<Vec<Vec<u64>>>,
    pub leftover: Vec<Vec<u64>>,
}

/// Re-checks a system from scratch: every block is a nonempty zero-sum of
/// length within `cap`, and blocks plus leftover recompose the parent exactly.
pub fn validate_system(sys: &ZeroSumSystem, cap: Cap) -> Result<()> {
    let g = sys.parent.group();
    let mut counts = vec![0u64; g.order()];
    for (i, block) in sys.blocks.iter().enumerate() {
        if block.group() != g {
            return Err(Error::Validation(format!("block {i} lives in another group")));
        }
        let terms = block.to_vec();
        if terms.is_empty() {
            return Err(Error::Validation(format!("block {i} is empty")));
        }
        let mut acc = vec![0u64; g.rank()];
        for &t in &terms {
            for (c, (x, n)) in acc.iter_mut().zip(g.coords(t).iter().zip(g.invariant_factors())) {
                *c = (*c + x) % n;
            }
            counts[t] += 1;
        }
        if acc.iter().any(|&c| c != 0) {
            return Err(Error::Validation(format!("block {i} does not sum to zero")));
        }
        if let Some(c) = cap {
            if terms.len() as u64 > c {
                return Err(Error::Validation(format!("block {i} has length {} > cap {c}", terms.len())));
            }
        }
    }
    for t in sys.leftover.terms() {
        counts[t] += 1;
    }
    for (e, &c) in counts.iter().enumerate() {
        if c != sys.parent.multiplicity(e) as u64 {
            return Err(Error::Validation(format!("multiplicity of element {e} does not recompose")));
        }
    }
    Ok(())
}

fn cap_usize(cap: Cap) -> Option<usize> {
    cap.map(|c| c.min(usize::MAX as u64) as usize)
}

/// Repeatedly removes a shortest zero-sum of length `<= cap` until none is left.
pub fn greedy_extract(s: &Sequence, cap: Cap) -> ZeroSumSystem {
    let mut rest = s.clone();
    let mut blocks = Vec::new();
    while let Some((_, w)) = shortest_zero_sum(&rest, cap_usize(cap)) {
        rest = rest.difference(&w).expect("witness is a subsequence");
        blocks.push(w);
    }
    ZeroSumSystem { parent: s.clone(), blocks, leftover: rest }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    /// The stage runs while more than this many terms remain.
    pub threshold: u64,
    pub cap: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionSchedule {
    pub stages: Vec<Stage>,
    pub final_cap: u64,
}

impl ExtractionSchedule {
    pub fn new(stages: Vec<Stage>, final_cap: u64) -> Result<Self> {
        let s = ExtractionSchedule { stages, final_cap };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.stages.windows(2) {
            if w[1].threshold >= w[0].threshold {
                return Err(Error::Validation("stage thresholds must strictly decrease".into()));
            }
            if w[1].cap < w[0].cap {
                return Err(Error::Validation("stage caps must not decrease".into()));
            }
        }
        if self.stages.last().is_some_and(|s| self.final_cap < s.cap) {
            return Err(Error::Validation("final cap is below the last stage cap".into()));
        }
        Ok(())
    }

    /// Removals guaranteed when every stage can always find a zero-sum within
    /// its cap: the adversary spends exactly `cap` terms per removal.
    pub fn guaranteed_removals(&self, n: u64, terminal: u64) -> u64 {
        let mut rest = n;
        let mut k = 0;
        for st in &self.stages {
            if rest > st.threshold {
                let r = (rest - st.threshold).div_ceil(st.cap);
                k += r;
                rest = rest.saturating_sub(r * st.cap);
            }
        }
        k + u64::from(rest >= terminal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleRun {
    pub system: ZeroSumSystem,
    /// Removals made in each stage, then in the final greedy phase.
    pub per_stage: Vec<usize>,
    /// First stage that ran out of zero-sums while still above its threshold.
    pub stalled_stage: Option<usize>,
}

/// Executes a schedule: each stage removes shortest zero-sums within its cap
/// while the remainder is above its threshold, then the final cap is applied greedily.
pub fn run_schedule(s: &Sequence, schedule: &ExtractionSchedule) -> ScheduleRun {
    let mut rest = s.clone();
    let mut blocks = Vec::new();
    let mut per_stage = Vec::new();
    let mut stalled_stage = None;
    for (i, st) in schedule.stages.iter().enumerate() {
        let mut count = 0;
        while rest.len() as u64 > st.threshold {
            match shortest_zero_sum(&rest, cap_usize(Some(st.cap))) {
                Some((_, w)) => {
                    rest = rest.difference(&w).expect("witness is a subsequence");
                    blocks.push(w);
                    count += 1;
                }
                None => {
                    stalled_stage.get_or_insert(i);
                    break;
                }
            }
        }
        per_stage.push(count);
    }
    let tail = greedy_extract(&rest, Some(schedule.final_cap));
    per_stage.push(tail.blocks.len());
    blocks.extend(tail.blocks);
    let system = ZeroSumSystem { parent: s.clone(), blocks, leftover: tail.leftover };
    ScheduleRun { system, per_stage, stalled_stage }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{p} is not prime")))
    }
}

fn to_u64(x: &BigInt) -> u64 {
    if x.is_negative() {
        0
    } else {
        x.to_u64().unwrap_or(u64::MAX)
    }
}

/// `D(Z_p^d) = d(p-1) + 1`.
pub fn davenport_elementary(p: u64, d: u32) -> u64 {
    d as u64 * (p - 1) + 1
}

/// `floor((3p-1)/2)`, the cap reported by the short-zero-sum guarantees.
pub fn short_cap_loose(p: u64) -> u64 {
    (3 * p - 1) / 2
}

/// `floor(3(p-1)/2)`, the cap used inside extraction schedules.
pub fn short_cap_strict(p: u64) -> u64 {
    3 * (p - 1) / 2
}

/// `floor((p^d - 1)/(p^a - 1) * (base - 1)) + 1`.
pub fn lift_bound(p: u64, d: u32, a: u32, base: &BigInt) -> Result<BigInt> {
    check_prime(p)?;
    if a == 0 || a > d {
        return Err(Error::InvalidArgument(format!("need 1 <= a <= d, got a={a}, d={d}")));
    }
    let num = pow_u(p, d) - 1;
    let den = pow_u(p, a) - 1;
    let v = BigRational::new(num, den) * BigRational::from_integer(base - 1);
    Ok(floor_int(&v) + 1)
}

/// Guarantee sources in `Z_p^d`: every sequence of length `>= .0` has a
/// zero-sum of length `<= .1`.
fn direct_sources(p: u64, d: u32) -> Vec<(BigInt, u64, &'static str)> {
    let mut v: Vec<(BigInt, u64, &'static str)> = Vec::new();
    let dav = davenport_elementary(p, d);
    v.push((BigInt::from(dav), dav, "davenport"));
    if let Ok(eta) = eta_upper(p, d) {
        v.push((eta, p, "eta"));
    }
    let dd = d as u64;
    if d >= 1 {
        v.push((BigInt::from((dd + 1) * p - dd), (dd.max(1) - 1).max(1) * p, "divisible-length"));
    }
    if d == 3 {
        v.push((BigInt::from(6 * p - 3), short_cap_loose(p), "short-3"));
    }
    if d == 4 {
        v.push((BigInt::from(6 * p - 3), 2 * p, "short-4"));
    }
    if d >= 3 {
        let t = BigInt::from(6 * p - 4) * pow_u(p, d - 3) + 1;
        v.push((t, short_cap_loose(p), "scaled-short"));
    }
    if d >= 4 {
        let t = BigInt::from(6 * p - 4) * pow_u(p, d - 4) + 1;
        v.push((t, 2 * p, "scaled-short-2p"));
    }
    if p == 2 && d >= 2 {
        v.push((pow_u(2, d - 1) + 1, 3, "lindstrom-3"));
        v.push((sqrt2_pow_floor(d + 1) + 1, 4, "lindstrom-4"));
    }
    v
}

/// `floor(2^(e/2))`.
pub fn sqrt2_pow_floor(e: u32) -> BigInt {
    let x: BigInt = BigInt::one() << e as usize;
    num_integer::Roots::sqrt(&x)
}

/// Smallest length cap `L` such that every sequence of length `length` in
/// `Z_p^d` has a zero-sum of length `<= L`; `None` if no source applies.
pub fn guarantee_cap(p: u64, d: u32, length: u64) -> Result<Cap> {
    check_prime(p)?;
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let len = BigInt::from(length);
    let mut best: Cap = None;
    let mut consider = |t: &BigInt, c: u64| {
        if &len >= t && best.is_none_or(|b| c < b) {
            best = Some(c);
        }
    };
    for (t, c, _) in direct_sources(p, d) {
        consider(&t, c);
    }
    for a in 1..d {
        for (t, c, _) in direct_sources(p, a) {
            consider(&lift_bound(p, d, a, &t)?, c);
        }
    }
    Ok(best)
}

/// Upper bound for `eta(Z_p^d)` from the reference values, the lift lemma and,
/// for `p >= 7`, `(p^d - p)/(p^2 - p) (3p - 7) + 4`.
pub fn eta_upper(p: u64, d: u32) -> Result<BigInt> {
    check_prime(p)?;
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    if d == 1 {
        return Ok(BigInt::from(p));
    }
    if p == 2 {
        return Ok(pow_u(2, d));
    }
    if d == 2 {
        return Ok(BigInt::from(3 * p - 2));
    }
    if p >= 7 {
        let frac = (pow_u(p, d) - p) / BigInt::from(p * p - p);
        return Ok(frac * BigInt::from(3 * p - 7) + 4);
    }
    // p = 3 or 5: eta directly where known, else s - (p - 1), else lifted from d = 6
    if let Some(v) = reference_value(RefConstant::Eta, p, d) {
        return Ok(v.value);
    }
    if let Some(v) = reference_value(RefConstant::S, p, d) {
        return Ok(v.value - (p - 1));
    }
    let base = eta_upper(p, 6)?;
    lift_bound(p, d, 6, &base)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShortsumsVariant {
    /// The `d = 3` bound exactly as displayed, without a `k` term.
    AsPrinted,
    /// `d = 3` with the coefficient `3(p-1)/2` on `k`, as in the `d >= 4` bound.
    KDependent,
}

/// Upper bound for `D_k(Z_p^d)` from the short-sum extraction argument, rounded up.
pub fn dk_upper_shortsums(p: u64, d: u32, k: u64, variant: ShortsumsVariant) -> Result<BigInt> {
    if k == 0 {
        return Err(Error::InvalidArgument("need k >= 1".into()));
    }
    let (first, slope, offset) = shortsums_parts(p, d, variant)?;
    Ok(ceil_int(&first.max(slope * rat_int(k) + offset)))
}

/// The bound as `max(first, slope * k + offset)`; `slope` is zero for the
/// printed `d = 3` branch.
fn shortsums_parts(p: u64, d: u32, variant: ShortsumsVariant) -> Result<(BigRational, BigRational, BigRational)> {
    check_prime(p)?;
    if d < 3 {
        return Err(Error::InvalidArgument("need d >= 3".into()));
    }
    let pr = rat_int(p);
    let coeff = rat((3 * (p - 1)) as i64, 2);
    Ok(if d == 3 {
        match variant {
            ShortsumsVariant::AsPrinted => (rat_int(5 * p - 2), BigRational::zero(), coeff + rat_int(2 * p + 5)),
            ShortsumsVariant::KDependent => (rat_int(5 * p - 2), coeff, rat_int(2 * p + 5)),
        }
    } else {
        let base = rat_int(BigInt::from(6 * p - 4) * pow_u(p, d - 3));
        let first = &base + rat_int(1);
        let inner = rat(1, 4) + rat(3, 2) / &pr - rat(3, 4) / (&pr * &pr) - rat(1, 1) / (rat_int(d) * &pr);
        (first, coeff, rat_int(1) + base * inner)
    })
}

/// Parameters of the intermediate extraction plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntermediatePlan {
    pub p: u64,
    pub d: u32,
    pub n: u64,
    pub a: u32,
    pub schedule: ExtractionSchedule,
    /// Worst-case number of disjoint zero-sums, summed stage by stage.
    pub k_guarantee: u64,
    /// `N/((a-1)p) * (1 - 1/(a(1 - 1/p)))`.
    #[serde(with = "rational_str")]
    pub closed_form: BigRational,
    /// Whether the closed form stays within `k_guarantee + d`.
    pub closed_form_within_slack: bool,
}

/// Stages `b = a..=d` with cap `(b-1)p`, active while more than
/// `(b+1)p^(d-b+1)` terms remain, followed by zero-sums of length `<= D(Z_p^d)`.
pub fn schedule_intermediate(p: u64, d: u32, n: u64) -> Result<IntermediatePlan> {
    check_prime(p)?;
    if d < 3 {
        return Err(Error::InvalidArgument("intermediate schedule needs d >= 3".into()));
    }
    let threshold = |b: u32| BigInt::from(b + 1) * pow_u(p, d - b + 1);
    let nn = BigInt::from(n);
    let a = (2..d).filter(|&a| nn > threshold(a)).max().ok_or_else(|| {
        Error::Hypothesis(format!("N = {n} does not exceed 3p^(d-1) = {}", threshold(2)))
    })?;
    let dav = davenport_elementary(p, d);
    let mut stages = Vec::new();
    for b in a..=d {
        stages.push(Stage { threshold: to_u64(&threshold(b)), cap: (b as u64 - 1) * p });
    }
    let last_cap = stages.last().map_or(0, |s| s.cap);
    let schedule = ExtractionSchedule::new(stages, dav.max(last_cap))?;
    let k_guarantee = schedule.guaranteed_removals(n, dav);
    let pa = BigRational::new(BigInt::from(p) - 1, BigInt::from(p));
    let closed_form = rat_int(n) / rat_int((a as u64 - 1) * p)
        * (rat_int(1) - BigRational::one() / (rat_int(a) * pa));
    let closed_form_within_slack = closed_form <= rat_int(k_guarantee + d as u64);
    Ok(IntermediatePlan { p, d, n, a, schedule, k_guarantee, closed_form, closed_form_within_slack })
}

/// Short-sum plan: caps `3(p-1)/2` then `2p` (or `(d-1)p` in dimension 3),
/// then `D(Z_p^d)`.
pub fn schedule_shortsums(p: u64, d: u32) -> Result<ExtractionSchedule> {
    check_prime(p)?;
    if d < 3 {
        return Err(Error::InvalidArgument("short-sum schedule needs d >= 3".into()));
    }
    let dav = davenport_elementary(p, d);
    let stages = if d == 3 {
        vec![
            Stage { threshold: 6 * p - 4, cap: short_cap_strict(p) },
            Stage { threshold: 4 * p - 4, cap: 2 * p },
        ]
    } else {
        let t1 = BigInt::from(6 * p - 4) * pow_u(p, d - 3);
        let t2 = BigInt::from(6 * p - 4) * pow_u(p, d - 4);
        vec![
            Stage { threshold: to_u64(&t1), cap: short_cap_strict(p) },
            Stage { threshold: to_u64(&t2), cap: 2 * p },
        ]
    };
    ExtractionSchedule::new(stages, dav)
}

/// Plan for `Z_2^d`: one zero-sum of length `<= 2`, then `<= 3` down to
/// `2^(d-1)` terms, then `<= 4` down to `floor(2^((d+1)/2))`, then `<= d+1`.
pub fn schedule_p2(d: u32) -> Result<ExtractionSchedule> {
    if d < 3 {
        return Err(Error::InvalidArgument("p = 2 schedule needs d >= 3".into()));
    }
    let raw = [
        Stage { threshold: (1u64 << d) - 1, cap: 2 },
        Stage { threshold: 1u64 << (d - 1), cap: 3 },
        Stage { threshold: to_u64(&sqrt2_pow_floor(d + 1)), cap: 4 },
    ];
    let mut stages: Vec<Stage> = Vec::new();
    for st in raw {
        if stages.last().is_none_or(|l| st.threshold < l.threshold) {
            stages.push(st);
        }
    }
    ExtractionSchedule::new(stages, d as u64 + 1)
}

/// `(M, k)`: every sequence of length `M >= eta(Z_p^d)` in `Z_p^d` contains
/// `k` disjoint zero-sums, and `M <= p^(d-1) + pk`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepWitness {
    pub p: u64,
    pub d: u32,
    #[serde(with = "bigint_str")]
    pub m: BigInt,
    #[serde(with = "bigint_str")]
    pub k: BigInt,
}

impl StepWitness {
    /// `p^(d-1) + pk - M`, non-negative for a valid witness.
    pub fn slack(&self) -> BigInt {
        pow_u(self.p, self.d - 1) + BigInt::from(self.p) * &self.k - &self.m
    }
}

pub fn thm_step_witness(p: u64, d: u32) -> Result<StepWitness> {
    check_prime(p)?;
    if d < 2 {
        return Err(Error::InvalidArgument("need d >= 2".into()));
    }
    let pair = |m: BigInt, k: BigInt| StepWitness { p, d, m, k };
    let big = BigInt::from;
    let w = match (p, d) {
        (2, _) => pair(pow_u(2, d), pow_u(2, d - 2)),
        // eta(Z_p^2) = 3p - 2 forces one short zero-sum, D(Z_p^2) = 2p - 1 another
        (_, 2) => pair(big(3 * p - 1), big(2)),
        (3, 3) => pair(big(17), big(3)),
        (3, 4) => pair(big(39), big(4)),
        (3, 5) => pair(big(89), big(7)),
        (5, 3) => pair(big(33), big(3)),
        (5, 4) => pair(big(153), big(15)),
        (5, 5) => pair(big(686), big(24)),
        (3 | 5, _) => pair(pow_u(p, d - 1), big(0)),
        _ => {
            let m = eta_upper(p, d)?;
            let k = largest_k_for(p, d, &m)?;
            pair(m, k)
        }
    };
    if w.slack().is_negative() {
        return Err(Error::Validation(format!("M = {} exceeds p^(d-1) + pk for (p, d) = ({p}, {d})", w.m)));
    }
    if w.m < eta_upper(p, d)? {
        return Err(Error::Validation(format!("M = {} is below the eta bound for (p, d) = ({p}, {d})", w.m)));
    }
    Ok(w)
}

/// Largest `k` with `dk_upper_shortsums(p, d, k) <= m` (k-dependent reading),
/// or zero when even the `k`-free branch exceeds `m`.
fn largest_k_for(p: u64, d: u32, m: &BigInt) -> Result<BigInt> {
    let (first, slope, offset) = shortsums_parts(p, d, ShortsumsVariant::KDependent)?;
    let m = rat_int(m.clone());
    if first > m {
        return Ok(BigInt::zero());
    }
    // ceil(x) <= m iff x <= m for integral m
    Ok(floor_int(&((m - offset) / slope)).max(BigInt::zero()))
}

/// Evaluation of `2^d/4 + (2^d+2)/24 - 2^((d-3)/2) + (2^((d+1)/2) - 1)/(d+1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct P2Count {
    pub d: u32,
    /// Exact value in `Q(sqrt 2)`.
    pub count: QuadSurd,
    pub count_approx: f64,
    /// Whether `count >= 2^(d-2)`.
    pub holds: bool,
}

pub fn p2_count(d: u32) -> Result<P2Count> {
    if d < 3 {
        return Err(Error::InvalidArgument("need d >= 3".into()));
    }
    // x = 2^((d-3)/2); then 2^((d+1)/2) = 4x
    let x = if d % 2 == 1 {
        QuadSurd::rational(rat_int(pow_u(2, (d - 3) / 2)), 2)
    } else {
        QuadSurd::new(BigRational::zero(), rat_int(pow_u(2, (d - 4) / 2)), 2)
    };
    let two_d = rat_int(pow_u(2, d));
    let q = |v: BigRational| QuadSurd::rational(v, 2);
    let four_x = &q(rat_int(4)) * &x;
    let frac = &(&four_x - &q(rat_int(1))) * &q(BigRational::new(BigInt::one(), BigInt::from(d + 1)));
    let base = q(&two_d / rat_int(4) + (&two_d + rat_int(2)) / rat_int(24));
    let count = &(&base - &x) + &frac;
    let target = q(rat_int(pow_u(2, d - 2)));
    let holds = count >= target;
    Ok(P2Count { d, count_approx: count.to_f64(), count, holds })
}

/// The `Z_p^d` a sequence must live in for the `p`-specific functions.
pub fn elementary_params(g: &AbelianGroup) -> Result<(u64, u32)> {
    g.as_elementary()
        .map(|(p, d)| (p, d as u32))
        .ok_or_else(|| Error::Unsupported(format!("{g} is not elementary abelian")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::random::random_sequence;

    #[test]
    fn greedy_examples() {
        let z3 = AbelianGroup::cyclic(3).unwrap();
        let s = Sequence::from_indices(&z3, [1, 1, 1, 2, 2, 2]).unwrap();
        let sys = greedy_extract(&s, Some(3));
        assert_eq!(sys.block_lengths(), vec![2, 2, 2]);
        assert!(sys.leftover().is_empty());
        validate_system(&sys, Some(3)).unwrap();

        let free = Sequence::from_indices(&z3, [1, 1]).unwrap();
        let sys = greedy_extract(&free, None);
        assert!(sys.is_empty());
        assert_eq!(sys.leftover(), &free);
    }

    #[test]
    fn validator_rejects_bad_systems() {
        let z3 = AbelianGroup::cyclic(3).unwrap();
        let s = Sequence::from_indices(&z3, [1, 1, 1, 2]).unwrap();
        let bad = Sequence::from_indices(&z3, [1, 1]).unwrap();
        assert!(ZeroSumSystem::from_blocks(&s, vec![bad]).is_err());
        let over = Sequence::from_indices(&z3, [2, 2, 2]).unwrap();
        assert!(ZeroSumSystem::from_blocks(&s, vec![over]).is_err());
        let ok = Sequence::from_indices(&z3, [1, 1, 1]).unwrap();
        let sys = ZeroSumSystem::from_blocks(&s, vec![ok]).unwrap();
        assert!(validate_system(&sys, Some(2)).is_err());
    }

    #[test]
    fn guarantee_examples() {
        assert_eq!(guarantee_cap(3, 3, 15).unwrap(), Some(4));
        assert_eq!(guarantee_cap(2, 5, 17).unwrap(), Some(3));
        assert_eq!(guarantee_cap(5, 3, 3).unwrap(), None);
        assert_eq!(guarantee_cap(5, 3, 33).unwrap(), Some(5));
    }

    #[test]
    fn guarantee_is_monotone() {
        for (p, d) in [(2, 3), (2, 5), (3, 3), (3, 4), (5, 3), (7, 3)] {
            let mut prev: Cap = None;
            for len in 1..400 {
                let c = guarantee_cap(p, d, len).unwrap();
                if let (Some(a), Some(b)) = (prev, c) {
                    assert!(b <= a, "({p},{d}) len {len}: {b} > {a}");
                }
                if prev.is_some() {
                    assert!(c.is_some());
                }
                prev = c;
            }
        }
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift_bound(3, 6, 3, &BigInt::from(19)).unwrap(), BigInt::from(505));
        assert_eq!(lift_bound(5, 4, 3, &BigInt::from(37)).unwrap(), BigInt::from(182));
        assert_eq!(lift_bound(7, 3, 3, &BigInt::from(40)).unwrap(), BigInt::from(40));
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_upper(7, 3).unwrap(), BigInt::from(116));
        assert_eq!(eta_upper(7, 2).unwrap(), BigInt::from(19));
        assert_eq!(eta_upper(3, 3).unwrap(), BigInt::from(17));
        assert_eq!(eta_upper(5, 4).unwrap(), BigInt::from(153));
        assert_eq!(eta_upper(5, 5).unwrap(), BigInt::from(686));
        assert!(eta_upper(3, 8).unwrap() < pow_u(3, 7));
        assert!(eta_upper(5, 9).unwrap() < pow_u(5, 8));
    }

    #[test]
    fn shortsums_examples() {
        let v = |p, d, k| dk_upper_shortsums(p, d, k, ShortsumsVariant::AsPrinted).unwrap();
        assert_eq!(v(7, 4, 1), BigInt::from(267));
        assert_eq!(v(7, 3, 1), BigInt::from(33));
        assert_eq!(v(7, 3, 50), BigInt::from(33));
        let mut prev = BigInt::zero();
        for k in 1..200 {
            let cur = v(11, 5, k);
            assert!(cur >= prev);
            prev = cur;
        }
        let kd = dk_upper_shortsums(7, 3, 10, ShortsumsVariant::KDependent).unwrap();
        assert_eq!(kd, BigInt::from(9 * 10 + 19));
    }

    #[test]
    fn intermediate_examples() {
        let plan = schedule_intermediate(3, 5, 500).unwrap();
        assert_eq!(plan.a, 4);
        let plan = schedule_intermediate(2, 3, 13).unwrap();
        assert_eq!(plan.a, 2);
        assert_eq!(plan.schedule.stages[0].cap, 2);
        assert!(matches!(schedule_intermediate(3, 4, 10), Err(Error::Hypothesis(_))));
    }

    /// Minimum over every adversary that removes blocks of length 1..=cap.
    fn adversary_min(st: &ExtractionSchedule, n: u64, terminal: u64) -> u64 {
        fn go(stages: &[Stage], rest: u64, terminal: u64, memo: &mut std::collections::HashMap<(usize, u64), u64>) -> u64 {
            let Some(st) = stages.first() else {
                return u64::from(rest >= terminal);
            };
            if rest <= st.threshold {
                return go(&stages[1..], rest, terminal, memo);
            }
            let key = (stages.len(), rest);
            if let Some(&v) = memo.get(&key) {
                return v;
            }
            let v = (1..=st.cap.min(rest)).map(|l| 1 + go(stages, rest - l, terminal, memo)).min().unwrap();
            memo.insert(key, v);
            v
        }
        go(&st.stages, n, terminal, &mut Default::default())
    }

    #[test]
    fn guaranteed_removals_match_adversary() {
        for (p, d) in [(2, 3), (2, 4), (3, 3), (3, 4), (5, 3)] {
            let dav = davenport_elementary(p, d);
            for n in 3 * p.pow(d - 1) + 1..400 {
                let plan = schedule_intermediate(p, d, n).unwrap();
                let fast = plan.schedule.guaranteed_removals(n, dav);
                assert_eq!(fast, adversary_min(&plan.schedule, n, dav), "({p},{d},{n})");
            }
        }
    }

    #[test]
    fn step_witness_examples() {
        let w = |p, d| {
            let s = thm_step_witness(p, d).unwrap();
            (s.m.to_u64().unwrap(), s.k.to_u64().unwrap())
        };
        assert_eq!(w(5, 3), (33, 3));
        assert_eq!(w(5, 4), (153, 15));
        assert_eq!(w(3, 5), (89, 7));
        assert_eq!(w(5, 5), (686, 24));
        assert_eq!(w(2, 7), (128, 32));
        assert_eq!(w(7, 3), (116, 10));
        // the k for (3, 5) from the length-3p short-sum count: ceil((89 - 2d - 6)/(3d - 3))
        assert_eq!((89u64 - 16).div_ceil(12), 7);
    }

    #[test]
    fn p2_count_values() {
        for d in 3..=20 {
            let c = p2_count(d).unwrap();
            assert!(c.holds, "d = {d}");
        }
        let c10 = p2_count(10).unwrap();
        assert!(c10.count_approx - 256.0 > 25.6);
        let c7 = p2_count(7).unwrap();
        assert!(c7.count.is_rational());
    }

    #[test]
    fn schedules_are_well_formed() {
        for d in 3..=10 {
            schedule_p2(d).unwrap();
        }
        for p in [3, 5, 7, 11] {
            for d in 3..=6 {
                schedule_shortsums(p, d).unwrap();
                let n = 10 * pow_u(p, d - 1).to_u64().unwrap();
                schedule_intermediate(p, d, n).unwrap();
            }
        }
        let g = AbelianGroup::elementary(2, 4).unwrap();
        let s = random_sequence(&g, 16, 5);
        let run = run_schedule(&s, &schedule_p2(4).unwrap());
        validate_system(&run.system, Some(5)).unwrap();
        assert_eq!(run.per_stage.iter().sum::<usize>(), run.system.len());
    }
}
