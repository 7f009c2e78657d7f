//! Fourier bias over `Z_p^d`, solution-count bounds for `a_1 + ... + a_p = 0`,
//! coset profiles over fifth roots of unity, density thresholds, and
//! Chevalley-Warning congruences for zero-sum counts.
//!
//! Bias is the modulus of the character sum, normalized by `|A|`. For
//! `p <= 5` squared moduli are exact in `Q(sqrt 5)` (with
//! `cos 72deg = (sqrt5 - 1)/4`); other primes use `f64` with an error radius.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{reference_value, RefConstant};
use crate::exact::{binomial, pow_u, rat, rat_int, rpow, sqrt_exact, sqrt_lower, sqrt_upper, QuadSurd};
use crate::error::{Error, Result};
use crate::sequence::Sequence;

/// Twice a squared modulus, `x + y sqrt5`, or a float for primes above 5.
#[derive(Clone, Copy, Debug, PartialEq)]
enum ModSq {
    Exact(i128, i128),
    Approx(f64),
}

fn surd_sign(x: i128, y: i128) -> Ordering {
    let (sx, sy) = (x.cmp(&0), y.cmp(&0));
    if sx == sy || sy == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal {
        return sy;
    }
    match (x * x).cmp(&(5 * y * y)) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

impl ModSq {
    fn cmp(&self, o: &ModSq) -> Ordering {
        match (*self, *o) {
            (ModSq::Exact(a, b), ModSq::Exact(c, d)) => surd_sign(a - c, b - d),
            (ModSq::Approx(a), ModSq::Approx(b)) => a.total_cmp(&b),
            _ => unreachable!("one representation per prime"),
        }
    }

    fn modulus(&self) -> f64 {
        match *self {
            ModSq::Exact(x, y) => ((x as f64 + y as f64 * 5f64.sqrt()) / 2.0).max(0.0).sqrt(),
            ModSq::Approx(m) => m.max(0.0).sqrt(),
        }
    }

    fn surd(&self) -> Option<QuadSurd> {
        match *self {
            ModSq::Exact(x, y) => Some(QuadSurd::new(rat(x as i64, 2), rat(y as i64, 2), 5)),
            ModSq::Approx(_) => None,
        }
    }
}

/// `|sum_j n_j zeta_p^j|^2` from the class counts `n_0, ..., n_{p-1}`.
fn modulus_squared(n: &[u64]) -> ModSq {
    let p = n.len();
    let sq: i128 = n.iter().map(|&v| (v as i128) * (v as i128)).sum();
    let lag = |k: usize| -> i128 { (0..p).map(|i| n[i] as i128 * n[(i + k) % p] as i128).sum() };
    match p {
        2 => ModSq::Exact(2 * (n[0] as i128 - n[1] as i128).pow(2), 0),
        3 => ModSq::Exact(2 * sq - 2 * lag(1), 0),
        5 => {
            let (p1, p2) = (lag(1), lag(2));
            ModSq::Exact(2 * sq - p1 - p2, p1 - p2)
        }
        _ => {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (j, &v) in n.iter().enumerate() {
                let t = std::f64::consts::TAU * j as f64 / p as f64;
                re += v as f64 * t.cos();
                im += v as f64 * t.sin();
            }
            ModSq::Approx(re * re + im * im)
        }
    }
}

/// Counts of `A` in the classes `<xi, x> = j`, `j = 0..p`.
pub fn coset_counts(a: &Sequence, xi: usize) -> Result<Vec<u64>> {
    let g = a.group();
    let (p, _) = g
        .as_elementary()
        .ok_or_else(|| Error::Unsupported(format!("{g} is not elementary abelian")))?;
    if xi == 0 {
        return Err(Error::ZeroCharacter);
    }
    let mut n = vec![0u64; p as usize];
    for (e, m) in a.support() {
        n[g.inner_product(xi, e) as usize] += m as u64;
    }
    Ok(n)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierProfile {
    pub bias: f64,
    pub error_radius: f64,
    /// `bias^2` exactly, for `p <= 5`.
    pub bias_squared: Option<QuadSurd>,
    pub argmax_character: Vec<u64>,
    pub sequence_length: usize,
}

/// `max_{xi != 0} |sum_{a in A} e(<xi, a>/p)| / |A|`; ties go to the smallest character index.
pub fn fourier_bias(a: &Sequence) -> Result<FourierProfile> {
    let g = a.group();
    let (p, _) = g
        .as_elementary()
        .ok_or_else(|| Error::Unsupported(format!("{g} is not elementary abelian")))?;
    if a.is_empty() {
        return Err(Error::InvalidArgument("empty sequence has no Fourier bias".into()));
    }
    if g.order() == 1 {
        return Err(Error::Unsupported("trivial group has no nonzero character".into()));
    }
    let (best, xi) = (1..g.order())
        .into_par_iter()
        .map(|xi| (modulus_squared(&coset_counts(a, xi).expect("nonzero xi")), xi))
        .reduce_with(|x, y| match x.0.cmp(&y.0) {
            Ordering::Greater => x,
            Ordering::Less => y,
            Ordering::Equal => {
                if x.1 <= y.1 {
                    x
                } else {
                    y
                }
            }
        })
        .expect("at least one character");
    let len = a.len();
    let error_radius = 8.0 * p as f64 * f64::EPSILON;
    let bias_squared = best.surd().map(|s| {
        let l2 = QuadSurd::rational(rat_int(len as u64 * len as u64).recip(), 5);
        &s * &l2
    });
    Ok(FourierProfile {
        bias: (best.modulus() / len as f64).clamp(0.0, 1.0),
        error_radius,
        bias_squared,
        argmax_character: g.coords(xi),
        sequence_length: len,
    })
}

fn check_p_d(p: u64, d: u32) -> Result<()> {
    if !crate::group::is_prime(p) || p < 3 {
        return Err(Error::InvalidArgument(format!("need an odd prime, got {p}")));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("need d >= 1".into()));
    }
    Ok(())
}

/// `(N_lower, M_upper)`: `N >= len^p/p^d - b^(p-2) len p^((p-2)d)` solutions of
/// `a_1 + ... + a_p = 0`, and at most `C(p,2)(len^(p-1)/p^d + b^(p-3) len p^((p-3)d))`
/// of them have a repeated term.
pub fn solution_count_bounds(len: u64, bias: &BigRational, p: u64, d: u32) -> Result<(BigRational, BigRational)> {
    check_p_d(p, d)?;
    if len == 0 || bias.is_negative() || bias > &BigRational::one() {
        return Err(Error::InvalidArgument("need len >= 1 and 0 <= bias <= 1".into()));
    }
    let l = rat_int(len);
    let pd = rat_int(pow_u(p, d));
    let pc = |e: u32| rat_int(pow_u(p, e));
    let n_lower = rpow(&l, p as u32) / &pd - rpow(bias, p as u32 - 2) * &l * pc((p as u32 - 2) * d);
    let c2 = rat_int(BigInt::from(binomial(p, 2)));
    let m_upper = c2 * (rpow(&l, p as u32 - 1) / &pd + rpow(bias, p as u32 - 3) * &l * pc((p as u32 - 3) * d));
    Ok((n_lower, m_upper))
}

/// Which power of `p` scales `|A|` in the last term of the displayed inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LastTerm {
    /// `(|A|/p^d)^(p-2)`, equivalent to `C(p,2)|A|^(p-2)/p^((p-1)d)`.
    Corrected,
    /// `(|A|/p^(d-1))^(p-2)`, as displayed for `Z_5^6`.
    PrintedD6,
}

/// Right-hand side minus left-hand side of the length-`p` criterion; the
/// criterion holds when this is negative.
fn criterion_gap(len: u64, bias: &BigRational, p: u64, d: u32, last: LastTerm) -> BigRational {
    let l = rat_int(len);
    let lhs = rpow(&(&l / rat_int(pow_u(p, d))), p as u32 - 1);
    let c = BigRational::new(BigInt::from(p - 1), BigInt::from(2) * pow_u(p, d - 1));
    let scale = match last {
        LastTerm::Corrected => pow_u(p, d),
        LastTerm::PrintedD6 => pow_u(p, d - 1),
    };
    let rhs = rpow(bias, p as u32 - 3) * (bias + &c) + c * rpow(&(l / rat_int(scale)), p as u32 - 2);
    rhs - lhs
}

/// `|A|^(p-1)/p^((p-1)d) > b^(p-3)(b + (p-1)/(2p^(d-1))) + C(p,2)|A|^(p-2)/p^((p-1)d)`.
pub fn zero_sum_p_guaranteed(len: u64, bias: &BigRational, p: u64, d: u32) -> Result<bool> {
    zero_sum_p_guaranteed_with(len, bias, p, d, LastTerm::Corrected)
}

pub fn zero_sum_p_guaranteed_with(len: u64, bias: &BigRational, p: u64, d: u32, last: LastTerm) -> Result<bool> {
    check_p_d(p, d)?;
    if len == 0 || bias.is_negative() {
        return Err(Error::InvalidArgument("need len >= 1 and bias >= 0".into()));
    }
    Ok(criterion_gap(len, bias, p, d, last).is_negative())
}

/// Largest `|n_0 + n_1 zeta + ... + n_4 zeta^4|` over `0 <= n_j <= cap`, `sum n_j = total`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetProfileMax {
    pub total: u64,
    pub cap: u64,
    pub modulus_squared: QuadSurd,
    /// The modulus itself when it is rational.
    #[serde(with = "opt_rational")]
    pub modulus: Option<BigRational>,
    pub profile: [u64; 5],
}

mod opt_rational {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_some(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| t.parse().map_err(D::Error::custom))
            .transpose()
    }
}

fn profile_max(total: u64, cap: u64) -> Result<CosetProfileMax> {
    if total > 5 * cap {
        return Err(Error::InvalidArgument(format!("total {total} exceeds 5 * cap = {}", 5 * cap)));
    }
    let t = total.min(5 * cap - total);
    let (best, mut profile) = if t <= cap {
        // triangle inequality: |sum| <= sum n_j = t, attained on one class
        (ModSq::Exact(2 * (t as i128) * (t as i128), 0), [t, 0, 0, 0, 0])
    } else {
        enumerate_profiles(t, cap)
    };
    if t != total {
        for v in profile.iter_mut() {
            *v = cap - *v;
        }
    }
    let modulus_squared = best.surd().expect("exact for p = 5");
    let modulus = if modulus_squared.is_rational() { sqrt_exact(&modulus_squared.a) } else { None };
    Ok(CosetProfileMax { total, cap, modulus_squared, modulus, profile })
}

/// Exhaustive search over profiles with the largest entry first (rotation
/// symmetry), pruned by `|partial| + remaining mass`.
fn enumerate_profiles(t: u64, cap: u64) -> (ModSq, [u64; 5]) {
    struct Ctx {
        t: u64,
        best: ModSq,
        best_f: f64,
        best_profile: [u64; 5],
        roots: [(f64, f64); 5],
    }
    fn go(c: &mut Ctx, n: &mut [u64; 5], i: usize, used: u64, hi: u64, re: f64, im: f64) {
        let rest = c.t - used;
        if i == 5 {
            if rest != 0 {
                return;
            }
            let m = modulus_squared(n);
            if m.cmp(&c.best) == Ordering::Greater || (m.cmp(&c.best) == Ordering::Equal && *n < c.best_profile) {
                c.best = m;
                c.best_f = m.modulus();
                c.best_profile = *n;
            }
            return;
        }
        if rest > hi * (5 - i) as u64 {
            return;
        }
        let ub = (re * re + im * im).sqrt() + rest as f64;
        if ub + 1e-9 < c.best_f {
            return;
        }
        for v in 0..=hi.min(rest) {
            n[i] = v;
            let (cr, ci) = c.roots[i];
            go(c, n, i + 1, used + v, hi, re + v as f64 * cr, im + v as f64 * ci);
        }
        n[i] = 0;
    }
    let roots = std::array::from_fn(|j| {
        let a = std::f64::consts::TAU * j as f64 / 5.0;
        (a.cos(), a.sin())
    });
    let mut c = Ctx { t, best: ModSq::Exact(-1, 0), best_f: -1.0, best_profile: [u64::MAX; 5], roots };
    let lo = t.div_ceil(5);
    for n0 in (lo..=cap.min(t)).rev() {
        let mut n = [n0, 0, 0, 0, 0];
        go(&mut c, &mut n, 1, n0, n0, n0 as f64, 0.0);
    }
    (c.best, c.best_profile)
}

/// Largest coset-profile modulus for `p = 5`.
pub fn coset_profile_max(total: u64, cap: u64, p: u64) -> Result<CosetProfileMax> {
    if p != 5 {
        return Err(Error::Unsupported("coset profiles are implemented for p = 5".into()));
    }
    profile_max(total, cap)
}

/// Outcome of the criterion at one length, given the exact profile maximum.
fn criterion_at(len: u64, cap: u64, d: u32, last: LastTerm) -> Result<bool> {
    let prof = profile_max(len, cap)?;
    let l = rat_int(len);
    if let Some(m) = &prof.modulus {
        return Ok(criterion_gap(len, &(m / &l), 5, d, last).is_negative());
    }
    // irrational modulus: bracket it and refine until the sign is decided
    let x = &prof.modulus_squared;
    let mut bits = 64;
    loop {
        let (s5_lo, s5_hi) = (sqrt_lower(&rat_int(5), bits), sqrt_upper(&rat_int(5), bits));
        let (lo_root, hi_root) = if x.b.is_negative() { (&s5_hi, &s5_lo) } else { (&s5_lo, &s5_hi) };
        let x_lo = (&x.a + &x.b * lo_root).max(BigRational::zero());
        let x_hi = &x.a + &x.b * hi_root;
        let b_lo = sqrt_lower(&x_lo, bits) / &l;
        let b_hi = sqrt_upper(&x_hi, bits) / &l;
        if criterion_gap(len, &b_hi, 5, d, last).is_negative() {
            return Ok(true);
        }
        if !criterion_gap(len, &b_lo, 5, d, last).is_negative() {
            return Ok(false);
        }
        bits *= 2;
    }
}

/// Rational bias bound at `len` from a single feasible profile (a lower bound on the maximum).
fn greedy_bias_lower(len: u64, cap: u64) -> BigRational {
    let t = len.min(5 * cap - len);
    let mut n = [0u64; 5];
    let mut rest = t;
    for v in n.iter_mut() {
        *v = rest.min(cap);
        rest -= *v;
    }
    let x = modulus_squared(&n).surd().expect("exact");
    let s5_lo = sqrt_lower(&rat_int(5), 64);
    let s5_hi = sqrt_upper(&rat_int(5), 64);
    let root = if x.b.is_negative() { s5_hi } else { s5_lo };
    let x_lo = (&x.a + &x.b * root).max(BigRational::zero());
    sqrt_lower(&x_lo, 64) / rat_int(len)
}

/// Scan from `p * cap` down; returns the least `L` such that the criterion
/// holds for every length in `[L, p * cap]`, or `None` if it fails at `p * cap`.
pub fn density_threshold_with(p: u64, d: u32, cap: u64, last: LastTerm) -> Result<Option<u64>> {
    if p != 5 {
        return Err(Error::Unsupported("density thresholds are implemented for p = 5".into()));
    }
    if d < 2 || cap == 0 {
        return Err(Error::InvalidArgument("need d >= 2 and cap >= 1".into()));
    }
    let top = p * cap;
    let mut len = top;
    while len >= cap.max(1) {
        let rejected = !criterion_gap(len, &greedy_bias_lower(len, cap), p, d, last).is_negative();
        if rejected || !criterion_at(len, cap, d, last)? {
            return Ok((len < top).then_some(len + 1));
        }
        len -= 1;
    }
    Ok(Some(cap.max(1)))
}

/// Least `L` such that every length-`L'` sequence over `Z_5^d`, `L <= L' <= 5 cap`,
/// meets the length-`p` criterion when no class of a hyperplane partition holds
/// more than `cap` terms.
pub fn density_threshold(p: u64, d: u32, cap: u64) -> Result<u64> {
    density_threshold_with(p, d, cap, LastTerm::Corrected)?
        .ok_or_else(|| Error::Hypothesis(format!("criterion fails at length {} for d = {d}, cap = {cap}", p * cap)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityStep {
    pub d: u32,
    pub cap: u64,
    pub threshold: u64,
    /// Threshold under the printed last term for `d = 6`.
    pub printed_threshold: Option<u64>,
    /// Whether the tabulated upper bound satisfies the printed variant.
    pub printed_holds_at_reference: Option<bool>,
    pub reference: Option<u64>,
}

/// The recursion `s(Z_5^3) = 37`, then `cap = threshold - 1` for the next dimension.
pub fn density_chain(max_d: u32) -> Result<Vec<DensityStep>> {
    let start = reference_value(RefConstant::S, 5, 3).expect("tabulated");
    let mut cap: u64 = start.value.try_into().expect("small");
    cap -= 1;
    let mut out = Vec::new();
    for d in 4..=max_d {
        let threshold = density_threshold(5, d, cap)?;
        let reference = reference_value(RefConstant::S, 5, d).map(|e| e.value.try_into().expect("small"));
        let (printed_threshold, printed_holds_at_reference) = if d == 6 {
            let t = density_threshold_with(5, d, cap, LastTerm::PrintedD6)?;
            let at = reference.map(|r| criterion_at(r, cap, d, LastTerm::PrintedD6)).transpose()?;
            (t, at)
        } else {
            (None, None)
        };
        out.push(DensityStep { d, cap, threshold, printed_threshold, printed_holds_at_reference, reference });
        cap = threshold - 1;
    }
    Ok(out)
}

/// Number of zero-sum subsequences of each length `0..=|S|`, copies counted separately.
pub fn zero_sum_counts(s: &Sequence) -> Vec<BigUint> {
    let g = s.group();
    let n = s.len();
    let order = g.order();
    let mut dp = vec![vec![BigUint::zero(); order]; n + 1];
    dp[0][0] = BigUint::one();
    let mut used = 0;
    for (e, m) in s.support() {
        let m = m as usize;
        let choose: Vec<BigUint> = (0..=m).map(|j| binomial(m as u64, j as u64)).collect();
        let mut next = vec![vec![BigUint::zero(); order]; n + 1];
        for c in 0..=used {
            for h in 0..order {
                if dp[c][h].is_zero() {
                    continue;
                }
                let mut t = h;
                for (j, cj) in choose.iter().enumerate() {
                    next[c + j][t] += &dp[c][h] * cj;
                    t = g.add(t, e);
                }
            }
        }
        used += m;
        dp = next;
    }
    dp.into_iter().map(|row| row[0].clone()).collect()
}

/// `N^l(S)`: zero-sum subsequences of length exactly `l`.
pub fn count_zero_sums_of_length(s: &Sequence, l: usize) -> Result<BigUint> {
    if l > s.len() {
        return Err(Error::InvalidArgument(format!("length {l} exceeds |S| = {}", s.len())));
    }
    Ok(zero_sum_counts(s).swap_remove(l))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChevalleyReport {
    pub p: u64,
    pub length: usize,
    /// `(jp, N^{jp})` for `jp <= length`.
    pub counts: Vec<(usize, String)>,
    /// `sum_j (-1)^{jp} N^{jp} mod p`, with `N^0 = 1`.
    pub signed_residue: u64,
    /// `1 + sum_{j >= 1} N^{jp} mod p`.
    pub unsigned_residue: u64,
    pub holds: bool,
}

/// Checks `sum_{j >= 0} (-1)^{jp} N^{jp}(S) = 0 (mod p)` for `S` over `Z_p^3`
/// of length `4p-3`, `5p-3` or `6p-3`.
pub fn chevalley_congruences(s: &Sequence) -> Result<ChevalleyReport> {
    let g = s.group();
    let (p, d) = g
        .as_elementary()
        .ok_or_else(|| Error::Unsupported(format!("{g} is not elementary abelian")))?;
    if d != 3 {
        return Err(Error::Unsupported(format!("congruences are stated over Z_p^3, got {g}")));
    }
    let len = s.len() as u64;
    if ![4 * p - 3, 5 * p - 3, 6 * p - 3].contains(&len) {
        return Err(Error::InvalidArgument(format!("length {len} is not 4p-3, 5p-3 or 6p-3 for p = {p}")));
    }
    let all = zero_sum_counts(s);
    let pb = BigInt::from(p);
    let mut signed = BigInt::zero();
    let mut unsigned = BigInt::zero();
    let mut counts = Vec::new();
    for (j, l) in (0..=s.len()).step_by(p as usize).enumerate() {
        let c = BigInt::from(all[l].clone());
        unsigned += &c;
        if (j as u64 * p) % 2 == 0 {
            signed += &c;
        } else {
            signed -= &c;
        }
        counts.push((l, all[l].to_string()));
    }
    let residue = |x: &BigInt| -> u64 { u64::try_from(((x % &pb) + &pb) % &pb).expect("small") };
    let signed_residue = residue(&signed);
    Ok(ChevalleyReport {
        p,
        length: s.len(),
        counts,
        signed_residue,
        unsigned_residue: residue(&unsigned),
        holds: signed_residue == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::AbelianGroup;
    use crate::engine::random::random_sequence;

    fn grp(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn bias_examples() {
        let g = grp("3^2");
        let all = Sequence::from_indices(&g, g.elements()).unwrap();
        let prof = fourier_bias(&all).unwrap();
        assert_eq!(prof.bias, 0.0);
        assert!(prof.bias_squared.unwrap().signum() == Ordering::Equal);

        let single = Sequence::with_multiplicity(&g, &[4], 7).unwrap();
        let prof = fourier_bias(&single).unwrap();
        assert!((prof.bias - 1.0).abs() < 1e-12);
        assert_eq!(prof.bias_squared.unwrap(), QuadSurd::rational(rat_int(1), 5));

        let h = grp("5^3");
        let plane = Sequence::from_indices(&h, h.elements().filter(|&e| h.coords(e)[0] == 0)).unwrap();
        let prof = fourier_bias(&plane).unwrap();
        assert!((prof.bias - 1.0).abs() < 1e-12);
        assert!(fourier_bias(&Sequence::empty(&g)).is_err());
    }

    #[test]
    fn exact_matches_float_for_p5() {
        let mut rng = crate::engine::random::sample_rng(11, 0);
        for _ in 0..10_000 {
            let n: Vec<u64> = (0..5).map(|_| rand::Rng::gen_range(&mut rng, 0..200)).collect();
            let exact = modulus_squared(&n).surd().unwrap().to_f64();
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (j, &v) in n.iter().enumerate() {
                let t = std::f64::consts::TAU * j as f64 / 5.0;
                re += v as f64 * t.cos();
                im += v as f64 * t.sin();
            }
            let float = re * re + im * im;
            assert!((exact - float).abs() <= 1e-9 * float.max(1.0), "{n:?}");
        }
    }

    #[test]
    fn bias_is_linear_invariant() {
        let g = grp("3^2");
        let autos = g.linear_automorphisms().unwrap();
        for seed in 0..20 {
            let a = random_sequence(&g, 10, seed);
            let base = fourier_bias(&a).unwrap();
            for perm in autos.iter().step_by(7) {
                let b = fourier_bias(&a.map(perm)).unwrap();
                assert_eq!(base.bias_squared, b.bias_squared);
            }
        }
    }

    #[test]
    fn count_bounds() {
        let (n, _) = solution_count_bounds(10, &BigRational::zero(), 5, 4).unwrap();
        assert_eq!(n, rat_int(100_000u64) / rat_int(625u64));
        let beta = BigRational::new(BigInt::from(23), BigInt::from(157));
        let (n, m) = solution_count_bounds(157, &beta, 5, 4).unwrap();
        assert!(n > m);
        let mut prev = None;
        for len in 10..60 {
            let (n, _) = solution_count_bounds(len, &rat(1, 3), 5, 2).unwrap();
            if let Some(p) = prev {
                assert!(n > p);
            }
            prev = Some(n);
        }
    }

    #[test]
    fn criterion_matches_count_bounds() {
        for p in [3u64, 5, 7] {
            for d in 2..5 {
                for len in [5u64, 40, 157, 700] {
                    for (a, b) in [(0, 1), (1, 9), (1, 3), (2, 3), (1, 1)] {
                        let beta = rat(a, b);
                        let (n, m) = solution_count_bounds(len, &beta, p, d).unwrap();
                        assert_eq!(n > m, zero_sum_p_guaranteed(len, &beta, p, d).unwrap(), "{p} {d} {len} {a}/{b}");
                    }
                }
            }
        }
    }

    #[test]
    fn printed_thresholds_hold() {
        let b = |num: u64, len: u64| BigRational::new(BigInt::from(num - len), BigInt::from(len));
        assert!(zero_sum_p_guaranteed(157, &b(180, 157), 5, 4).unwrap());
        assert!(zero_sum_p_guaranteed(690, &b(780, 690), 5, 5).unwrap());
        assert!(zero_sum_p_guaranteed(3091, &b(3445, 3091), 5, 6).unwrap());
    }

    #[test]
    fn profile_examples() {
        let m = coset_profile_max(157, 36, 5).unwrap();
        assert_eq!(m.modulus, Some(rat_int(23)));
        assert_eq!(coset_profile_max(0, 36, 5).unwrap().modulus, Some(BigRational::zero()));
        assert!(coset_profile_max(181, 36, 5).is_err());
        assert!(coset_profile_max(10, 3, 7).is_err());
        for cap in 1..=6 {
            for total in 0..=5 * cap {
                let a = coset_profile_max(total, cap, 5).unwrap();
                let b = coset_profile_max(5 * cap - total, cap, 5).unwrap();
                assert_eq!(a.modulus_squared, b.modulus_squared);
                // brute force over all profiles
                let mut best: Option<QuadSurd> = None;
                for code in 0..(cap + 1).pow(5) {
                    let mut c = code;
                    let n: Vec<u64> = (0..5).map(|_| { let v = c % (cap + 1); c /= cap + 1; v }).collect();
                    if n.iter().sum::<u64>() != total {
                        continue;
                    }
                    let v = modulus_squared(&n).surd().unwrap();
                    if best.as_ref().is_none_or(|b| &v > b) {
                        best = Some(v);
                    }
                }
                assert_eq!(Some(a.modulus_squared.clone()), best, "total {total}, cap {cap}");
                let prof = a.profile;
                assert_eq!(prof.iter().sum::<u64>(), total);
                assert!(prof.iter().all(|&v| v <= cap));
                assert_eq!(modulus_squared(&prof).surd().unwrap(), a.modulus_squared);
                if total <= cap {
                    assert_eq!(a.modulus, Some(rat_int(total)));
                }
            }
        }
    }

    #[test]
    fn zero_sum_count_examples() {
        let z3 = grp("3");
        let s = Sequence::from_indices(&z3, [1, 1, 1]).unwrap();
        assert_eq!(count_zero_sums_of_length(&s, 3).unwrap(), BigUint::one());
        let zeros = Sequence::from_indices(&z3, [0, 0]).unwrap();
        assert_eq!(count_zero_sums_of_length(&zeros, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(count_zero_sums_of_length(&zeros, 0).unwrap(), BigUint::one());
        assert!(count_zero_sums_of_length(&zeros, 3).is_err());
    }

    #[test]
    fn chevalley_examples() {
        let g = grp("3^3");
        let zeros = Sequence::with_multiplicity(&g, &[0], 9).unwrap();
        let r = chevalley_congruences(&zeros).unwrap();
        assert!(r.holds);
        assert_eq!(r.unsigned_residue, 170 % 3);
        for seed in 0..20 {
            let s = random_sequence(&g, 15, seed);
            assert!(chevalley_congruences(&s).unwrap().holds);
        }
        let h = grp("5^3");
        for seed in 0..5 {
            assert!(chevalley_congruences(&random_sequence(&h, 17, seed)).unwrap().holds);
        }
        assert!(chevalley_congruences(&random_sequence(&g, 10, 0)).is_err());
    }
}
