//! Finite abelian groups in invariant-factor form.
//!
//! A group `Z_{n_1} + ... + Z_{n_r}` with `n_1 | ... | n_r` is stored by its
//! factor list. Elements are addressed by a mixed-radix index in `[0, |G|)`,
//! first coordinate most significant, so index order agrees with the
//! lexicographic order of coordinate tuples.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order for which a full addition table is materialized.
pub const ADD_TABLE_LIMIT: usize = 1 << 10;

#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AbelianGroup {
    factors: Vec<u64>,
    strides: Vec<usize>,
    order: usize,
    add_table: Option<Arc<Vec<u32>>>,
}

/// An element given both by coordinates and by its mixed-radix index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub index: usize,
    pub coords: Vec<u64>,
}

impl PartialEq for AbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl Eq for AbelianGroup {}

impl std::hash::Hash for AbelianGroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.factors.hash(state)
    }
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbelianGroup({})", self)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.factors.len() {
            let n = self.factors[i];
            let mut j = i;
            while j < self.factors.len() && self.factors[j] == n {
                j += 1;
            }
            if j - i > 1 {
                parts.push(format!("{}^{}", n, j - i));
            } else {
                parts.push(n.to_string());
            }
            i = j;
        }
        write!(f, "{}", parts.join("x"))
    }
}

impl From<AbelianGroup> for String {
    fn from(g: AbelianGroup) -> String {
        g.to_string()
    }
}

impl TryFrom<String> for AbelianGroup {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for AbelianGroup {
    type Err = Error;

    /// Parses `"p^d"`, `"2x4"`, `"6x6"`, `"2^2x4"`, `"12"`; the result is canonicalized.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse(format!("empty group spec")));
        }
        let mut moduli = Vec::new();
        for part in s.split(['x', 'X', '*']) {
            let part = part.trim();
            let (base, exp) = match part.split_once('^') {
                Some((b, e)) => (b.trim(), e.trim()),
                None => (part, "1"),
            };
            let base: i64 = base
                .parse()
                .map_err(|_| Error::Parse(format!("bad modulus '{base}' in '{s}'")))?;
            let exp: usize = exp
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent '{exp}' in '{s}'")))?;
            moduli.extend(std::iter::repeat(base).take(exp));
        }
        AbelianGroup::canonicalize(&moduli)
    }
}

fn prime_power_parts(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= m {
        if m % q == 0 {
            let mut e = 0;
            while m % q == 0 {
                m /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

impl AbelianGroup {
    /// Invariant-factor form of the direct sum of `Z_m` over the given moduli.
    pub fn canonicalize(moduli: &[i64]) -> Result<Self> {
        let mut by_prime: std::collections::BTreeMap<u64, Vec<u32>> = Default::default();
        for &m in moduli {
            if m <= 0 {
                return Err(Error::InvalidModulus(m));
            }
            for (q, e) in prime_power_parts(m as u64) {
                by_prime.entry(q).or_default().push(e);
            }
        }
        let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; rank];
        for (q, mut exps) in by_prime {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            // Largest prime power goes into the last invariant factor.
            for (i, e) in exps.into_iter().enumerate() {
                factors[rank - 1 - i] *= q.pow(e);
            }
        }
        Self::from_invariant_factors(factors)
    }

    /// Builds a group from a factor list that already forms a divisibility chain.
    pub fn from_invariant_factors(factors: Vec<u64>) -> Result<Self> {
        if factors.iter().any(|&n| n < 2) {
            return Err(Error::Parse(format!("invariant factors must be >= 2: {factors:?}")));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Parse(format!("not a divisibility chain: {factors:?}")));
        }
        let order = factors
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n as usize))
            .filter(|&o| o <= u32::MAX as usize)
            .ok_or_else(|| Error::Parse(format!("group too large: {factors:?}")))?;
        let mut strides = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1] as usize;
        }
        let mut g = AbelianGroup { factors, strides, order, add_table: None };
        if order <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; order * order];
            for a in 0..order {
                for b in 0..order {
                    table[a * order + b] = g.add_slow(a, b) as u32;
                }
            }
            g.add_table = Some(Arc::new(table));
        }
        Ok(g)
    }

    /// `Z_p^d`.
    pub fn elementary(p: u64, d: usize) -> Result<Self> {
        Self::canonicalize(&vec![p as i64; d])
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::canonicalize(&[n as i64])
    }

    pub fn trivial() -> Self {
        Self::from_invariant_factors(Vec::new()).expect("trivial group")
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// `M(G) = sum n_i - r + 1`, the standard lower bound for the Davenport constant.
    pub fn m_invariant(&self) -> u64 {
        self.factors.iter().sum::<u64>() + 1 - self.rank() as u64
    }

    /// `Some((p, d))` when the group is `Z_p^d` with `p` prime and `d >= 1`.
    pub fn as_elementary(&self) -> Option<(u64, usize)> {
        let p = *self.factors.first()?;
        let parts = prime_power_parts(p);
        (parts.len() == 1 && parts[0].1 == 1 && self.factors.iter().all(|&n| n == p))
            .then_some((p, self.rank()))
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn coords(&self, index: usize) -> Vec<u64> {
        self.factors
            .iter()
            .zip(&self.strides)
            .map(|(&n, &s)| ((index / s) as u64) % n)
            .collect()
    }

    pub fn index_of(&self, coords: &[u64]) -> Result<usize> {
        if coords.len() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), found: coords.len() });
        }
        let mut idx = 0;
        for ((&c, &n), &s) in coords.iter().zip(&self.factors).zip(&self.strides) {
            if c >= n {
                return Err(Error::NotInGroup(format!("coordinate {c} >= {n}")));
            }
            idx += c as usize * s;
        }
        Ok(idx)
    }

    pub fn element(&self, index: usize) -> GroupElement {
        GroupElement { index, coords: self.coords(index) }
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.order
    }

    fn add_slow(&self, a: usize, b: usize) -> usize {
        let mut idx = 0;
        for (&n, &s) in self.factors.iter().zip(&self.strides) {
            let n = n as usize;
            let ca = (a / s) % n;
            let cb = (b / s) % n;
            idx += ((ca + cb) % n) * s;
        }
        idx
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        match &self.add_table {
            Some(t) => t[a * self.order + b] as usize,
            None => self.add_slow(a, b),
        }
    }

    pub fn neg(&self, a: usize) -> usize {
        let mut idx = 0;
        for (&n, &s) in self.factors.iter().zip(&self.strides) {
            let n = n as usize;
            let c = (a / s) % n;
            idx += ((n - c) % n) * s;
        }
        idx
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn scalar_mul(&self, t: i64, a: usize) -> usize {
        let mut idx = 0;
        for (&n, &s) in self.factors.iter().zip(&self.strides) {
            let c = ((a / s) as u64 % n) as i128;
            let v = (c * t as i128).rem_euclid(n as i128) as usize;
            idx += v * s;
        }
        idx
    }

    pub fn sum<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(0, |acc, g| self.add(acc, g))
    }

    /// Coordinate-wise sum with rank check.
    pub fn add_coords(&self, a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.coords(self.add(ia, ib)))
    }

    pub fn neg_coords(&self, a: &[u64]) -> Result<Vec<u64>> {
        Ok(self.coords(self.neg(self.index_of(a)?)))
    }

    pub fn scalar_mul_coords(&self, t: i64, a: &[u64]) -> Result<Vec<u64>> {
        Ok(self.coords(self.scalar_mul(t, self.index_of(a)?)))
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.factors
            .iter()
            .zip(&self.strides)
            .map(|(&n, &s)| {
                let c = (a / s) as u64 % n;
                n / c.gcd(&n)
            })
            .fold(1, |acc, o| acc.lcm(&o))
    }

    /// `{0, g, 2g, ...}` in generation order.
    pub fn cyclic_subgroup(&self, g: usize) -> Vec<usize> {
        let mut out = vec![0];
        let mut x = g;
        while x != 0 {
            out.push(x);
            x = self.add(x, g);
        }
        out
    }

    /// Smallest element of the orbit of `g` under permutations of coordinates
    /// that carry equal invariant factors.
    pub fn coordinate_orbit_min(&self, g: usize) -> usize {
        let mut coords = self.coords(g);
        let mut i = 0;
        while i < self.factors.len() {
            let mut j = i;
            while j < self.factors.len() && self.factors[j] == self.factors[i] {
                j += 1;
            }
            coords[i..j].sort_unstable();
            i = j;
        }
        self.index_of(&coords).expect("permuted coordinates stay in range")
    }

    /// All automorphisms of `Z_p^d` as index permutations. Only offered for
    /// small groups (`p^(d*d) <= 2^22`).
    pub fn linear_automorphisms(&self) -> Result<Vec<Vec<usize>>> {
        let (p, d) = self
            .as_elementary()
            .ok_or_else(|| Error::Unsupported(format!("{self} is not elementary abelian")))?;
        let entries = d * d;
        let total = (p as usize)
            .checked_pow(entries as u32)
            .filter(|&t| t <= 1 << 22)
            .ok_or_else(|| Error::Unsupported(format!("GL({d},{p}) too large to enumerate")))?;
        // Matrix columns are the images of the standard basis vectors.
        let mut out = Vec::new();
        for code in 0..total {
            let mut columns = Vec::with_capacity(d);
            let mut c = code;
            for _ in 0..d {
                let mut coords = vec![0u64; d];
                for x in coords.iter_mut() {
                    *x = (c % p as usize) as u64;
                    c /= p as usize;
                }
                columns.push(self.index_of(&coords).unwrap());
            }
            let mut image = vec![0usize; self.order];
            for g in 1..self.order {
                let coords = self.coords(g);
                let mut v = 0;
                for (k, &ck) in coords.iter().enumerate() {
                    v = self.add(v, self.scalar_mul(ck as i64, columns[k]));
                }
                image[g] = v;
            }
            let mut seen = vec![false; self.order];
            let injective = image.iter().all(|&v| !std::mem::replace(&mut seen[v], true));
            if injective {
                out.push(image);
            }
        }
        Ok(out)
    }

    /// Partition of `Z_p^d` by the value of `<xi, x> mod p`; class `j` holds the
    /// elements with inner product `j`.
    pub fn hyperplane_cosets(&self, xi: usize) -> Result<Vec<Vec<usize>>> {
        let (p, _) = self
            .as_elementary()
            .ok_or_else(|| Error::Unsupported(format!("{self} is not elementary abelian")))?;
        if xi == 0 {
            return Err(Error::ZeroCharacter);
        }
        let mut classes = vec![Vec::new(); p as usize];
        for g in self.elements() {
            classes[self.inner_product(xi, g) as usize].push(g);
        }
        Ok(classes)
    }

    /// `<a, b> mod exp(G)`; meaningful for `Z_p^d`.
    pub fn inner_product(&self, a: usize, b: usize) -> u64 {
        let p = self.exponent();
        let (ca, cb) = (self.coords(a), self.coords(b));
        ca.iter().zip(&cb).map(|(x, y)| x * y % p).sum::<u64>() % p
    }
}

/// Convenience form of [`AbelianGroup::canonicalize`].
pub fn canonicalize_group(moduli: &[i64]) -> Result<AbelianGroup> {
    AbelianGroup::canonicalize(moduli)
}

/// Every abelian group of order `n`, in invariant-factor form.
pub fn groups_of_order(n: u64) -> Vec<AbelianGroup> {
    fn chains(n: u64, min: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 1 {
            out.push(acc.clone());
            return;
        }
        // Later factors are multiples of f, so their product n/f is too.
        let mut f = min.max(2);
        while f <= n {
            let rest = n / f;
            if n % f == 0 && f % min == 0 && (rest == 1 || rest % f == 0) {
                acc.push(f);
                chains(n / f, f, acc, out);
                acc.pop();
            }
            f += 1;
        }
    }
    let mut out = Vec::new();
    if n == 1 {
        return vec![AbelianGroup::trivial()];
    }
    chains(n, 1, &mut Vec::new(), &mut out);
    out.into_iter()
        .filter_map(|f| AbelianGroup::from_invariant_factors(f).ok())
        .collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|q| q * q <= n).all(|q| n % q != 0)
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&q| is_prime(q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_multiset(factors: &[u64]) -> Vec<u64> {
        // Direct product of raw moduli, orders computed by brute force.
        let total: u64 = factors.iter().product();
        let mut orders = Vec::new();
        for mut idx in 0..total {
            let mut coords = Vec::new();
            for &n in factors.iter().rev() {
                coords.push(idx % n);
                idx /= n;
            }
            let mut k = 1u64;
            loop {
                if coords.iter().zip(factors.iter().rev()).all(|(&c, &n)| (c * k) % n == 0) {
                    break;
                }
                k += 1;
            }
            orders.push(k);
        }
        orders.sort_unstable();
        orders
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canonicalize_group(&[2, 3]).unwrap().invariant_factors(), &[6]);
        assert_eq!(canonicalize_group(&[6, 6]).unwrap().invariant_factors(), &[6, 6]);
        assert_eq!(canonicalize_group(&[4, 6]).unwrap().invariant_factors(), &[2, 12]);
        assert_eq!(canonicalize_group(&[1, 5]).unwrap().invariant_factors(), &[5]);
        assert!(canonicalize_group(&[]).unwrap().invariant_factors().is_empty());
        assert!(matches!(canonicalize_group(&[3, 0]), Err(Error::InvalidModulus(0))));
        assert!(matches!(canonicalize_group(&[-4]), Err(Error::InvalidModulus(-4))));
    }

    #[test]
    fn four_six_matches_two_twelve_by_orders() {
        assert_eq!(order_multiset(&[4, 6]), order_multiset(&[2, 12]));
    }

    #[test]
    fn canonical_form_preserves_element_orders() {
        let moduli_sets: Vec<Vec<u64>> = vec![
            vec![2, 3],
            vec![4, 6],
            vec![2, 2, 4],
            vec![6, 10],
            vec![3, 9],
            vec![2, 4, 8],
            vec![12, 5],
            vec![6, 4, 2],
            vec![8, 8],
            vec![3, 3, 3],
        ];
        for m in moduli_sets {
            let raw: Vec<i64> = m.iter().map(|&x| x as i64).collect();
            let g = canonicalize_group(&raw).unwrap();
            let mut orders: Vec<u64> = g.elements().map(|x| g.element_order(x)).collect();
            orders.sort_unstable();
            assert_eq!(orders, order_multiset(&m), "{m:?} -> {g}");
            // idempotent and permutation invariant
            let again: Vec<i64> = g.invariant_factors().iter().map(|&x| x as i64).collect();
            assert_eq!(canonicalize_group(&again).unwrap(), g);
            let mut rev = raw.clone();
            rev.reverse();
            assert_eq!(canonicalize_group(&rev).unwrap(), g);
        }
    }

    #[test]
    fn parse_and_display() {
        let g: AbelianGroup = "3^3".parse().unwrap();
        assert_eq!(g.invariant_factors(), &[3, 3, 3]);
        assert_eq!(g.to_string(), "3^3");
        let g: AbelianGroup = "4x2".parse().unwrap();
        assert_eq!(g.to_string(), "2x4");
        let g: AbelianGroup = "2x3".parse().unwrap();
        assert_eq!(g.to_string(), "6");
        assert_eq!(AbelianGroup::trivial().to_string(), "1");
        assert!("x".parse::<AbelianGroup>().is_err());
        assert!("0x3".parse::<AbelianGroup>().is_err());
    }

    #[test]
    fn derived_quantities() {
        let g: AbelianGroup = "2x4".parse().unwrap();
        assert_eq!((g.order(), g.exponent(), g.rank(), g.m_invariant()), (8, 4, 2, 5));
        let t = AbelianGroup::trivial();
        assert_eq!((t.order(), t.exponent(), t.rank(), t.m_invariant()), (1, 1, 0, 1));
        for spec in ["6x6", "3x9", "5", "2x10"] {
            let g: AbelianGroup = spec.parse().unwrap();
            let e = g.exponent();
            assert_eq!(g.m_invariant(), e + g.order() as u64 / e - 1);
        }
    }

    #[test]
    fn arithmetic_examples() {
        let g = AbelianGroup::elementary(3, 2).unwrap();
        assert_eq!(g.add_coords(&[1, 2], &[2, 2]).unwrap(), vec![0, 1]);
        let g7 = AbelianGroup::elementary(7, 2).unwrap();
        assert_eq!(g7.scalar_mul_coords(2, &[1, 0]).unwrap(), vec![2, 0]);
        assert_eq!(g7.neg(0), 0);
        assert!(matches!(g7.add_coords(&[1], &[1, 0]), Err(Error::RankMismatch { .. })));
        for a in g.elements() {
            assert_eq!(g.add(a, g.neg(a)), 0);
            assert_eq!(g.index_of(&g.coords(a)).unwrap(), a);
            for b in g.elements() {
                assert_eq!(g.add(a, b), g.add(b, a));
            }
        }
    }

    #[test]
    fn large_group_arithmetic_without_table() {
        let g = AbelianGroup::elementary(5, 5).unwrap();
        assert!(g.order() > ADD_TABLE_LIMIT);
        let a = g.index_of(&[1, 2, 3, 4, 0]).unwrap();
        let b = g.index_of(&[4, 4, 4, 4, 4]).unwrap();
        assert_eq!(g.coords(g.add(a, b)), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn cyclic_subgroups() {
        let g7 = AbelianGroup::elementary(7, 2).unwrap();
        assert_eq!(g7.cyclic_subgroup(g7.index_of(&[1, 1]).unwrap()).len(), 7);
        assert_eq!(g7.cyclic_subgroup(0), vec![0]);
        let g: AbelianGroup = "4x2".parse().unwrap();
        // canonical order is 2x4, so (2,0) in Z4+Z2 is (0,2) here
        let x = g.index_of(&[0, 2]).unwrap();
        let mut h = g.cyclic_subgroup(x);
        h.sort_unstable();
        assert_eq!(h, vec![0, x]);
    }

    #[test]
    fn hyperplanes() {
        let g = AbelianGroup::elementary(5, 4).unwrap();
        let xi = g.index_of(&[1, 0, 0, 0]).unwrap();
        let classes = g.hyperplane_cosets(xi).unwrap();
        assert_eq!(classes.len(), 5);
        assert!(classes.iter().all(|c| c.len() == 125));
        let g3 = AbelianGroup::elementary(3, 2).unwrap();
        let classes = g3.hyperplane_cosets(g3.index_of(&[1, 1]).unwrap()).unwrap();
        assert!(classes[0].contains(&g3.index_of(&[1, 2]).unwrap()));
        assert_eq!(classes.iter().map(Vec::len).sum::<usize>(), 9);
        assert!(matches!(g3.hyperplane_cosets(0), Err(Error::ZeroCharacter)));
    }

    #[test]
    fn groups_of_small_orders() {
        let counts: Vec<usize> = (1..=16).map(|n| groups_of_order(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5]);
        assert_eq!(groups_of_order(27).len(), 3);
        assert_eq!(groups_of_order(24).len(), 3);
    }

    #[test]
    fn gl2_sizes() {
        assert_eq!(AbelianGroup::elementary(3, 2).unwrap().linear_automorphisms().unwrap().len(), 48);
        assert_eq!(AbelianGroup::elementary(2, 3).unwrap().linear_automorphisms().unwrap().len(), 168);
    }

    #[test]
    fn coordinate_orbit_min_sorts_within_blocks() {
        let g = AbelianGroup::elementary(3, 3).unwrap();
        let x = g.index_of(&[2, 0, 1]).unwrap();
        assert_eq!(g.coords(g.coordinate_orbit_min(x)), vec![0, 1, 2]);
        let h: AbelianGroup = "2x4".parse().unwrap();
        let y = h.index_of(&[1, 3]).unwrap();
        assert_eq!(h.coordinate_orbit_min(y), y);
    }
}
