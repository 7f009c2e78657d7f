use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::AbelianGroup;

/// A finite multiset of group elements, stored as a dense multiplicity table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    group: AbelianGroup,
    mult: Vec<u32>,
    len: usize,
}

impl std::fmt::Debug for Sequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<Vec<u64>> = self.terms().map(|g| self.group.coords(g)).collect();
        write!(f, "Sequence[{}]{:?}", self.group, terms)
    }
}

impl Sequence {
    pub fn empty(group: &AbelianGroup) -> Self {
        Sequence { group: group.clone(), mult: vec![0; group.order()], len: 0 }
    }

    pub fn from_indices(group: &AbelianGroup, items: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(group);
        for g in items {
            if g >= group.order() {
                return Err(Error::NotInGroup(format!("index {g} in {group}")));
            }
            s.push(g);
        }
        Ok(s)
    }

    pub fn from_coords(group: &AbelianGroup, items: &[Vec<u64>]) -> Result<Self> {
        let idx = items.iter().map(|c| group.index_of(c)).collect::<Result<Vec<_>>>()?;
        Self::from_indices(group, idx)
    }

    /// `copies` copies of each listed element.
    pub fn with_multiplicity(group: &AbelianGroup, items: &[usize], copies: u32) -> Result<Self> {
        Self::from_indices(group, items.iter().flat_map(|&g| std::iter::repeat(g).take(copies as usize)))
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn multiplicity(&self, g: usize) -> u32 {
        self.mult[g]
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.mult
    }

    pub fn push(&mut self, g: usize) {
        self.mult[g] += 1;
        self.len += 1;
    }

    /// Removes one copy of `g`; returns false when `g` is absent.
    pub fn remove_one(&mut self, g: usize) -> bool {
        if self.mult[g] == 0 {
            return false;
        }
        self.mult[g] -= 1;
        self.len -= 1;
        true
    }

    /// Terms in non-decreasing index order, repeated by multiplicity.
    pub fn terms(&self) -> impl Iterator<Item = usize> + '_ {
        self.mult
            .iter()
            .enumerate()
            .flat_map(|(g, &m)| std::iter::repeat(g).take(m as usize))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.terms().collect()
    }

    /// Distinct elements with their multiplicities.
    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.mult.iter().enumerate().filter(|(_, &m)| m > 0).map(|(g, &m)| (g, m))
    }

    pub fn sum(&self) -> usize {
        self.support()
            .fold(0, |acc, (g, m)| self.group.add(acc, self.group.scalar_mul(m as i64, g)))
    }

    pub fn is_zero_sum(&self) -> bool {
        self.sum() == 0
    }

    /// True when `other` is a sub-multiset of `self`.
    pub fn contains(&self, other: &Sequence) -> bool {
        self.group == other.group && self.mult.iter().zip(&other.mult).all(|(a, b)| a >= b)
    }

    /// `self - other` as multisets; errors if `other` is not contained.
    pub fn difference(&self, other: &Sequence) -> Result<Sequence> {
        if !self.contains(other) {
            return Err(Error::InvalidArgument("subtracted multiset is not contained".into()));
        }
        let mult: Vec<u32> = self.mult.iter().zip(&other.mult).map(|(a, b)| a - b).collect();
        Ok(Sequence { group: self.group.clone(), len: self.len - other.len, mult })
    }

    pub fn union(&self, other: &Sequence) -> Sequence {
        let mult: Vec<u32> = self.mult.iter().zip(&other.mult).map(|(a, b)| a + b).collect();
        Sequence { group: self.group.clone(), len: self.len + other.len, mult }
    }

    pub fn coords(&self) -> Vec<Vec<u64>> {
        self.terms().map(|g| self.group.coords(g)).collect()
    }

    /// Image under an index permutation (e.g. a group automorphism).
    pub fn map(&self, perm: &[usize]) -> Sequence {
        let mut out = Sequence::empty(&self.group);
        for (g, m) in self.support() {
            out.mult[perm[g]] += m;
        }
        out.len = self.len;
        out
    }
}

/// JSON form: group spec plus a list of coordinate tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub group: AbelianGroup,
    pub sequence: Vec<Vec<u64>>,
}

impl From<&Sequence> for SequenceRecord {
    fn from(s: &Sequence) -> Self {
        SequenceRecord { group: s.group.clone(), sequence: s.coords() }
    }
}

impl TryFrom<&SequenceRecord> for Sequence {
    type Error = Error;
    fn try_from(r: &SequenceRecord) -> Result<Self> {
        Sequence::from_coords(&r.group, &r.sequence)
    }
}
