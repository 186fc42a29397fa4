//! Integer partitions in multiplicity-vector form, their elementary
//! statistics, and constrained enumeration by size or by norm.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// An integer partition, stored as `(part, multiplicity)` pairs with parts
/// strictly increasing and every multiplicity >= 1. The empty vector is the
/// empty partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    mults: Vec<(u64, u64)>,
}

impl Partition {
    /// The empty partition.
    pub fn empty() -> Self {
        Partition { mults: Vec::new() }
    }

    /// Partition with a single part.
    pub fn single(part: u64) -> Result<Self> {
        Self::from_parts([part])
    }

    /// Build from a list of parts in any order. Rejects zero parts.
    pub fn from_parts<I: IntoIterator<Item = u64>>(parts: I) -> Result<Self> {
        let mut sorted: Vec<u64> = parts.into_iter().collect();
        if sorted.contains(&0) {
            return Err(Error::ZeroPart);
        }
        sorted.sort_unstable();
        let mut mults: Vec<(u64, u64)> = Vec::new();
        for p in sorted {
            match mults.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => mults.push((p, 1)),
            }
        }
        Ok(Partition { mults })
    }

    /// Build from `(part, multiplicity)` pairs; duplicate parts are merged
    /// and zero multiplicities dropped.
    pub fn from_multiplicities<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut pairs: Vec<(u64, u64)> = pairs.into_iter().filter(|&(_, m)| m > 0).collect();
        if pairs.iter().any(|&(p, _)| p == 0) {
            return Err(Error::ZeroPart);
        }
        pairs.sort_unstable();
        let mut mults: Vec<(u64, u64)> = Vec::new();
        for (p, m) in pairs {
            match mults.last_mut() {
                Some((q, acc)) if *q == p => *acc += m,
                _ => mults.push((p, m)),
            }
        }
        Ok(Partition { mults })
    }

    /// The stored `(part, multiplicity)` pairs, parts ascending.
    pub fn multiplicities(&self) -> &[(u64, u64)] {
        &self.mults
    }

    /// Multiplicity of a given part (0 if absent).
    pub fn multiplicity_of(&self, part: u64) -> u64 {
        self.mults
            .binary_search_by_key(&part, |&(p, _)| p)
            .map(|i| self.mults[i].1)
            .unwrap_or(0)
    }

    /// Parts as a weakly decreasing list.
    pub fn to_parts(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.length() as usize);
        for &(p, m) in self.mults.iter().rev() {
            for _ in 0..m {
                out.push(p);
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.mults.is_empty()
    }

    /// Size: sum of parts with multiplicity.
    pub fn size(&self) -> u64 {
        self.mults
            .iter()
            .try_fold(0u64, |acc, &(p, m)| acc.checked_add(p.checked_mul(m)?))
            .expect("partition size overflows u64")
    }

    /// Length: number of parts.
    pub fn length(&self) -> u64 {
        self.mults
            .iter()
            .try_fold(0u64, |acc, &(_, m)| acc.checked_add(m))
            .expect("partition length overflows u64")
    }

    /// Largest part. Errors on the empty partition.
    pub fn largest_part(&self) -> Result<u64> {
        self.mults
            .last()
            .map(|&(p, _)| p)
            .ok_or(Error::EmptyPartition)
    }

    /// Smallest part. Errors on the empty partition.
    pub fn smallest_part(&self) -> Result<u64> {
        self.mults
            .first()
            .map(|&(p, _)| p)
            .ok_or(Error::EmptyPartition)
    }

    /// Norm: product of parts with multiplicity; 1 for the empty partition.
    pub fn norm(&self) -> BigUint {
        let mut acc = BigUint::one();
        for &(p, m) in &self.mults {
            acc *= BigUint::from(p).pow(u32::try_from(m).expect("multiplicity overflows u32"));
        }
        acc
    }

    /// Partition Moebius function: 0 if any part repeats, else (-1)^length.
    pub fn mobius(&self) -> i8 {
        if self.mults.iter().any(|&(_, m)| m >= 2) {
            0
        } else if self.mults.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Multiset union: multiplicities add pointwise. The empty partition is
    /// the identity.
    pub fn multiply(&self, other: &Partition) -> Partition {
        let mut out: Vec<(u64, u64)> = Vec::with_capacity(self.mults.len() + other.mults.len());
        let (mut i, mut j) = (0, 0);
        while i < self.mults.len() || j < other.mults.len() {
            match (self.mults.get(i), other.mults.get(j)) {
                (Some(&(p, m)), Some(&(q, n))) if p == q => {
                    out.push((p, m + n));
                    i += 1;
                    j += 1;
                }
                (Some(&(p, m)), Some(&(q, _))) if p < q => {
                    out.push((p, m));
                    i += 1;
                }
                (Some(_), Some(&(q, n))) => {
                    out.push((q, n));
                    j += 1;
                }
                (Some(&(p, m)), None) => {
                    out.push((p, m));
                    i += 1;
                }
                (None, Some(&(q, n))) => {
                    out.push((q, n));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Partition { mults: out }
    }

    /// Multiset inclusion: true iff every multiplicity of `self` is at most
    /// the corresponding multiplicity of `other`.
    pub fn is_subpartition_of(&self, other: &Partition) -> bool {
        self.mults
            .iter()
            .all(|&(p, m)| m <= other.multiplicity_of(p))
    }

    /// Every subpartition of `self`, in a deterministic order.
    pub fn subpartitions(&self) -> Vec<Partition> {
        let mut out = vec![Partition::empty()];
        for &(p, m) in &self.mults {
            let mut next = Vec::with_capacity(out.len() * (m as usize + 1));
            for sub in &out {
                for take in 0..=m {
                    let mut mults = sub.mults.clone();
                    if take > 0 {
                        mults.push((p, take));
                    }
                    next.push(Partition { mults });
                }
            }
            out = next;
        }
        out
    }
}

impl Mul for &Partition {
    type Output = Partition;
    fn mul(self, rhs: &Partition) -> Partition {
        self.multiply(rhs)
    }
}

/// Canonical text form: `<1^2,3>` with parts ascending and `^1` omitted;
/// `<>` is the empty partition.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, &(p, m)) in self.mults.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if m == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{m}")?;
            }
        }
        write!(f, ">")
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = s
            .strip_prefix('<')
            .and_then(|rest| rest.strip_suffix('>'))
            .ok_or_else(|| Error::Parse(format!("partition must look like <1^2,3>, got {s:?}")))?;
        if inner.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let mut pairs = Vec::new();
        for tok in inner.split(',') {
            let tok = tok.trim();
            let (part, mult) = match tok.split_once('^') {
                Some((p, m)) => (p.trim(), m.trim()),
                None => (tok, "1"),
            };
            let part: u64 = part
                .parse()
                .map_err(|_| Error::Parse(format!("bad part {part:?} in {s:?}")))?;
            let mult: u64 = mult
                .parse()
                .map_err(|_| Error::Parse(format!("bad multiplicity {mult:?} in {s:?}")))?;
            if part == 0 {
                return Err(Error::ZeroPart);
            }
            if mult == 0 {
                return Err(Error::Parse(format!("zero multiplicity in {s:?}")));
            }
            pairs.push((part, mult));
        }
        // The canonical form keeps parts strictly increasing; be lenient on
        // input order but reject duplicates.
        let mut seen = pairs.iter().map(|&(p, _)| p).collect::<Vec<_>>();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse(format!("repeated part in {s:?}")));
        }
        Partition::from_multiplicities(pairs)
    }
}

/// Constraints shared by the size and norm enumerators.
#[derive(Debug, Clone, Default)]
pub struct Constraints {
    /// All parts distinct.
    pub distinct: bool,
    /// All parts odd.
    pub odd: bool,
    /// No part equal to 1.
    pub no_ones: bool,
    /// At most this many parts.
    pub max_length: Option<u64>,
    /// Every part at least this value.
    pub min_part: Option<u64>,
}

impl Constraints {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn distinct() -> Self {
        Constraints {
            distinct: true,
            ..Self::default()
        }
    }

    pub fn odd() -> Self {
        Constraints {
            odd: true,
            ..Self::default()
        }
    }

    pub fn no_ones() -> Self {
        Constraints {
            no_ones: true,
            ..Self::default()
        }
    }

    pub fn with_max_length(mut self, max_length: u64) -> Self {
        self.max_length = Some(max_length);
        self
    }

    pub fn with_min_part(mut self, min_part: u64) -> Self {
        self.min_part = Some(min_part);
        self
    }

    fn floor_part(&self) -> u64 {
        let lo = self.min_part.unwrap_or(1);
        if self.no_ones {
            lo.max(2)
        } else {
            lo
        }
    }

    fn admits(&self, part: u64) -> bool {
        part >= self.floor_part() && (!self.odd || part % 2 == 1)
    }
}

/// All partitions of size `n` that meet the constraints, each exactly once,
/// in lexicographically descending order of the weakly decreasing part list.
pub fn partitions_of_size(n: u64, constraints: &Constraints) -> SizeIter {
    SizeIter {
        constraints: constraints.clone(),
        stack: vec![SizeFrame {
            remaining: n,
            candidate: n,
        }],
        path: Vec::new(),
        emit_empty: n == 0,
    }
}

struct SizeFrame {
    remaining: u64,
    /// Next part value to try; counts down to the constraint floor.
    candidate: u64,
}

pub struct SizeIter {
    constraints: Constraints,
    stack: Vec<SizeFrame>,
    path: Vec<u64>,
    emit_empty: bool,
}

impl Iterator for SizeIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.emit_empty {
            self.emit_empty = false;
            self.stack.clear();
            return Some(Partition::empty());
        }
        let floor = self.constraints.floor_part();
        loop {
            let depth = self.stack.len().checked_sub(1)?;
            let frame = &mut self.stack[depth];
            if frame.candidate < floor {
                self.stack.pop();
                self.path.pop();
                continue;
            }
            let part = frame.candidate;
            frame.candidate -= 1;
            if !self.constraints.admits(part) {
                continue;
            }
            if let Some(max_len) = self.constraints.max_length {
                if self.path.len() as u64 >= max_len {
                    // No room for another part at this depth or deeper.
                    self.stack.pop();
                    self.path.pop();
                    continue;
                }
            }
            let remaining = self.stack[depth].remaining - part;
            self.path.push(part);
            if remaining == 0 {
                let result =
                    Partition::from_parts(self.path.iter().copied()).expect("parts are positive");
                self.path.pop();
                return Some(result);
            }
            let next_max = if self.constraints.distinct {
                part - 1
            } else {
                part
            };
            self.stack.push(SizeFrame {
                remaining,
                candidate: next_max.min(remaining),
            });
        }
    }
}

/// All partitions with product of parts equal to `n` (multiplicative
/// partitions) meeting the constraints. Parts equal to 1 are never generated:
/// the norm is invariant under appending 1s, so admitting them would make the
/// stream infinite.
pub fn partitions_of_norm(n: u64, constraints: &Constraints) -> NormIter {
    assert!(n >= 1, "norm enumeration requires n >= 1");
    let mut it = NormIter {
        constraints: constraints.clone(),
        stack: Vec::new(),
        path: Vec::new(),
        emit_empty: n == 1,
    };
    if n > 1 {
        let cands = it.candidates(n, n);
        it.stack.push(NormFrame {
            remaining: n,
            cands,
            next: 0,
        });
    }
    it
}

struct NormFrame {
    remaining: u64,
    /// Admissible divisors of `remaining`, descending.
    cands: Vec<u64>,
    next: usize,
}

pub struct NormIter {
    constraints: Constraints,
    stack: Vec<NormFrame>,
    path: Vec<u64>,
    emit_empty: bool,
}

impl NormIter {
    fn candidates(&self, remaining: u64, max_part: u64) -> Vec<u64> {
        let floor = self.constraints.floor_part().max(2);
        let mut divs = Vec::new();
        let mut d = 1u64;
        while d.saturating_mul(d) <= remaining {
            if remaining % d == 0 {
                divs.push(d);
                divs.push(remaining / d);
            }
            d += 1;
        }
        divs.sort_unstable_by(|a, b| b.cmp(a));
        divs.dedup();
        divs.retain(|&p| p >= floor && p <= max_part && (!self.constraints.odd || p % 2 == 1));
        divs
    }
}

impl Iterator for NormIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.emit_empty {
            self.emit_empty = false;
            return Some(Partition::empty());
        }
        loop {
            let depth = self.stack.len().checked_sub(1)?;
            let frame = &mut self.stack[depth];
            if frame.next >= frame.cands.len() {
                self.stack.pop();
                self.path.pop();
                continue;
            }
            let part = frame.cands[frame.next];
            frame.next += 1;
            if let Some(max_len) = self.constraints.max_length {
                if self.path.len() as u64 >= max_len {
                    self.stack.pop();
                    self.path.pop();
                    continue;
                }
            }
            let remaining = self.stack[depth].remaining / part;
            self.path.push(part);
            if remaining == 1 {
                let result =
                    Partition::from_parts(self.path.iter().copied()).expect("parts are positive");
                self.path.pop();
                return Some(result);
            }
            let next_max = if self.constraints.distinct {
                part - 1
            } else {
                part
            };
            let cands = self.candidates(remaining, next_max);
            self.stack.push(NormFrame {
                remaining,
                cands,
                next: 0,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(list: &[u64]) -> Partition {
        Partition::from_parts(list.iter().copied()).unwrap()
    }

    #[test]
    fn size_examples() {
        assert_eq!(Partition::empty().size(), 0);
        assert_eq!(parts(&[1, 2, 2, 3]).size(), 8);
        assert_eq!(parts(&[1, 2, 3]).size(), 6);
    }

    #[test]
    fn length_and_extremes() {
        let p = parts(&[1, 2, 2, 3]);
        assert_eq!(p.length(), 4);
        let q = parts(&[1, 1, 3]);
        assert_eq!(q.largest_part().unwrap(), 3);
        assert_eq!(q.smallest_part().unwrap(), 1);
        assert!(Partition::empty().largest_part().is_err());
        assert!(Partition::empty().smallest_part().is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(Partition::empty().norm(), BigUint::from(1u32));
        assert_eq!(parts(&[1, 2, 3]).norm(), BigUint::from(6u32));
        assert_eq!(parts(&[2, 2, 3]).norm(), BigUint::from(12u32));
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(parts(&[1, 1]).mobius(), 0);
        assert_eq!(parts(&[1, 2, 3]).mobius(), -1);
        assert_eq!(Partition::empty().mobius(), 1);
    }

    #[test]
    fn multiply_examples() {
        let a = parts(&[1, 2]);
        let b = parts(&[2, 3]);
        assert_eq!(a.multiply(&b), parts(&[1, 2, 2, 3]));
        assert_eq!(a.multiply(&Partition::empty()), a);
    }

    #[test]
    fn subpartition_examples() {
        assert!(parts(&[2]).is_subpartition_of(&parts(&[1, 2, 2])));
        assert!(!parts(&[1, 1, 1]).is_subpartition_of(&parts(&[1, 1, 2])));
        let any = parts(&[4, 4, 9]);
        assert!(Partition::empty().is_subpartition_of(&any));
    }

    #[test]
    fn subpartitions_count_is_product_of_mult_plus_one() {
        let p = parts(&[1, 2, 2, 5]);
        // (1+1)(2+1)(1+1) = 12 subpartitions.
        assert_eq!(p.subpartitions().len(), 12);
    }

    #[test]
    fn enumerate_by_size_basics() {
        let all: Vec<_> = partitions_of_size(4, &Constraints::none()).collect();
        assert_eq!(all.len(), 5);
        let as_lists: Vec<Vec<u64>> = all.iter().map(|p| p.to_parts()).collect();
        assert_eq!(
            as_lists,
            vec![
                vec![4],
                vec![3, 1],
                vec![2, 2],
                vec![2, 1, 1],
                vec![1, 1, 1, 1]
            ]
        );

        let distinct: Vec<_> = partitions_of_size(5, &Constraints::distinct()).collect();
        assert_eq!(
            distinct.iter().map(|p| p.to_parts()).collect::<Vec<_>>(),
            vec![vec![5], vec![4, 1], vec![3, 2]]
        );
        let odd: Vec<_> = partitions_of_size(5, &Constraints::odd()).collect();
        assert_eq!(
            odd.iter().map(|p| p.to_parts()).collect::<Vec<_>>(),
            vec![vec![5], vec![3, 1, 1], vec![1, 1, 1, 1, 1]]
        );

        let zero: Vec<_> = partitions_of_size(0, &Constraints::none()).collect();
        assert_eq!(zero, vec![Partition::empty()]);
    }

    #[test]
    fn enumerate_by_size_respects_length_and_min_part() {
        let short: Vec<_> =
            partitions_of_size(6, &Constraints::none().with_max_length(2)).collect();
        assert_eq!(
            short.iter().map(|p| p.to_parts()).collect::<Vec<_>>(),
            vec![vec![6], vec![5, 1], vec![4, 2], vec![3, 3]]
        );
        let big_parts: Vec<_> =
            partitions_of_size(6, &Constraints::none().with_min_part(3)).collect();
        assert_eq!(
            big_parts.iter().map(|p| p.to_parts()).collect::<Vec<_>>(),
            vec![vec![6], vec![3, 3]]
        );
    }

    #[test]
    fn enumerate_by_norm_basics() {
        let pairs: Vec<_> =
            partitions_of_norm(12, &Constraints::no_ones().with_max_length(2)).collect();
        assert_eq!(
            pairs.iter().map(|p| p.to_parts()).collect::<Vec<_>>(),
            vec![vec![12], vec![6, 2], vec![4, 3]]
        );

        let one: Vec<_> = partitions_of_norm(1, &Constraints::none()).collect();
        assert_eq!(one, vec![Partition::empty()]);

        let prime: Vec<_> = partitions_of_norm(13, &Constraints::no_ones()).collect();
        assert_eq!(prime, vec![parts(&[13])]);
    }

    #[test]
    fn enumerate_by_norm_all_lengths() {
        let all: Vec<_> = partitions_of_norm(12, &Constraints::no_ones()).collect();
        assert_eq!(
            all.iter().map(|p| p.to_parts()).collect::<Vec<_>>(),
            vec![vec![12], vec![6, 2], vec![4, 3], vec![3, 2, 2]]
        );
    }

    #[test]
    fn text_form_round_trip() {
        for (text, list) in [
            ("<>", vec![]),
            ("<1^2,3>", vec![1, 1, 3]),
            ("<2>", vec![2]),
            ("<1,2^2,3>", vec![1, 2, 2, 3]),
        ] {
            let p = parts(&list);
            assert_eq!(p.to_string(), text);
            assert_eq!(text.parse::<Partition>().unwrap(), p);
        }
    }

    #[test]
    fn parser_rejects_garbage() {
        assert!("1^2,3".parse::<Partition>().is_err());
        assert!("<0>".parse::<Partition>().is_err());
        assert!("<2^0>".parse::<Partition>().is_err());
        assert!("<1,1>".parse::<Partition>().is_err());
        assert!("<x>".parse::<Partition>().is_err());
    }
}
