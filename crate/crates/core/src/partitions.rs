//! Integer vectors, partitions and k-bounded enumeration.
//!
//! Indices in the public API are 1-based, matching the usual notation for
//! rows of a root ideal. Partitions carry an explicit length: trailing zeros
//! are kept, because the root ideal attached to a partition depends on it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fixed-length integer vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntVec(Vec<i32>);

impl IntVec {
    pub fn new(entries: Vec<i32>) -> Self {
        IntVec(entries)
    }

    pub fn zeros(len: usize) -> Self {
        IntVec(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<i32> {
        self.0
    }

    /// Sum of the entries.
    pub fn size(&self) -> i64 {
        self.0.iter().map(|&x| x as i64).sum()
    }

    /// Entry at 1-based position `i`.
    pub fn get(&self, i: usize) -> i32 {
        self.0[i - 1]
    }

    /// Applies `sign * ε_step`.
    pub fn shifted(&self, step: EpsilonStep, sign: i32) -> IntVec {
        let mut out = self.0.clone();
        match step {
            EpsilonStep::Index(i) => out[i - 1] += sign,
            EpsilonStep::Root(i, j) => {
                out[i - 1] += sign;
                out[j - 1] -= sign;
            }
        }
        IntVec(out)
    }

    /// `γ − ε_i`.
    pub fn lowered(&self, i: usize) -> IntVec {
        self.shifted(EpsilonStep::Index(i), -1)
    }

    /// `γ + ε_i − ε_j`.
    pub fn raised(&self, i: usize, j: usize) -> IntVec {
        self.shifted(EpsilonStep::Root(i, j), 1)
    }

    pub fn is_partition(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1]) && self.0.iter().all(|&x| x >= 0)
    }
}

impl From<Vec<i32>> for IntVec {
    fn from(v: Vec<i32>) -> Self {
        IntVec(v)
    }
}

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.0)
    }
}

impl FromStr for IntVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_list(s).map(IntVec)
    }
}

/// A basis step `ε_i` or `ε_(i,j) = ε_i − ε_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EpsilonStep {
    Index(usize),
    Root(usize, usize),
}

/// A weakly decreasing vector of nonnegative integers with a fixed length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct Partition(Vec<i32>);

impl Partition {
    pub fn new(parts: Vec<i32>) -> Result<Self> {
        if parts.iter().any(|&p| p < 0) {
            return Err(Error::invalid(format!("negative part in {:?}", parts)));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!(
                "{:?} is not weakly decreasing",
                parts
            )));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[i32] {
        &self.0
    }

    /// Logical length, trailing zeros included.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Part at 1-based position `i`.
    pub fn get(&self, i: usize) -> i32 {
        self.0[i - 1]
    }

    pub fn size(&self) -> i64 {
        self.0.iter().map(|&x| x as i64).sum()
    }

    /// Number of positive parts.
    pub fn positive_len(&self) -> usize {
        self.0.iter().take_while(|&&p| p > 0).count()
    }

    pub fn has_trailing_zeros(&self) -> bool {
        self.positive_len() < self.len()
    }

    /// The same partition with trailing zeros removed.
    pub fn trimmed(&self) -> Partition {
        Partition(self.0[..self.positive_len()].to_vec())
    }

    pub fn is_k_bounded(&self, k: i32) -> bool {
        self.0.first().is_none_or(|&p| p <= k)
    }

    pub fn is_strict(&self) -> bool {
        self.0.windows(2).all(|w| w[0] > w[1])
    }

    pub fn to_intvec(&self) -> IntVec {
        IntVec(self.0.clone())
    }

    /// Checks `λ ∈ P^k_ℓ`, allowing trailing zeros.
    pub fn check_kbounded_len(&self, k: i32, len: usize) -> Result<()> {
        if self.len() != len {
            return Err(Error::invalid(format!(
                "{} has length {}, expected {}",
                self,
                self.len(),
                len
            )));
        }
        if !self.is_k_bounded(k) {
            return Err(Error::invalid(format!("{} is not {}-bounded", self, k)));
        }
        Ok(())
    }
}

impl TryFrom<Vec<i32>> for Partition {
    type Error = Error;

    fn try_from(v: Vec<i32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl TryFrom<IntVec> for Partition {
    type Error = Error;

    fn try_from(v: IntVec) -> Result<Self> {
        Partition::new(v.0)
    }
}

impl From<Partition> for Vec<i32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.0)
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Partition::new(parse_list(s)?)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[i32]) -> fmt::Result {
    for (n, x) in xs.iter().enumerate() {
        if n > 0 {
            f.write_str(",")?;
        }
        write!(f, "{}", x)?;
    }
    Ok(())
}

fn parse_list(s: &str) -> Result<Vec<i32>> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i32>()
                .map_err(|e| Error::invalid(format!("bad integer {:?}: {}", t, e)))
        })
        .collect()
}

/// All partitions with exactly `len` positive parts, largest part at most
/// `k` and size at most `max_size`.
///
/// Ordered by size ascending, then lexicographically descending.
pub fn enumerate_kbounded(k: u32, len: usize, max_size: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(len);
    for size in 0..=max_size as i64 {
        fill(k as i32, len, size, &mut buf, &mut out);
    }
    out
}

fn fill(cap: i32, remaining: usize, size: i64, buf: &mut Vec<i32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        if size == 0 {
            out.push(Partition(buf.clone()));
        }
        return;
    }
    // each of the remaining parts is at least 1
    let hi = (cap as i64).min(size - (remaining as i64 - 1));
    let mut p = hi;
    while p >= 1 {
        if p * remaining as i64 >= size {
            buf.push(p as i32);
            fill(p as i32, remaining - 1, size - p, buf, out);
            buf.pop();
        }
        p -= 1;
    }
}

/// All k-bounded partitions of `size` of any length (no zeros), in
/// lexicographically descending order.
pub fn kbounded_of_size(k: u32, size: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    for len in 0..=size as usize {
        let mut buf = Vec::new();
        fill(k as i32, len, size as i64, &mut buf, &mut out);
    }
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Membership in the class of k-bounded length-`len` partitions with
/// `λ_{x−1} > λ_x` whenever `k − λ_x + x < len` (with `λ_0 = ∞`).
pub fn in_hat_class(lambda: &Partition, k: i32, len: usize) -> Result<bool> {
    lambda.check_kbounded_len(k, len)?;
    let l = len as i64;
    for x in 2..=len {
        let lx = lambda.get(x) as i64;
        if (k as i64) - lx + (x as i64) < l && lambda.get(x - 1) <= lambda.get(x) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn count_oracle(k: i32, len: usize, max_size: i64) -> usize {
        // parts p_1 >= ... >= p_len >= 1, p_1 <= k
        fn go(cap: i32, rem: usize, budget: i64) -> usize {
            if rem == 0 {
                return 1;
            }
            (1..=cap)
                .filter(|&x| x as i64 <= budget)
                .map(|x| go(x, rem - 1, budget - x as i64))
                .sum()
        }
        go(k, len, max_size)
    }

    #[test]
    fn enumerate_edge_cases() {
        assert_eq!(enumerate_kbounded(0, 0, 7), vec![Partition::empty()]);
        assert_eq!(enumerate_kbounded(1, 2, 2), vec![p(&[1, 1])]);
        assert!(enumerate_kbounded(0, 2, 9).is_empty());
        assert!(enumerate_kbounded(3, 4, 3).is_empty());
    }

    #[test]
    fn enumerate_contains_fixture() {
        let all = enumerate_kbounded(5, 6, 19);
        assert!(all.contains(&p(&[5, 4, 3, 3, 2, 2])));
    }

    #[test]
    fn enumerate_order_and_count() {
        for k in 0..5 {
            for len in 0..5 {
                for max in 0..14 {
                    let all = enumerate_kbounded(k, len, max);
                    assert_eq!(all.len(), count_oracle(k as i32, len, max as i64));
                    for w in all.windows(2) {
                        let (a, b) = (&w[0], &w[1]);
                        assert!(a.size() < b.size() || (a.size() == b.size() && a > b));
                    }
                    for lam in &all {
                        assert_eq!(lam.positive_len(), len);
                        assert!(lam.is_k_bounded(k as i32));
                    }
                }
            }
        }
    }

    #[test]
    fn hat_class_examples() {
        assert!(in_hat_class(&p(&[5, 4, 3, 3, 2, 2]), 5, 6).unwrap());
        assert!(!in_hat_class(&p(&[7, 6, 5, 5, 4, 4, 4, 3, 3, 3, 2, 2, 1]), 7, 13).unwrap());
        assert!(in_hat_class(&p(&[3, 2, 1]), 3, 3).unwrap());
        assert!(in_hat_class(&p(&[6, 4, 3, 1]), 6, 4).unwrap());
        assert!(in_hat_class(&p(&[4, 4]), 3, 2).is_err());
        assert!(in_hat_class(&p(&[3, 2]), 3, 3).is_err());
    }

    #[test]
    fn strict_partitions_are_in_hat_class() {
        for k in 1..7 {
            for len in 1..5 {
                for lam in enumerate_kbounded(k, len, 30) {
                    if lam.is_strict() {
                        assert!(in_hat_class(&lam, k as i32, len).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let lam: Partition = "5,4,3,3,2,2".parse().unwrap();
        assert_eq!(lam.to_string(), "5,4,3,3,2,2");
        assert_eq!("(7, 2, 0)".parse::<Partition>().unwrap().len(), 3);
        assert!("1,2".parse::<Partition>().is_err());
        assert!("1,x".parse::<IntVec>().is_err());
        assert_eq!("".parse::<Partition>().unwrap(), Partition::empty());
        let v: IntVec = "3,-1".parse().unwrap();
        assert_eq!(v.size(), 2);
    }

    #[test]
    fn trailing_zeros_are_significant() {
        let a = p(&[2, 2, 0]);
        assert_ne!(a, p(&[2, 2]));
        assert_eq!(a.trimmed(), p(&[2, 2]));
        assert!(a.has_trailing_zeros());
    }
}
