//! Sparse exact arithmetic in the polynomial ring generated by `h_1, h_2, …`.
//!
//! Elements are stored as maps from h-monomials to arbitrary-precision
//! integers. The generators are algebraically independent, so a product of
//! monomials is the multiset union of their parts.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::det;
use crate::error::{Error, Result};
use crate::partitions::IntVec;

/// The monomial `h_{μ_1} h_{μ_2} …`; the empty monomial is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct HMonomial(SmallVec<[u16; 8]>);

impl HMonomial {
    pub fn one() -> Self {
        HMonomial(SmallVec::new())
    }

    /// Builds a monomial from parts in any order; zero parts are dropped.
    pub fn from_parts(parts: &[u16]) -> Self {
        let mut v: SmallVec<[u16; 8]> = parts.iter().copied().filter(|&p| p > 0).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        HMonomial(v)
    }

    pub fn parts(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&p| p as u32).sum()
    }

    pub fn max_part(&self) -> u16 {
        self.0.first().copied().unwrap_or(0)
    }

    /// `self · h_part`.
    pub fn times_h(&self, part: u16) -> HMonomial {
        if part == 0 {
            return self.clone();
        }
        let mut v = self.0.clone();
        let pos = v.iter().position(|&p| p < part).unwrap_or(v.len());
        v.insert(pos, part);
        HMonomial(v)
    }

    pub fn times(&self, other: &HMonomial) -> HMonomial {
        let (a, b) = (&self.0, &other.0);
        let mut v = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] >= b[j] {
                v.push(a[i]);
                i += 1;
            } else {
                v.push(b[j]);
                j += 1;
            }
        }
        v.extend_from_slice(&a[i..]);
        v.extend_from_slice(&b[j..]);
        HMonomial(v)
    }
}

/// Degree first, then lexicographic on the parts.
impl Ord for HMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for HMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let p = self.0[i];
            let run = self.0[i..].iter().take_while(|&&q| q == p).count();
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if run > 1 {
                write!(f, "h{}^{}", p, run)?;
            } else {
                write!(f, "h{}", p)?;
            }
            i += run;
        }
        Ok(())
    }
}

/// An element of `Z[h_1, h_2, …]` in canonical sparse form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymFunc {
    terms: FxHashMap<HMonomial, BigInt>,
}

impl SymFunc {
    pub fn zero() -> Self {
        SymFunc::default()
    }

    pub fn one() -> Self {
        SymFunc::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut f = SymFunc::zero();
        f.add_term(HMonomial::one(), c);
        f
    }

    /// The generator `h_m` (`h_0 = 1`, `h_m = 0` for `m < 0`).
    pub fn h(m: i64) -> Self {
        match m.cmp(&0) {
            Ordering::Less => SymFunc::zero(),
            Ordering::Equal => SymFunc::one(),
            Ordering::Greater => SymFunc::monomial(HMonomial::from_parts(&[m as u16]), 1.into()),
        }
    }

    pub fn monomial(m: HMonomial, c: BigInt) -> Self {
        let mut f = SymFunc::zero();
        f.add_term(m, c);
        f
    }

    pub fn from_terms<I: IntoIterator<Item = (HMonomial, BigInt)>>(it: I) -> Self {
        let mut f = SymFunc::zero();
        for (m, c) in it {
            f.add_term(m, c);
        }
        f
    }

    pub(crate) fn from_map(terms: FxHashMap<HMonomial, BigInt>) -> Self {
        let mut terms = terms;
        terms.retain(|_, c| !c.is_zero());
        SymFunc { terms }
    }

    pub fn add_term(&mut self, m: HMonomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &HMonomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HMonomial, &BigInt)> {
        self.terms.iter()
    }

    /// Terms in canonical monomial order.
    pub fn sorted_terms(&self) -> Vec<(&HMonomial, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// Maximum monomial degree, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(HMonomial::degree).max()
    }

    /// Largest part of any monomial (0 for constants and zero).
    pub fn max_part(&self) -> u16 {
        self.terms
            .keys()
            .map(HMonomial::max_part)
            .max()
            .unwrap_or(0)
    }

    pub fn homogeneous_part(&self, d: u32) -> SymFunc {
        SymFunc {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Top degree and the homogeneous component in that degree.
    pub fn top_component(&self) -> Result<(u32, SymFunc)> {
        let d = self.degree().ok_or(Error::ZeroInput)?;
        Ok((d, self.homogeneous_part(d)))
    }

    pub fn scale(&self, c: &BigInt) -> SymFunc {
        if c.is_zero() {
            return SymFunc::zero();
        }
        SymFunc {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &SymFunc, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    fn product(&self, other: &SymFunc) -> SymFunc {
        let mut out: FxHashMap<HMonomial, BigInt> = FxHashMap::default();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                *out.entry(a.times(b)).or_default() += x * y;
            }
        }
        SymFunc::from_map(out)
    }
}

impl Add for &SymFunc {
    type Output = SymFunc;
    fn add(self, rhs: &SymFunc) -> SymFunc {
        let mut out = self.clone();
        out.add_scaled(rhs, &BigInt::one());
        out
    }
}

impl Sub for &SymFunc {
    type Output = SymFunc;
    fn sub(self, rhs: &SymFunc) -> SymFunc {
        let mut out = self.clone();
        out.add_scaled(rhs, &-BigInt::one());
        out
    }
}

impl Neg for &SymFunc {
    type Output = SymFunc;
    fn neg(self) -> SymFunc {
        self.scale(&-BigInt::one())
    }
}

impl Mul for &SymFunc {
    type Output = SymFunc;
    fn mul(self, rhs: &SymFunc) -> SymFunc {
        self.product(rhs)
    }
}

impl Mul<&BigInt> for &SymFunc {
    type Output = SymFunc;
    fn mul(self, rhs: &BigInt) -> SymFunc {
        self.scale(rhs)
    }
}

impl Add for SymFunc {
    type Output = SymFunc;
    fn add(self, rhs: SymFunc) -> SymFunc {
        &self + &rhs
    }
}

impl Sub for SymFunc {
    type Output = SymFunc;
    fn sub(self, rhs: SymFunc) -> SymFunc {
        &self - &rhs
    }
}

impl Mul for SymFunc {
    type Output = SymFunc;
    fn mul(self, rhs: SymFunc) -> SymFunc {
        &self * &rhs
    }
}

impl Neg for SymFunc {
    type Output = SymFunc;
    fn neg(self) -> SymFunc {
        -&self
    }
}

impl fmt::Display for SymFunc {
    /// Highest degree first, e.g. `h1^2 + h1 - h2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms = self.sorted_terms();
        terms.reverse();
        for (n, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.parts().is_empty() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", abs, m)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    h: Vec<u16>,
    c: String,
}

impl Serialize for SymFunc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let recs: Vec<TermRecord> = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| TermRecord {
                h: m.parts().to_vec(),
                c: c.to_string(),
            })
            .collect();
        recs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let recs = Vec::<TermRecord>::deserialize(d)?;
        let mut f = SymFunc::zero();
        for r in recs {
            let c: BigInt = r.c.parse().map_err(serde::de::Error::custom)?;
            f.add_term(HMonomial::from_parts(&r.h), c);
        }
        Ok(f)
    }
}

/// Binomial coefficient `C(n, i)` with `C(−1, 0) = 1` and `C(n, i) = 0`
/// for `0 ≤ n < i`.
pub(crate) fn binom(n: i64, i: i64) -> BigInt {
    if i < 0 {
        return BigInt::zero();
    }
    if i == 0 {
        return BigInt::one();
    }
    // only n >= -1 occurs here
    if n < i {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for t in 0..i {
        acc *= BigInt::from(n - t);
        acc /= BigInt::from(t + 1);
    }
    acc
}

/// Coefficients of `k_m^(r) = Σ_{i=0}^{m} C(r+i−1, i) h_{m−i}` as
/// `(part, coeff)` pairs; part 0 stands for `h_0 = 1`.
pub(crate) fn k_hom_terms(m: i64, r: u32) -> Vec<(u16, BigInt)> {
    if m < 0 {
        return Vec::new();
    }
    (0..=m)
        .map(|i| ((m - i) as u16, binom(r as i64 + i - 1, i)))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// The inhomogeneous `k_m^(r)`; zero for `m < 0`, `h_m` for `r = 0`.
pub fn k_hom(m: i64, r: u32) -> SymFunc {
    SymFunc::from_terms(
        k_hom_terms(m, r)
            .into_iter()
            .map(|(p, c)| (HMonomial::from_parts(&[p]), c)),
    )
}

/// `g_γ = det(k^{(i−1)}_{γ_i + j − i})`, expanded in h-monomials.
pub fn g_of_vector(gamma: &IntVec) -> SymFunc {
    det::sum_of_g(
        std::iter::once((gamma.entries(), &BigInt::one())),
        gamma.len(),
    )
}

/// True iff some row of the determinant for `g_γ` vanishes, i.e. there is
/// an `i` with `γ_i < i − ℓ`. Such `γ` have `g_γ = 0`.
pub fn is_row_dead(gamma: &IntVec) -> bool {
    let l = gamma.len() as i64;
    gamma
        .entries()
        .iter()
        .enumerate()
        .any(|(n, &g)| (g as i64) < (n as i64 + 1) - l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(parts: &[u16]) -> HMonomial {
        HMonomial::from_parts(parts)
    }

    fn sf(terms: &[(&[u16], i64)]) -> SymFunc {
        SymFunc::from_terms(terms.iter().map(|(p, c)| (h(p), BigInt::from(*c))))
    }

    #[test]
    fn ring_identities() {
        let h1 = SymFunc::h(1);
        let h2 = SymFunc::h(2);
        assert_eq!(&h1 * &h2, sf(&[(&[2, 1], 1)]));
        let f = sf(&[(&[3, 1], 4), (&[], -2)]);
        assert!((&f + &-&f).is_zero());
        let one = SymFunc::one();
        let lhs = &(&h1 + &one) * &(&h1 - &one);
        assert_eq!(lhs, sf(&[(&[1, 1], 1), (&[], -1)]));
    }

    #[test]
    fn k_hom_examples() {
        assert_eq!(k_hom(3, 0), SymFunc::h(3));
        assert!(k_hom(-2, 5).is_zero());
        assert_eq!(k_hom(2, 1), sf(&[(&[2], 1), (&[1], 1), (&[], 1)]));
        // C(r+i-1, i) for r = 2: 1, 2, 3
        assert_eq!(k_hom(2, 2), sf(&[(&[2], 1), (&[1], 2), (&[], 3)]));
    }

    #[test]
    fn k_hom_top_term_is_h_m() {
        for m in 0..8 {
            for r in 0..6 {
                let (d, top) = k_hom(m, r).top_component().unwrap();
                assert_eq!(d as i64, m);
                assert_eq!(top, SymFunc::h(m));
            }
        }
    }

    #[test]
    fn g_examples() {
        for m in 0..6 {
            assert_eq!(g_of_vector(&IntVec::new(vec![m])), SymFunc::h(m as i64));
        }
        assert_eq!(
            g_of_vector(&IntVec::new(vec![1, 1])),
            sf(&[(&[1, 1], 1), (&[1], 1), (&[2], -1)])
        );
        assert_eq!(g_of_vector(&IntVec::new(vec![2, 0])), SymFunc::h(2));
        assert_eq!(g_of_vector(&IntVec::new(vec![])), SymFunc::one());
    }

    #[test]
    fn top_component_examples() {
        let f = sf(&[(&[1, 1], 1), (&[1], 1)]);
        assert_eq!(f.top_component().unwrap(), (2, sf(&[(&[1, 1], 1)])));
        assert_eq!(k_hom(2, 1).top_component().unwrap(), (2, SymFunc::h(2)));
        let g11 = g_of_vector(&IntVec::new(vec![1, 1]));
        assert_eq!(
            g11.top_component().unwrap(),
            (2, sf(&[(&[1, 1], 1), (&[2], -1)]))
        );
        assert_eq!(SymFunc::zero().top_component(), Err(Error::ZeroInput));
    }

    #[test]
    fn row_dead_examples() {
        assert!(is_row_dead(&IntVec::new(vec![3, -1])));
        assert!(is_row_dead(&IntVec::new(vec![1, -2])));
        assert!(!is_row_dead(&IntVec::new(vec![0, 0, 0])));
        assert!(g_of_vector(&IntVec::new(vec![3, -1])).is_zero());
        assert!(g_of_vector(&IntVec::new(vec![1, -2])).is_zero());
    }

    #[test]
    fn canonical_order_and_json() {
        let f = sf(&[(&[2], -1), (&[1, 1], 1), (&[1], 1), (&[], 3)]);
        let js = serde_json::to_string(&f).unwrap();
        assert_eq!(
            js,
            r#"[{"h":[],"c":"3"},{"h":[1],"c":"1"},{"h":[1,1],"c":"1"},{"h":[2],"c":"-1"}]"#
        );
        let back: SymFunc = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f);
        assert_eq!(f.to_string(), "-h2 + h1^2 + h1 + 3");
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(-1, 0), BigInt::one());
        assert_eq!(binom(-1, 3), BigInt::zero());
        assert_eq!(binom(5, 2), BigInt::from(10));
        assert_eq!(binom(2, 3), BigInt::zero());
    }
}
