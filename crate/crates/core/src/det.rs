//! Summation of `Σ c_γ g_γ` over many vectors at once.
//!
//! Row `i` of the matrix for `g_γ` depends only on `γ_i`, so a Laplace
//! expansion that walks the rows top to bottom can merge every vector that
//! shares the not-yet-expanded suffix `(γ_{i+1}, …, γ_ℓ)`. A state is the
//! pair (suffix, set of used columns); its value is the signed sum of all
//! partial products reaching it, which is exactly a memoized minor summed
//! over the combination.
//!
//! Coefficients run in `i128` with overflow checks and the whole sum is
//! redone in `BigInt` if anything overflows.

use std::collections::hash_map::Entry;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::symfunc::{k_hom_terms, HMonomial, SymFunc};

type Suffix = SmallVec<[i32; 8]>;

trait Coef: Clone + Sized {
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn is_zero(&self) -> bool;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn accumulate(&mut self, x: Self, negate: bool) -> Option<()>;
}

impl Coef for i128 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn accumulate(&mut self, x: Self, negate: bool) -> Option<()> {
        *self = if negate {
            self.checked_sub(x)?
        } else {
            self.checked_add(x)?
        };
        Some(())
    }
}

impl Coef for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn accumulate(&mut self, x: Self, negate: bool) -> Option<()> {
        if negate {
            *self -= x;
        } else {
            *self += x;
        }
        Some(())
    }
}

/// Monomial representation used inside the expansion.
trait Mono: Clone + Eq + std::hash::Hash {
    fn one() -> Self;
    fn times_h(&self, part: u16) -> Self;
    fn into_h(self) -> HMonomial;
}

impl Mono for HMonomial {
    fn one() -> Self {
        HMonomial::one()
    }
    fn times_h(&self, part: u16) -> Self {
        HMonomial::times_h(self, part)
    }
    fn into_h(self) -> HMonomial {
        self
    }
}

/// Exponent vector packed five bits per part, parts `1..=PACKED_PARTS`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Packed(u128);

const PACKED_PARTS: i64 = 25;
const PACKED_MAX_EXP: i64 = 31;

impl Mono for Packed {
    fn one() -> Self {
        Packed(0)
    }
    fn times_h(&self, part: u16) -> Self {
        if part == 0 {
            return *self;
        }
        Packed(self.0 + (1u128 << (5 * (part as u32 - 1))))
    }
    fn into_h(self) -> HMonomial {
        let mut parts = Vec::new();
        for p in (1..=PACKED_PARTS as u16).rev() {
            let e = (self.0 >> (5 * (p as u32 - 1))) & 31;
            parts.extend(std::iter::repeat_n(p, e as usize));
        }
        HMonomial::from_parts(&parts)
    }
}

type Poly<M, C> = FxHashMap<M, C>;

/// `Σ c · g_γ` over the given `(γ, c)` pairs, all of length `len`.
pub(crate) fn sum_of_g<'a, I>(combo: I, len: usize) -> SymFunc
where
    I: IntoIterator<Item = (&'a [i32], &'a BigInt)>,
{
    let items: Vec<(&[i32], &BigInt)> = combo.into_iter().collect();
    assert!(len <= 31, "determinants beyond 31 rows are not supported");
    for (g, _) in &items {
        assert_eq!(g.len(), len, "vector length mismatch");
    }
    // every entry in row i has degree at most γ_i + ℓ − i
    let l = len as i64;
    let mut max_part = 0i64;
    let mut max_deg = 0i64;
    for (g, _) in &items {
        let mut deg = 0;
        for (i, &x) in g.iter().enumerate() {
            let top = x as i64 + l - (i as i64 + 1);
            max_part = max_part.max(top);
            deg += top.max(0);
        }
        max_deg = max_deg.max(deg);
    }
    if max_part <= PACKED_PARTS && max_deg <= PACKED_MAX_EXP {
        if let Some(f) = run::<i128, Packed>(&items, len) {
            return f;
        }
        return run::<BigInt, Packed>(&items, len).expect("BigInt arithmetic cannot overflow");
    }
    if let Some(f) = run::<i128, HMonomial>(&items, len) {
        return f;
    }
    run::<BigInt, HMonomial>(&items, len).expect("BigInt arithmetic cannot overflow")
}

fn run<C: Coef, M: Mono>(items: &[(&[i32], &BigInt)], len: usize) -> Option<SymFunc> {
    let mut states: FxHashMap<(Suffix, u32), Poly<M, C>> = FxHashMap::default();
    for (g, c) in items {
        if Zero::is_zero(*c) {
            continue;
        }
        let key = (Suffix::from_slice(g), 0u32);
        let poly = states.entry(key).or_default();
        poly.entry(M::one())
            .or_insert_with(|| C::from_big(&BigInt::zero()).unwrap())
            .accumulate(C::from_big(c)?, false)?;
    }

    let mut entries: FxHashMap<(i64, u32), Vec<(u16, C)>> = FxHashMap::default();

    for row in 1..=len {
        let r = (row - 1) as u32;
        let mut next: FxHashMap<(Suffix, u32), Poly<M, C>> = FxHashMap::default();
        for ((suffix, mask), poly) in states {
            if poly.is_empty() {
                continue;
            }
            let g = suffix[0] as i64;
            let rest = Suffix::from_slice(&suffix[1..]);
            for col in 1..=len {
                let bit = 1u32 << (col - 1);
                if mask & bit != 0 {
                    continue;
                }
                let m = g + col as i64 - row as i64;
                if m < 0 {
                    continue;
                }
                let entry = match entries.entry((m, r)) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => {
                        let mut v = Vec::new();
                        for (p, c) in k_hom_terms(m, r) {
                            v.push((p, C::from_big(&c)?));
                        }
                        e.insert(v)
                    }
                };
                let negate = (mask >> col).count_ones() % 2 == 1;
                let target = next.entry((rest.clone(), mask | bit)).or_default();
                for (mono, c) in &poly {
                    for (part, e) in entry.iter() {
                        let prod = c.mul(e)?;
                        match target.entry(mono.times_h(*part)) {
                            Entry::Occupied(mut o) => o.get_mut().accumulate(prod, negate)?,
                            Entry::Vacant(v) => {
                                let mut z = C::from_big(&BigInt::zero()).unwrap();
                                z.accumulate(prod, negate)?;
                                v.insert(z);
                            }
                        }
                    }
                }
            }
        }
        for poly in next.values_mut() {
            poly.retain(|_, c| !c.is_zero());
        }
        states = next;
    }

    let full = if len == 0 { 0 } else { u32::MAX >> (32 - len) };
    let mut out: FxHashMap<HMonomial, BigInt> = FxHashMap::default();
    if let Some(poly) = states.remove(&(Suffix::new(), full)) {
        for (m, c) in poly {
            out.insert(m.into_h(), c.to_big());
        }
    }
    Some(SymFunc::from_map(out))
}
