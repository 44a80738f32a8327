//! Katalan functions evaluated at a point `h_m ↦ a_m` of `Z/p`, `p = 2^61 − 1`.
//!
//! A nonzero element of `Z[h_1, h_2, …]` of degree `D` vanishes at a uniform
//! random point with probability at most `D / p`, so agreement of values at
//! a few seeded points is a cheap identity test for large sweeps.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use rustc_hash::FxHashMap;

use crate::katalan::{max_potential, potential, KatalanSpec};
use crate::rootideal::{Root, RootIdeal, RootMultiset};
use crate::symfunc::SymFunc;

pub const P: u64 = (1 << 61) - 1;

fn reduce(x: u128) -> u64 {
    let lo = (x as u64) & P;
    let hi = (x >> 61) as u64;
    let s = lo + hi;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn mul(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn from_i64(x: i64) -> u64 {
    let m = x.rem_euclid(P as i64);
    m as u64
}

/// A point `h_m ↦ a_m` with the derived table of `k^(r)_m` values.
#[derive(Clone, Debug)]
pub struct ModPoint {
    h: Vec<u64>,
    /// `k[r][m]` for `m < h.len()`.
    k: Vec<Vec<u64>>,
}

impl ModPoint {
    /// Uniform values for `h_1, …, h_max_m`; rows `r < max_r` of the table.
    pub fn random(rng: &mut impl Rng, max_r: usize, max_m: usize) -> Self {
        let mut h = vec![1u64];
        h.extend((0..max_m).map(|_| rng.gen_range(0..P)));
        let mut k: Vec<Vec<u64>> = vec![h.clone()];
        // k^(r)_m = k^(r−1)_m + k^(r)_(m−1)
        for r in 1..max_r.max(1) {
            let mut row = Vec::with_capacity(h.len());
            for m in 0..h.len() {
                let below = if m == 0 { 0 } else { row[m - 1] };
                row.push(add(k[r - 1][m], below));
            }
            k.push(row);
        }
        ModPoint { h, k }
    }

    fn entry(&self, r: usize, m: i64) -> u64 {
        if m < 0 {
            return 0;
        }
        let m = m as usize;
        assert!(
            r < self.k.len() && m < self.h.len(),
            "point table too small for k^({})_{}",
            r,
            m
        );
        self.k[r][m]
    }

    /// Value of a symmetric function at this point.
    pub fn eval(&self, f: &SymFunc) -> u64 {
        let mut acc = 0;
        for (m, c) in f.iter() {
            let mut v = c
                .mod_floor(&BigInt::from(P))
                .to_u64()
                .expect("reduced below p");
            for &p in m.parts() {
                v = mul(v, self.h[p as usize]);
            }
            acc = add(acc, v);
        }
        acc
    }

    /// `g_γ` at this point, by Gaussian elimination.
    pub fn g(&self, gamma: &[i32]) -> u64 {
        let l = gamma.len();
        if gamma
            .iter()
            .enumerate()
            .any(|(i, &x)| (x as i64) < i as i64 + 1 - l as i64)
        {
            return 0;
        }
        let mut a: Vec<Vec<u64>> = (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| self.entry(i, gamma[i] as i64 + j as i64 - i as i64))
                    .collect()
            })
            .collect();
        let mut det = 1u64;
        for c in 0..l {
            let Some(p) = (c..l).find(|&r| a[r][c] != 0) else {
                return 0;
            };
            if p != c {
                a.swap(p, c);
                det = sub(0, det);
            }
            det = mul(det, a[c][c]);
            let inv = pow(a[c][c], P - 2);
            for r in c + 1..l {
                if a[r][c] == 0 {
                    continue;
                }
                let f = mul(a[r][c], inv);
                for j in c..l {
                    let t = mul(f, a[c][j]);
                    a[r][j] = sub(a[r][j], t);
                }
            }
        }
        det
    }
}

type Key = smallvec::SmallVec<[i32; 8]>;

/// Memoized values of `∏ (1 − R_ij)^{−1} g_v` for one ideal at one point.
pub struct RaisingTable<'a> {
    point: &'a ModPoint,
    roots: Vec<Root>,
    /// `raisable[s][y]`: some root at index `≥ s` raises coordinate `y`.
    raisable: Vec<Vec<bool>>,
    memo: Vec<FxHashMap<Key, u64>>,
    g_memo: FxHashMap<Key, u64>,
}

impl<'a> RaisingTable<'a> {
    pub fn new(psi: &RootIdeal, point: &'a ModPoint) -> Self {
        let mut roots = psi.roots();
        roots.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)));
        let l = psi.len();
        let mut raisable = vec![vec![false; l + 1]; roots.len() + 1];
        for s in (0..roots.len()).rev() {
            raisable[s] = raisable[s + 1].clone();
            raisable[s][roots[s].0] = true;
        }
        RaisingTable {
            point,
            memo: vec![FxHashMap::default(); roots.len()],
            roots,
            raisable,
            g_memo: FxHashMap::default(),
        }
    }

    fn stuck_dead(&self, stage: usize, v: &[i32]) -> bool {
        let l = v.len() as i64;
        v.iter()
            .enumerate()
            .any(|(i, &x)| (x as i64) < i as i64 + 1 - l && !self.raisable[stage][i + 1])
    }

    fn value(&mut self, stage: usize, v: &Key, fmax: i64) -> u64 {
        if self.stuck_dead(stage, v) {
            return 0;
        }
        if stage == self.roots.len() {
            if let Some(&x) = self.g_memo.get(v) {
                return x;
            }
            let x = self.point.g(v);
            self.g_memo.insert(v.clone(), x);
            return x;
        }
        if let Some(&x) = self.memo[stage].get(v) {
            return x;
        }
        let (i, j) = self.roots[stage];
        let step = (j - i) as i64;
        let mut cur = v.clone();
        let mut f = potential(&cur);
        let mut acc = 0;
        while f <= fmax {
            acc = add(acc, self.value(stage + 1, &cur, fmax));
            cur[i - 1] += 1;
            cur[j - 1] -= 1;
            f += step;
        }
        self.memo[stage].insert(v.clone(), acc);
        acc
    }

    /// `K(Ψ; ∅; v)` at the point.
    pub fn raised(&mut self, v: &[i32]) -> u64 {
        let key = Key::from_slice(v);
        let fmax = max_potential(key.iter().map(|&x| x as i64).sum(), key.len());
        self.value(0, &key, fmax)
    }

    /// `K(Ψ; M; γ)` at the point.
    pub fn katalan(&mut self, marks: &RootMultiset, gamma: &[i32]) -> u64 {
        let l = gamma.len();
        let mut acc = 0;
        let mut shift = vec![0u32; l];
        loop {
            let mut w = 1i64;
            let mut v = gamma.to_vec();
            for z in 0..l {
                let m = marks.multiplicity(z + 1) as i64;
                let t = shift[z] as i64;
                w *= binom_small(m, t) * if t % 2 == 1 { -1 } else { 1 };
                v[z] -= t as i32;
            }
            let x = self.raised(&v);
            acc = add(acc, mul(from_i64(w), x));
            let mut z = 0;
            while z < l && shift[z] == marks.multiplicity(z + 1) {
                shift[z] = 0;
                z += 1;
            }
            if z == l {
                break;
            }
            shift[z] += 1;
        }
        acc
    }

    pub fn katalan_spec(&mut self, spec: &KatalanSpec) -> u64 {
        self.katalan(spec.marks(), spec.gamma().entries())
    }
}

fn binom_small(n: i64, k: i64) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) / (i + 1))
}

/// A point large enough for specs with `ℓ ≤ len` and entries up to `max_entry`.
pub fn point_for(rng: &mut impl Rng, len: usize, max_entry: i32) -> ModPoint {
    // raising keeps |v| fixed with v_x ≥ x − ℓ, which bounds v_1 + ℓ − 1
    let max_m = (max_entry.max(0) as usize) * len + len * len + len + 2;
    ModPoint::random(rng, len, max_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::katalan::evaluate;
    use crate::partitions::IntVec;
    use crate::selftest::random_specs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn field_arithmetic() {
        assert_eq!(mul(P - 1, P - 1), 1);
        assert_eq!(add(P - 1, 2), 1);
        assert_eq!(sub(1, 2), P - 1);
        assert_eq!(mul(pow(12345, P - 2), 12345), 1);
        assert_eq!(from_i64(-1), P - 1);
    }

    #[test]
    fn agrees_with_exact_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let point = point_for(&mut rng, 5, 6);
        for s in random_specs(11, 40, 4) {
            let exact = point.eval(&evaluate(&s));
            let mut table = RaisingTable::new(s.psi(), &point);
            assert_eq!(table.katalan_spec(&s), exact, "{}", s);
        }
    }

    #[test]
    fn determinant_matches_symbolic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let point = point_for(&mut rng, 4, 4);
        for g in [
            vec![2, 1, 0, 3],
            vec![1, 1, 1, 1],
            vec![0, 3, -1, 2],
            vec![4, -3, 1, 0],
        ] {
            let exact = crate::symfunc::g_of_vector(&IntVec::new(g.clone()));
            assert_eq!(point.g(&g), point.eval(&exact), "{:?}", g);
        }
    }
}
