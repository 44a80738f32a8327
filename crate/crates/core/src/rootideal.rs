//! Root ideals in `Δ_ℓ^+ = {(i, j) : 1 ≤ i < j ≤ ℓ}`.
//!
//! An upper order ideal is staircase shaped, so it is stored as one column
//! start per row: row `i` holds exactly the roots `(i, j)` with
//! `start_i ≤ j ≤ ℓ`, and `start_i = ℓ + 1` marks an empty row. The ideal
//! property is equivalent to `i + 1 ≤ start_i ≤ ℓ + 1` with the starts
//! weakly increasing.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{IntVec, Partition};

pub type Root = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RootIdealJson", into = "RootIdealJson")]
pub struct RootIdeal {
    len: usize,
    starts: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RootIdealJson {
    l: usize,
    #[serde(rename = "rowStarts")]
    row_starts: Vec<usize>,
}

impl TryFrom<RootIdealJson> for RootIdeal {
    type Error = Error;
    fn try_from(j: RootIdealJson) -> Result<Self> {
        RootIdeal::from_row_starts(j.l, j.row_starts)
    }
}

impl From<RootIdeal> for RootIdealJson {
    fn from(r: RootIdeal) -> Self {
        RootIdealJson {
            l: r.len,
            row_starts: r.starts,
        }
    }
}

impl RootIdeal {
    pub fn empty(len: usize) -> Self {
        RootIdeal {
            len,
            starts: vec![len + 1; len],
        }
    }

    /// All of `Δ_ℓ^+`.
    pub fn full(len: usize) -> Self {
        RootIdeal {
            len,
            starts: (1..=len).map(|i| i + 1).collect(),
        }
    }

    pub fn from_row_starts(len: usize, starts: Vec<usize>) -> Result<Self> {
        if starts.len() != len {
            return Err(Error::invalid(format!(
                "expected {} row starts, got {}",
                len,
                starts.len()
            )));
        }
        for (n, &c) in starts.iter().enumerate() {
            let i = n + 1;
            if c < i + 1 || c > len + 1 {
                return Err(Error::invalid(format!(
                    "row {} start {} out of range",
                    i, c
                )));
            }
        }
        if starts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid(format!(
                "row starts {:?} are not weakly increasing",
                starts
            )));
        }
        Ok(RootIdeal { len, starts })
    }

    /// Builds an ideal from an explicit root set, which must already be an
    /// upper order ideal.
    pub fn from_roots(len: usize, roots: &[Root]) -> Result<Self> {
        let set: BTreeSet<Root> = roots.iter().copied().collect();
        for &(i, j) in &set {
            if !(1 <= i && i < j && j <= len) {
                return Err(Error::invalid(format!(
                    "({}, {}) is not in Δ_{}^+",
                    i, j, len
                )));
            }
        }
        let mut starts = vec![len + 1; len];
        for &(i, j) in &set {
            starts[i - 1] = starts[i - 1].min(j);
        }
        let ideal = RootIdeal::from_row_starts(len, starts)?;
        if ideal.roots().len() != set.len() {
            return Err(Error::invalid("root set is not an upper order ideal"));
        }
        Ok(ideal)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.starts.iter().all(|&c| c == self.len + 1)
    }

    pub fn row_starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn row_start(&self, i: usize) -> usize {
        self.starts[i - 1]
    }

    pub fn contains(&self, (i, j): Root) -> bool {
        1 <= i && i < j && j <= self.len && j >= self.starts[i - 1]
    }

    /// Roots in row-major order.
    pub fn roots(&self) -> Vec<Root> {
        let mut out = Vec::new();
        for i in 1..=self.len {
            for j in self.starts[i - 1]..=self.len {
                out.push((i, j));
            }
        }
        out
    }

    pub fn num_roots(&self) -> usize {
        (1..=self.len).map(|i| self.row_len(i)).sum()
    }

    pub fn row_len(&self, i: usize) -> usize {
        self.len + 1 - self.starts[i - 1]
    }

    pub fn col_len(&self, j: usize) -> usize {
        (1..j).filter(|&i| self.starts[i - 1] <= j).count()
    }

    pub fn is_removable(&self, (i, j): Root) -> bool {
        if !self.contains((i, j)) || j != self.starts[i - 1] {
            return false;
        }
        i == self.len || self.starts[i] > j
    }

    pub fn is_addable(&self, (i, j): Root) -> bool {
        if !(1 <= i && i < j && j <= self.len) || self.contains((i, j)) {
            return false;
        }
        j + 1 == self.starts[i - 1] && (i == 1 || self.starts[i - 2] <= j)
    }

    pub fn removable_roots(&self) -> Vec<Root> {
        (1..=self.len)
            .filter(|&i| self.row_len(i) > 0)
            .map(|i| (i, self.starts[i - 1]))
            .filter(|&r| self.is_removable(r))
            .collect()
    }

    pub fn addable_roots(&self) -> Vec<Root> {
        (1..=self.len)
            .filter(|&i| self.starts[i - 1] > i + 1)
            .map(|i| (i, self.starts[i - 1] - 1))
            .filter(|&r| self.is_addable(r))
            .collect()
    }

    pub fn without(&self, root: Root) -> Result<RootIdeal> {
        if !self.is_removable(root) {
            return Err(Error::invalid(format!("{:?} is not removable", root)));
        }
        let mut out = self.clone();
        out.starts[root.0 - 1] += 1;
        Ok(out)
    }

    pub fn with(&self, root: Root) -> Result<RootIdeal> {
        if !self.is_addable(root) {
            return Err(Error::invalid(format!("{:?} is not addable", root)));
        }
        let mut out = self.clone();
        out.starts[root.0 - 1] -= 1;
        Ok(out)
    }

    /// Column `j` of the removable root in row `x`, if any.
    pub fn down(&self, x: usize) -> Option<usize> {
        if x == 0 || x > self.len {
            return None;
        }
        let j = self.starts[x - 1];
        self.is_removable((x, j)).then_some(j)
    }

    /// Row `i` of the removable root in column `x`, if any.
    pub fn up(&self, x: usize) -> Option<usize> {
        (1..x).find(|&i| self.starts[i - 1] == x && self.is_removable((i, x)))
    }

    /// `down` iterated `a` times from `x`; `a = 0` gives `x`.
    pub fn down_iter(&self, x: usize, a: usize) -> Option<usize> {
        let mut cur = x;
        for _ in 0..a {
            cur = self.down(cur)?;
        }
        Some(cur)
    }

    /// `(a, down(a), down²(a), …, b)`.
    pub fn bounce_path(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        if a == 0 || b > self.len || a > b {
            return Err(Error::invalid(format!(
                "no bounce path from {} to {}",
                a, b
            )));
        }
        let mut path = vec![a];
        let mut cur = a;
        while cur < b {
            match self.down(cur) {
                Some(n) => {
                    path.push(n);
                    cur = n;
                }
                None => break,
            }
        }
        if cur != b {
            return Err(Error::invalid(format!(
                "{} and {} are not on one bounce path",
                a, b
            )));
        }
        Ok(path)
    }

    /// Largest vertex of the bounce path through `x`.
    pub fn bot(&self, x: usize) -> usize {
        let mut cur = x;
        while let Some(n) = self.down(cur) {
            cur = n;
        }
        cur
    }

    /// Smallest vertex of the bounce path through `x`.
    pub fn top(&self, x: usize) -> usize {
        let mut cur = x;
        while let Some(p) = self.up(cur) {
            cur = p;
        }
        cur
    }

    pub fn has_wall(&self, r: usize) -> bool {
        r >= 1 && r < self.len && self.row_len(r) == self.row_len(r + 1)
    }

    pub fn has_ceiling(&self, c: usize) -> bool {
        c >= 1 && c < self.len && self.col_len(c) == self.col_len(c + 1)
    }

    /// Removable roots `(r, c)` and `(r+1, c+1)` with `c ∈ [r+2, ℓ−1]`.
    pub fn has_mirror(&self, r: usize) -> bool {
        if r == 0 || r >= self.len {
            return false;
        }
        match (self.down(r), self.down(r + 1)) {
            (Some(c), Some(c1)) => c1 == c + 1 && c >= r + 2 && c < self.len,
            _ => false,
        }
    }

    /// Last nonempty row, 0 for the empty ideal.
    pub fn bottom_row(&self) -> usize {
        (1..=self.len)
            .rev()
            .find(|&i| self.row_len(i) > 0)
            .unwrap_or(0)
    }

    /// Grid drawing: `γ_i` on the diagonal, `#` for a root, `*` for a root
    /// carrying a mark, `.` elsewhere. Marks fill each column from the top.
    pub fn diagram(&self, marks: Option<&RootMultiset>, gamma: Option<&IntVec>) -> String {
        let l = self.len;
        let mut cells = vec![vec![".".to_string(); l]; l];
        for i in 1..=l {
            if let Some(g) = gamma {
                cells[i - 1][i - 1] = g.get(i).to_string();
            } else {
                cells[i - 1][i - 1] = "o".to_string();
            }
            for j in self.starts[i - 1]..=l {
                cells[i - 1][j - 1] = "#".to_string();
            }
        }
        if let Some(m) = marks {
            for j in 1..=l {
                for i in 1..=(m.multiplicity(j) as usize).min(j.saturating_sub(1)) {
                    cells[i - 1][j - 1] = "*".to_string();
                }
            }
        }
        let width = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(1);
        let mut out = String::new();
        for row in cells {
            let line: Vec<String> = row
                .iter()
                .map(|c| format!("{:>w$}", c, w = width))
                .collect();
            out.push_str(line.join(" ").trim_end());
            out.push('\n');
        }
        if let Some(m) = marks {
            let overflow: Vec<String> = (1..=l)
                .filter(|&j| m.multiplicity(j) as usize > j.saturating_sub(1))
                .map(|j| format!("{}x{}", m.multiplicity(j), j))
                .collect();
            if !overflow.is_empty() {
                out.push_str(&format!("marks beyond the grid: {}\n", overflow.join(" ")));
            }
        }
        out
    }
}

impl fmt::Display for RootIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let roots: Vec<String> = self
            .roots()
            .iter()
            .map(|(i, j)| format!("({},{})", i, j))
            .collect();
        write!(f, "{{{}}}", roots.join(","))
    }
}

/// A multiset on `[ℓ]`, stored as multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootMultiset {
    counts: Vec<u32>,
}

impl RootMultiset {
    pub fn empty(len: usize) -> Self {
        RootMultiset {
            counts: vec![0; len],
        }
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        RootMultiset { counts }
    }

    pub fn from_elements(len: usize, elems: &[usize]) -> Result<Self> {
        let mut m = RootMultiset::empty(len);
        for &a in elems {
            m.insert(a)?;
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// `m_M(a)`; zero outside `[ℓ]`.
    pub fn multiplicity(&self, a: usize) -> u32 {
        if a == 0 || a > self.counts.len() {
            0
        } else {
            self.counts[a - 1]
        }
    }

    pub fn insert(&mut self, a: usize) -> Result<()> {
        if a == 0 || a > self.counts.len() {
            return Err(Error::invalid(format!(
                "mark {} outside [1, {}]",
                a,
                self.counts.len()
            )));
        }
        self.counts[a - 1] += 1;
        Ok(())
    }

    /// Removes one copy of `a`.
    pub fn remove(&mut self, a: usize) -> Result<()> {
        if self.multiplicity(a) == 0 {
            return Err(Error::invalid(format!("mark {} is not present", a)));
        }
        self.counts[a - 1] -= 1;
        Ok(())
    }

    /// Sorted elements with repetition.
    pub fn elements(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (n, &c) in self.counts.iter().enumerate() {
            out.extend(std::iter::repeat_n(n + 1, c as usize));
        }
        out
    }
}

impl fmt::Display for RootMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.elements().iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", e.join(","))
    }
}

/// `Δ^k(λ) = {(i, j) : k − λ_i + i < j}`.
pub fn delta_k(lambda: &Partition, k: i32) -> Result<RootIdeal> {
    if !lambda.is_k_bounded(k) {
        return Err(Error::invalid(format!("{} is not {}-bounded", lambda, k)));
    }
    let l = lambda.len();
    let starts: Vec<usize> = (1..=l)
        .map(|i| {
            // smallest j > i with j > k - λ_i + i
            let t = k as i64 - lambda.get(i) as i64 + i as i64 + 1;
            t.max(i as i64 + 1).min(l as i64 + 1) as usize
        })
        .collect();
    RootIdeal::from_row_starts(l, starts)
}

/// Multiset of second components of the roots in `ideal`.
pub fn second_components(ideal: &RootIdeal) -> RootMultiset {
    let l = ideal.len();
    RootMultiset::from_counts((1..=l).map(|j| ideal.col_len(j) as u32).collect())
}

/// Second components of an arbitrary root set.
pub fn second_components_of(len: usize, roots: &[Root]) -> RootMultiset {
    let mut counts = vec![0u32; len];
    for &(_, j) in roots {
        counts[j - 1] += 1;
    }
    RootMultiset::from_counts(counts)
}

/// Every root ideal of `Δ^+_ℓ`, by row starts in lexicographic order.
pub fn all_root_ideals(len: usize) -> Vec<RootIdeal> {
    fn go(i: usize, len: usize, lo: usize, starts: &mut Vec<usize>, out: &mut Vec<RootIdeal>) {
        if i > len {
            out.push(RootIdeal::from_row_starts(len, starts.clone()).expect("valid row starts"));
            return;
        }
        for c in lo.max(i + 1)..=len + 1 {
            starts[i - 1] = c;
            go(i + 1, len, c, starts, out);
        }
    }
    let mut out = Vec::new();
    let mut starts = vec![0; len];
    go(1, len, 0, &mut starts, &mut out);
    out
}

/// Derived data of `Δ^k(λ)` used throughout the weighted families.
#[derive(Clone, Debug)]
pub struct LambdaIdeal {
    pub ideal: RootIdeal,
    pub bottom: usize,
}

impl LambdaIdeal {
    pub fn new(lambda: &Partition, k: i32) -> Result<Self> {
        let ideal = delta_k(lambda, k)?;
        let bottom = ideal.bottom_row();
        Ok(LambdaIdeal { ideal, bottom })
    }

    /// `down_λ(x)`.
    pub fn down(&self, x: usize) -> Option<usize> {
        self.ideal.down(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_kbounded;

    fn p(v: &[i32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    /// The ideal property checked directly on the root set.
    fn is_upper_ideal(len: usize, roots: &BTreeSet<Root>) -> bool {
        roots
            .iter()
            .all(|&(a, b)| (1..=a).all(|c| (b..=len).all(|d| c >= d || roots.contains(&(c, d)))))
    }

    #[test]
    fn ideal_count_is_catalan() {
        let cat = [1, 1, 2, 5, 14, 42, 132];
        for (l, &c) in cat.iter().enumerate() {
            assert_eq!(all_root_ideals(l).len(), c);
        }
    }

    #[test]
    fn removable_and_addable_preserve_ideal() {
        for l in 0..=5 {
            for psi in all_root_ideals(l) {
                let set: BTreeSet<Root> = psi.roots().into_iter().collect();
                for r in psi.roots() {
                    let mut s = set.clone();
                    s.remove(&r);
                    assert_eq!(is_upper_ideal(l, &s), psi.is_removable(r));
                }
                for i in 1..=l {
                    for j in i + 1..=l {
                        if set.contains(&(i, j)) {
                            continue;
                        }
                        let mut s = set.clone();
                        s.insert((i, j));
                        assert_eq!(is_upper_ideal(l, &s), psi.is_addable((i, j)));
                    }
                }
            }
        }
    }

    #[test]
    fn delta_k_of_766643() {
        let lam = p(&[7, 6, 6, 6, 4, 3]);
        let d7 = delta_k(&lam, 7).unwrap();
        let expect7 = vec![
            (1, 2),
            (1, 3),
            (1, 4),
            (1, 5),
            (1, 6),
            (2, 4),
            (2, 5),
            (2, 6),
            (3, 5),
            (3, 6),
            (4, 6),
        ];
        assert_eq!(d7.roots(), expect7);
        let d8 = delta_k(&lam, 8).unwrap();
        assert_eq!(
            d8.roots(),
            vec![(1, 3), (1, 4), (1, 5), (1, 6), (2, 5), (2, 6), (3, 6)]
        );
        assert_eq!(
            second_components(&d7).elements(),
            vec![2, 3, 4, 4, 5, 5, 5, 6, 6, 6, 6]
        );
        assert_eq!(second_components(&d8).elements(), vec![3, 4, 5, 5, 6, 6, 6]);
        assert_eq!(d7.bottom_row(), 4);
        assert_eq!(
            (1..=4).map(|x| d7.down(x).unwrap()).collect::<Vec<_>>(),
            vec![2, 4, 5, 6]
        );
        assert_eq!(d7.down(5), None);
        assert_eq!(d7.up(4), Some(2));
        for r in [(1, 2), (2, 4), (3, 5), (4, 6)] {
            assert!(d7.is_removable(r));
        }
        assert_eq!(d7.bounce_path(1, 6).unwrap(), vec![1, 2, 4, 6]);
        assert_eq!(d7.bot(1), 6);
        assert_eq!(d7.top(6), 1);
        assert!(d7.bounce_path(1, 5).is_err());
    }

    #[test]
    fn bottom_of_thirteen_row_example() {
        let lam = p(&[7, 6, 5, 5, 4, 4, 4, 3, 3, 3, 2, 2, 1]);
        assert_eq!(delta_k(&lam, 7).unwrap().bottom_row(), 8);
    }

    #[test]
    fn small_root_ideals() {
        let full = RootIdeal::full(2);
        assert_eq!(full.removable_roots(), vec![(1, 2)]);
        assert!(full.addable_roots().is_empty());
        let empty = RootIdeal::empty(2);
        assert!(empty.removable_roots().is_empty());
        assert_eq!(empty.addable_roots(), vec![(1, 2)]);
        let e5 = RootIdeal::empty(5);
        assert_eq!(e5.bottom_row(), 0);
        for x in 1..=5 {
            assert_eq!(e5.bot(x), x);
            assert_eq!(e5.top(x), x);
            assert_eq!(e5.bounce_path(x, x).unwrap(), vec![x]);
        }
        for r in 1..5 {
            assert!(e5.has_wall(r));
        }
        assert!(delta_k(&p(&[2, 2]), 3).unwrap().is_empty());
        assert!(delta_k(&p(&[4, 2]), 3).is_err());
    }

    #[test]
    fn from_roots_rejects_non_ideals() {
        assert!(RootIdeal::from_roots(3, &[(1, 2)]).is_err());
        assert!(RootIdeal::from_roots(3, &[(1, 3), (2, 3), (1, 2)]).is_ok());
        assert!(RootIdeal::from_row_starts(3, vec![3, 2, 4]).is_err());
    }

    #[test]
    fn json_shape() {
        let psi = RootIdeal::from_roots(3, &[(1, 3)]).unwrap();
        let js = serde_json::to_string(&psi).unwrap();
        assert_eq!(js, r#"{"l":3,"rowStarts":[3,4,4]}"#);
        let back: RootIdeal = serde_json::from_str(&js).unwrap();
        assert_eq!(back, psi);
        assert!(serde_json::from_str::<RootIdeal>(r#"{"l":2,"rowStarts":[1,3]}"#).is_err());
    }

    #[test]
    fn diagram_draws_marks_and_diagonal() {
        let psi = RootIdeal::from_roots(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        let m = RootMultiset::from_elements(3, &[3, 3]).unwrap();
        let g = IntVec::new(vec![2, 1, 0]);
        assert_eq!(psi.diagram(Some(&m), Some(&g)), "2 # *\n. 1 *\n. . 0\n");
    }

    fn lambdas(kmax: u32, lmax: usize) -> Vec<(i32, Partition)> {
        let mut out = Vec::new();
        for k in 1..=kmax {
            for l in 1..=lmax {
                for lam in enumerate_kbounded(k, l, k * l as u32) {
                    out.push((k as i32, lam));
                }
            }
        }
        out
    }

    #[test]
    fn root_facts_exhaustive() {
        for (k, lam) in lambdas(6, 6) {
            let l = lam.len();
            let d = delta_k(&lam, k).unwrap();
            let bott = d.bottom_row();
            for x in 1..=bott {
                let dx = d.down(x).expect("down defined above the bottom");
                assert!(d.is_removable((x, dx)));
            }
            for x in 1..=l {
                let b = d.bot(x);
                assert!(b > bott && b <= l, "bot({}) = {} for {} k={}", x, b, lam, k);
            }
            for x in 1..bott {
                if k > lam.get(x) && lam.get(x) == lam.get(x + 1) {
                    assert!(d.has_mirror(x));
                }
                if lam.get(x) > lam.get(x + 1) {
                    assert!(d.has_ceiling(d.down(x).unwrap()));
                }
            }
            // x ∈ [bott] iff k − λ_x + x < ℓ
            for x in 1..=l {
                let inside = x <= bott;
                assert_eq!(inside, (k - lam.get(x) + x as i32) < l as i32);
            }
            // L(Δ^{k+1}) = L(Δ^k) minus the down values above the bottom
            let mut expect = second_components(&d);
            for x in 1..=bott {
                expect.remove(d.down(x).unwrap()).unwrap();
            }
            let d1 = delta_k(&lam, k + 1).unwrap();
            assert_eq!(second_components(&d1), expect);
            // and Δ^{k+1} itself is Δ^k minus those roots
            let mut roots = d.roots();
            roots.retain(|&(i, j)| !(i <= bott && d.down(i) == Some(j)));
            assert_eq!(d1.roots(), roots);
        }
    }

    #[test]
    fn hat_class_matches_strict_prefix() {
        use crate::partitions::in_hat_class;
        for (k, lam) in lambdas(6, 6) {
            let bott = delta_k(&lam, k).unwrap().bottom_row();
            let strict = (1..bott).all(|x| lam.get(x) > lam.get(x + 1));
            assert_eq!(
                in_hat_class(&lam, k, lam.len()).unwrap(),
                strict,
                "{} k={}",
                lam,
                k
            );
        }
    }
}
