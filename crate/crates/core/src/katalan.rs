//! Katalan functions `K(Ψ; M; γ) = ∏_{z∈M} (1 − L_z) ∏_{(i,j)∈Ψ} (1 − R_ij)^{−1} g_γ`.
//!
//! Raising and lowering operators are translations of the index vector, so
//! evaluation first expands the operator product into a finite formal
//! combination of vectors and then sums the determinants in one pass.
//!
//! The geometric series are truncated by two sound rules:
//!
//! * the potential `f(γ) = Σ_x (ℓ − x) γ_x` grows by `j − i` per raising
//!   step, and no vector of the original size above `F_max` avoids a dead
//!   row, where `F_max` is the maximum of `f` over
//!   `{|γ''| = |γ|, γ''_x ≥ x − ℓ}`;
//! * roots are processed bottom row first, so once row `i` is done the
//!   coordinates `y ≥ i` never increase again and a dead coordinate there
//!   kills the vector and everything derived from it.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::det;
use crate::error::{Error, Result};
use crate::partitions::IntVec;
use crate::rootideal::{Root, RootIdeal, RootMultiset};
use crate::symfunc::{binom, SymFunc};

/// The argument `(Ψ, M, γ)` of a Katalan function.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct KatalanSpec {
    psi: RootIdeal,
    marks: RootMultiset,
    gamma: IntVec,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    psi: RootIdeal,
    marks: Vec<usize>,
    gamma: Vec<i32>,
}

impl TryFrom<SpecJson> for KatalanSpec {
    type Error = Error;
    fn try_from(j: SpecJson) -> Result<Self> {
        let len = j.psi.len();
        let marks = RootMultiset::from_elements(len, &j.marks)?;
        KatalanSpec::new(j.psi, marks, IntVec::new(j.gamma))
    }
}

impl From<KatalanSpec> for SpecJson {
    fn from(s: KatalanSpec) -> Self {
        SpecJson {
            marks: s.marks.elements(),
            gamma: s.gamma.into_entries(),
            psi: s.psi,
        }
    }
}

impl KatalanSpec {
    pub fn new(psi: RootIdeal, marks: RootMultiset, gamma: IntVec) -> Result<Self> {
        if psi.len() != gamma.len() || marks.len() != gamma.len() {
            return Err(Error::invalid(format!(
                "length mismatch: ideal {}, marks {}, gamma {}",
                psi.len(),
                marks.len(),
                gamma.len()
            )));
        }
        Ok(KatalanSpec { psi, marks, gamma })
    }

    pub fn psi(&self) -> &RootIdeal {
        &self.psi
    }

    pub fn marks(&self) -> &RootMultiset {
        &self.marks
    }

    pub fn gamma(&self) -> &IntVec {
        &self.gamma
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn with_gamma(&self, gamma: IntVec) -> KatalanSpec {
        KatalanSpec {
            psi: self.psi.clone(),
            marks: self.marks.clone(),
            gamma,
        }
    }

    pub fn diagram(&self) -> String {
        self.psi.diagram(Some(&self.marks), Some(&self.gamma))
    }
}

impl fmt::Display for KatalanSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K({}; {}; ({}))", self.psi, self.marks, self.gamma)
    }
}

pub(crate) type Key = SmallVec<[i32; 8]>;

/// A formal integer combination of symbols `g_γ`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GammaCombo {
    terms: FxHashMap<Key, BigInt>,
}

impl GammaCombo {
    /// The terms with no dead coordinate; the rest have `g_γ = 0`.
    pub fn live(&self, len: usize) -> GammaCombo {
        GammaCombo {
            terms: self
                .terms
                .iter()
                .filter(|(g, _)| (1..=len).all(|y| !dead_at(g, y)))
                .map(|(g, c)| (g.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn single(gamma: &IntVec) -> Self {
        let mut c = GammaCombo::default();
        c.add(Key::from_slice(gamma.entries()), BigInt::one());
        c
    }

    fn add(&mut self, key: Key, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_default();
        *e += c;
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, gamma: &[i32]) -> BigInt {
        self.terms.get(gamma).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i32], &BigInt)> {
        self.terms.iter().map(|(k, c)| (&k[..], c))
    }

    /// Applies `(1 − L_z)^m`.
    pub fn lower(&self, z: usize, m: u32) -> GammaCombo {
        if m == 0 {
            return self.clone();
        }
        let mut out = GammaCombo::default();
        let weights: Vec<BigInt> = (0..=m as i64)
            .map(|t| {
                let b = binom(m as i64, t);
                if t % 2 == 1 {
                    -b
                } else {
                    b
                }
            })
            .collect();
        for (g, c) in &self.terms {
            for (t, w) in weights.iter().enumerate() {
                let mut k = g.clone();
                k[z - 1] -= t as i32;
                out.add(k, c * w);
            }
        }
        out.normalize();
        out
    }

    /// Applies `L_z` once.
    pub fn shift_down(&self, z: usize) -> GammaCombo {
        GammaCombo {
            terms: self
                .terms
                .iter()
                .map(|(g, c)| {
                    let mut k = g.clone();
                    k[z - 1] -= 1;
                    (k, c.clone())
                })
                .collect(),
        }
    }

    /// `Σ c_γ g_γ`.
    pub fn evaluate(&self, len: usize) -> SymFunc {
        det::sum_of_g(self.iter(), len)
    }
}

/// How the raising series are truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// Potential bound plus dead-coordinate pruning.
    Pruned,
    /// No pruning; each series stops once the potential exceeds
    /// `F_max + slack`. Only useful as a reference.
    HardCap { slack: u32 },
}

/// `f(γ) = Σ_x (ℓ − x) γ_x`.
pub fn potential(gamma: &[i32]) -> i64 {
    let l = gamma.len() as i64;
    gamma
        .iter()
        .enumerate()
        .map(|(n, &g)| (l - (n as i64 + 1)) * g as i64)
        .sum()
}

/// Maximum of `f` over `{|γ| = size, γ_x ≥ x − ℓ}`: everything above the
/// minimum goes to coordinate 1.
pub fn max_potential(size: i64, len: usize) -> i64 {
    if len == 0 {
        return 0;
    }
    let l = len as i64;
    let floor_rest: i64 = (2..=l).map(|x| x - l).sum();
    let first = size - floor_rest;
    (l - 1) * first + (2..=l).map(|x| (l - x) * (x - l)).sum::<i64>()
}

/// Roots in processing order: rows bottom to top, columns right to left.
fn root_order(psi: &RootIdeal) -> Vec<Root> {
    let mut roots = psi.roots();
    roots.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)));
    roots
}

fn dead_at(g: &[i32], y: usize) -> bool {
    (g[y - 1] as i64) < y as i64 - g.len() as i64
}

/// Expands the raising series of `psi` applied to `gamma`.
pub fn raise(psi: &RootIdeal, gamma: &IntVec, trunc: Truncation) -> GammaCombo {
    let len = gamma.len();
    let limit = max_potential(gamma.size(), len)
        + match trunc {
            Truncation::Pruned => 0,
            Truncation::HardCap { slack } => slack as i64,
        };
    let prune = trunc == Truncation::Pruned;
    let mut combo = GammaCombo::single(gamma);
    let order = root_order(psi);
    let mut next_root = 0;
    for row in (1..=len).rev() {
        while next_root < order.len() && order[next_root].0 == row {
            let (i, j) = order[next_root];
            next_root += 1;
            let step = (j - i) as i64;
            let mut out = GammaCombo::default();
            for (g, c) in &combo.terms {
                let mut cur = g.clone();
                let mut f = potential(&cur);
                loop {
                    if f > limit || (prune && dead_at(&cur, j)) {
                        break;
                    }
                    out.add(cur.clone(), c.clone());
                    cur[i - 1] += 1;
                    cur[j - 1] -= 1;
                    f += step;
                }
            }
            out.normalize();
            combo = out;
        }
        if prune {
            combo.terms.retain(|g, _| !dead_at(g, row));
        }
    }
    combo
}

/// Full operator expansion of a spec into a combination of `g_γ`.
pub fn expand(spec: &KatalanSpec, trunc: Truncation) -> GammaCombo {
    let mut combo = raise(&spec.psi, &spec.gamma, trunc);
    for z in 1..=spec.len() {
        combo = combo.lower(z, spec.marks.multiplicity(z));
    }
    if trunc == Truncation::Pruned {
        let len = spec.len();
        combo.terms.retain(|g, _| (1..=len).all(|y| !dead_at(g, y)));
    }
    combo
}

/// Exact value of `K(Ψ; M; γ)`.
pub fn evaluate(spec: &KatalanSpec) -> SymFunc {
    evaluate_with(spec, Truncation::Pruned)
}

pub fn evaluate_with(spec: &KatalanSpec, trunc: Truncation) -> SymFunc {
    expand(spec, trunc).evaluate(spec.len())
}

/// The spec for `L_z K(Ψ; M; γ) = K(Ψ; M; γ − ε_z)`.
pub fn apply_lowering(spec: &KatalanSpec, z: usize) -> Result<KatalanSpec> {
    if z == 0 || z > spec.len() {
        return Err(Error::invalid(format!(
            "index {} outside [1, {}]",
            z,
            spec.len()
        )));
    }
    Ok(spec.with_gamma(spec.gamma.lowered(z)))
}

/// One of the four local rewrites of a Katalan function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rewrite {
    RemoveRoot(Root),
    AddRoot(Root),
    RemoveMark(usize),
    AddMark(usize),
}

/// Right-hand side of a rewrite as signed specs; the signed sum of their
/// values equals the value of `spec`.
pub fn relk_split(spec: &KatalanSpec, which: Rewrite) -> Result<Vec<(KatalanSpec, i32)>> {
    let KatalanSpec { psi, marks, gamma } = spec;
    let mk = |p: RootIdeal, m: RootMultiset, g: IntVec| KatalanSpec {
        psi: p,
        marks: m,
        gamma: g,
    };
    Ok(match which {
        Rewrite::RemoveRoot((i, j)) => {
            let smaller = psi.without((i, j))?;
            vec![
                (mk(smaller, marks.clone(), gamma.clone()), 1),
                (mk(psi.clone(), marks.clone(), gamma.raised(i, j)), 1),
            ]
        }
        Rewrite::AddRoot((i, j)) => {
            let bigger = psi.with((i, j))?;
            vec![
                (mk(bigger.clone(), marks.clone(), gamma.clone()), 1),
                (mk(bigger, marks.clone(), gamma.raised(i, j)), -1),
            ]
        }
        Rewrite::RemoveMark(m) => {
            let mut fewer = marks.clone();
            fewer.remove(m)?;
            vec![
                (mk(psi.clone(), fewer.clone(), gamma.clone()), 1),
                (mk(psi.clone(), fewer, gamma.lowered(m)), -1),
            ]
        }
        Rewrite::AddMark(m) => {
            let mut more = marks.clone();
            more.insert(m)?;
            vec![
                (mk(psi.clone(), more, gamma.clone()), 1),
                (mk(psi.clone(), marks.clone(), gamma.lowered(m)), 1),
            ]
        }
    })
}

/// Outcome of checking the mirror hypotheses at `(y, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MirrorOutcome {
    /// The function vanishes.
    Zero,
    /// The function equals the one with `γ − ε_idx`.
    DropEpsilon(usize),
    NotApplicable,
}

/// Checks the six mirror conditions for `1 ≤ y ≤ z < ℓ` without evaluating.
pub fn mirror_apply(spec: &KatalanSpec, y: usize, z: usize) -> Result<MirrorOutcome> {
    let len = spec.len();
    if !(1 <= y && y <= z && z < len) {
        return Err(Error::invalid(format!(
            "need 1 <= y <= z < {}, got y = {}, z = {}",
            len, y, z
        )));
    }
    let psi = &spec.psi;
    let m = &spec.marks;
    let g = &spec.gamma;
    let Ok(path) = psi.bounce_path(y, z) else {
        return Ok(MirrorOutcome::NotApplicable);
    };
    // path(y, up(z)) is the path without its last vertex, and
    // path(down(y), z) is the path without its first vertex.
    let upper = &path[..path.len() - 1];
    let lower = &path[1..];
    let holds = psi.has_ceiling(y)
        && upper.iter().all(|&x| psi.has_mirror(x))
        && psi.has_wall(z)
        && upper.iter().all(|&x| g.get(x) == g.get(x + 1))
        && g.get(z) + 1 == g.get(z + 1)
        && lower
            .iter()
            .all(|&x| m.multiplicity(x) + 1 == m.multiplicity(x + 1));
    if !holds {
        return Ok(MirrorOutcome::NotApplicable);
    }
    let (my, my1) = (m.multiplicity(y), m.multiplicity(y + 1));
    Ok(if my + 1 == my1 {
        MirrorOutcome::Zero
    } else if my == my1 {
        MirrorOutcome::DropEpsilon(z + 1)
    } else {
        MirrorOutcome::NotApplicable
    })
}
