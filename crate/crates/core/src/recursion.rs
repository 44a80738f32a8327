//! Weight-lowering recursion for weighted K-k-Schur functions.
//!
//! `g̃^(z+1)_λ = g̃^(z)_λ − L_{down_λ(z)} g̃^(z)_λ`, and the lowering term is
//! rewritten as a combination of `g̃^(z)_μ` by walking the bounce path of `z`
//! in `Δ^k(λ)`. For `d = down^a_λ(z)` and `γ = λ − ε_d`:
//!
//! * `d > bott_λ`: `L_d g̃_λ = g̃_γ` if `γ` is a partition, else `0`;
//! * `d ≤ bott_λ`: `L_d g̃_λ = (1 − L_{down^{a+1}_γ(z)}) g̃_γ + L_{down^{a+1}_λ(z)} g̃_λ`
//!   if `γ` is a partition, else `L_{down^{a+1}_λ(z)} g̃_λ`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde_json::{json, Value};

use crate::bases::{
    alternating_check, closed_kschur, expand_in_kkschur_with, sign_ok, BasisCache, Expansion,
    Family, SignCheck, Solver, Source,
};
use crate::error::{Error, Result};
use crate::partitions::{enumerate_kbounded, in_hat_class, Partition};
use crate::rootideal::LambdaIdeal;

/// `coeff · g̃^(z)_μ`, with `μ` kept at its full length.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WeightedTerm {
    pub mu: Partition,
    pub z: usize,
    pub coeff: BigInt,
}

type Combo = BTreeMap<Partition, BigInt>;

fn add_into(acc: &mut Combo, src: &Combo, scale: &BigInt) {
    for (mu, c) in src {
        *acc.entry(mu.clone()).or_default() += c * scale;
    }
    acc.retain(|_, c| !c.is_zero());
}

/// Rewrites `L_{down^a_λ(z)} g̃^(z)_λ` for a fixed `k` and `z`; results are
/// memoized on `(λ, a)`.
pub struct Lowering {
    k: i32,
    z: usize,
    memo: FxHashMap<(Partition, usize), Combo>,
}

impl Lowering {
    pub fn new(k: i32, z: usize) -> Self {
        Lowering {
            k,
            z,
            memo: FxHashMap::default(),
        }
    }

    /// `L_{down^a_λ(z)} g̃^(z)_λ` as `Σ b_μ g̃^(z)_μ`.
    pub fn lower(&mut self, lambda: &Partition, a: usize) -> Result<Combo> {
        if let Some(c) = self.memo.get(&(lambda.clone(), a)) {
            return Ok(c.clone());
        }
        let out = self.compute(lambda, a)?;
        for (mu, b) in &out {
            if !sign_ok(lambda.size() - 1, mu.size(), b) {
                return Err(Error::Mismatch(format!(
                    "lowering term {} for {} at a = {} has coefficient {} of the wrong sign",
                    mu, lambda, a, b
                )));
            }
        }
        self.memo.insert((lambda.clone(), a), out.clone());
        Ok(out)
    }

    fn compute(&mut self, lambda: &Partition, a: usize) -> Result<Combo> {
        let z = self.z;
        let li = LambdaIdeal::new(lambda, self.k)?;
        let bott = li.bottom;
        let ideal = &li.ideal;
        let no_case = |why: &str| {
            Error::Mismatch(format!(
                "no rewriting case for L at down^{}({}) on {} with k = {}: {}",
                a, z, lambda, self.k, why
            ))
        };
        if a == 0 || z == 0 || z > bott {
            return Err(no_case("weight outside the bounce range"));
        }
        let prev = ideal
            .down_iter(z, a - 1)
            .ok_or_else(|| no_case("down^(a-1) undefined"))?;
        if prev > bott {
            return Err(no_case("down^(a-1) lies below the bottom row"));
        }
        let d = ideal
            .down_iter(z, a)
            .ok_or_else(|| no_case("down^a undefined"))?;
        let gamma: Option<Partition> = Partition::try_from(lambda.to_intvec().lowered(d)).ok();
        let strict_at_z = z < lambda.len() && lambda.get(z) > lambda.get(z + 1);
        let mut out = Combo::new();

        if d > bott {
            match gamma {
                Some(g) => {
                    out.insert(g, BigInt::one());
                }
                None if d == lambda.len() => {
                    // γ_ℓ = −1 makes the last row of every determinant vanish
                }
                None => {
                    if prev < bott && !strict_at_z {
                        return Err(Error::hypothesis(format!(
                            "{}: need λ_{} > λ_{} to rewrite L at row {}",
                            lambda,
                            z,
                            z + 1,
                            d
                        )));
                    }
                }
            }
            return Ok(out);
        }

        if z + 1 > bott {
            return Err(no_case("z is the bottom row but down^a is not below it"));
        }
        match gamma {
            Some(g) => {
                out.insert(g.clone(), BigInt::one());
                let gi = LambdaIdeal::new(&g, self.k)?;
                if gi.ideal.down_iter(z, a + 1).is_some() {
                    let sub = self.lower(&g, a + 1)?;
                    add_into(&mut out, &sub, &-BigInt::one());
                }
                let rest = self.lower(lambda, a + 1)?;
                add_into(&mut out, &rest, &BigInt::one());
            }
            None => {
                if !strict_at_z {
                    return Err(Error::hypothesis(format!(
                        "{}: need λ_{} > λ_{} to rewrite L at row {}",
                        lambda,
                        z,
                        z + 1,
                        d
                    )));
                }
                out = self.lower(lambda, a + 1)?;
            }
        }
        Ok(out)
    }
}

fn check_lambda(lambda: &Partition, k: i32) -> Result<LambdaIdeal> {
    if k < 1 {
        return Err(Error::invalid(format!("k must be positive, got {}", k)));
    }
    if !lambda.is_k_bounded(k) {
        return Err(Error::invalid(format!("{} is not {}-bounded", lambda, k)));
    }
    LambdaIdeal::new(lambda, k)
}

/// `g̃^(z+1)_λ` as a combination of `g̃^(z)_μ`.
pub fn weight_step(lambda: &Partition, k: i32, z: usize) -> Result<Vec<WeightedTerm>> {
    weight_step_with(&mut Lowering::new(k, z), lambda)
}

pub fn weight_step_with(lowering: &mut Lowering, lambda: &Partition) -> Result<Vec<WeightedTerm>> {
    let (k, z) = (lowering.k, lowering.z);
    let li = check_lambda(lambda, k)?;
    let bott = li.bottom;
    if z == 0 || z > bott {
        return Err(Error::hypothesis(format!(
            "weight step needs z in [1, {}] for {}, got {}",
            bott, lambda, z
        )));
    }
    if z < bott && lambda.get(z) <= lambda.get(z + 1) {
        return Err(Error::hypothesis(format!(
            "{}: need λ_{} > λ_{} below the bottom row {}",
            lambda,
            z,
            z + 1,
            bott
        )));
    }
    let mut combo = Combo::new();
    combo.insert(lambda.clone(), BigInt::one());
    let low = lowering.lower(lambda, 1)?;
    add_into(&mut combo, &low, &-BigInt::one());
    let mut out = Vec::with_capacity(combo.len());
    for (mu, coeff) in combo {
        if !sign_ok(lambda.size(), mu.size(), &coeff) {
            return Err(Error::Mismatch(format!(
                "weight step for {} at z = {} gives {} with coefficient {}",
                lambda, z, mu, coeff
            )));
        }
        out.push(WeightedTerm { mu, z, coeff });
    }
    out.sort_by(|a, b| b.mu.size().cmp(&a.mu.size()).then(b.mu.cmp(&a.mu)));
    Ok(out)
}

/// Checks `λ_1 > … > λ_{z_target − 1}` and `z_target − 1 ∈ [0, bott_λ]`.
pub fn check_recursion_hypothesis(lambda: &Partition, k: i32, z_target: usize) -> Result<()> {
    let li = check_lambda(lambda, k)?;
    if z_target == 0 || z_target > li.bottom + 1 {
        return Err(Error::hypothesis(format!(
            "target weight {} outside [1, {}] for {}",
            z_target,
            li.bottom + 1,
            lambda
        )));
    }
    for x in 1..z_target.saturating_sub(1) {
        if lambda.get(x) <= lambda.get(x + 1) {
            return Err(Error::hypothesis(format!(
                "{}: need λ_{} > λ_{}",
                lambda,
                x,
                x + 1
            )));
        }
    }
    Ok(())
}

/// Expansion of `g̃^(z_target)_λ` in `{g^(k)_μ}` by repeated weight steps.
pub fn expand_recursive(lambda: &Partition, k: i32, z_target: usize) -> Result<Expansion> {
    check_recursion_hypothesis(lambda, k, z_target)?;
    let mut current = Combo::new();
    current.insert(lambda.clone(), BigInt::one());
    for z in (1..z_target).rev() {
        let mut lowering = Lowering::new(k, z);
        let mut next = Combo::new();
        for (mu, c) in &current {
            for t in weight_step_with(&mut lowering, mu)? {
                *next.entry(t.mu).or_default() += c * &t.coeff;
            }
        }
        next.retain(|_, c| !c.is_zero());
        current = next;
    }
    let family = if z_target == 1 {
        Family::KkSchur
    } else if z_target == LambdaIdeal::new(lambda, k)?.bottom + 1 {
        Family::Closed
    } else {
        Family::Weighted
    };
    let z = (family == Family::Weighted).then_some(z_target);
    let source = Source {
        family,
        lambda: lambda.clone(),
        z,
    };
    Ok(Expansion::from_terms(k, Some(source), current))
}

/// Partition class recorded in verification reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionClass {
    Strict,
    HatP,
    Other,
}

impl PartitionClass {
    pub fn of(lambda: &Partition, k: i32) -> Result<Self> {
        Ok(if lambda.is_strict() {
            PartitionClass::Strict
        } else if in_hat_class(lambda, k, lambda.len())? {
            PartitionClass::HatP
        } else {
            PartitionClass::Other
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PartitionClass::Strict => "strict",
            PartitionClass::HatP => "hatP",
            PartitionClass::Other => "other",
        }
    }
}

/// Which partitions a sweep visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassFilter {
    Strict,
    HatP,
    All,
}

impl ClassFilter {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "strict" => Some(ClassFilter::Strict),
            "hatP" | "hatp" => Some(ClassFilter::HatP),
            "all" => Some(ClassFilter::All),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassFilter::Strict => "strict",
            ClassFilter::HatP => "hatP",
            ClassFilter::All => "all",
        }
    }

    pub fn admits(self, lambda: &Partition, k: i32) -> Result<bool> {
        Ok(match self {
            ClassFilter::Strict => lambda.is_strict(),
            ClassFilter::HatP => in_hat_class(lambda, k, lambda.len())?,
            ClassFilter::All => true,
        })
    }
}

/// Every `(λ, k)` with `k` and `ℓ(λ)` in the given ranges, `λ` k-bounded
/// with no zero parts, `|λ| ≤ max_size` and admitted by the filter.
/// Ordered by `k`, then `ℓ`, then size.
pub fn sweep_corpus(
    filter: ClassFilter,
    ks: RangeInclusive<i32>,
    lens: RangeInclusive<usize>,
    max_size: Option<u32>,
) -> Result<Vec<(Partition, i32)>> {
    let mut out = Vec::new();
    for k in ks {
        if k < 1 {
            return Err(Error::invalid(format!("k = {} must be positive", k)));
        }
        for len in lens.clone() {
            if len == 0 {
                continue;
            }
            let cap = (k as u32) * len as u32;
            for lam in enumerate_kbounded(k as u32, len, max_size.map_or(cap, |m| m.min(cap))) {
                if filter.admits(&lam, k)? {
                    out.push((lam, k));
                }
            }
        }
    }
    Ok(out)
}

/// Outcome of checking both expansion routes for one `λ`.
#[derive(Clone, Debug)]
pub struct Report {
    pub lambda: Partition,
    pub k: i32,
    pub class: PartitionClass,
    /// `None` when the recursive route was not run.
    pub recursive: Option<Expansion>,
    pub linear: Expansion,
    pub routes_agree: bool,
    pub signs: SignCheck,
    pub millis: u128,
}

impl Report {
    /// Route disagreement is an engine bug; a sign violation with agreeing
    /// routes is a mathematical counterexample.
    pub fn passed(&self) -> bool {
        self.routes_agree && self.signs.ok
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .linear
            .terms()
            .into_iter()
            .map(|(mu, c)| json!({"mu": mu.parts(), "coeff": c.to_string()}))
            .collect();
        let mut v = json!({
            "schema": "1",
            "lambda": self.lambda.parts(),
            "k": self.k,
            "class": self.class.as_str(),
            "routesAgree": self.routes_agree,
            "alternating": self.signs.ok,
            "terms": terms,
            "millis": self.millis as u64,
        });
        if let Some((mu, b)) = &self.signs.violation {
            v["violation"] = json!({"mu": mu.parts(), "coeff": b.to_string()});
        }
        v
    }
}

/// Expands `ĝ^(k)_λ` by both routes and checks agreement and signs.
/// `λ` must lie in the hat class.
pub fn verify_theorem(lambda: &Partition, k: i32, cache: &BasisCache) -> Result<Report> {
    let start = Instant::now();
    let li = check_lambda(lambda, k)?;
    if !in_hat_class(lambda, k, lambda.len())? {
        return Err(Error::hypothesis(format!(
            "{} is outside the hat class for k = {}",
            lambda, k
        )));
    }
    let recursive = expand_recursive(lambda, k, li.bottom + 1)?;
    let linear = linear_closed(lambda, k, cache)?;
    let routes_agree = recursive.same_terms(&linear);
    let signs = alternating_check(lambda, &linear);
    Ok(Report {
        lambda: lambda.clone(),
        k,
        class: PartitionClass::of(lambda, k)?,
        recursive: Some(recursive),
        linear,
        routes_agree,
        signs,
        millis: start.elapsed().as_millis(),
    })
}

/// Linear-route only report for any k-bounded `λ`; used for exploring
/// outside the proven class.
pub fn explore(lambda: &Partition, k: i32, cache: &BasisCache) -> Result<Report> {
    let start = Instant::now();
    check_lambda(lambda, k)?;
    let linear = linear_closed(lambda, k, cache)?;
    let signs = alternating_check(lambda, &linear);
    Ok(Report {
        lambda: lambda.clone(),
        k,
        class: PartitionClass::of(lambda, k)?,
        recursive: None,
        linear,
        routes_agree: true,
        signs,
        millis: start.elapsed().as_millis(),
    })
}

fn linear_closed(lambda: &Partition, k: i32, cache: &BasisCache) -> Result<Expansion> {
    let f = closed_kschur(lambda, k)?;
    let terms = expand_in_kkschur_with(&f, k, Solver::Triangular, cache)?;
    Ok(Expansion::from_terms(
        k,
        Some(Source {
            family: Family::Closed,
            lambda: lambda.clone(),
            z: None,
        }),
        terms,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::weighted_kkschur;
    use crate::symfunc::SymFunc;

    fn p(v: &[i32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn terms(ts: &[WeightedTerm]) -> Vec<(Vec<i32>, i64)> {
        ts.iter()
            .map(|t| (t.mu.parts().to_vec(), i64::try_from(&t.coeff).unwrap()))
            .collect()
    }

    #[test]
    fn worked_weight_step() {
        let lam = p(&[7, 6, 5, 5, 4, 4, 4, 3, 3, 3, 2, 2, 1]);
        let got = weight_step(&lam, 7, 2).unwrap();
        let mut want = vec![
            (vec![7, 6, 5, 5, 4, 4, 4, 3, 3, 3, 2, 2, 1], 1),
            (vec![7, 6, 5, 4, 4, 4, 4, 3, 3, 3, 2, 2, 1], -1),
            (vec![7, 6, 5, 5, 4, 4, 3, 3, 3, 3, 2, 2, 1], -1),
            (vec![7, 6, 5, 4, 4, 4, 4, 3, 3, 3, 2, 2, 0], 1),
            (vec![7, 6, 5, 5, 4, 4, 3, 3, 3, 3, 2, 1, 1], 1),
        ];
        let mut got = terms(&got);
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn lowering_repeats_along_the_bounce_path() {
        // row 7 rewrites to row 11
        let lam = p(&[7, 6, 5, 5, 4, 4, 4, 4, 3, 3, 2, 2, 1]);
        let li = LambdaIdeal::new(&lam, 7).unwrap();
        assert_eq!(li.ideal.down_iter(2, 2), Some(7));
        assert_eq!(li.ideal.down_iter(2, 3), Some(11));
        let mut low = Lowering::new(7, 2);
        assert_eq!(low.lower(&lam, 2).unwrap(), low.lower(&lam, 3).unwrap());
    }

    #[test]
    fn bottom_row_step() {
        // z = bott with γ a partition
        let lam = p(&[1, 1]);
        let got = weight_step(&lam, 1, 1).unwrap();
        assert_eq!(terms(&got), vec![(vec![1, 1], 1), (vec![1, 0], -1)]);
        // z = bott with γ not a partition
        let lam = p(&[2, 1, 1]);
        let li = LambdaIdeal::new(&lam, 2).unwrap();
        assert_eq!(li.bottom, 1);
        assert_eq!(li.down(1), Some(2));
        assert_eq!(
            terms(&weight_step(&lam, 2, 1).unwrap()),
            vec![(vec![2, 1, 1], 1)]
        );
    }

    #[test]
    fn refuses_outside_hypothesis() {
        let lam = p(&[2, 2, 1, 1]);
        let li = LambdaIdeal::new(&lam, 3).unwrap();
        assert_eq!(li.bottom, 2);
        assert!(matches!(weight_step(&lam, 3, 1), Err(Error::Hypothesis(_))));
        assert!(matches!(weight_step(&lam, 3, 9), Err(Error::Hypothesis(_))));
        assert!(matches!(
            weight_step(&p(&[3, 1]), 2, 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn steps_are_sound_on_small_cases() {
        for k in 1..=3 {
            for lam in crate::partitions::enumerate_kbounded(k as u32, 3, 9) {
                let bott = LambdaIdeal::new(&lam, k).unwrap().bottom;
                for z in 1..=bott {
                    let Ok(ts) = weight_step(&lam, k, z) else {
                        continue;
                    };
                    let mut lhs = SymFunc::zero();
                    for t in &ts {
                        lhs.add_scaled(&weighted_kkschur(&t.mu, k, z).unwrap(), &t.coeff);
                    }
                    assert_eq!(
                        lhs,
                        weighted_kkschur(&lam, k, z + 1).unwrap(),
                        "{} k={} z={}",
                        lam,
                        k,
                        z
                    );
                }
            }
        }
    }

    #[test]
    fn recursive_small_examples() {
        let lam = p(&[1, 1]);
        let e = expand_recursive(&lam, 1, 2).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.coeff(&p(&[1])), BigInt::from(-1));
        assert_eq!(e.coeff(&p(&[1, 1])), BigInt::one());
        let e = expand_recursive(&p(&[3, 1]), 3, 1).unwrap();
        assert_eq!(e.len(), 1);
        let r = verify_theorem(&p(&[3, 2, 1]), 3, &BasisCache::memory()).unwrap();
        assert!(r.passed(), "{:?}", r);
        assert_eq!(r.class, PartitionClass::Strict);
    }
}
