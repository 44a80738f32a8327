//! Named families of Katalan functions and expansion in the K-k-Schur basis.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::katalan::{evaluate, KatalanSpec};
use crate::partitions::{kbounded_of_size, Partition};
use crate::rootideal::{delta_k, second_components, LambdaIdeal, RootMultiset};
use crate::symfunc::{g_of_vector, HMonomial, SymFunc};

/// `g_μ`.
pub fn dual_grothendieck(mu: &Partition) -> SymFunc {
    g_of_vector(&mu.to_intvec())
}

/// `K(Δ^k(λ); L(Δ^{k+1}(λ)); λ)`.
pub fn kkschur_spec(lambda: &Partition, k: i32) -> Result<KatalanSpec> {
    let psi = delta_k(lambda, k)?;
    let marks = second_components(&delta_k(lambda, k + 1)?);
    KatalanSpec::new(psi, marks, lambda.to_intvec())
}

/// `K(Δ^k(λ); L(Δ^k(λ)); λ)`.
pub fn closed_spec(lambda: &Partition, k: i32) -> Result<KatalanSpec> {
    let psi = delta_k(lambda, k)?;
    let marks = second_components(&psi);
    KatalanSpec::new(psi, marks, lambda.to_intvec())
}

/// `K(Δ^k(λ); L(Δ^k(λ)) \ {down_λ(x) : x ∈ [z, bott_λ]}; λ)`.
pub fn weighted_spec(lambda: &Partition, k: i32, z: usize) -> Result<KatalanSpec> {
    let li = LambdaIdeal::new(lambda, k)?;
    if z == 0 || z > li.bottom + 1 {
        return Err(Error::invalid(format!(
            "weight {} outside [1, {}] for {}",
            z,
            li.bottom + 1,
            lambda
        )));
    }
    let mut marks: RootMultiset = second_components(&li.ideal);
    for x in z..=li.bottom {
        let d = li.down(x).ok_or_else(|| {
            Error::Mismatch(format!(
                "row {} of the ideal for {} has no removable root",
                x, lambda
            ))
        })?;
        marks.remove(d)?;
    }
    KatalanSpec::new(li.ideal, marks, lambda.to_intvec())
}

pub fn kkschur(lambda: &Partition, k: i32) -> Result<SymFunc> {
    Ok(evaluate(&kkschur_spec(lambda, k)?))
}

pub fn closed_kschur(lambda: &Partition, k: i32) -> Result<SymFunc> {
    Ok(evaluate(&closed_spec(lambda, k)?))
}

pub fn weighted_kkschur(lambda: &Partition, k: i32, z: usize) -> Result<SymFunc> {
    Ok(evaluate(&weighted_spec(lambda, k, z)?))
}

/// Membership in the subring generated by `h_1, …, h_k`.
pub fn in_lambda_k(f: &SymFunc, k: i32) -> bool {
    i32::from(f.max_part()) <= k
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `g_λ`.
    G,
    KkSchur,
    Closed,
    Weighted,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::G => "g",
            Family::KkSchur => "kkschur",
            Family::Closed => "closed",
            Family::Weighted => "weighted",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "g" => Family::G,
            "kkschur" => Family::KkSchur,
            "closed" => Family::Closed,
            "weighted" => Family::Weighted,
            _ => return Err(Error::invalid(format!("unknown family {:?}", s))),
        })
    }
}

/// The Katalan spec of a named family member; `G` has none.
pub fn family_spec(
    family: Family,
    lambda: &Partition,
    k: i32,
    z: Option<usize>,
) -> Result<Option<KatalanSpec>> {
    Ok(match family {
        Family::G => None,
        Family::KkSchur => Some(kkschur_spec(lambda, k)?),
        Family::Closed => Some(closed_spec(lambda, k)?),
        Family::Weighted => {
            let z = z.ok_or_else(|| Error::invalid("the weighted family needs a weight z"))?;
            Some(weighted_spec(lambda, k, z)?)
        }
    })
}

pub fn family_value(
    family: Family,
    lambda: &Partition,
    k: i32,
    z: Option<usize>,
) -> Result<SymFunc> {
    match family_spec(family, lambda, k, z)? {
        Some(s) => Ok(evaluate(&s)),
        None => Ok(dual_grothendieck(lambda)),
    }
}

/// What an expansion was computed from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Source {
    pub family: Family,
    pub lambda: Partition,
    pub z: Option<usize>,
}

/// `Σ b_μ g_μ^(k)` with nonzero integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub k: i32,
    pub source: Option<Source>,
    terms: BTreeMap<Partition, BigInt>,
}

impl Expansion {
    /// Trailing zeros of each `μ` are dropped and equal keys merged.
    pub fn from_terms<I: IntoIterator<Item = (Partition, BigInt)>>(
        k: i32,
        source: Option<Source>,
        terms: I,
    ) -> Self {
        let mut map: BTreeMap<Partition, BigInt> = BTreeMap::new();
        for (mu, c) in terms {
            *map.entry(mu.trimmed()).or_default() += c;
        }
        map.retain(|_, c| !c.is_zero());
        Expansion {
            k,
            source,
            terms: map,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mu: &Partition) -> BigInt {
        self.terms.get(&mu.trimmed()).cloned().unwrap_or_default()
    }

    /// Terms by decreasing size, then decreasing lexicographic order.
    pub fn terms(&self) -> Vec<(&Partition, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.size().cmp(&a.0.size()).then(b.0.cmp(a.0)));
        v
    }

    pub fn same_terms(&self, other: &Expansion) -> bool {
        self.terms == other.terms
    }

    /// `Σ b_μ g_μ^(k)`.
    pub fn reconstruct(&self, cache: &BasisCache) -> Result<SymFunc> {
        let mut f = SymFunc::zero();
        for (mu, c) in &self.terms {
            f.add_scaled(&*cache.get(self.k, mu)?, c);
        }
        Ok(f)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .into_iter()
            .map(|(mu, c)| json!({"mu": mu.parts(), "coeff": c.to_string()}))
            .collect();
        let mut obj = json!({"schema": "1", "k": self.k});
        let m = obj.as_object_mut().expect("object literal");
        if let Some(src) = &self.source {
            m.insert("lambda".into(), json!(src.lambda.parts()));
            m.insert("family".into(), json!(src.family.as_str()));
            if let Some(z) = src.z {
                m.insert("z".into(), json!(z));
            }
        }
        m.insert("terms".into(), Value::Array(terms));
        if let Some(src) = &self.source {
            m.insert(
                "alternating".into(),
                json!(alternating_check(&src.lambda, self).ok),
            );
        }
        obj
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (mu, c)) in self.terms().into_iter().enumerate() {
            let abs = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if n == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            if !abs.is_one() {
                write!(f, "{}*", abs)?;
            }
            write!(f, "g[{}]", mu)?;
        }
        Ok(())
    }
}

/// Result of the sign test `(−1)^{|λ|−|μ|} b ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignCheck {
    pub ok: bool,
    pub violation: Option<(Partition, BigInt)>,
}

pub fn sign_ok(lambda_size: i64, mu_size: i64, b: &BigInt) -> bool {
    if (lambda_size - mu_size).rem_euclid(2) == 0 {
        !b.is_negative()
    } else {
        !b.is_positive()
    }
}

pub fn alternating_check(lambda: &Partition, e: &Expansion) -> SignCheck {
    for (mu, b) in e.terms() {
        if !sign_ok(lambda.size(), mu.size(), b) {
            return SignCheck {
                ok: false,
                violation: Some((mu.clone(), b.clone())),
            };
        }
    }
    SignCheck {
        ok: true,
        violation: None,
    }
}

/// Linear solver used by [`expand_in_kkschur_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    /// Peels off one basis element at a time using the lexicographically
    /// smallest monomial of the top component, which for `g_μ^(k)` is
    /// `h_μ` with coefficient 1 (checked for every basis element used).
    Triangular,
    /// Full rational system over every k-bounded `μ` of the top degree.
    Dense,
}

/// Expansion of `f` in `{g_μ^(k)}` with the process-wide memory cache.
pub fn expand_in_kkschur(f: &SymFunc, k: i32) -> Result<Expansion> {
    let terms = expand_in_kkschur_with(f, k, Solver::Triangular, BasisCache::global())?;
    Ok(Expansion::from_terms(k, None, terms))
}

pub fn expand_in_kkschur_with(
    f: &SymFunc,
    k: i32,
    solver: Solver,
    cache: &BasisCache,
) -> Result<BTreeMap<Partition, BigInt>> {
    if k < 1 {
        return Err(Error::invalid(format!("k must be positive, got {}", k)));
    }
    let mut out: BTreeMap<Partition, BigInt> = BTreeMap::new();
    let mut residual = f.clone();
    while !residual.is_zero() {
        let (d, top) = residual.top_component()?;
        let step: Vec<(Partition, BigInt)> = match solver {
            Solver::Triangular => vec![triangular_step(&top, k, cache)?],
            Solver::Dense => dense_step(&top, d, k, cache)?,
        };
        for (mu, b) in &step {
            let g = cache.get(k, mu)?;
            residual.add_scaled(&g, &-b);
            *out.entry(mu.clone()).or_default() += b;
        }
        let survived = match solver {
            Solver::Dense => !residual.homogeneous_part(d).is_zero(),
            Solver::Triangular => {
                let lead = HMonomial::from_parts(
                    &step[0]
                        .0
                        .parts()
                        .iter()
                        .map(|&p| p as u16)
                        .collect::<Vec<_>>(),
                );
                !residual.coeff(&lead).is_zero()
            }
        };
        if survived || residual.degree().is_some_and(|d2| d2 > d) {
            return Err(Error::Mismatch(format!(
                "degree {} component survived a solver step",
                d
            )));
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn triangular_step(top: &SymFunc, k: i32, cache: &BasisCache) -> Result<(Partition, BigInt)> {
    let (m, b) = top
        .iter()
        .min_by(|a, b| a.0.parts().cmp(b.0.parts()))
        .map(|(m, b)| (m.clone(), b.clone()))
        .ok_or(Error::ZeroInput)?;
    if i32::from(m.max_part()) > k {
        return Err(Error::NoSolution(format!(
            "monomial {} has a part above {}",
            m, k
        )));
    }
    let mu = Partition::new(m.parts().iter().map(|&p| i32::from(p)).collect())?;
    let g = cache.get(k, &mu)?;
    let gtop = g.homogeneous_part(mu.size() as u32);
    let lowest = gtop.iter().min_by(|a, b| a.0.parts().cmp(b.0.parts()));
    match lowest {
        Some((lm, c)) if *lm == m && c.is_one() => Ok((mu, b)),
        _ => Err(Error::Mismatch(format!(
            "top component of g^({})_{} is not unitriangular at h_{}",
            k, mu, mu
        ))),
    }
}

fn dense_step(
    top: &SymFunc,
    d: u32,
    k: i32,
    cache: &BasisCache,
) -> Result<Vec<(Partition, BigInt)>> {
    let mus = kbounded_of_size(k as u32, d);
    let tops: Vec<SymFunc> = mus
        .par_iter()
        .map(|mu| cache.get(k, mu).map(|g| g.homogeneous_part(d)))
        .collect::<Result<_>>()?;
    let mut monos: Vec<HMonomial> = top.iter().map(|(m, _)| m.clone()).collect();
    for t in &tops {
        monos.extend(t.iter().map(|(m, _)| m.clone()));
    }
    monos.sort();
    monos.dedup();
    let rows = monos.len();
    let cols = mus.len();
    // augmented matrix [A | r]
    let mut a: Vec<Vec<BigRational>> = monos
        .iter()
        .map(|m| {
            let mut row: Vec<BigRational> = tops
                .iter()
                .map(|t| BigRational::from_integer(t.coeff(m)))
                .collect();
            row.push(BigRational::from_integer(top.coeff(m)));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..=cols {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if (r..rows).any(|i| !a[i][cols].is_zero()) {
        return Err(Error::NoSolution(format!(
            "degree {} component is outside the span",
            d
        )));
    }
    if pivots.len() < cols {
        return Err(Error::NotUnique(format!(
            "degree {} components of the basis have rank {} < {}",
            d,
            pivots.len(),
            cols
        )));
    }
    let mut out = Vec::new();
    for (i, &c) in pivots.iter().enumerate() {
        let x = &a[i][cols];
        if !x.is_integer() {
            return Err(Error::NonIntegral(format!(
                "coefficient {} of g_{}",
                x, mus[c]
            )));
        }
        if !x.is_zero() {
            out.push((mus[c].clone(), x.to_integer()));
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct CacheRecord {
    key: String,
    value: SymFunc,
}

fn cache_key(k: i32, mu: &Partition) -> String {
    format!("{}:{}", k, mu)
}

/// Memoized `g_μ^(k)`, optionally backed by one JSON-lines file per `k`.
#[derive(Default)]
pub struct BasisCache {
    dir: Option<PathBuf>,
    mem: Mutex<FxHashMap<(i32, Partition), Arc<SymFunc>>>,
    loaded: Mutex<HashSet<i32>>,
    write_lock: Mutex<()>,
}

impl BasisCache {
    pub fn memory() -> Self {
        BasisCache::default()
    }

    pub fn on_disk(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {}", dir.display(), e)))?;
        Ok(BasisCache {
            dir: Some(dir),
            ..BasisCache::default()
        })
    }

    pub fn global() -> &'static BasisCache {
        static G: OnceLock<BasisCache> = OnceLock::new();
        G.get_or_init(BasisCache::memory)
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn file(&self, k: i32) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("kkschur-k{}.jsonl", k)))
    }

    pub fn get(&self, k: i32, mu: &Partition) -> Result<Arc<SymFunc>> {
        let mu = mu.trimmed();
        self.load(k)?;
        if let Some(v) = self.mem.lock().expect("cache lock").get(&(k, mu.clone())) {
            return Ok(v.clone());
        }
        let v = Arc::new(kkschur(&mu, k)?);
        let fresh = self
            .mem
            .lock()
            .expect("cache lock")
            .insert((k, mu.clone()), v.clone())
            .is_none();
        if fresh {
            self.append(k, &mu, &v)?;
        }
        Ok(v)
    }

    /// Number of entries held in memory.
    pub fn len(&self) -> usize {
        self.mem.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn load(&self, k: i32) -> Result<()> {
        let Some(path) = self.file(k) else {
            return Ok(());
        };
        if !self.loaded.lock().expect("cache lock").insert(k) {
            return Ok(());
        }
        let Ok(text) = fs::read_to_string(&path) else {
            return Ok(());
        };
        let mut mem = self.mem.lock().expect("cache lock");
        for line in text.lines() {
            let Ok(rec) = serde_json::from_str::<CacheRecord>(line) else {
                continue;
            };
            let Some((kk, mu)) = rec.key.split_once(':') else {
                continue;
            };
            let (Ok(kk), Ok(mu)) = (kk.parse::<i32>(), mu.parse::<Partition>()) else {
                continue;
            };
            if kk != k || cache_key(kk, &mu) != rec.key {
                continue;
            }
            mem.entry((k, mu)).or_insert_with(|| Arc::new(rec.value));
        }
        Ok(())
    }

    /// Appends by rewriting the file through a temporary and a rename, so
    /// readers never see a torn line.
    fn append(&self, k: i32, mu: &Partition, v: &SymFunc) -> Result<()> {
        let Some(path) = self.file(k) else {
            return Ok(());
        };
        let io = |e: std::io::Error| Error::Io(format!("{}: {}", path.display(), e));
        let _guard = self.write_lock.lock().expect("cache lock");
        let mut text = fs::read_to_string(&path).unwrap_or_default();
        if !text.is_empty() && !text.ends_with('\n') {
            text.push('\n');
        }
        let rec = CacheRecord {
            key: cache_key(k, mu),
            value: v.clone(),
        };
        text.push_str(&serde_json::to_string(&rec).map_err(|e| Error::Io(e.to_string()))?);
        text.push('\n');
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(text.as_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)?;
        Ok(())
    }

    /// Removes every cache file and forgets the memory entries.
    pub fn clear(&self) -> Result<usize> {
        self.mem.lock().expect("cache lock").clear();
        self.loaded.lock().expect("cache lock").clear();
        let Some(dir) = &self.dir else {
            return Ok(0);
        };
        let mut n = 0;
        for e in fs::read_dir(dir).map_err(|e| Error::Io(e.to_string()))? {
            let p = e.map_err(|e| Error::Io(e.to_string()))?.path();
            let name = p.file_name().and_then(|s| s.to_str()).unwrap_or("");
            if name.starts_with("kkschur-k") {
                fs::remove_file(&p).map_err(|e| Error::Io(e.to_string()))?;
                n += 1;
            }
        }
        Ok(n)
    }

    /// `(k, number of valid records)` for each cache file.
    pub fn stats(&self) -> Result<Vec<(i32, usize)>> {
        let Some(dir) = &self.dir else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for e in fs::read_dir(dir).map_err(|e| Error::Io(e.to_string()))? {
            let p = e.map_err(|e| Error::Io(e.to_string()))?.path();
            let name = p.file_name().and_then(|s| s.to_str()).unwrap_or("");
            let Some(k) = name
                .strip_prefix("kkschur-k")
                .and_then(|s| s.strip_suffix(".jsonl"))
                .and_then(|s| s.parse::<i32>().ok())
            else {
                continue;
            };
            let text = fs::read_to_string(&p).map_err(|e| Error::Io(e.to_string()))?;
            let n = text
                .lines()
                .filter(|l| serde_json::from_str::<CacheRecord>(l).is_ok())
                .count();
            out.push((k, n));
        }
        out.sort();
        Ok(out)
    }
}
