//! Seeded property suites over the identities the engine relies on.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bases::{closed_kschur, in_lambda_k, kkschur, weighted_kkschur};
use crate::error::Result;
use crate::katalan::{
    apply_lowering, evaluate, expand, mirror_apply, relk_split, KatalanSpec, MirrorOutcome,
    Rewrite, Truncation,
};
use crate::modular::{point_for, ModPoint, RaisingTable};
use crate::partitions::{enumerate_kbounded, IntVec, Partition};
use crate::rootideal::{all_root_ideals, second_components, LambdaIdeal, RootIdeal, RootMultiset};
use crate::symfunc::SymFunc;

/// Default hard-cap slack for the unpruned reference evaluation.
pub const HARD_CAP_SLACK: u32 = 6;

/// Number of random points used for modular identity checks.
pub const MIRROR_POINTS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lk,
    Relk,
    Mirror,
    Prune,
    Threeg,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Lk,
        Suite::Relk,
        Suite::Mirror,
        Suite::Prune,
        Suite::Threeg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Lk => "lk",
            Suite::Relk => "relk",
            Suite::Mirror => "mirror",
            Suite::Prune => "prune",
            Suite::Threeg => "threeg",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.as_str() == s)
    }
}

/// Parameters shared by the suites.
#[derive(Clone, Debug)]
pub struct Config {
    pub seed: u64,
    /// Random cases for the LK and relk suites.
    pub cases: usize,
    /// Largest `ℓ` for the exhaustive suites; also the largest `k` for threeg.
    pub lmax: usize,
    /// Largest `γ` entry in the exhaustive mirror search.
    pub mirror_gamma_max: i32,
    /// Largest mark multiplicity in the exhaustive mirror search.
    pub mirror_mark_max: u32,
    /// Mirror instances up to this `ℓ` are all checked exactly.
    pub mirror_exact_lmax: usize,
    /// Exactly checked sample of the larger mirror instances.
    pub mirror_exact_sample: usize,
    /// Largest `γ` entry in the prune comparison.
    pub prune_gamma_max: i32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0x5eed,
            cases: 200,
            lmax: 5,
            mirror_gamma_max: 3,
            mirror_mark_max: 2,
            mirror_exact_lmax: 4,
            mirror_exact_sample: 300,
            prune_gamma_max: 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub suite: Suite,
    pub checked: usize,
    /// Failing instances, smallest first.
    pub failures: Vec<String>,
    pub millis: u128,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A failing instance, ordered by `(ℓ, |γ|)` so the first one is minimal.
struct Failure {
    key: (usize, i64),
    text: String,
}

fn fail(spec: &KatalanSpec, what: &str) -> Failure {
    Failure {
        key: (spec.len(), spec.gamma().size()),
        text: format!(
            "{}: {}",
            what,
            serde_json::to_string(spec).unwrap_or_else(|_| spec.to_string())
        ),
    }
}

fn finish(suite: Suite, checked: usize, mut failures: Vec<Failure>, start: Instant) -> Outcome {
    failures.sort_by(|a, b| a.key.cmp(&b.key).then(a.text.cmp(&b.text)));
    Outcome {
        suite,
        checked,
        failures: failures.into_iter().map(|f| f.text).collect(),
        millis: start.elapsed().as_millis(),
    }
}

pub fn run(suite: Suite, cfg: &Config) -> Result<Outcome> {
    match suite {
        Suite::Lk => Ok(lk_suite(cfg)),
        Suite::Relk => Ok(relk_suite(cfg)),
        Suite::Mirror => Ok(mirror_suite(cfg)),
        Suite::Prune => Ok(prune_suite(cfg)),
        Suite::Threeg => threeg_suite(cfg),
    }
}

/// A random root ideal: row starts weakly increasing with `s_i > i`.
pub fn random_ideal(rng: &mut impl Rng, len: usize) -> RootIdeal {
    let mut starts = Vec::with_capacity(len);
    let mut lo = 2;
    for i in 1..=len {
        let s = rng.gen_range(lo.max(i + 1)..=len + 1);
        starts.push(s);
        lo = s;
    }
    RootIdeal::from_row_starts(len, starts).expect("valid row starts")
}

/// Random specs with `ℓ ≤ lmax`, `γ` entries in `[0, 6]` and mark
/// multiplicities at most 2.
pub fn random_specs(seed: u64, count: usize, lmax: usize) -> Vec<KatalanSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=lmax.max(1));
            let psi = random_ideal(&mut rng, len);
            let marks = RootMultiset::from_counts((0..len).map(|_| rng.gen_range(0..=2)).collect());
            let gamma = IntVec::new((0..len).map(|_| rng.gen_range(0..=6)).collect());
            KatalanSpec::new(psi, marks, gamma).expect("lengths agree")
        })
        .collect()
}

fn signed_sum(parts: &[(KatalanSpec, i32)]) -> SymFunc {
    let mut total = SymFunc::zero();
    for (s, sign) in parts {
        total.add_scaled(&evaluate(s), &(*sign).into());
    }
    total
}

/// `L_z K(Ψ; M; γ) = K(Ψ; M; γ − ε_z)`, with the left side computed by
/// shifting the expanded combination.
fn lk_suite(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let specs = random_specs(cfg.seed, cfg.cases, cfg.lmax);
    let results: Vec<(usize, Vec<Failure>)> = specs
        .par_iter()
        .map(|s| {
            let combo = expand(s, Truncation::Pruned);
            let mut fails = Vec::new();
            for z in 1..=s.len() {
                let lhs = combo.shift_down(z).evaluate(s.len());
                let rhs = evaluate(&apply_lowering(s, z).expect("z in range"));
                if lhs != rhs {
                    fails.push(fail(s, &format!("LK at z = {}", z)));
                }
            }
            (s.len(), fails)
        })
        .collect();
    let checked = results.iter().map(|r| r.0).sum();
    finish(
        Suite::Lk,
        checked,
        results.into_iter().flat_map(|r| r.1).collect(),
        start,
    )
}

/// The four rewrites, each at a seeded choice of root or mark.
fn relk_suite(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let specs = random_specs(cfg.seed, cfg.cases, cfg.lmax);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9);
    let jobs: Vec<(KatalanSpec, Vec<Rewrite>)> = specs
        .into_iter()
        .map(|s| {
            let mut ops = Vec::new();
            let rem = s.psi().removable_roots();
            if !rem.is_empty() {
                ops.push(Rewrite::RemoveRoot(rem[rng.gen_range(0..rem.len())]));
            }
            let add = s.psi().addable_roots();
            if !add.is_empty() {
                ops.push(Rewrite::AddRoot(add[rng.gen_range(0..add.len())]));
            }
            let marks = s.marks().elements();
            if !marks.is_empty() {
                ops.push(Rewrite::RemoveMark(marks[rng.gen_range(0..marks.len())]));
            }
            ops.push(Rewrite::AddMark(rng.gen_range(1..=s.len())));
            (s, ops)
        })
        .collect();
    let results: Vec<(usize, Vec<Failure>)> = jobs
        .par_iter()
        .map(|(s, ops)| {
            let lhs = evaluate(s);
            let mut fails = Vec::new();
            for op in ops {
                match relk_split(s, *op) {
                    Ok(parts) if signed_sum(&parts) == lhs => {}
                    Ok(_) => fails.push(fail(s, &format!("{:?}", op))),
                    Err(e) => fails.push(fail(s, &format!("{:?} rejected: {}", op, e))),
                }
            }
            (ops.len(), fails)
        })
        .collect();
    let checked = results.iter().map(|r| r.0).sum();
    finish(
        Suite::Relk,
        checked,
        results.into_iter().flat_map(|r| r.1).collect(),
        start,
    )
}

fn product_range(len: usize, lo: i32, hi: i32) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Mirror hypotheses that depend only on the ideal.
fn mirror_shape_ok(psi: &RootIdeal, y: usize, z: usize) -> bool {
    let Ok(path) = psi.bounce_path(y, z) else {
        return false;
    };
    psi.has_ceiling(y)
        && path[..path.len() - 1].iter().all(|&x| psi.has_mirror(x))
        && psi.has_wall(z)
}

/// Every instance with `ℓ ≤ lmax`, `γ` entries in `[0, gmax]` and mark
/// multiplicities in `[0, mmax]` that satisfies the mirror hypotheses.
pub fn mirror_instances(lmax: usize, gmax: i32, mmax: u32) -> Vec<(KatalanSpec, usize, usize)> {
    let mut out = Vec::new();
    for len in 2..=lmax {
        let gammas = product_range(len, 0, gmax);
        let markss = product_range(len, 0, mmax as i32);
        for psi in all_root_ideals(len) {
            for z in 1..len {
                for y in 1..=z {
                    if !mirror_shape_ok(&psi, y, z) {
                        continue;
                    }
                    for g in &gammas {
                        for m in &markss {
                            let spec = KatalanSpec::new(
                                psi.clone(),
                                RootMultiset::from_counts(m.iter().map(|&c| c as u32).collect()),
                                IntVec::new(g.clone()),
                            )
                            .expect("lengths agree");
                            if mirror_apply(&spec, y, z).expect("indices in range")
                                != MirrorOutcome::NotApplicable
                            {
                                out.push((spec, y, z));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Checks the mirror conclusion exactly.
fn mirror_exact(s: &KatalanSpec, y: usize, z: usize) -> bool {
    let value = evaluate(s);
    match mirror_apply(s, y, z).expect("indices in range") {
        MirrorOutcome::Zero => value.is_zero(),
        MirrorOutcome::DropEpsilon(i) => {
            value == evaluate(&apply_lowering(s, i).expect("index in range"))
        }
        MirrorOutcome::NotApplicable => true,
    }
}

/// Checks the mirror conclusion at the given points.
fn mirror_fingerprint(
    tables: &mut [RaisingTable<'_>],
    s: &KatalanSpec,
    y: usize,
    z: usize,
) -> bool {
    let outcome = mirror_apply(s, y, z).expect("indices in range");
    tables.iter_mut().all(|t| {
        let v = t.katalan_spec(s);
        match outcome {
            MirrorOutcome::Zero => v == 0,
            MirrorOutcome::DropEpsilon(i) => {
                v == t.katalan_spec(&apply_lowering(s, i).expect("index in range"))
            }
            MirrorOutcome::NotApplicable => true,
        }
    })
}

/// Every instance is checked at `MIRROR_POINTS` seeded points of `Z/p`;
/// instances with `ℓ ≤ mirror_exact_lmax`, plus a seeded sample of the rest,
/// are also checked as exact identities.
fn mirror_suite(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let cases = mirror_instances(cfg.lmax, cfg.mirror_gamma_max, cfg.mirror_mark_max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6d69_7272);
    let points: Vec<ModPoint> = (0..MIRROR_POINTS)
        .map(|_| point_for(&mut rng, cfg.lmax, cfg.mirror_gamma_max))
        .collect();

    // instances come grouped by ideal
    let mut groups: Vec<&[(KatalanSpec, usize, usize)]> = Vec::new();
    let mut begin = 0;
    for n in 1..=cases.len() {
        if n == cases.len() || cases[n].0.psi() != cases[begin].0.psi() {
            groups.push(&cases[begin..n]);
            begin = n;
        }
    }
    let mut fails: Vec<Failure> = groups
        .par_iter()
        .flat_map_iter(|group| {
            let psi = group[0].0.psi();
            let mut tables: Vec<RaisingTable<'_>> =
                points.iter().map(|p| RaisingTable::new(psi, p)).collect();
            group
                .iter()
                .filter(|(s, y, z)| !mirror_fingerprint(&mut tables, s, *y, *z))
                .map(|(s, y, z)| fail(s, &format!("mirror at y = {}, z = {} (modular)", y, z)))
                .collect::<Vec<_>>()
        })
        .collect();

    let mut exact: Vec<usize> = (0..cases.len())
        .filter(|&n| cases[n].0.len() <= cfg.mirror_exact_lmax)
        .collect();
    let rest: Vec<usize> = (0..cases.len())
        .filter(|&n| cases[n].0.len() > cfg.mirror_exact_lmax)
        .collect();
    if !rest.is_empty() {
        exact.extend(
            rand::seq::index::sample(
                &mut rng,
                rest.len(),
                cfg.mirror_exact_sample.min(rest.len()),
            )
            .into_iter()
            .map(|n| rest[n]),
        );
    }
    fails.extend(
        exact
            .par_iter()
            .filter_map(|&n| {
                let (s, y, z) = &cases[n];
                (!mirror_exact(s, *y, *z))
                    .then(|| fail(s, &format!("mirror at y = {}, z = {}", y, z)))
            })
            .collect::<Vec<_>>(),
    );
    finish(Suite::Mirror, cases.len(), fails, start)
}

/// Specs for the prune comparison: every ideal with `ℓ ≤ lmax`, every `γ`
/// with entries in `[0, gmax]`, and marks `∅`, `L(Ψ)` and `[ℓ]`.
pub fn prune_specs(lmax: usize, gmax: i32) -> Vec<KatalanSpec> {
    let mut out = Vec::new();
    for len in 1..=lmax {
        let gammas = product_range(len, 0, gmax);
        for psi in all_root_ideals(len) {
            let mark_sets = [
                RootMultiset::empty(len),
                second_components(&psi),
                RootMultiset::from_counts(vec![1; len]),
            ];
            for m in mark_sets {
                for g in &gammas {
                    out.push(
                        KatalanSpec::new(psi.clone(), m.clone(), IntVec::new(g.clone()))
                            .expect("lengths agree"),
                    );
                }
            }
        }
    }
    out
}

fn prune_suite(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let specs = prune_specs(cfg.lmax.min(4), cfg.prune_gamma_max);
    let fails: Vec<Failure> = specs
        .par_iter()
        .filter_map(|s| {
            let pruned = expand(s, Truncation::Pruned);
            let capped = expand(
                s,
                Truncation::HardCap {
                    slack: HARD_CAP_SLACK,
                },
            );
            // equal live terms give equal values; otherwise compare the functions
            if pruned == capped.live(s.len()) {
                return None;
            }
            (pruned.evaluate(s.len()) != capped.evaluate(s.len()))
                .then(|| fail(s, "pruned and capped evaluations differ"))
        })
        .collect();
    finish(Suite::Prune, specs.len(), fails, start)
}

/// Every `λ` with exactly `ℓ` parts, `1 ≤ ℓ ≤ lmax`, parts at most `k ≤ kmax`.
pub fn kbounded_corpus(kmax: i32, lmax: usize) -> Vec<(Partition, i32)> {
    let mut out = Vec::new();
    for k in 1..=kmax {
        for len in 1..=lmax {
            for lam in enumerate_kbounded(k as u32, len, (k as u32) * len as u32) {
                out.push((lam, k));
            }
        }
    }
    out
}

/// `g̃^(1) = g^(k)` and `g̃^(bott+1) = ĝ`, plus the support invariant.
fn threeg_suite(cfg: &Config) -> Result<Outcome> {
    let start = Instant::now();
    let lmax = cfg.lmax.min(4);
    let corpus = kbounded_corpus(lmax as i32, lmax);
    let results: Vec<Result<Vec<String>>> = corpus
        .par_iter()
        .map(|(lam, k)| {
            let k = *k;
            let bott = LambdaIdeal::new(lam, k)?.bottom;
            let g = kkschur(lam, k)?;
            let c = closed_kschur(lam, k)?;
            let mut bad = Vec::new();
            if weighted_kkschur(lam, k, 1)? != g {
                bad.push(format!("weight 1 differs from g^({})_{}", k, lam));
            }
            if weighted_kkschur(lam, k, bott + 1)? != c {
                bad.push(format!(
                    "weight {} differs from the closed function for {} (k = {})",
                    bott + 1,
                    lam,
                    k
                ));
            }
            if !in_lambda_k(&g, k) || !in_lambda_k(&c, k) {
                bad.push(format!(
                    "support of {} (k = {}) leaves h_1..h_{}",
                    lam, k, k
                ));
            }
            Ok(bad)
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        failures.extend(r?);
    }
    Ok(Outcome {
        suite: Suite::Threeg,
        checked: corpus.len(),
        failures,
        millis: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_specs_are_deterministic() {
        let a = random_specs(7, 20, 5);
        let b = random_specs(7, 20, 5);
        assert_eq!(a, b);
        assert!(a
            .iter()
            .all(|s| s.len() <= 5 && s.gamma().entries().iter().all(|&g| (0..=6).contains(&g))));
        assert_ne!(a, random_specs(8, 20, 5));
    }

    #[test]
    fn small_suites_pass() {
        let cfg = Config {
            cases: 25,
            lmax: 3,
            ..Config::default()
        };
        for suite in Suite::ALL {
            let out = run(suite, &cfg).unwrap();
            assert!(out.passed(), "{:?}: {:?}", suite, out.failures);
            assert!(out.checked > 0, "{:?}", suite);
        }
    }

    #[test]
    fn mirror_search_finds_both_outcomes() {
        let cases = mirror_instances(3, 2, 2);
        let zero = cases
            .iter()
            .filter(|(s, y, z)| mirror_apply(s, *y, *z).unwrap() == MirrorOutcome::Zero)
            .count();
        assert!(zero > 0);
        assert!(zero < cases.len());
    }
}
