use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::{json, Value};

use katalan_core::bases::{
    expand_in_kkschur_with, family_spec, family_value, sign_ok, weighted_kkschur, BasisCache,
    Expansion, Family, Solver, Source,
};
use katalan_core::katalan::evaluate_with;
use katalan_core::recursion::{
    explore, sweep_corpus, verify_theorem, weight_step, ClassFilter, PartitionClass, Report,
};
use katalan_core::rootideal::LambdaIdeal;
use katalan_core::selftest::{self, Config, Suite};
use katalan_core::{Error, KatalanSpec, Partition, SymFunc, Truncation};

use crate::{
    codes, Basis, CacheAction, ClassArg, EnumerateArgs, EvalRawArgs, ExpandArgs, Failure,
    FamilyArg, Format, Outcome, Ranges, Route, SelftestArgs, StepArgs, VerifyArgs,
};

fn parse_lambda(s: &str) -> Result<Partition, Failure> {
    s.parse::<Partition>()
        .map_err(|e| Failure::invalid(format!("--lambda {:?}: {}", s, e)))
}

fn family(f: FamilyArg) -> Family {
    match f {
        FamilyArg::G => Family::G,
        FamilyArg::Kkschur => Family::KkSchur,
        FamilyArg::Closed => Family::Closed,
        FamilyArg::Weighted => Family::Weighted,
    }
}

fn open_cache(dir: Option<PathBuf>) -> Result<BasisCache, Failure> {
    Ok(match dir {
        Some(d) => BasisCache::on_disk(d)?,
        None => BasisCache::memory(),
    })
}

fn print_json(v: &Value) -> Outcome {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn csv_lambda(p: &[i32]) -> String {
    p.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn spec_json(spec: &KatalanSpec) -> Result<Value, Failure> {
    let mut v = serde_json::to_value(spec)?;
    v["text"] = json!(spec.to_string());
    Ok(v)
}

fn print_spec_pretty(spec: &KatalanSpec) {
    println!("{}", spec);
    println!("marks: {}", spec.marks());
    print!(
        "{}",
        spec.psi().diagram(Some(spec.marks()), Some(spec.gamma()))
    );
}

/// The weight the recursive route starts from.
fn z_target(fam: Family, lambda: &Partition, k: i32, z: Option<usize>) -> Result<usize, Failure> {
    match fam {
        Family::G => Err(Failure::invalid(
            "the recursive route does not apply to the g family",
        )),
        Family::KkSchur => Ok(1),
        Family::Closed => Ok(LambdaIdeal::new(lambda, k)?.bottom + 1),
        Family::Weighted => z.ok_or_else(|| Failure::invalid("the weighted family needs --z")),
    }
}

pub fn expand(a: ExpandArgs, dir: Option<PathBuf>) -> Outcome {
    let lambda = parse_lambda(&a.lambda)?;
    let fam = family(a.family);
    if a.z.is_some() && fam != Family::Weighted {
        return Err(Failure::invalid("--z only applies to the weighted family"));
    }
    lambda.check_kbounded_len(a.k, lambda.len())?;
    let spec = family_spec(fam, &lambda, a.k, a.z)?;
    let spec_value = match (&spec, a.show_spec) {
        (Some(s), true) => Some(spec_json(s)?),
        (None, true) => return Err(Failure::invalid("the g family has no Katalan spec")),
        _ => None,
    };
    let source = Source {
        family: fam,
        lambda: lambda.clone(),
        z: a.z,
    };

    let Some(Basis::Kkschur) = a.basis else {
        if a.spec_only {
            return match a.format {
                Format::Json => print_json(&spec_value.unwrap_or(Value::Null)),
                Format::Pretty => {
                    if let Some(s) = &spec {
                        print_spec_pretty(s);
                    }
                    Ok(())
                }
                Format::Csv => Err(Failure::invalid("--spec-only has no csv form")),
            };
        }
        let value = family_value(fam, &lambda, a.k, a.z)?;
        return print_value(&a, &source, spec.as_ref(), spec_value, &value);
    };

    let cache = open_cache(dir)?;
    let linear = || -> Result<Expansion, Failure> {
        let f = family_value(fam, &lambda, a.k, a.z)?;
        let terms = expand_in_kkschur_with(&f, a.k, Solver::Triangular, &cache)?;
        Ok(Expansion::from_terms(a.k, Some(source.clone()), terms))
    };
    let recursive = || -> Result<Expansion, Failure> {
        let z = z_target(fam, &lambda, a.k, a.z)?;
        let e = katalan_core::recursion::expand_recursive(&lambda, a.k, z)?;
        let terms: Vec<(Partition, _)> = e
            .terms()
            .into_iter()
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Ok(Expansion::from_terms(a.k, Some(source.clone()), terms))
    };
    let (main, other) = match a.route {
        Route::Linear => (linear()?, None),
        Route::Recursive => (recursive()?, None),
        Route::Both => {
            let r = recursive()?;
            (linear()?, Some(r))
        }
    };
    let agree = other.as_ref().map(|r| r.same_terms(&main));

    match a.format {
        Format::Json => {
            let mut v = main.to_json();
            v["route"] = json!(match a.route {
                Route::Linear => "linear",
                Route::Recursive => "recursive",
                Route::Both => "both",
            });
            if let Some(ok) = agree {
                v["routesAgree"] = json!(ok);
                if !ok {
                    v["recursiveTerms"] =
                        other.as_ref().expect("both routes").to_json()["terms"].clone();
                }
            }
            if let Some(s) = spec_value {
                v["spec"] = s;
            }
            print_json(&v)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.write_record(["k", "lambda", "family", "mu", "coeff", "signOK"])?;
            for (mu, c) in main.terms() {
                w.write_record([
                    a.k.to_string(),
                    csv_lambda(lambda.parts()),
                    fam.as_str().to_string(),
                    csv_lambda(mu.parts()),
                    c.to_string(),
                    sign_ok(lambda.size(), mu.size(), c).to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::Pretty => {
            if let Some(s) = &spec {
                if a.show_spec {
                    print_spec_pretty(s);
                }
            }
            println!("{} ({}) for k = {}:", fam, lambda, a.k);
            for (mu, c) in main.terms() {
                let mark = if sign_ok(lambda.size(), mu.size(), c) {
                    ""
                } else {
                    "  sign!"
                };
                println!("  {:>6}  g[{}]{}", c.to_string(), mu, mark);
            }
            let alt = katalan_core::bases::alternating_check(&lambda, &main);
            println!("terms: {}", main.len());
            println!("alternating: {}", alt.ok);
            if let Some(ok) = agree {
                println!("routesAgree: {}", ok);
                if !ok {
                    println!("recursive route: {}", other.as_ref().expect("both routes"));
                }
            }
        }
    }
    match agree {
        Some(false) => Err(Failure::new(
            codes::MISMATCH,
            "the recursive and linear routes disagree",
        )),
        _ => Ok(()),
    }
}

fn print_value(
    a: &ExpandArgs,
    src: &Source,
    spec: Option<&KatalanSpec>,
    spec_value: Option<Value>,
    value: &SymFunc,
) -> Outcome {
    match a.format {
        Format::Json => {
            let mut v = json!({
                "schema": "1",
                "k": a.k,
                "lambda": src.lambda.parts(),
                "family": src.family.as_str(),
            });
            if let Some(z) = src.z {
                v["z"] = json!(z);
            }
            if let Some(s) = spec_value {
                v["spec"] = s;
            }
            v["value"] = serde_json::to_value(value)?;
            print_json(&v)
        }
        Format::Pretty => {
            if let (Some(s), true) = (spec, a.show_spec) {
                print_spec_pretty(s);
            }
            println!("{}", value);
            Ok(())
        }
        Format::Csv => Err(Failure::invalid("csv output needs --basis")),
    }
}

pub fn step(a: StepArgs) -> Outcome {
    let lambda = parse_lambda(&a.lambda)?;
    let terms = weight_step(&lambda, a.k, a.z)?;
    let mut valid = None;
    if a.validate {
        let mut sum = SymFunc::zero();
        for t in &terms {
            sum.add_scaled(&weighted_kkschur(&t.mu, a.k, a.z)?, &t.coeff);
        }
        valid = Some(sum == weighted_kkschur(&lambda, a.k, a.z + 1)?);
    }
    match a.format {
        Format::Json => {
            let ts: Vec<Value> = terms
                .iter()
                .map(|t| json!({"mu": t.mu.parts(), "z": t.z, "coeff": t.coeff.to_string()}))
                .collect();
            let mut v = json!({
                "schema": "1",
                "k": a.k,
                "lambda": lambda.parts(),
                "z": a.z,
                "terms": ts,
            });
            if let Some(ok) = valid {
                v["validated"] = json!(ok);
            }
            print_json(&v)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.write_record(["k", "lambda", "z", "mu", "coeff"])?;
            for t in &terms {
                w.write_record([
                    a.k.to_string(),
                    csv_lambda(lambda.parts()),
                    a.z.to_string(),
                    csv_lambda(t.mu.parts()),
                    t.coeff.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::Pretty => {
            println!(
                "weight {} -> {} for ({}), k = {}:",
                a.z + 1,
                a.z,
                lambda,
                a.k
            );
            for t in &terms {
                println!("  {:>4}  ({})", t.coeff.to_string(), t.mu);
            }
            if let Some(ok) = valid {
                println!("validated: {}", ok);
            }
        }
    }
    match valid {
        Some(false) => Err(Failure::new(
            codes::MISMATCH,
            "weight step fails as a function identity",
        )),
        _ => Ok(()),
    }
}

fn filter(c: ClassArg) -> ClassFilter {
    match c {
        ClassArg::Strict => ClassFilter::Strict,
        ClassArg::HatP => ClassFilter::HatP,
        ClassArg::All => ClassFilter::All,
    }
}

fn corpus(r: &Ranges) -> Result<Vec<(Partition, i32)>, Failure> {
    let (k0, k1) = r.k.map_or((r.k_min, r.k_max), |k| (k, k));
    let (l0, l1) = r.l.map_or((r.l_min, r.l_max), |l| (l, l));
    if k0 < 1 || k0 > k1 {
        return Err(Failure::invalid(format!(
            "empty or invalid k range {}..={}",
            k0, k1
        )));
    }
    if l0 < 1 || l0 > l1 {
        return Err(Failure::invalid(format!(
            "empty or invalid length range {}..={}",
            l0, l1
        )));
    }
    Ok(sweep_corpus(filter(r.class), k0..=k1, l0..=l1, r.max_size)?)
}

enum Verdict {
    Pass,
    /// Sign violation with agreeing routes.
    Counterexample,
    Mismatch,
    Hypothesis,
    /// Sign violation found while exploring outside the proven class.
    Explored,
}

fn verify_one(
    lambda: &Partition,
    k: i32,
    explore_ok: bool,
    cache: &BasisCache,
) -> (Verdict, Value) {
    let in_class = katalan_core::in_hat_class(lambda, k, lambda.len()).unwrap_or(false);
    let result: Result<Report, Error> = if in_class {
        verify_theorem(lambda, k, cache)
    } else if explore_ok {
        explore(lambda, k, cache)
    } else {
        Err(Error::Hypothesis(format!(
            "{} is outside the hat class for k = {}; use --unsafe-explore",
            lambda, k
        )))
    };
    match result {
        Ok(r) => {
            let verdict = if !r.routes_agree {
                Verdict::Mismatch
            } else if r.signs.ok {
                Verdict::Pass
            } else if in_class {
                Verdict::Counterexample
            } else {
                Verdict::Explored
            };
            let mut v = r.to_json();
            if r.recursive.is_none() {
                v["route"] = json!("linear");
            }
            (verdict, v)
        }
        Err(e) => {
            let (verdict, kind) = match e {
                Error::Hypothesis(_) => (Verdict::Hypothesis, "hypothesis"),
                _ => (Verdict::Mismatch, "mismatch"),
            };
            let class = PartitionClass::of(lambda, k).map_or("other", |c| c.as_str());
            let v = json!({
                "schema": "1",
                "lambda": lambda.parts(),
                "k": k,
                "class": class,
                "error": kind,
                "message": e.to_string(),
            });
            (verdict, v)
        }
    }
}

pub fn verify(a: VerifyArgs, dir: Option<PathBuf>) -> Outcome {
    let jobs = corpus(&a.ranges)?;
    let cache = open_cache(dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs as usize)
        .build()
        .map_err(|e| Failure::new(codes::FAILED, e.to_string()))?;
    let results: Vec<(Verdict, Value)> = pool.install(|| {
        jobs.par_iter()
            .map(|(lam, k)| verify_one(lam, *k, a.unsafe_explore, &cache))
            .collect()
    });

    let sink: Box<dyn Write> = match &a.report {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(sink);
    let (mut pass, mut counter, mut mismatch, mut hyp, mut explored) = (0, 0, 0, 0, 0);
    for (verdict, mut v) in results {
        match verdict {
            Verdict::Pass => pass += 1,
            Verdict::Counterexample => counter += 1,
            Verdict::Mismatch => mismatch += 1,
            Verdict::Hypothesis => hyp += 1,
            Verdict::Explored => explored += 1,
        }
        if a.no_timing {
            if let Some(m) = v.as_object_mut() {
                m.remove("millis");
            }
        }
        serde_json::to_writer(&mut out, &v)?;
        writeln!(out)?;
    }
    out.flush()?;
    eprintln!(
        "verified {}: {} passed, {} sign violations, {} route mismatches, {} outside hypothesis, {} explored with sign violations",
        jobs.len(),
        pass,
        counter,
        mismatch,
        hyp,
        explored
    );
    if mismatch > 0 {
        Err(Failure::new(codes::MISMATCH, ""))
    } else if hyp > 0 {
        Err(Failure::new(codes::HYPOTHESIS, ""))
    } else if counter > 0 {
        Err(Failure::new(codes::COUNTEREXAMPLE, ""))
    } else {
        Ok(())
    }
}

pub fn eval_raw(a: EvalRawArgs) -> Outcome {
    let text = if a.spec.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(&a.spec)
            .map_err(|e| Failure::invalid(format!("{}: {}", a.spec.display(), e)))?
    };
    let spec: KatalanSpec = serde_json::from_str(&text)?;
    let trunc = a
        .hard_cap
        .map_or(Truncation::Pruned, |slack| Truncation::HardCap { slack });
    let value = evaluate_with(&spec, trunc);
    match a.format {
        Format::Json => print_json(&json!({
            "schema": "1",
            "spec": spec_json(&spec)?,
            "value": serde_json::to_value(&value)?,
        })),
        Format::Pretty => {
            println!("{} = {}", spec, value);
            Ok(())
        }
        Format::Csv => Err(Failure::invalid("eval-raw has no csv form")),
    }
}

pub fn selftest(a: SelftestArgs) -> Outcome {
    let suites: Vec<Suite> = if a.suite.is_empty() {
        Suite::ALL.to_vec()
    } else {
        a.suite
            .iter()
            .map(|s| {
                Suite::parse(s).ok_or_else(|| Failure::invalid(format!("unknown suite {:?}", s)))
            })
            .collect::<Result<_, _>>()?
    };
    if a.lmax == 0 {
        return Err(Failure::invalid("--lmax must be positive"));
    }
    let mut failed = false;
    for suite in suites {
        let mut cfg = Config {
            seed: a.seed,
            cases: a.cases,
            lmax: a.lmax,
            ..Config::default()
        };
        if matches!(suite, Suite::Mirror | Suite::Prune) && !a.exhaustive {
            cfg.lmax = cfg.lmax.min(3);
        }
        let o = selftest::run(suite, &cfg)?;
        println!(
            "{:<7} {}  {} checks  {:.1} s",
            suite.as_str(),
            if o.passed() { "pass" } else { "FAIL" },
            o.checked,
            o.millis as f64 / 1000.0
        );
        if let Some(first) = o.failures.first() {
            failed = true;
            println!("  {} failures; smallest: {}", o.failures.len(), first);
        }
    }
    if failed {
        Err(Failure::new(codes::FAILED, ""))
    } else {
        Ok(())
    }
}

pub fn enumerate(a: EnumerateArgs) -> Outcome {
    let jobs = corpus(&a.ranges)?;
    let rows: Vec<(i32, &Partition, &'static str, usize)> = jobs
        .iter()
        .map(|(lam, k)| {
            let class = PartitionClass::of(lam, *k)?.as_str();
            let bott = LambdaIdeal::new(lam, *k)?.bottom;
            Ok((*k, lam, class, bott))
        })
        .collect::<Result<_, Error>>()?;
    match a.format {
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(k, lam, class, bott)| {
                    json!({"k": k, "lambda": lam.parts(), "class": class, "bottom": bott})
                })
                .collect();
            print_json(&json!({"schema": "1", "partitions": v}))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.write_record(["k", "lambda", "class", "bottom"])?;
            for (k, lam, class, bott) in &rows {
                w.write_record([
                    k.to_string(),
                    csv_lambda(lam.parts()),
                    class.to_string(),
                    bott.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
        Format::Pretty => {
            for (k, lam, class, bott) in &rows {
                println!("k={} ({}) {} bott={}", k, lam, class, bott);
            }
            println!("{} partitions", rows.len());
            Ok(())
        }
    }
}

pub fn cache(action: CacheAction, dir: Option<PathBuf>) -> Outcome {
    let dir = dir.ok_or_else(|| {
        Failure::invalid("no cache directory; pass --cache-dir or set KATALAN_CACHE_DIR")
    })?;
    let cache = BasisCache::on_disk(&dir)?;
    match action {
        CacheAction::Info => {
            println!("cache: {}", dir.display());
            let stats = cache.stats()?;
            if stats.is_empty() {
                println!("empty");
            }
            for (k, n) in stats {
                println!("k={}: {} basis functions", k, n);
            }
        }
        CacheAction::Clear => {
            let n = cache.clear()?;
            println!("removed {} cache files from {}", n, dir.display());
        }
    }
    Ok(())
}
