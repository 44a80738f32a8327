//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Lines go straight to stderr so they show up without `--nocapture`.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use katalan_core::bases::{closed_kschur, in_lambda_k, kkschur, BasisCache};
use katalan_core::recursion::{sweep_corpus, verify_theorem, weight_step, ClassFilter};
use katalan_core::rootideal::LambdaIdeal;
use katalan_core::selftest::{self, kbounded_corpus, Config, Suite};
use katalan_core::{delta_k, second_components, Partition};
use serde_json::Value;

struct Check {
    id: u32,
    name: &'static str,
    ok: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn p(v: &[i32]) -> Partition {
    Partition::new(v.to_vec()).unwrap()
}

fn timed(
    id: u32,
    name: &'static str,
    budget_secs: u64,
    f: impl FnOnce() -> Result<String, String>,
) -> Check {
    let start = Instant::now();
    let r = f();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    let (ok, detail) = match r {
        Ok(d) => (elapsed <= budget, d),
        Err(d) => (false, d),
    };
    let c = Check {
        id,
        name,
        ok,
        detail,
        elapsed,
        budget,
    };
    let _ = writeln!(
        std::io::stderr(),
        "[{}] criterion {}: {} ({}; {:.1} s of {} s)",
        if c.ok { "PASS" } else { "FAIL" },
        c.id,
        c.name,
        c.detail,
        c.elapsed.as_secs_f64(),
        c.budget.as_secs()
    );
    c
}

fn final_example() -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_katalan"))
        .args([
            "expand",
            "--k",
            "5",
            "--lambda",
            "5,4,3,3,2,2",
            "--family",
            "closed",
            "--basis",
            "kkschur",
            "--route",
            "both",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let want: Vec<(Vec<i32>, &str)> = vec![
        (vec![5, 4, 3, 3, 2, 2], "1"),
        (vec![5, 3, 3, 3, 2, 2], "-1"),
        (vec![5, 4, 3, 2, 2, 2], "-2"),
        (vec![5, 3, 3, 2, 2, 2], "1"),
        (vec![5, 4, 3, 3, 2, 1], "-1"),
        (vec![5, 3, 3, 3, 2, 1], "1"),
        (vec![5, 3, 3, 3, 1, 1], "-1"),
        (vec![5, 4, 3, 2, 2, 1], "2"),
        (vec![5, 3, 3, 2, 2, 1], "-1"),
        (vec![5, 3, 3, 2, 1, 1], "1"),
    ];
    let mut got: Vec<(Vec<i32>, String)> = v["terms"]
        .as_array()
        .ok_or("no terms")?
        .iter()
        .map(|t| {
            let mu = t["mu"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_i64().unwrap() as i32)
                .collect();
            (mu, t["coeff"].as_str().unwrap().to_string())
        })
        .collect();
    got.sort();
    let mut want: Vec<(Vec<i32>, String)> =
        want.into_iter().map(|(m, c)| (m, c.to_string())).collect();
    want.sort();
    if got != want {
        return Err(format!("terms differ: {:?}", got));
    }
    if v["routesAgree"] != Value::Bool(true) || v["alternating"] != Value::Bool(true) {
        return Err(format!(
            "routesAgree {} alternating {}",
            v["routesAgree"], v["alternating"]
        ));
    }
    Ok("10 terms exact, routesAgree, alternating".into())
}

fn worked_weight_step() -> Result<String, String> {
    let lam = p(&[7, 6, 5, 5, 4, 4, 4, 3, 3, 3, 2, 2, 1]);
    let terms = weight_step(&lam, 7, 2).map_err(|e| e.to_string())?;
    let mut got: Vec<(Vec<i32>, i64)> = terms
        .iter()
        .map(|t| (t.mu.parts().to_vec(), i64::try_from(&t.coeff).unwrap()))
        .collect();
    let mut want = vec![
        (vec![7, 6, 5, 5, 4, 4, 4, 3, 3, 3, 2, 2, 1], 1),
        (vec![7, 6, 5, 5, 4, 4, 3, 3, 3, 3, 2, 2, 1], -1),
        (vec![7, 6, 5, 4, 4, 4, 4, 3, 3, 3, 2, 2, 1], -1),
        (vec![7, 6, 5, 5, 4, 4, 3, 3, 3, 3, 2, 1, 1], 1),
        (vec![7, 6, 5, 4, 4, 4, 4, 3, 3, 3, 2, 2, 0], 1),
    ];
    got.sort();
    want.sort();
    if got != want {
        return Err(format!("terms differ: {:?}", got));
    }
    if terms.iter().any(|t| t.z != 2) {
        return Err("weights should all be 2".into());
    }
    Ok("5 weighted terms, trailing-zero vector kept".into())
}

fn ideal_structure_766643() -> Result<String, String> {
    let lam = p(&[7, 6, 6, 6, 4, 3]);
    let d7 = delta_k(&lam, 7).map_err(|e| e.to_string())?;
    let d8 = delta_k(&lam, 8).map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    if d7.roots()
        != [
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
        ]
    {
        bad.push("Δ^7");
    }
    if d8.roots() != [(1, 3), (1, 4), (1, 5), (1, 6), (2, 5), (2, 6), (3, 6)] {
        bad.push("Δ^8");
    }
    if second_components(&d7).elements() != [2, 3, 4, 4, 5, 5, 5, 6, 6, 6, 6] {
        bad.push("L(Δ^7)");
    }
    if second_components(&d8).elements() != [3, 4, 5, 5, 6, 6, 6] {
        bad.push("L(Δ^8)");
    }
    let li = LambdaIdeal::new(&lam, 7).map_err(|e| e.to_string())?;
    if li.bottom != 4 {
        bad.push("bott");
    }
    if (1..=4).map(|x| li.down(x)).collect::<Vec<_>>() != [Some(2), Some(4), Some(5), Some(6)] {
        bad.push("down");
    }
    let w = katalan_core::bases::weighted_spec(&lam, 7, 2).map_err(|e| e.to_string())?;
    if w.marks().elements() != [2, 3, 4, 5, 5, 6, 6, 6] {
        bad.push("weight-2 marks");
    }
    if bad.is_empty() {
        Ok("11 and 7 roots, L-multisets, down (2,4,5,6), bott 4, weight-2 marks".into())
    } else {
        Err(format!("mismatch in {}", bad.join(", ")))
    }
}

fn identity_suites() -> Result<String, String> {
    let cfg = Config::default();
    let mut parts = Vec::new();
    let mut failed = Vec::new();
    for s in [Suite::Lk, Suite::Relk, Suite::Mirror] {
        let o = selftest::run(s, &cfg).map_err(|e| e.to_string())?;
        parts.push(format!("{} {} checks", s.as_str(), o.checked));
        if let Some(f) = o.failures.first() {
            failed.push(format!(
                "{}: {} failures, first {}",
                s.as_str(),
                o.failures.len(),
                f
            ));
        }
    }
    if failed.is_empty() {
        Ok(parts.join(", "))
    } else {
        Err(failed.join("; "))
    }
}

fn suite(s: Suite, lmax: usize) -> Result<String, String> {
    let cfg = Config {
        lmax,
        ..Config::default()
    };
    let o = selftest::run(s, &cfg).map_err(|e| e.to_string())?;
    match o.failures.first() {
        None => Ok(format!("{} checks, 0 failures", o.checked)),
        Some(f) => Err(format!("{} failures, first {}", o.failures.len(), f)),
    }
}

fn hat_sweep() -> Result<String, String> {
    let cache = BasisCache::memory();
    let corpus = sweep_corpus(ClassFilter::HatP, 1..=4, 1..=4, None).map_err(|e| e.to_string())?;
    for (lam, k) in &corpus {
        let r = verify_theorem(lam, *k, &cache).map_err(|e| format!("({}) k={}: {}", lam, k, e))?;
        if !r.routes_agree {
            return Err(format!("routes disagree at ({}) k={}", lam, k));
        }
        if let Some((mu, b)) = r.signs.violation {
            return Err(format!(
                "sign violation at ({}) k={}: b_{} = {}",
                lam, k, mu, b
            ));
        }
    }
    Ok(format!(
        "{} partitions, routes agree, signs alternate",
        corpus.len()
    ))
}

fn support() -> Result<String, String> {
    let mut n = 0;
    for (lam, k) in kbounded_corpus(4, 4) {
        for (name, f) in [("g", kkschur(&lam, k)), ("closed", closed_kschur(&lam, k))] {
            let f = f.map_err(|e| e.to_string())?;
            if !in_lambda_k(&f, k) {
                return Err(format!("{} ({}) k={} has a part above k", name, lam, k));
            }
            n += 1;
        }
    }
    Ok(format!("{} functions with parts ≤ k", n))
}

#[test]
fn acceptance_criteria() {
    let checks = [
        timed(1, "final example, both routes", 60, final_example),
        timed(2, "worked weight step", 10, worked_weight_step),
        timed(
            3,
            "root ideal structure for (7,6,6,6,4,3)",
            1,
            ideal_structure_766643,
        ),
        timed(4, "LK, relk and mirror identities", 300, identity_suites),
        timed(
            5,
            "weight 1 and bott+1 interpolation endpoints",
            300,
            || suite(Suite::Threeg, 4),
        ),
        timed(6, "alternating sweep, k ≤ 4, ℓ ≤ 4", 900, hat_sweep),
        timed(7, "support in Λ^(k)", 60, support),
        timed(8, "pruned vs hard-capped evaluation", 600, || {
            suite(Suite::Prune, 4)
        }),
    ];
    let failed: Vec<u32> = checks.iter().filter(|c| !c.ok).map(|c| c.id).collect();
    assert!(failed.is_empty(), "criteria failed: {:?}", failed);
}
