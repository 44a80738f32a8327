use katalan_core::bases::{
    closed_kschur, expand_in_kkschur_with, kkschur, weighted_kkschur, BasisCache, Solver,
};
use katalan_core::katalan::evaluate_with;
use katalan_core::recursion::{expand_recursive, verify_theorem, weight_step};
use katalan_core::{
    evaluate, KatalanSpec, Partition, RootIdeal, RootMultiset, SymFunc, Truncation,
};
use num_bigint::BigInt;

fn p(v: &[i32]) -> Partition {
    Partition::new(v.to_vec()).unwrap()
}

fn coeffs(terms: Vec<(&Partition, &BigInt)>) -> Vec<(Vec<i32>, i64)> {
    let mut v: Vec<_> = terms
        .into_iter()
        .map(|(m, c)| (m.parts().to_vec(), i64::try_from(c).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn final_example_both_routes() {
    let lam = p(&[5, 4, 3, 3, 2, 2]);
    let mut want = vec![
        (vec![5, 4, 3, 3, 2, 2], 1),
        (vec![5, 3, 3, 3, 2, 2], -1),
        (vec![5, 4, 3, 2, 2, 2], -2),
        (vec![5, 3, 3, 2, 2, 2], 1),
        (vec![5, 4, 3, 3, 2, 1], -1),
        (vec![5, 3, 3, 3, 2, 1], 1),
        (vec![5, 3, 3, 3, 1, 1], -1),
        (vec![5, 4, 3, 2, 2, 1], 2),
        (vec![5, 3, 3, 2, 2, 1], -1),
        (vec![5, 3, 3, 2, 1, 1], 1),
    ];
    want.sort();
    let rec = expand_recursive(&lam, 5, 4).unwrap();
    assert_eq!(coeffs(rec.terms()), want);

    let report = verify_theorem(&lam, 5, &BasisCache::memory()).unwrap();
    assert!(report.routes_agree);
    assert!(report.signs.ok);
    assert_eq!(coeffs(report.linear.terms()), want);
}

#[test]
fn raising_one_root_on_11() {
    let spec = KatalanSpec::new(
        RootIdeal::from_roots(2, &[(1, 2)]).unwrap(),
        RootMultiset::empty(2),
        "1,1".parse().unwrap(),
    )
    .unwrap();
    let want = SymFunc::h(1) * SymFunc::h(1) + SymFunc::h(1);
    assert_eq!(evaluate(&spec), want);
    assert_eq!(
        evaluate_with(&spec, Truncation::HardCap { slack: 12 }),
        want
    );
}

#[test]
fn closed_11_for_k1() {
    let lam = p(&[1, 1]);
    let rec = expand_recursive(&lam, 1, 2).unwrap();
    assert_eq!(coeffs(rec.terms()), vec![(vec![1], -1), (vec![1, 1], 1)]);
    let f = closed_kschur(&lam, 1).unwrap();
    let g11 = kkschur(&lam, 1).unwrap();
    let g1 = kkschur(&p(&[1]), 1).unwrap();
    assert_eq!(f, &g11 - &g1);
}

#[test]
fn solvers_agree_on_small_closed_functions() {
    let cache = BasisCache::memory();
    for (lam, k) in [(p(&[2, 1]), 2), (p(&[3, 2, 1]), 3), (p(&[2, 2, 1]), 3)] {
        let f = closed_kschur(&lam, k).unwrap();
        let a = expand_in_kkschur_with(&f, k, Solver::Triangular, &cache).unwrap();
        let b = expand_in_kkschur_with(&f, k, Solver::Dense, &cache).unwrap();
        assert_eq!(a, b, "({}) k={}", lam, k);
    }
}

#[test]
fn weight_step_is_a_function_identity() {
    for (lam, k, z) in [
        (p(&[3, 2, 1]), 3, 1),
        (p(&[2, 1, 1]), 2, 1),
        (p(&[4, 3, 1, 1]), 4, 2),
    ] {
        let Ok(terms) = weight_step(&lam, k, z) else {
            continue;
        };
        let mut sum = SymFunc::zero();
        for t in &terms {
            sum.add_scaled(&weighted_kkschur(&t.mu, k, z).unwrap(), &t.coeff);
        }
        assert_eq!(
            sum,
            weighted_kkschur(&lam, k, z + 1).unwrap(),
            "({}) k={} z={}",
            lam,
            k,
            z
        );
    }
}
