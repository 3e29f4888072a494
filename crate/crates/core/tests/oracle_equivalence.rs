use bvfix::catalog::{self, make_bv_finite};
use bvfix::oracle::{self, brute_fixed_points};
use bvfix::space::{check_axioms, classify_space, minimal_s, MinimalSLabel};
use bvfix::{Bound, FiniteSpace, Instance};

fn finite(entry: &catalog::CatalogEntry) -> (&FiniteSpace, &bvfix::TableMap) {
    match &entry.instance.instance {
        Instance::Finite { space, map: Some(map) } => (space, map),
        _ => panic!("{} is not a finite entry", entry.name),
    }
}

#[test]
fn planted_constant_is_recovered_exactly() {
    for v in 1..=3 {
        for s in [1.0, 1.5, 3.0] {
            for n in v + 2..=8 {
                let entry = make_bv_finite(v, s, n).unwrap();
                let (space, map) = finite(&entry);
                let ms = minimal_s(space, v, u64::MAX, 0).unwrap();
                assert_eq!(ms.label, MinimalSLabel::Exact);
                let got = ms.s_min.value().unwrap();
                assert!((got - s).abs() <= 1e-12 * s, "v={v} s={s} n={n}: got {got}");
                let w = ms.witness.unwrap();
                assert_eq!((w.tuple[0].min(w.tuple[1]), w.tuple[0].max(w.tuple[1])), (0, n - 1));
                assert_eq!(brute_fixed_points(map), vec![0]);
            }
        }
    }
}

#[test]
fn small_planted_cases() {
    let sq = make_bv_finite(1, 2.0, 3).unwrap();
    let r = oracle::exhaustive_axiom_check(finite(&sq).0, 1, 2.0).unwrap();
    assert_eq!(r.worst_ratio, Bound::Finite(2.0));

    let rect = make_bv_finite(2, 1.0, 5).unwrap();
    let (space, _) = finite(&rect);
    assert!(oracle::exhaustive_axiom_check(space, 2, 1.0).unwrap().passed());
    let classes = classify_space(space, &[2], u64::MAX, 0).unwrap();
    assert!(classes[0].flags.rectangular);

    let plain = make_bv_finite(1, 1.0, 4).unwrap();
    let classes = classify_space(finite(&plain).0, &[1], u64::MAX, 0).unwrap();
    assert!(classes[0].flags.metric);
    assert_eq!(classes[0].s_min, Bound::Finite(1.0));
}

#[test]
fn fast_checker_matches_oracle_on_catalog_spaces() {
    for entry in catalog::all_entries() {
        let Instance::Finite { space, .. } = &entry.instance.instance else { continue };
        for v in 1..=3 {
            let fast = check_axioms(space, v, entry.signature().s, u64::MAX, 0).unwrap();
            let slow = oracle::exhaustive_axiom_check(space, v, entry.signature().s).unwrap();
            assert_eq!(fast.passed(), slow.passed(), "{} v={v}", entry.name);
            let (a, b) = (fast.worst_ratio.value().unwrap(), slow.worst_ratio.value().unwrap());
            assert!((a - b).abs() <= 1e-9 * a.max(b).max(1.0), "{} v={v}: {a} vs {b}", entry.name);
        }
    }
}

#[test]
fn squared_grid_has_minimal_s_two_at_a_midpoint() {
    let xs: Vec<f64> = (0..=10).map(f64::from).collect();
    let space = FiniteSpace::on_line(&xs, |x, y| (x - y).powi(2)).unwrap();
    let ms = minimal_s(&space, 1, u64::MAX, 0).unwrap();
    assert!((ms.s_min.value().unwrap() - 2.0).abs() <= 1e-9);
    let t = ms.witness.unwrap().tuple;
    assert_eq!(xs[t[0]] + xs[t[1]], 2.0 * xs[t[2]]);
    let slow = oracle::exhaustive_axiom_check(&space, 1, 1.0).unwrap();
    assert_eq!(slow.worst_ratio, Bound::Finite(2.0));
}
