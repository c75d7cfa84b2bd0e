mod common;

use apoly::bench::{run_bench, sample_coordinates, sample_instances, BenchConfig, Method, POOL};
use apoly::canonical::representative_of;
use num_bigint::BigInt;
use num_traits::{One, Signed};

#[test]
fn coordinates_are_dyadic_and_deterministic() {
    let a = sample_coordinates(7);
    assert_eq!(a, sample_coordinates(7));
    assert_ne!(a, sample_coordinates(8));
    assert_eq!(a.iter().count(), 2 * POOL as usize);
    let den: BigInt = BigInt::one() << 53;
    for (_, p) in a.iter() {
        for c in &p.0 {
            assert!(c.abs() < common::q(1));
            assert!((den.clone() % c.denom()) == BigInt::from(0));
            assert!((c * common::Q::from_integer(den.clone())).numer().bits() <= 53);
        }
    }
}

#[test]
fn instances_are_distinct_classes_on_the_pool() {
    let table = common::table();
    let xs = sample_instances(table, 500, 3);
    assert_eq!(xs, sample_instances(table, 500, 3));
    let mut reps: Vec<_> = xs.iter().map(|a| representative_of(a).0).collect();
    for (a, r) in xs.iter().zip(&reps) {
        assert!(table.get(r).is_some());
        assert!(a.vertices().iter().all(|v| v.index < POOL));
    }
    reps.sort();
    reps.dedup();
    assert_eq!(reps.len(), 500);
}

#[test]
fn methods_agree_on_small_run() {
    let table = common::table();
    let cfg = BenchConfig {
        reps: 200,
        seed: 5,
        method: Method::Both,
        cross_check: true,
    };
    let a = run_bench(&cfg, table).unwrap();
    assert_eq!(a.mismatches, 0);
    assert_eq!(a.registries_agree, Some(true));
    assert!(a.cross_checks > 0 && a.identity_tests > 0);

    let b = run_bench(&cfg, table).unwrap();
    assert_eq!(
        (a.identity_tests, a.identity_positive, a.factor_roots, a.gcd_roots, a.degeneracy_tests),
        (b.identity_tests, b.identity_positive, b.factor_roots, b.gcd_roots, b.degeneracy_tests)
    );
}

#[test]
fn positive_identity_rate() {
    let cfg = BenchConfig {
        reps: 3_500,
        seed: 1,
        method: Method::Factor,
        cross_check: false,
    };
    let r = run_bench(&cfg, common::table()).unwrap();
    let rate = r.identity_positive as f64 / r.identity_tests as f64;
    let reference = 221_252.0 / 9_660_759.0;
    assert!(
        rate > reference / 3.0 && rate < reference * 3.0,
        "positive rate {rate:.5} outside [{:.5}, {:.5}]",
        reference / 3.0,
        reference * 3.0
    );
}
