use std::cmp::Ordering;
use std::sync::OnceLock;

use apoly::arith::{crt_zero_test, primes, DegreeProfile, Interval};
use apoly::bench::{sample_coordinates, sample_instances};
use apoly::canonical::{apply_bijection, representative_of, VertexBijection};
use apoly::identity::{compare, factor_apoly, predicate_sign, signed_univariate, ZeroClass};
use apoly::poly::Poly;
use apoly::table::{univariate_at, RandomAssignment};
use apoly::univariate::univariate_from_apoly;
use apoly::upoly::{
    descartes_bound, normalize, sign_at, sign_at_rational, square_free_part, UPoly,
};
use apoly::{APoly, AlgebraicNumber, Kind, Profile, Sign, VertexAssignment, VertexRef};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::table;

pub type Check = fn(u64) -> Result<(), TestCaseError>;

/// Every suite with its name.
pub const SUITES: &[(&str, Check)] = &[
    ("canonical idempotence and bijection invariance", canonical_invariance),
    ("univariate degree bounds per profile", degree_bounds),
    ("factor-product reconstruction", factor_product),
    ("interval containment", interval_containment),
    ("CRT soundness", crt_soundness),
    ("registry trichotomy", registry_trichotomy),
    ("k-th derivative versus offset evaluation", derivative_vs_offset),
];

pub const CASES: u32 = 10_000;

/// Runs `check` on `cases` seeds drawn from a fixed stream.
pub fn run(cases: u32, check: Check) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    TestRunner::new_with_rng(config, rng)
        .run(&any::<u64>(), check)
        .map_err(|e| e.to_string())
}

fn reps() -> &'static [APoly] {
    static REPS: OnceLock<Vec<APoly>> = OnceLock::new();
    REPS.get_or_init(|| table().entries().map(|e| e.rep.clone()).collect())
}

/// A random injective renaming of `a`'s vertices into `0..64` per side.
pub fn random_bijection(a: &APoly, rng: &mut ChaCha8Rng) -> VertexBijection {
    let mut pool = [(0..64).collect::<Vec<u32>>(), (0..64).collect()];
    pool[0].shuffle(rng);
    pool[1].shuffle(rng);
    let mut bij = VertexBijection::new();
    let mut used = [0, 0];
    for v in a.vertices() {
        let s = v.side as usize;
        let to = VertexRef {
            side: v.side,
            index: pool[s][used[s]],
        };
        used[s] += 1;
        bij.insert(v, to);
    }
    bij
}

fn random_assignment(a: &APoly, rng: &mut ChaCha8Rng, bound: i64) -> VertexAssignment {
    let mut va = VertexAssignment::new();
    for v in a.vertices() {
        va.insert_i64(v, [0; 3].map(|_| rng.gen_range(-bound..=bound)));
    }
    va
}

fn canonical_invariance(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rep = reps().choose(&mut rng).unwrap();
    prop_assert_eq!(&representative_of(rep).0, rep);
    let a = apply_bijection(rep, &random_bijection(rep, &mut rng)).unwrap();
    let (ra, to_rep) = representative_of(&a);
    prop_assert_eq!(&ra, rep);
    prop_assert_eq!(&apply_bijection(&a, &to_rep).unwrap(), rep);
    let b = apply_bijection(&a, &random_bijection(&a, &mut rng)).unwrap();
    prop_assert_eq!(&representative_of(&b).0, &ra);
    prop_assert_eq!(&apply_bijection(&apply_bijection(&a, &to_rep).unwrap(), &to_rep.inverse()).unwrap(), &a);
    Ok(())
}

fn by_kind() -> &'static [Vec<APoly>; 6] {
    static KINDS: OnceLock<[Vec<APoly>; 6]> = OnceLock::new();
    KINDS.get_or_init(|| {
        let mut out: [Vec<APoly>; 6] = Default::default();
        for a in reps() {
            out[kind_slot(a.kind())].push(a.clone());
        }
        out
    })
}

fn kind_slot(k: Kind) -> usize {
    match k {
        Kind::Contacts(Profile::FourOne) => 0,
        Kind::Contacts(Profile::TwoOneOne) => 1,
        Kind::Contacts(Profile::TwoTwo) => 2,
        Kind::Contacts(Profile::ThreeOne) => 3,
        Kind::Parallel => 4,
        Kind::Minor => 5,
    }
}

const BOUNDS: [usize; 6] = [6, 4, 4, 2, 2, 4];

/// One random assignment per case, checked on a random a-poly of each
/// profile.
fn degree_bounds(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = RandomAssignment::new(&mut rng);
    for (slot, list) in by_kind().iter().enumerate() {
        prop_assert!(!list.is_empty());
        let a = list.choose(&mut rng).unwrap();
        let d = univariate_at(a, &g).degree().unwrap_or(0);
        prop_assert!(d <= BOUNDS[slot], "{} has degree {}", a, d);
    }
    Ok(())
}

fn factor_product(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rep = reps().choose(&mut rng).unwrap();
    let a = apply_bijection(rep, &random_bijection(rep, &mut rng)).unwrap();
    let va = random_assignment(&a, &mut rng, 1 << 20);
    let u = univariate_from_apoly(&a, &va).unwrap();
    let factors = factor_apoly(&a, &va, table()).unwrap();
    if u.is_zero() {
        prop_assert!(factors.is_empty(), "{} vanishes but has factors", a);
        return Ok(());
    }
    let mut prod = UPoly::one();
    for f in factors {
        prod = &prod * &f.poly.pow(f.multiplicity);
    }
    prop_assert_eq!(normalize(&prod), u, "{}", a);
    Ok(())
}

#[derive(Debug)]
enum Expr {
    Leaf(f64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

fn random_float(rng: &mut ChaCha8Rng) -> f64 {
    let m: f64 = rng.gen_range(-1.0..1.0);
    m * 2f64.powi(rng.gen_range(-30..30))
}

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return Expr::Leaf(random_float(rng));
    }
    let l = Box::new(random_expr(rng, depth - 1));
    let r = Box::new(random_expr(rng, depth - 1));
    match rng.gen_range(0..3) {
        0 => Expr::Add(l, r),
        1 => Expr::Sub(l, r),
        _ => Expr::Mul(l, r),
    }
}

fn eval_interval(e: &Expr) -> Interval {
    match e {
        Expr::Leaf(x) => Interval::point(*x),
        Expr::Add(a, b) => eval_interval(a) + eval_interval(b),
        Expr::Sub(a, b) => eval_interval(a) - eval_interval(b),
        Expr::Mul(a, b) => eval_interval(a) * eval_interval(b),
    }
}

fn eval_exact(e: &Expr) -> BigRational {
    match e {
        Expr::Leaf(x) => BigRational::from_float(*x).unwrap(),
        Expr::Add(a, b) => eval_exact(a) + eval_exact(b),
        Expr::Sub(a, b) => eval_exact(a) - eval_exact(b),
        Expr::Mul(a, b) => eval_exact(a) * eval_exact(b),
    }
}

fn interval_containment(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10 {
        let e = random_expr(&mut rng, 5);
        let iv = eval_interval(&e);
        let x = eval_exact(&e);
        prop_assert!(iv.contains(&x), "{:?} misses {} for {:?}", iv, x, e);
        let s = Sign::of_rational(&x);
        match iv.sign() {
            apoly::arith::IntervalSign::Pos => prop_assert_eq!(s, Sign::Pos),
            apoly::arith::IntervalSign::Neg => prop_assert_eq!(s, Sign::Neg),
            apoly::arith::IntervalSign::Ambiguous => {}
        }
    }
    Ok(())
}

fn residue(x: &BigInt, p: u32) -> u32 {
    let r = x % BigInt::from(p);
    let r = if r.sign() == num_bigint::Sign::Minus {
        r + p
    } else {
        r
    };
    u32::try_from(r).unwrap()
}

/// `∏ q_j − ∏ q'_j` over nine quantities that are products of nine signed
/// 53-bit integers; `q'` is a permutation of `q`, possibly perturbed.
fn crt_soundness(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = (1i64 << 53) - 1;
    let inputs: Vec<Vec<i64>> = (0..9)
        .map(|_| (0..9).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    let mut other = inputs.clone();
    other.shuffle(&mut rng);
    for q in other.iter_mut() {
        q.shuffle(&mut rng);
    }
    if rng.gen_bool(0.5) {
        let i = rng.gen_range(0..9);
        let j = rng.gen_range(0..9);
        other[i][j] += rng.gen_range(1..=3) * if other[i][j] > 0 { -1 } else { 1 };
    }
    let product = |qs: &[Vec<i64>]| -> BigInt {
        qs.iter()
            .flatten()
            .fold(BigInt::one(), |acc, &x| acc * BigInt::from(x))
    };
    let exact = product(&inputs) - product(&other);
    let eval = |p: u32| residue(&exact, p);
    let zero = crt_zero_test(eval, 135, DegreeProfile::ANGLE_GCD).unwrap();
    prop_assert_eq!(zero, exact.is_zero());
    let modular = |p: u32| {
        let m = |qs: &[Vec<i64>]| {
            qs.iter().flatten().fold(1u64, |acc, &x| {
                acc * residue(&BigInt::from(x), p) as u64 % p as u64
            })
        };
        ((m(&inputs) + p as u64 - m(&other)) % p as u64) as u32
    };
    let zero = crt_zero_test(modular, 135, DegreeProfile::ANGLE_GCD).unwrap();
    prop_assert_eq!(zero, exact.is_zero());
    prop_assert!(primes().len() >= 135);
    Ok(())
}

/// Real zeros of the factors of sampled benchmark instances, each with a
/// value accurate to `2^-60`.
fn root_pool() -> &'static [(AlgebraicNumber, f64)] {
    static POOL: OnceLock<Vec<(AlgebraicNumber, f64)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let va = sample_coordinates(7);
        let mut out: Vec<(AlgebraicNumber, f64)> = Vec::new();
        for a in sample_instances(table(), 400, 7) {
            for f in factor_apoly(&a, &va, table()).unwrap() {
                for x in AlgebraicNumber::all_roots(&f) {
                    if !out.iter().any(|(y, _)| y.same_as(&x)) {
                        let mut fine = x.clone();
                        fine.interval
                            .refine_to(&BigRational::new(BigInt::one(), BigInt::one() << 60));
                        out.push((x, fine.approx()));
                    }
                }
            }
        }
        out
    })
}

fn cmp(a: &AlgebraicNumber, b: &AlgebraicNumber) -> Ordering {
    compare(&mut a.clone(), &mut b.clone())
}

fn registry_trichotomy(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = root_pool();
    prop_assert!(pool.len() > 100);
    let xs: Vec<&(AlgebraicNumber, f64)> = (0..3).map(|_| pool.choose(&mut rng).unwrap()).collect();
    for (a, va) in xs.iter().copied() {
        for (b, vb) in xs.iter().copied() {
            let ab = cmp(a, b);
            prop_assert_eq!(ab, cmp(b, a).reverse());
            prop_assert_eq!(ab == Ordering::Equal, a.same_as(b));
            if (va - vb).abs() > 1e-9 {
                prop_assert_eq!(ab, va.partial_cmp(vb).unwrap());
            }
        }
    }
    let (a, b, c) = (&xs[0].0, &xs[1].0, &xs[2].0);
    if cmp(a, b) != Ordering::Greater && cmp(b, c) != Ordering::Greater {
        prop_assert_ne!(cmp(a, c), Ordering::Greater);
    }
    Ok(())
}

fn with_factors() -> &'static [APoly] {
    static NONCONST: OnceLock<Vec<APoly>> = OnceLock::new();
    NONCONST.get_or_init(|| {
        table()
            .entries()
            .filter(|e| !e.is_constant())
            .map(|e| e.rep.clone())
            .collect()
    })
}

/// Sign of `u` just right of `tau`: at the upper end of an isolating
/// interval that holds no other zero of `u`.
fn sign_right_of(u: &UPoly, tau: &AlgebraicNumber) -> Sign {
    let sq = square_free_part(u);
    let mut iv = tau.interval.clone();
    let at_root = sign_at(&sq, &iv) == Sign::Zero;
    loop {
        if descartes_bound(&sq, &iv.lo, &iv.hi) <= at_root as usize
            && sign_at_rational(u, &iv.hi) != Sign::Zero
        {
            return sign_at_rational(u, &iv.hi);
        }
        iv.refine();
    }
}

/// Predicates at a zero of one of their own factors (identity branch) or
/// of another instance's factor (evaluation branch).
fn derivative_vs_offset(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = with_factors().choose(&mut rng).unwrap();
    let source = if rng.gen_bool(0.75) {
        f.clone()
    } else {
        reps().choose(&mut rng).unwrap().clone()
    };
    let mut va = random_assignment(f, &mut rng, 1 << 10);
    for v in source.vertices() {
        if va.get(v).is_none() {
            va.insert_i64(v, [0; 3].map(|_| rng.gen_range(-1024..=1024)));
        }
    }
    let roots: Vec<AlgebraicNumber> = factor_apoly(&source, &va, table())
        .unwrap()
        .iter()
        .flat_map(AlgebraicNumber::all_roots)
        .collect();
    let Some(tau) = roots.choose(&mut rng) else {
        return Ok(());
    };
    let u = signed_univariate(f, &va).unwrap();
    if u.is_zero() {
        return Ok(());
    }
    let (s, class) = predicate_sign(f, &va, tau, table()).unwrap();
    let k = match class {
        ZeroClass::Identity(k) => k,
        ZeroClass::Evaluated => 0,
    };
    let mut d: Poly<BigInt> = u.clone();
    for _ in 0..k {
        prop_assert_eq!(sign_at(&d, &tau.interval), Sign::Zero);
        d = d.derivative();
    }
    prop_assert_ne!(s, Sign::Zero);
    prop_assert_eq!(s, sign_right_of(&u, tau), "{} at {}#{}", f, tau.factor.apoly, tau.root_index);
    Ok(())
}
