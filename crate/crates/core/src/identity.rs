//! Online identity detection by factor-table lookup, a registry of real
//! algebraic numbers, post-event predicate signs, and the gcd baseline.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::apoly::APoly;
use crate::arith::{Interval, IntervalSign, Sign};
use crate::canonical::representative_of;
use crate::error::ApolyError;
use crate::table::FactorTable;
use crate::univariate::{derive, univariate_from_apoly, VertexAssignment};
use crate::upoly::{
    content, descartes_bound, div_exact, isolate_real_roots, poly_gcd, sign_at, sign_at_rational,
    RootInterval, UPoly,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("no table entry for representative {0}")]
    UnknownRepresentative(String),
    #[error("root index {index} out of range: {apoly} has {count} real roots")]
    RootIndex {
        apoly: String,
        index: usize,
        count: usize,
    },
    #[error(transparent)]
    Apoly(#[from] ApolyError),
}

/// The selected a-poly of one factor of `a` in `a`'s own vertices, with its
/// multiplicity.
pub fn factor_apolys(a: &APoly, table: &FactorTable) -> Result<Vec<(APoly, u32)>, IdentityError> {
    let (rep, bij) = representative_of(a);
    let entry = table
        .get(&rep)
        .ok_or_else(|| IdentityError::UnknownRepresentative(rep.to_string()))?;
    let inv = bij.inverse();
    let back =
        |m: &APoly| m.map_vertices(|v| inv.get(v).expect("member vertices are rep vertices"));
    Ok(entry
        .factor_sets
        .iter()
        .map(|s| {
            let best = s
                .members
                .iter()
                .map(back)
                .min()
                .expect("factor sets are nonempty");
            (best, s.multiplicity)
        })
        .collect())
}

/// An irreducible factor of a concrete a-poly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteFactor {
    pub apoly: APoly,
    pub multiplicity: u32,
    pub poly: UPoly,
}

/// Factors `a` by table lookup and instantiates each factor with `va`.
pub fn factor_apoly(
    a: &APoly,
    va: &VertexAssignment,
    table: &FactorTable,
) -> Result<Vec<ConcreteFactor>, IdentityError> {
    factor_apolys(a, table)?
        .into_iter()
        .map(|(apoly, multiplicity)| {
            let poly = univariate_from_apoly(&apoly, va)?;
            Ok(ConcreteFactor {
                apoly,
                multiplicity,
                poly,
            })
        })
        .collect()
}

/// The `root_index`-th largest real zero of an irreducible factor
/// (`root_index` starts at 1).
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    pub factor: ConcreteFactor,
    pub root_index: usize,
    pub interval: RootInterval,
}

impl AlgebraicNumber {
    pub fn new(factor: ConcreteFactor, root_index: usize) -> Result<Self, IdentityError> {
        let roots = isolate_real_roots(&factor.poly);
        if root_index == 0 || root_index > roots.len() {
            return Err(IdentityError::RootIndex {
                apoly: factor.apoly.to_string(),
                index: root_index,
                count: roots.len(),
            });
        }
        let interval = roots[roots.len() - root_index].clone();
        Ok(AlgebraicNumber {
            factor,
            root_index,
            interval,
        })
    }

    /// Every real zero of `factor`, largest first.
    pub fn all_roots(factor: &ConcreteFactor) -> Vec<AlgebraicNumber> {
        let roots = isolate_real_roots(&factor.poly);
        let n = roots.len();
        roots
            .into_iter()
            .enumerate()
            .map(|(i, interval)| AlgebraicNumber {
                factor: factor.clone(),
                root_index: n - i,
                interval,
            })
            .rev()
            .collect()
    }

    /// Same factor a-poly and same root index.
    pub fn same_as(&self, o: &AlgebraicNumber) -> bool {
        self.root_index == o.root_index && self.factor.apoly == o.factor.apoly
    }

    /// Approximate value, the midpoint of the isolating interval.
    pub fn approx(&self) -> f64 {
        let m = (&self.interval.lo + &self.interval.hi) / BigRational::from_integer(2.into());
        num_traits::ToPrimitive::to_f64(&m).unwrap_or(f64::NAN)
    }
}

/// Orders two algebraic numbers, refining their intervals in place until
/// they separate.
pub fn compare(a: &mut AlgebraicNumber, b: &mut AlgebraicNumber) -> Ordering {
    if a.same_as(b) {
        return Ordering::Equal;
    }
    if a.factor.poly == b.factor.poly {
        return b.root_index.cmp(&a.root_index);
    }
    let mut rounds = 0;
    loop {
        if a.interval.hi <= b.interval.lo {
            return Ordering::Less;
        }
        if b.interval.hi <= a.interval.lo {
            return Ordering::Greater;
        }
        rounds += 1;
        if rounds == 64 && shares_root(&a.interval, &b.interval) {
            return Ordering::Equal;
        }
        if a.interval.width() >= b.interval.width() {
            a.interval.refine();
        } else {
            b.interval.refine();
        }
    }
}

/// Do two isolated roots coincide? Only reached for inputs whose factors
/// share a root, which generic inputs never do.
fn shares_root(a: &RootInterval, b: &RootInterval) -> bool {
    roots_equal(a, b)
}

fn has_root(h: &UPoly, iv: &RootInterval) -> bool {
    sign_at_rational(h, &iv.lo) * sign_at_rational(h, &iv.hi) == Sign::Neg
}

/// Exact equality of two isolated real roots of square-free polynomials.
pub fn roots_equal(a: &RootInterval, b: &RootInterval) -> bool {
    let h = poly_gcd(&a.poly, &b.poly);
    if h.degree().unwrap_or(0) == 0 || !has_root(&h, a) || !has_root(&h, b) {
        return false;
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    loop {
        if a.hi <= b.lo || b.hi <= a.lo {
            return false;
        }
        let lo = (&a.lo).min(&b.lo).clone();
        let hi = (&a.hi).max(&b.hi).clone();
        if sign_at_rational(&h, &lo) != Sign::Zero
            && sign_at_rational(&h, &hi) != Sign::Zero
            && descartes_bound(&h, &lo, &hi) == 1
        {
            return true;
        }
        if a.width() >= b.width() {
            a.refine();
        } else {
            b.refine();
        }
    }
}

/// Where an inserted number ended up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insertion {
    Inserted(usize),
    Merged(usize),
}

/// Algebraic numbers in increasing order, equal ones merged.
#[derive(Clone, Debug, Default)]
pub struct RootRegistry {
    items: Vec<AlgebraicNumber>,
    comparisons: u64,
}

impl RootRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &AlgebraicNumber> {
        self.items.iter()
    }

    pub fn get(&self, i: usize) -> Option<&AlgebraicNumber> {
        self.items.get(i)
    }

    /// Number of pairwise comparisons performed so far.
    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    pub fn insert(&mut self, tau: AlgebraicNumber) -> Insertion {
        self.insert_with(tau, |_| {})
    }

    /// Inserts `tau`, calling `visit` on every number it is compared with.
    pub fn insert_with(
        &mut self,
        mut tau: AlgebraicNumber,
        mut visit: impl FnMut(&AlgebraicNumber),
    ) -> Insertion {
        let (mut lo, mut hi) = (0, self.items.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            self.comparisons += 1;
            visit(&self.items[mid]);
            match compare(&mut tau, &mut self.items[mid]) {
                Ordering::Equal => return Insertion::Merged(mid),
                Ordering::Less => hi = mid,
                Ordering::Greater => lo = mid + 1,
            }
        }
        self.items.insert(lo, tau);
        Insertion::Inserted(lo)
    }

    /// Text form: one `apoly#index` per line in increasing order.
    pub fn serialize(&self) -> String {
        self.items
            .iter()
            .map(|x| format!("{}#{}\n", x.factor.apoly, x.root_index))
            .collect()
    }
}

/// Is `tau`'s factor a factor of `f`, and with what multiplicity?
pub fn is_identity(
    f: &APoly,
    tau: &AlgebraicNumber,
    table: &FactorTable,
) -> Result<(bool, u32), IdentityError> {
    Ok(factor_apolys(f, table)?
        .into_iter()
        .find(|(a, _)| *a == tau.factor.apoly)
        .map_or((false, 0), |(_, k)| (true, k)))
}

/// The univariate of `a` with its true sign: positive factors `1+t²` and
/// positive content removed, leading coefficient sign kept.
pub fn signed_univariate(a: &APoly, va: &VertexAssignment) -> Result<UPoly, IdentityError> {
    let ints = va.scaled_integers(&a.vertices())?;
    let raw = derive(a, &|v| ints[&v].clone())?.strip_one_plus_t2().0;
    if raw.is_zero() {
        return Ok(raw);
    }
    let c = content(&raw).abs();
    Ok(raw.map(|x| x / &c))
}

/// How a predicate sign was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroClass {
    /// The predicate is an identity at the root; the sign is that of the
    /// `k`-th derivative.
    Identity(u32),
    Evaluated,
}

/// Sign of `f` at `tau`, or immediately after `tau` when `f` vanishes there
/// identically.
pub fn predicate_sign(
    f: &APoly,
    va: &VertexAssignment,
    tau: &AlgebraicNumber,
    table: &FactorTable,
) -> Result<(Sign, ZeroClass), IdentityError> {
    let u = signed_univariate(f, va)?;
    match is_identity(f, tau, table)? {
        (true, k) => {
            let mut d = u;
            for _ in 0..k {
                d = d.derivative();
            }
            Ok((sign_at(&d, &tau.interval), ZeroClass::Identity(k)))
        }
        _ => Ok((sign_at(&u, &tau.interval), ZeroClass::Evaluated)),
    }
}

/// Arithmetic that settled a baseline test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Precision {
    Trivial,
    Float,
    Refined,
    Exact,
}

/// Result of the baseline test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GcdDecision {
    pub zero: bool,
    pub precision: Precision,
}

fn interval_eval(f: &UPoly, x: Interval) -> Interval {
    let mut acc = Interval::point(0.0);
    for c in f.coeffs().iter().rev() {
        acc = acc * x + Interval::from_bigint(c);
    }
    acc
}

fn hull(tau: &RootInterval) -> Interval {
    let lo = Interval::from_rational(&tau.lo).lo;
    let hi = Interval::from_rational(&tau.hi).hi;
    Interval::new(lo, hi)
}

fn excludes_zero(f: &UPoly, x: Interval) -> bool {
    interval_eval(f, x).sign() != IntervalSign::Ambiguous
}

/// Does `g` vanish at the root of the square-free `f` isolated by `tau`?
/// Computes `h = gcd(f, g)` and `e = f/h`; the root belongs to exactly one of
/// them. Interval evaluation decides unless it is ambiguous, in which case
/// the interval is refined and finally the sign is computed exactly.
pub fn gcd_degeneracy_test(f: &UPoly, g: &UPoly, tau: &RootInterval) -> GcdDecision {
    let h = poly_gcd(f, g);
    let decided = |zero, precision| GcdDecision { zero, precision };
    if h.degree().unwrap_or(0) == 0 {
        return decided(false, Precision::Trivial);
    }
    let e = div_exact(f, &h).expect("gcd divides f");
    if e.degree().unwrap_or(0) == 0 {
        return decided(true, Precision::Trivial);
    }
    let mut tau = tau.clone();
    for precision in [Precision::Float, Precision::Refined] {
        if precision == Precision::Refined {
            let w = BigRational::new(BigInt::one(), BigInt::one() << 100);
            tau.refine_to(&w);
        }
        let x = hull(&tau);
        if excludes_zero(&e, x) {
            return decided(true, precision);
        }
        if excludes_zero(&h, x) {
            return decided(false, precision);
        }
    }
    decided(sign_at(&h, &tau) == Sign::Zero, Precision::Exact)
}
