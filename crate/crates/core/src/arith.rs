//! Signs, an outward-rounded `f64` interval filter, and residue arithmetic
//! modulo 32-bit primes with a Chinese-remainder zero test.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact sign of a real number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of_int(x: &BigInt) -> Sign {
        if x.is_zero() {
            Sign::Zero
        } else if x.is_positive() {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn of_rational(x: &BigRational) -> Sign {
        Sign::of_int(x.numer())
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, o: Sign) -> Sign {
        match self.as_i32() * o.as_i32() {
            1 => Sign::Pos,
            -1 => Sign::Neg,
            _ => Sign::Zero,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Neg
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Neg => "neg",
            Sign::Zero => "zero",
            Sign::Pos => "pos",
        })
    }
}

/// Closed interval `[lo, hi]` of doubles. Every operation rounds outward by
/// one ulp, so the exact result of the corresponding real operation on any
/// points of the operands lies inside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Result of the interval sign filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IntervalSign {
    Neg,
    Ambiguous,
    Pos,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval bounds out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn entire() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    fn widened(lo: f64, hi: f64) -> Self {
        if lo.is_nan() || hi.is_nan() {
            return Interval::entire();
        }
        Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    /// Encloses an integer that may not be representable.
    pub fn from_bigint(x: &BigInt) -> Self {
        match x.to_f64() {
            Some(v) if v.is_finite() => {
                if BigInt::from(v as i64) == *x && v.abs() < 9.0e15 {
                    Interval::point(v)
                } else {
                    Interval::widened(v, v)
                }
            }
            _ => Interval::entire(),
        }
    }

    /// Encloses a rational number.
    pub fn from_rational(x: &BigRational) -> Self {
        let n = Interval::from_bigint(x.numer());
        let d = Interval::from_bigint(x.denom());
        n.div_positive(d)
    }

    fn div_positive(self, d: Interval) -> Interval {
        if d.lo <= 0.0 {
            return Interval::entire();
        }
        let c = [
            self.lo / d.lo,
            self.lo / d.hi,
            self.hi / d.lo,
            self.hi / d.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::widened(lo, hi)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let lo_ok = self.lo == f64::NEG_INFINITY
            || BigRational::from_float(self.lo).is_some_and(|l| &l <= x);
        let hi_ok =
            self.hi == f64::INFINITY || BigRational::from_float(self.hi).is_some_and(|h| x <= &h);
        lo_ok && hi_ok
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn sign(&self) -> IntervalSign {
        interval_sign(self)
    }
}

/// `Pos` iff `lo > 0`, `Neg` iff `hi < 0`, otherwise ambiguous.
pub fn interval_sign(iv: &Interval) -> IntervalSign {
    if iv.lo > 0.0 {
        IntervalSign::Pos
    } else if iv.hi < 0.0 {
        IntervalSign::Neg
    } else {
        IntervalSign::Ambiguous
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::widened(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::widened(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        if c.iter().any(|x| x.is_nan()) {
            return Interval::entire();
        }
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::widened(lo, hi)
    }
}

/// Number of 32-bit primes in the fixed list.
pub const PRIME_COUNT: usize = 192;

fn is_prime_u32(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % n;
            }
            b = b * b % n;
            e >>= 1;
        }
        r
    };
    // These bases are exact for every n below 4,759,123,141.
    'witness: for a in [2u64, 7, 61] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The largest [`PRIME_COUNT`] primes below 2^32, in decreasing order.
pub fn primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_COUNT);
        let mut n: u64 = (1u64 << 32) - 1;
        while out.len() < PRIME_COUNT {
            if is_prime_u32(n) {
                out.push(n as u32);
            }
            n -= 2;
        }
        out
    })
}

/// Residues of one integer modulo a prefix of [`primes`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueVector {
    pub primes: Vec<u32>,
    pub residues: Vec<u32>,
}

impl ResidueVector {
    pub fn from_bigint(x: &BigInt, count: usize) -> Self {
        let ps = primes()[..count].to_vec();
        let residues = ps
            .iter()
            .map(|&p| x.mod_floor(&BigInt::from(p)).to_u32().unwrap())
            .collect();
        ResidueVector {
            primes: ps,
            residues,
        }
    }

    pub fn from_i64(x: i64, count: usize) -> Self {
        let ps = primes()[..count].to_vec();
        let residues = ps.iter().map(|&p| x.rem_euclid(p as i64) as u32).collect();
        ResidueVector {
            primes: ps,
            residues,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }

    fn zip(&self, o: &Self, f: impl Fn(u64, u64, u64) -> u64) -> Self {
        assert_eq!(
            self.primes, o.primes,
            "residue vectors over different primes"
        );
        let residues = self
            .primes
            .iter()
            .zip(self.residues.iter().zip(&o.residues))
            .map(|(&p, (&a, &b))| f(a as u64, b as u64, p as u64) as u32)
            .collect();
        ResidueVector {
            primes: self.primes.clone(),
            residues,
        }
    }

    /// The unique integer in the symmetric range of the prime product with
    /// these residues.
    pub fn reconstruct(&self) -> BigInt {
        let mut x = BigInt::zero();
        let mut m = BigInt::from(1u32);
        for (&p, &r) in self.primes.iter().zip(&self.residues) {
            let pb = BigInt::from(p);
            // x + m k ≡ r (mod p)
            let mi = m.mod_floor(&pb).modinv(&pb).expect("distinct primes");
            let k = ((BigInt::from(r) - &x) * mi).mod_floor(&pb);
            x += &m * k;
            m *= pb;
        }
        if &x * 2 > m {
            x - m
        } else {
            x
        }
    }
}

impl Add for &ResidueVector {
    type Output = ResidueVector;
    fn add(self, o: &ResidueVector) -> ResidueVector {
        self.zip(o, |a, b, p| (a + b) % p)
    }
}

impl Sub for &ResidueVector {
    type Output = ResidueVector;
    fn sub(self, o: &ResidueVector) -> ResidueVector {
        self.zip(o, |a, b, p| (a + p - b) % p)
    }
}

impl Mul for &ResidueVector {
    type Output = ResidueVector;
    fn mul(self, o: &ResidueVector) -> ResidueVector {
        self.zip(o, |a, b, p| a * b % p)
    }
}

/// Size model of an integer expression: a polynomial of total degree
/// `outer` in quantities that are themselves polynomials of degree `inner`
/// in inputs of `input_bits` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub outer: u32,
    pub inner: u32,
    pub input_bits: u32,
}

impl DegreeProfile {
    /// Coefficient expressions of a gcd step on angle polynomials.
    pub const ANGLE_GCD: DegreeProfile = DegreeProfile {
        outer: 9,
        inner: 9,
        input_bits: 53,
    };

    /// Number of 32-bit primes needed: `⌈outer · inner · bits / 32⌉`.
    pub fn required_primes(&self) -> usize {
        (self.outer * self.inner * self.input_bits).div_ceil(32) as usize
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("{given} primes given but {required} are needed for this degree profile")]
    InsufficientPrimeCount { given: usize, required: usize },
    #[error("only {PRIME_COUNT} primes are available, {0} requested")]
    TooManyPrimes(usize),
}

/// Decides whether an integer expression is zero from its residues modulo
/// the first `count` primes. `eval(p)` returns the expression modulo `p`.
pub fn crt_zero_test(
    eval: impl Fn(u32) -> u32,
    count: usize,
    profile: DegreeProfile,
) -> Result<bool, ArithError> {
    let required = profile.required_primes();
    if count < required {
        return Err(ArithError::InsufficientPrimeCount {
            given: count,
            required,
        });
    }
    if count > PRIME_COUNT {
        return Err(ArithError::TooManyPrimes(count));
    }
    Ok(primes()[..count].iter().all(|&p| eval(p) == 0))
}
