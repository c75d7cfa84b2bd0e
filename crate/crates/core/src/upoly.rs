//! Univariate integer polynomials: normalization, gcd, square-free part,
//! factorization over the rationals, real-root isolation and exact signs at
//! real algebraic numbers.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::Sign;
use crate::poly::Poly;

/// Dense integer polynomial in `t`.
pub type UPoly = Poly<BigInt>;

/// Non-negative gcd of the coefficients; zero for the zero polynomial.
pub fn content(f: &UPoly) -> BigInt {
    f.coeffs().iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Divides by the content and makes the leading coefficient positive.
pub fn normalize(f: &UPoly) -> UPoly {
    let Some(lc) = f.lc() else {
        return UPoly::zero();
    };
    let mut c = content(f);
    if lc.is_negative() {
        c = -c;
    }
    Poly::new(f.coeffs().iter().map(|x| x / &c).collect())
}

/// Is `f` normalized (primitive, positive leading coefficient)?
pub fn is_normalized(f: &UPoly) -> bool {
    match f.lc() {
        None => true,
        Some(lc) => lc.is_positive() && content(f).is_one(),
    }
}

/// Pseudo-remainder of `f` by `g`: the remainder of
/// `lc(g)^(deg f - deg g + 1) f` divided by `g`.
pub fn pseudo_rem(f: &UPoly, g: &UPoly) -> UPoly {
    let dg = g.degree().expect("pseudo-division by zero");
    let lc = g.lc().unwrap().clone();
    let mut r: Vec<BigInt> = f.coeffs().to_vec();
    while r.len() > dg && !r.is_empty() {
        let k = r.len() - 1 - dg;
        let c = r.last().unwrap().clone();
        for x in r.iter_mut() {
            *x *= &lc;
        }
        for (j, gc) in g.coeffs().iter().enumerate() {
            r[k + j] -= &c * gc;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    Poly::new(r)
}

/// Exact quotient `f / g` over the integers, or `None` when `g` does not
/// divide `f` with an integral quotient.
pub fn div_exact(f: &UPoly, g: &UPoly) -> Option<UPoly> {
    let dg = g.degree().expect("division by zero polynomial");
    let lc = g.lc().unwrap();
    let mut r: Vec<BigInt> = f.coeffs().to_vec();
    if r.len() <= dg {
        return r.is_empty().then(UPoly::zero);
    }
    let mut q = vec![BigInt::zero(); r.len() - dg];
    for k in (0..q.len()).rev() {
        let c = &r[k + dg];
        if c.is_zero() {
            continue;
        }
        let (qc, rem) = c.div_rem(lc);
        if !rem.is_zero() {
            return None;
        }
        for (j, gc) in g.coeffs().iter().enumerate() {
            r[k + j] -= &qc * gc;
        }
        q[k] = qc;
    }
    r.iter().all(Zero::is_zero).then(|| Poly::new(q))
}

/// Greatest common divisor over the rationals, returned normalized.
/// Uses a primitive pseudo-remainder sequence.
pub fn poly_gcd(f: &UPoly, g: &UPoly) -> UPoly {
    let (mut a, mut b) = (normalize(f), normalize(g));
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        let r = pseudo_rem(&a, &b);
        a = b;
        b = normalize(&r);
    }
    normalize(&a)
}

/// `f / gcd(f, f')`, normalized.
pub fn square_free_part(f: &UPoly) -> UPoly {
    let f = normalize(f);
    if f.degree().unwrap_or(0) == 0 {
        return f;
    }
    let g = poly_gcd(&f, &f.derivative());
    normalize(&div_exact(&f, &g).expect("gcd divides f"))
}

/// Total order used to sort factors: degree, then coefficients from the
/// constant term up.
pub fn factor_order(a: &UPoly, b: &UPoly) -> Ordering {
    a.degree()
        .cmp(&b.degree())
        .then_with(|| a.coeffs().cmp(b.coeffs()))
}

/// Irreducible factorization over the rationals.
///
/// Returns normalized irreducible factors of positive degree with their
/// multiplicities, sorted by [`factor_order`]. Their product equals `f` up to
/// a nonzero rational constant. Constants have no factors.
pub fn factor_integer(f: &UPoly) -> Vec<(UPoly, u32)> {
    let f = normalize(f);
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = square_free_part(&f);
    let mut irreducibles = factor_square_free(&sf);
    irreducibles.sort_by(factor_order);
    let mut out = Vec::with_capacity(irreducibles.len());
    for p in irreducibles {
        let mut rest = f.clone();
        let mut m = 0;
        while let Some(q) = div_exact(&rest, &p) {
            rest = q;
            m += 1;
        }
        out.push((p, m));
    }
    out
}

/// Factors a normalized square-free polynomial of positive degree.
pub fn factor_square_free(f: &UPoly) -> Vec<UPoly> {
    let n = f.degree().unwrap();
    if n == 1 {
        return vec![f.clone()];
    }
    // A root at zero is cheap to split off and keeps f(0) nonzero below.
    if f.coeff(0).is_zero() {
        let t = UPoly::t();
        let mut out = vec![t.clone()];
        let rest = div_exact(f, &t).unwrap();
        if rest.degree().unwrap_or(0) > 0 {
            out.extend(factor_square_free(&normalize(&rest)));
        }
        return out;
    }
    zassenhaus(f)
}

const SMALL_PRIMES: [u64; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn zassenhaus(f: &UPoly) -> Vec<UPoly> {
    let lc = f.lc().unwrap().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    // Try several good primes and keep the one with the fewest modular
    // factors; that bounds the recombination work.
    let mut best: Option<(u64, Vec<modp::P>)> = None;
    let mut tried = 0;
    for &p in SMALL_PRIMES
        .iter()
        .chain([101u64, 103, 107, 109, 113, 127, 131].iter())
    {
        if (&lc % p).is_zero() {
            continue;
        }
        let fp = modp::from_big(f, p);
        let dfp = modp::derivative(&fp, p);
        if modp::degree(&modp::gcd(&fp, &dfp, p)) != Some(0) {
            continue;
        }
        let facs = modp::factor(&fp, p, &mut rng);
        if facs.len() == 1 {
            return vec![f.clone()];
        }
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        tried += 1;
        if tried == 5 {
            break;
        }
    }
    let (p, facs) = best.expect("some small prime keeps the polynomial square-free");

    let n = f.degree().unwrap() as u32;
    let norm2 = f.coeffs().iter().map(|c| c * c).sum::<BigInt>().sqrt() + 1;
    let bound = lc.abs() * (BigInt::one() << n) * norm2 * 2;
    let mut k = 1u32;
    let pb = BigInt::from(p);
    let mut modulus = pb.clone();
    while modulus <= bound {
        modulus *= &pb;
        k += 1;
    }
    let lifted = hensel::lift(f, &facs, p, k);

    let mut remaining: Vec<UPoly> = lifted;
    let mut cur = f.clone();
    let mut out = Vec::new();
    let mut s = 1;
    while 2 * s <= remaining.len() {
        let mut found = None;
        let idx: Vec<usize> = (0..remaining.len()).collect();
        for subset in subsets(&idx, s) {
            let clc = cur.lc().unwrap().clone();
            let mut g = Poly::constant(clc);
            for &i in &subset {
                g = hensel::reduce(&(&g * &remaining[i]), &modulus);
            }
            let g = normalize(&hensel::symmetric(&g, &modulus));
            if let Some(q) = div_exact(&cur, &g) {
                found = Some((subset, g, q));
                break;
            }
        }
        match found {
            Some((subset, g, q)) => {
                out.push(g);
                cur = normalize(&q);
                remaining = remaining
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, x)| x)
                    .collect();
            }
            None => s += 1,
        }
    }
    if cur.degree().unwrap_or(0) > 0 {
        out.push(cur);
    }
    out
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

/// Dense polynomials over `Z/p` with `p < 2^32`, constant term first.
mod modp {
    use super::*;

    pub type P = Vec<u64>;

    pub fn trim(mut a: P) -> P {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &P) -> Option<usize> {
        a.len().checked_sub(1)
    }

    pub fn from_big(f: &UPoly, p: u64) -> P {
        let pb = BigInt::from(p);
        trim(
            f.coeffs()
                .iter()
                .map(|c| c.mod_floor(&pb).to_u64().unwrap())
                .collect(),
        )
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub fn sub(a: &P, b: &P, p: u64) -> P {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| {
                    let x = a.get(i).copied().unwrap_or(0);
                    let y = b.get(i).copied().unwrap_or(0);
                    (x + p - y) % p
                })
                .collect(),
        )
    }

    pub fn add(a: &P, b: &P, p: u64) -> P {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
                .collect(),
        )
    }

    pub fn mul(a: &P, b: &P, p: u64) -> P {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % p;
            }
        }
        trim(r)
    }

    pub fn scale(a: &P, c: u64, p: u64) -> P {
        trim(a.iter().map(|x| x * c % p).collect())
    }

    pub fn monic(a: &P, p: u64) -> P {
        match a.last() {
            None => Vec::new(),
            Some(&l) => scale(a, inv(l, p), p),
        }
    }

    pub fn divrem(a: &P, b: &P, p: u64) -> (P, P) {
        let db = degree(b).expect("division by zero");
        if a.len() <= db {
            return (Vec::new(), a.clone());
        }
        let li = inv(b[db], p);
        let mut r = a.clone();
        let mut q = vec![0u64; a.len() - db];
        for k in (0..q.len()).rev() {
            let c = r[k + db] * li % p;
            q[k] = c;
            if c == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                r[k + j] = (r[k + j] + p - c * y % p) % p;
            }
        }
        r.truncate(db);
        (trim(q), trim(r))
    }

    pub fn rem(a: &P, b: &P, p: u64) -> P {
        divrem(a, b, p).1
    }

    pub fn gcd(a: &P, b: &P, p: u64) -> P {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        monic(&a, p)
    }

    /// `(g, s, t)` with `s a + t b = g`, `g` monic.
    pub fn ext_gcd(a: &P, b: &P, p: u64) -> (P, P, P) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (vec![1u64], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s2 = sub(&s0, &mul(&q, &s1, p), p);
            let t2 = sub(&t0, &mul(&q, &t1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let li = inv(*r0.last().unwrap(), p);
        (scale(&r0, li, p), scale(&s0, li, p), scale(&t0, li, p))
    }

    pub fn derivative(a: &P, p: u64) -> P {
        trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| (i as u64 % p) * c % p)
                .collect(),
        )
    }

    pub fn powmod(base: &P, mut e: u128, m: &P, p: u64) -> P {
        let mut acc = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        acc
    }

    /// Monic irreducible factors of a square-free `f` (leading coefficient
    /// discarded), by distinct-degree then equal-degree splitting.
    pub fn factor(f: &P, p: u64, rng: &mut ChaCha8Rng) -> Vec<P> {
        let mut f = monic(f, p);
        let x = vec![0u64, 1];
        let mut h = x.clone();
        let mut out = Vec::new();
        let mut d = 1;
        while degree(&f).is_some_and(|n| n >= 2 * d) {
            h = powmod(&h, p as u128, &f, p);
            let g = gcd(&sub(&h, &x, p), &f, p);
            if degree(&g) != Some(0) {
                out.extend(equal_degree(&g, d, p, rng));
                f = divrem(&f, &g, p).0;
                h = rem(&h, &f, p);
            }
            d += 1;
        }
        if degree(&f).is_some_and(|n| n > 0) {
            out.push(f);
        }
        out
    }

    fn equal_degree(f: &P, d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<P> {
        let n = degree(f).unwrap();
        if n == d {
            return vec![f.clone()];
        }
        let e = (((p as u128).pow(d as u32)) - 1) / 2;
        loop {
            let a: P = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
            if degree(&a).unwrap_or(0) == 0 {
                continue;
            }
            let g = gcd(&a, f, p);
            let g = if degree(&g) != Some(0) {
                g
            } else {
                let b = sub(&powmod(&a, e, f, p), &vec![1], p);
                gcd(&b, f, p)
            };
            let dg = degree(&g).unwrap_or(0);
            if dg > 0 && dg < n {
                let mut out = equal_degree(&g, d, p, rng);
                out.extend(equal_degree(&divrem(f, &g, p).0, d, p, rng));
                return out;
            }
        }
    }
}

/// Hensel lifting of a modular factorization.
mod hensel {
    use super::*;

    pub fn reduce(f: &UPoly, m: &BigInt) -> UPoly {
        Poly::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
    }

    pub fn symmetric(f: &UPoly, m: &BigInt) -> UPoly {
        let half = m / 2;
        Poly::new(
            f.coeffs()
                .iter()
                .map(|c| {
                    let r = c.mod_floor(m);
                    if r > half {
                        r - m
                    } else {
                        r
                    }
                })
                .collect(),
        )
    }

    fn to_big(a: &modp::P) -> UPoly {
        Poly::new(a.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Lifts `f ≡ lc(f) Π facs (mod p)` to monic factors modulo `p^k`.
    pub fn lift(f: &UPoly, facs: &[modp::P], p: u64, k: u32) -> Vec<UPoly> {
        let m = BigInt::from(p).pow(k);
        lift_rec(f, facs, p, k, &m)
    }

    fn lift_rec(f: &UPoly, facs: &[modp::P], p: u64, k: u32, m: &BigInt) -> Vec<UPoly> {
        if facs.len() == 1 {
            let lc = f.lc().unwrap().mod_floor(m);
            let li = lc.modinv(m).expect("leading coefficient is a unit");
            return vec![reduce(&f.scale(&li), m)];
        }
        let (left, right) = facs.split_at(facs.len() / 2);
        let g0 = left.iter().fold(vec![1u64], |a, b| modp::mul(&a, b, p));
        let h0 = right.iter().fold(vec![1u64], |a, b| modp::mul(&a, b, p));
        let (g, h) = lift_two(f, &g0, &h0, p, k);
        let mut out = lift_rec(&g, left, p, k, m);
        out.extend(lift_rec(&h, right, p, k, m));
        out
    }

    /// Given monic `g0` and monic `h0` with `f ≡ lc(f) g0 h0 (mod p)`, returns
    /// `(g, h)` with `g` monic, `lc(h) = lc(f)` and `f ≡ g h (mod p^k)`.
    fn lift_two(f: &UPoly, g0: &modp::P, h0: &modp::P, p: u64, k: u32) -> (UPoly, UPoly) {
        let pb = BigInt::from(p);
        let lc = f.lc().unwrap().clone();
        let lcp = lc.mod_floor(&pb).to_u64().unwrap();
        let hp = modp::scale(h0, lcp, p);
        let (one, s, t) = modp::ext_gcd(g0, &hp, p);
        debug_assert_eq!(one, vec![1]);
        let mut g = to_big(g0);
        let mut hc: Vec<BigInt> = hp.iter().map(|&c| BigInt::from(c)).collect();
        *hc.last_mut().unwrap() = lc.clone();
        let mut h = Poly::new(hc);
        let mut m = pb.clone();
        for _ in 1..k {
            let diff = &reduce(f, &(&m * &pb)) - &(&g * &h);
            let e: UPoly = Poly::new(
                diff.coeffs()
                    .iter()
                    .map(|c| {
                        debug_assert!((c % &m).is_zero());
                        (c / &m).mod_floor(&pb)
                    })
                    .collect(),
            );
            let ep = modp::from_big(&e, p);
            let (q, a) = modp::divrem(&modp::mul(&ep, &t, p), g0, p);
            let hpk = modp::from_big(&h, p);
            let b = modp::add(&modp::mul(&ep, &s, p), &modp::mul(&q, &hpk, p), p);
            g = &g + &to_big(&a).scale(&m);
            h = &h + &to_big(&b).scale(&m);
            m *= &pb;
        }
        let mk = &m;
        let g = reduce(&g, mk);
        let top = h.degree().unwrap();
        let mut hc: Vec<BigInt> = h.coeffs().iter().map(|c| c.mod_floor(mk)).collect();
        hc[top] = lc;
        (g, Poly::new(hc))
    }
}

/// An open interval `(lo, hi)` containing exactly one real root of the
/// square-free `poly`, which takes nonzero values of opposite sign at the
/// endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
    pub poly: UPoly,
}

fn eval_q(f: &UPoly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in f.coeffs().iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}

/// Sign of `f(x)` for rational `x`.
pub fn sign_at_rational(f: &UPoly, x: &BigRational) -> Sign {
    Sign::of_rational(&eval_q(f, x))
}

/// Upper bound on the number of roots of `f` in `(a, b)` by Descartes' rule
/// of signs; exact when it is 0 or 1.
pub fn descartes_bound(f: &UPoly, a: &BigRational, b: &BigRational) -> usize {
    let n = match f.degree() {
        None | Some(0) => return 0,
        Some(n) => n,
    };
    // x = (a + b y) / (1 + y) maps (0, ∞) onto (a, b).
    let (an, ad) = (a.numer(), a.denom());
    let (bn, bd) = (b.numer(), b.denom());
    let lin = Poly::new(vec![an * bd, bn * ad]);
    let den = ad * bd;
    let one_y = UPoly::new(vec![BigInt::one(), BigInt::one()]);
    let mut acc = UPoly::zero();
    for (i, c) in f.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = &(&lin.pow(i as u32) * &one_y.pow((n - i) as u32))
            .scale(&(c * den.pow((n - i) as u32)));
        acc = &acc + term;
    }
    let signs: Vec<bool> = acc
        .coeffs()
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.sign() == BigSign::Plus)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Bound `B` with every real root in `(-B, B)`.
fn root_bound(f: &UPoly) -> BigRational {
    let lc = f.lc().unwrap().abs();
    let m = f.coeffs().iter().map(|c| c.abs()).max().unwrap();
    BigRational::from_integer(m.div_ceil(&lc) + 1)
}

fn two() -> BigRational {
    BigRational::from_integer(2.into())
}

/// Isolating intervals for the real roots of a square-free `f`, sorted
/// ascending.
pub fn isolate_real_roots(f: &UPoly) -> Vec<RootInterval> {
    let f = normalize(f);
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let b = root_bound(&f);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        match descartes_bound(&f, &lo, &hi) {
            0 => {}
            1 => out.push(RootInterval {
                lo,
                hi,
                poly: f.clone(),
            }),
            _ => {
                let mid = (&lo + &hi) / two();
                if sign_at_rational(&f, &mid) == Sign::Zero {
                    let mut d = (&hi - &lo) / BigRational::from_integer(4.into());
                    loop {
                        let (a, c) = (&mid - &d, &mid + &d);
                        if descartes_bound(&f, &a, &c) == 1
                            && sign_at_rational(&f, &a) != Sign::Zero
                            && sign_at_rational(&f, &c) != Sign::Zero
                        {
                            stack.push((lo, a.clone()));
                            stack.push((c.clone(), hi));
                            out.push(RootInterval {
                                lo: a,
                                hi: c,
                                poly: f.clone(),
                            });
                            break;
                        }
                        d /= two();
                    }
                } else {
                    stack.push((lo, mid.clone()));
                    stack.push((mid, hi));
                }
            }
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

impl RootInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Halves the interval, keeping the root inside.
    pub fn refine(&mut self) {
        let mid = (&self.lo + &self.hi) / two();
        let s = sign_at_rational(&self.poly, &mid);
        if s == Sign::Zero {
            let q = self.width() / BigRational::from_integer(4.into());
            self.lo = &mid - &q;
            self.hi = &mid + &q;
        } else if s == sign_at_rational(&self.poly, &self.lo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Refines until the width is at most `w`.
    pub fn refine_to(&mut self, w: &BigRational) {
        while &self.width() > w {
            self.refine();
        }
    }

    /// Does the root lie in the interval of `g`, a divisor of `poly`?
    fn is_root_of_divisor(&self, g: &UPoly) -> bool {
        g.degree().unwrap_or(0) > 0
            && sign_at_rational(g, &self.lo) * sign_at_rational(g, &self.hi) == Sign::Neg
    }
}

/// Exact sign of `f` at the root isolated by `tau`.
pub fn sign_at(f: &UPoly, tau: &RootInterval) -> Sign {
    if f.is_zero() {
        return Sign::Zero;
    }
    if f.degree() == Some(0) {
        return Sign::of_int(&f.coeff(0));
    }
    let g = poly_gcd(f, &tau.poly);
    if tau.is_root_of_divisor(&g) {
        return Sign::Zero;
    }
    let mut tau = tau.clone();
    loop {
        let s = sign_at_rational(f, &tau.lo);
        if s != Sign::Zero && descartes_bound(f, &tau.lo, &tau.hi) == 0 {
            return s;
        }
        tau.refine();
    }
}

/// Real roots of a square-free `f` counted with a Sturm sequence; used as an
/// independent check of [`isolate_real_roots`].
pub fn sturm_root_count(f: &UPoly) -> usize {
    let f = normalize(f);
    if f.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let mut seq = vec![f.clone(), f.derivative()];
    loop {
        let n = seq.len();
        let r = pseudo_rem(&seq[n - 2], &seq[n - 1]);
        if r.is_zero() {
            break;
        }
        // Pseudo-remainders carry a positive factor when the divisor's
        // leading coefficient is positive or the exponent is even; fix the
        // sign so the sequence is a true Sturm sequence.
        let lc = seq[n - 1].lc().unwrap();
        let e = seq[n - 2].degree().unwrap() - seq[n - 1].degree().unwrap() + 1;
        let neg = lc.is_negative() && e % 2 == 1;
        let c = content(&r);
        let r = Poly::new(r.coeffs().iter().map(|x| x / &c).collect());
        let r = if neg { r } else { -&r };
        seq.push(r);
    }
    let var = |at_pos: bool| {
        let s: Vec<bool> = seq
            .iter()
            .map(|p| {
                let d = p.degree().unwrap();
                let pos = p.lc().unwrap().is_positive();
                if at_pos || d % 2 == 0 {
                    pos
                } else {
                    !pos
                }
            })
            .collect();
        s.windows(2).filter(|w| w[0] != w[1]).count()
    };
    var(false) - var(true)
}
