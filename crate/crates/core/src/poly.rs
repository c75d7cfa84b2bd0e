//! Dense univariate polynomials over any [`Scalar`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Fp, Scalar};

/// Polynomial in `t` stored constant term first, with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(T::one())
    }

    /// The polynomial `t`.
    pub fn t() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    /// `1 + t^2`, the denominator of the rational rotation.
    pub fn one_plus_t2() -> Self {
        Poly::new(vec![T::one(), T::zero(), T::one()])
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&c| T::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lc(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_i64(i as i64))
                .collect(),
        )
    }

    /// Quotient and remainder by a divisor whose leading coefficient is one.
    pub fn div_rem_monic(&self, d: &Poly<T>) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        debug_assert!(d.lc().unwrap().is_one());
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![T::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] = rem[i + j].clone() - c.clone() * dc.clone();
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Divides out every factor of `1 + t^2`; returns the quotient and the
    /// number of factors removed. The zero polynomial is returned unchanged.
    pub fn strip_one_plus_t2(&self) -> (Self, u32) {
        let d = Poly::one_plus_t2();
        let mut cur = self.clone();
        let mut k = 0;
        while cur.degree().is_some_and(|n| n >= 2) {
            let (q, r) = cur.div_rem_monic(&d);
            if !r.is_zero() {
                break;
            }
            cur = q;
            k += 1;
        }
        (cur, k)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

/// Field operations over a prime field.
impl<const P: u64> Poly<Fp<P>> {
    /// Scaled to leading coefficient one; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.lc() {
            None => self.clone(),
            Some(lc) => self.scale(&lc.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.monic(), o.monic());
        while !b.is_zero() {
            let r = a.div_rem_monic(&b).1;
            a = b;
            b = r.monic();
        }
        a
    }

    /// Quotient by a nonzero divisor, if it divides exactly.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let lc = *d.lc()?;
        let (q, r) = self.div_rem_monic(&d.monic());
        r.is_zero()
            .then(|| q.scale(&lc.inv().expect("nonzero leading coefficient")))
    }

    /// Product of the distinct monic irreducible factors.
    pub fn square_free(&self) -> Self {
        if self.is_constant() {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.monic().div_exact(&g).expect("gcd divides").monic()
    }
}

impl<T: Scalar> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, o: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<T: Scalar> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, o: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, o: &Poly<T>) -> Poly<T> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Scalar> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for Poly<T> {
            type Output = Poly<T>;
            fn $m(self, o: Poly<T>) -> Poly<T> {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Scalar + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type P = Poly<BigInt>;

    #[test]
    fn trims_and_degrees() {
        let p = P::from_i64s(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!(P::from_i64s(&[0, 0]).is_zero());
        assert_eq!(P::zero().degree(), None);
    }

    #[test]
    fn monic_division() {
        // (t^2 + 1)(t - 3) + 5
        let f = &(&P::one_plus_t2() * &P::from_i64s(&[-3, 1])) + &P::from_i64s(&[5]);
        let (q, r) = f.div_rem_monic(&P::one_plus_t2());
        assert_eq!(q, P::from_i64s(&[-3, 1]));
        assert_eq!(r, P::from_i64s(&[5]));
    }

    #[test]
    fn strips_rotation_denominator() {
        let base = P::from_i64s(&[2, -7, 1]);
        let f = &(&base * &P::one_plus_t2()) * &P::one_plus_t2();
        assert_eq!(f.strip_one_plus_t2(), (base, 2));
        assert_eq!(P::one_plus_t2().strip_one_plus_t2(), (P::one(), 1));
    }

    #[test]
    fn derivative_and_eval() {
        let f = P::from_i64s(&[1, 0, 3, 2]);
        assert_eq!(f.derivative(), P::from_i64s(&[0, 6, 6]));
        assert_eq!(f.eval(&BigInt::from(2)), BigInt::from(29));
    }
}
