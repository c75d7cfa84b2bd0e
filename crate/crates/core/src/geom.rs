//! Rational rotation about the z axis and the contact polynomials.
//!
//! The rotation by parameter `t` is
//! `Θ(t)p = ((1-t²)p_x - 2t p_y, 2t p_x + (1-t²)p_y, (1+t²)p_z) / (1+t²)`.
//! Everything here works with the numerator `Θ̃ = (1+t²)Θ` so that results
//! stay polynomial in `t`.

use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::ApolyError;
use crate::poly::Poly;
use crate::scalar::Scalar;

/// A constant 3-vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vec3<T>(pub [T; 3]);

impl<T: Scalar> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([T::zero(), T::zero(), T::zero()])
    }

    pub fn from_i64s(x: i64, y: i64, z: i64) -> Self {
        Vec3([T::from_i64(x), T::from_i64(y), T::from_i64(z)])
    }

    pub fn dot(&self, o: &Self) -> T {
        let [a, b, c] = &self.0;
        let [x, y, z] = &o.0;
        a.clone() * x.clone() + b.clone() * y.clone() + c.clone() * z.clone()
    }

    pub fn cross(&self, o: &Self) -> Self {
        let [a, b, c] = &self.0;
        let [x, y, z] = &o.0;
        Vec3([
            b.clone() * z.clone() - c.clone() * y.clone(),
            c.clone() * x.clone() - a.clone() * z.clone(),
            a.clone() * y.clone() - b.clone() * x.clone(),
        ])
    }

    pub fn scale(&self, s: &T) -> Self {
        Vec3(self.0.clone().map(|c| c * s.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// The constant polynomial vector.
    pub fn lift(&self) -> PVec3<T> {
        PVec3(self.0.clone().map(Poly::constant))
    }

    /// `(1+t²) self`.
    pub fn lift_scaled(&self) -> PVec3<T> {
        let d = Poly::one_plus_t2();
        PVec3(self.0.clone().map(|c| d.scale(&c)))
    }

    /// `Θ̃(t) self`.
    pub fn rot(&self) -> PVec3<T> {
        let [x, y, z] = &self.0;
        let two = T::from_i64(2);
        PVec3([
            Poly::new(vec![x.clone(), -(two.clone() * y.clone()), -x.clone()]),
            Poly::new(vec![y.clone(), two * x.clone(), -y.clone()]),
            Poly::new(vec![z.clone(), T::zero(), z.clone()]),
        ])
    }
}

impl<T: Scalar> Add for &Vec3<T> {
    type Output = Vec3<T>;
    fn add(self, o: &Vec3<T>) -> Vec3<T> {
        let [a, b, c] = &self.0;
        let [x, y, z] = &o.0;
        Vec3([
            a.clone() + x.clone(),
            b.clone() + y.clone(),
            c.clone() + z.clone(),
        ])
    }
}

impl<T: Scalar> Sub for &Vec3<T> {
    type Output = Vec3<T>;
    fn sub(self, o: &Vec3<T>) -> Vec3<T> {
        let [a, b, c] = &self.0;
        let [x, y, z] = &o.0;
        Vec3([
            a.clone() - x.clone(),
            b.clone() - y.clone(),
            c.clone() - z.clone(),
        ])
    }
}

/// A 3-vector of polynomials in `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct PVec3<T>(pub [Poly<T>; 3]);

impl<T: Scalar> PVec3<T> {
    pub fn dot(&self, o: &Self) -> Poly<T> {
        let [a, b, c] = &self.0;
        let [x, y, z] = &o.0;
        &(&(a * x) + &(b * y)) + &(c * z)
    }

    pub fn cross(&self, o: &Self) -> Self {
        let [a, b, c] = &self.0;
        let [x, y, z] = &o.0;
        PVec3([
            &(b * z) - &(c * y),
            &(c * x) - &(a * z),
            &(a * y) - &(b * x),
        ])
    }

    pub fn scale(&self, s: &Poly<T>) -> Self {
        let [a, b, c] = &self.0;
        PVec3([a * s, b * s, c * s])
    }

    pub fn eval(&self, t: &T) -> Vec3<T> {
        Vec3(self.0.clone().map(|p| p.eval(t)))
    }
}

impl<T: Scalar> Add for &PVec3<T> {
    type Output = PVec3<T>;
    fn add(self, o: &PVec3<T>) -> PVec3<T> {
        let [a, b, c] = &self.0;
        let [x, y, z] = &o.0;
        PVec3([a + x, b + y, c + z])
    }
}

impl<T: Scalar> Sub for &PVec3<T> {
    type Output = PVec3<T>;
    fn sub(self, o: &PVec3<T>) -> PVec3<T> {
        let [a, b, c] = &self.0;
        let [x, y, z] = &o.0;
        PVec3([a - x, b - y, c - z])
    }
}

impl<T: Scalar> Neg for &PVec3<T> {
    type Output = PVec3<T>;
    fn neg(self) -> PVec3<T> {
        let [a, b, c] = &self.0;
        PVec3([-a, -b, -c])
    }
}

impl<T: Scalar> Mul<&PVec3<T>> for &Vec3<T> {
    type Output = Poly<T>;
    /// Dot product of a constant vector with a polynomial vector.
    fn mul(self, o: &PVec3<T>) -> Poly<T> {
        let [a, b, c] = &self.0;
        let [x, y, z] = &o.0;
        &(&x.scale(a) + &y.scale(b)) + &z.scale(c)
    }
}

/// Determinant of the 3x3 matrix with the given rows.
pub fn det3<T: Scalar>(a: &PVec3<T>, b: &PVec3<T>, c: &PVec3<T>) -> Poly<T> {
    a.dot(&b.cross(c))
}

/// `Θ(t)p` for exact rational `t` and `p`.
pub fn rotate_point(t: &BigRational, p: &Vec3<BigRational>) -> Vec3<BigRational> {
    let one = BigRational::one();
    let t2 = t * t;
    let den = &one + &t2;
    let c = &one - &t2;
    let s = t + t;
    let [x, y, z] = &p.0;
    Vec3([
        (&c * x - &s * y) / &den,
        (&s * x + &c * y) / &den,
        z.clone(),
    ])
}

/// The three generic contacts between a feature of `O` and a feature of `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContactType {
    /// Facet `o_h o_i o_j` against vertex `r_k`.
    FacetVertex,
    /// Vertex `o_h` against facet `r_i r_j r_k`.
    VertexFacet,
    /// Edge `o_h o_i` against edge `r_j r_k`.
    EdgeEdge,
}

/// A contact polynomial `n(t)·d + k(t)`, equal to `(1+t²)` times the
/// contact expression.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactPoly<T> {
    pub n: PVec3<T>,
    pub k: Poly<T>,
}

impl<T: Scalar> ContactPoly<T> {
    /// Value at a concrete configuration `(t, d)`.
    pub fn eval(&self, t: &T, d: &Vec3<T>) -> T {
        d.dot(&self.n.eval(t)) + self.k.eval(t)
    }
}

fn facet_normal<T: Scalar>(a: &Vec3<T>, b: &Vec3<T>, c: &Vec3<T>) -> Result<Vec3<T>, ApolyError> {
    let u = (a - c).cross(&(b - c));
    if u.is_zero() {
        return Err(ApolyError::DegenerateFeature(
            "facet vertices are collinear".into(),
        ));
    }
    Ok(u)
}

/// Builds the contact polynomial. `o` holds the O feature's points (3, 1 or
/// 2 of them) and `r` the R feature's points, in increasing vertex order.
pub fn contact_polynomial<T: Scalar>(
    ty: ContactType,
    o: &[Vec3<T>],
    r: &[Vec3<T>],
) -> Result<ContactPoly<T>, ApolyError> {
    let wrong = || ApolyError::Malformed(format!("{ty:?} with {} + {} points", o.len(), r.len()));
    Ok(match ty {
        ContactType::FacetVertex => {
            let ([oh, oi, oj], [rk]) = (o, r) else {
                return Err(wrong());
            };
            let u = facet_normal(oi, oh, oj)?;
            let d = Poly::one_plus_t2();
            ContactPoly {
                n: u.lift_scaled(),
                k: &(&u * &rk.rot()) - &d.scale(&u.dot(oj)),
            }
        }
        ContactType::VertexFacet => {
            let ([oh], [ri, rj, rk]) = (o, r) else {
                return Err(wrong());
            };
            let u = facet_normal(ri, rj, rk)?;
            let n = u.rot();
            ContactPoly {
                k: &Poly::one_plus_t2().scale(&u.dot(rk)) - &(oh * &n),
                n,
            }
        }
        ContactType::EdgeEdge => {
            let ([oh, oi], [rj, rk]) = (o, r) else {
                return Err(wrong());
            };
            let u = oh - oi;
            let v = (rj - rk).rot();
            let w = rj.cross(rk).rot();
            ContactPoly {
                n: u.lift().cross(&v),
                k: &(&u * &w) + &(&u.cross(oi) * &v),
            }
        }
    })
}
