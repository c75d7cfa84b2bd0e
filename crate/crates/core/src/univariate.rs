//! From an a-poly and vertex coordinates to its angle polynomial in `t`.
//!
//! [`derive`] works over any [`Scalar`] and returns the polynomial before
//! normalization; factors of `1+t²` introduced by clearing denominators are
//! still present. [`univariate_from_apoly`] is the exact entry point used by
//! everything else: it removes those factors and returns the primitive
//! integer polynomial with positive leading coefficient.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::apoly::{APoly, Element, ElementType, Kind, Profile, VertexRef};
use crate::error::ApolyError;
use crate::geom::{contact_polynomial, det3, ContactPoly, ContactType, PVec3, Vec3};
use crate::poly::Poly;
use crate::scalar::{Fp, Scalar};
use crate::upoly::{normalize, UPoly};

/// Exact rational coordinates for a set of vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexAssignment {
    coords: BTreeMap<VertexRef, Vec3<BigRational>>,
}

impl VertexAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: VertexRef, p: Vec3<BigRational>) {
        self.coords.insert(v, p);
    }

    pub fn insert_i64(&mut self, v: VertexRef, p: [i64; 3]) {
        let c = p.map(|x| BigRational::from_integer(x.into()));
        self.coords.insert(v, Vec3(c));
    }

    pub fn get(&self, v: VertexRef) -> Option<&Vec3<BigRational>> {
        self.coords.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexRef, &Vec3<BigRational>)> {
        self.coords.iter()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Integer coordinates for `vertices`, all scaled by the common
    /// denominator. The angle polynomial of every kind is homogeneous in the
    /// coordinates, so scaling changes it only by a constant factor.
    pub fn scaled_integers(
        &self,
        vertices: &[VertexRef],
    ) -> Result<BTreeMap<VertexRef, Vec3<BigInt>>, ApolyError> {
        let mut den = BigInt::one();
        for v in vertices {
            let p = self
                .get(*v)
                .ok_or_else(|| ApolyError::MissingVertex(v.to_string()))?;
            for c in &p.0 {
                den = den.lcm(c.denom());
            }
        }
        Ok(vertices
            .iter()
            .map(|v| {
                let p = &self.coords[v];
                let c =
                    p.0.clone()
                        .map(|x| (x * BigRational::from_integer(den.clone())).to_integer());
                (*v, Vec3(c))
            })
            .collect())
    }
}

/// Parses an exact decimal (`-1.25`) or fraction (`3/4`).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let d: BigInt = d.parse().ok()?;
        let n: BigInt = n.parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let q = BigRational::new(num, den);
    Some(if neg { -q } else { q })
}

impl VertexAssignment {
    /// Reads lines `o<i> x y z` or `r<j> x y z`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ApolyError> {
        let mut va = VertexAssignment::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || ApolyError::Parse(format!("bad assignment line `{line}`"));
            let mut it = line.split_whitespace();
            let v: VertexRef = it.next().ok_or_else(bad)?.parse()?;
            let c: Vec<BigRational> = it
                .map(|x| parse_rational(x).ok_or_else(bad))
                .collect::<Result<_, _>>()?;
            let [x, y, z]: [BigRational; 3] = c.try_into().map_err(|_| bad())?;
            va.insert(v, Vec3([x, y, z]));
        }
        Ok(va)
    }
}

impl FromIterator<(VertexRef, Vec3<BigRational>)> for VertexAssignment {
    fn from_iter<I: IntoIterator<Item = (VertexRef, Vec3<BigRational>)>>(iter: I) -> Self {
        VertexAssignment {
            coords: iter.into_iter().collect(),
        }
    }
}

struct Ctx<'a, T, F> {
    coord: &'a F,
    _t: std::marker::PhantomData<T>,
}

impl<T: Scalar, F: Fn(VertexRef) -> Vec3<T>> Ctx<'_, T, F> {
    fn o(&self, i: u32) -> Vec3<T> {
        (self.coord)(VertexRef::o(i))
    }
    fn r(&self, i: u32) -> Vec3<T> {
        (self.coord)(VertexRef::r(i))
    }
    fn os(&self, e: &Element) -> Vec<Vec3<T>> {
        e.o.iter().map(|&i| self.o(i)).collect()
    }
    fn rs(&self, e: &Element) -> Vec<Vec3<T>> {
        e.r.iter().map(|&i| self.r(i)).collect()
    }

    fn contact(&self, e: &Element) -> Result<ContactPoly<T>, ApolyError> {
        let ty = match e.element_type()? {
            ElementType::FacetVertex => ContactType::FacetVertex,
            ElementType::VertexFacet => ContactType::VertexFacet,
            ElementType::EdgeEdge => ContactType::EdgeEdge,
            t => {
                return Err(ApolyError::Malformed(format!(
                    "{e} ({t:?}) is not a 1-contact"
                )))
            }
        };
        contact_polynomial(ty, &self.os(e), &self.rs(e))
    }

    /// The line of a 2-contact as `d = λ U + V / (1+t²)`; returns `(U, V)`.
    fn line(&self, e: &Element) -> (PVec3<T>, PVec3<T>) {
        let d = Poly::one_plus_t2();
        match (e.o.as_slice(), e.r.as_slice()) {
            (&[i, j], &[k]) => {
                let (oi, oj) = (self.o(i), self.o(j));
                let u = (&oj - &oi).lift();
                let v = &oj.lift().scale(&d) - &self.r(k).rot();
                (u, v)
            }
            (&[i], &[j, k]) => {
                let (rj, rk) = (self.r(j), self.r(k));
                let u = (&rj - &rk).rot();
                let v = &self.o(i).lift().scale(&d) - &rj.rot();
                (u, v)
            }
            _ => unreachable!("not a 2-contact"),
        }
    }

    /// Normal of a minor-kind element.
    fn normal(&self, e: &Element) -> Result<PVec3<T>, ApolyError> {
        let facet = |p: &[Vec3<T>]| -> Result<Vec3<T>, ApolyError> {
            let n = (&p[1] - &p[0]).cross(&(&p[2] - &p[0]));
            if n.is_zero() {
                return Err(ApolyError::DegenerateFeature(format!(
                    "facet of {e} is collinear"
                )));
            }
            Ok(n)
        };
        match (e.o.len(), e.r.len()) {
            (3, 0) => Ok(facet(&self.os(e))?.lift()),
            (0, 3) => Ok(facet(&self.rs(e))?.rot()),
            (2, 2) => {
                let (o, r) = (self.os(e), self.rs(e));
                Ok((&o[1] - &o[0]).lift().cross(&(&r[1] - &r[0]).rot()))
            }
            _ => Err(ApolyError::Malformed(format!("{e} is not a minor element"))),
        }
    }

    /// Edge directions spanned by a parallel-kind element.
    fn edges(&self, e: &Element, out: &mut Vec<PVec3<T>>) {
        let o = self.os(e);
        for w in o.iter().skip(1) {
            out.push((w - &o[0]).lift());
        }
        let r = self.rs(e);
        for w in r.iter().skip(1) {
            out.push((w - &r[0]).rot());
        }
    }
}

fn det4<T: Scalar>(rows: &[ContactPoly<T>]) -> Poly<T> {
    let mut acc = Poly::zero();
    for i in 0..4 {
        let others: Vec<&PVec3<T>> = (0..4).filter(|&j| j != i).map(|j| &rows[j].n).collect();
        let m = det3(others[0], others[1], others[2]);
        let term = &m * &rows[i].k;
        acc = if i % 2 == 0 {
            &acc - &term
        } else {
            &acc + &term
        };
    }
    acc
}

/// The angle polynomial of `a` before normalization, with coordinates
/// supplied by `coord`.
pub fn derive<T, F>(a: &APoly, coord: &F) -> Result<Poly<T>, ApolyError>
where
    T: Scalar,
    F: Fn(VertexRef) -> Vec3<T>,
{
    let cx = Ctx {
        coord,
        _t: std::marker::PhantomData,
    };
    let els = a.elements();
    let one_plus = Poly::<T>::one_plus_t2();
    Ok(match a.kind() {
        Kind::Contacts(Profile::FourOne) => {
            let rows = els
                .iter()
                .map(|e| cx.contact(e))
                .collect::<Result<Vec<_>, _>>()?;
            det4(&rows)
        }
        Kind::Contacts(Profile::TwoOneOne) => {
            let two = els
                .iter()
                .find(|e| e.size() == 3)
                .expect("profile has a 2-contact");
            let ones = els
                .iter()
                .filter(|e| e.size() != 3)
                .map(|e| cx.contact(e))
                .collect::<Result<Vec<_>, _>>()?;
            let (u, v) = cx.line(two);
            let b = |c: &ContactPoly<T>| &c.n.dot(&v) + &(&one_plus * &c.k);
            let (b1, b2) = (b(&ones[0]), b(&ones[1]));
            &(&b1 * &ones[1].n.dot(&u)) - &(&b2 * &ones[0].n.dot(&u))
        }
        Kind::Contacts(Profile::TwoTwo) => {
            let (u1, v1) = cx.line(&els[0]);
            let (u2, v2) = cx.line(&els[1]);
            det3(&u1, &u2, &(&v2 - &v1))
        }
        Kind::Contacts(Profile::ThreeOne) => {
            let (three, one) = (&els[0], &els[1]);
            let c = cx.contact(one)?;
            let d = &cx.o(three.o[0]).lift().scale(&one_plus) - &cx.r(three.r[0]).rot();
            &c.n.dot(&d) + &(&one_plus * &c.k)
        }
        Kind::Parallel => {
            let mut edges = Vec::with_capacity(3);
            for e in els {
                cx.edges(e, &mut edges);
            }
            det3(&edges[0], &edges[1], &edges[2])
        }
        Kind::Minor => {
            let n = els
                .iter()
                .map(|e| cx.normal(e))
                .collect::<Result<Vec<_>, _>>()?;
            det3(&n[0], &n[1], &n[2])
        }
    })
}

/// Removes every factor `1+t²`, then makes the result primitive with a
/// positive leading coefficient.
pub fn normalize_integer(p: &Poly<BigInt>) -> UPoly {
    normalize(&p.strip_one_plus_t2().0)
}

/// Removes every factor `1+t²` and makes the result monic. Zero stays zero.
pub fn normalize_mod<const P: u64>(p: &Poly<Fp<P>>) -> Poly<Fp<P>> {
    let s = p.strip_one_plus_t2().0;
    match s.lc() {
        None => s,
        Some(lc) => s.scale(&lc.inv().expect("nonzero leading coefficient")),
    }
}

/// The normalized integer angle polynomial of `a` with exact coordinates.
pub fn univariate_from_apoly(a: &APoly, va: &VertexAssignment) -> Result<UPoly, ApolyError> {
    let ints = va.scaled_integers(&a.vertices())?;
    univariate_int(a, &|v| ints[&v].clone())
}

/// Normalized integer angle polynomial with integer coordinates.
pub fn univariate_int<F>(a: &APoly, coord: &F) -> Result<UPoly, ApolyError>
where
    F: Fn(VertexRef) -> Vec3<BigInt>,
{
    Ok(normalize_integer(&derive(a, coord)?))
}

/// Normalized angle polynomial modulo `P` (monic form).
pub fn univariate_mod<const P: u64, F>(a: &APoly, coord: &F) -> Result<Poly<Fp<P>>, ApolyError>
where
    F: Fn(VertexRef) -> Vec3<Fp<P>>,
{
    Ok(normalize_mod(&derive(a, coord)?))
}

/// Is the normalized polynomial a constant (including zero)?
pub fn is_constant_univariate(p: &UPoly) -> bool {
    p.degree().is_none_or(|d| d == 0)
}
