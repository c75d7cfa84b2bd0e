//! Contact-facet interval conditions, structure-change event a-polys and
//! post-event signs for a polyhedron `R` rotating about the z axis while
//! translating against a fixed polyhedron `O`.
//!
//! Facets of both polyhedra are triangles listed counterclockwise when seen
//! from outside, so `(b - a) × (c - a)` is the outward normal.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use thiserror::Error;

use crate::apoly::{APoly, Element, Kind, Profile, VertexRef};
use crate::arith::Sign;
use crate::error::ApolyError;
use crate::geom::{contact_polynomial, det3, rotate_point, ContactPoly, ContactType, Vec3};
use crate::identity::{predicate_sign, AlgebraicNumber, IdentityError, ZeroClass};
use crate::poly::Poly;
use crate::table::FactorTable;
use crate::univariate::{derive, parse_rational, VertexAssignment};

type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("malformed features: {0}")]
    MalformedFeatures(String),
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error(transparent)]
    Apoly(#[from] ApolyError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
}

/// A generic contact between a feature of `O` and a feature of `R`, with
/// the features' vertices in their given (oriented) order.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactPair {
    pub variant: ContactType,
    pub o: Vec<u32>,
    pub r: Vec<u32>,
    pub coords: VertexAssignment,
}

fn arity(variant: ContactType) -> (usize, usize) {
    match variant {
        ContactType::FacetVertex => (3, 1),
        ContactType::VertexFacet => (1, 3),
        ContactType::EdgeEdge => (2, 2),
    }
}

fn distinct(v: &[u32]) -> bool {
    v.iter().collect::<BTreeSet<_>>().len() == v.len()
}

fn sorted(v: &[u32]) -> Vec<u32> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

impl ContactPair {
    pub fn new(
        variant: ContactType,
        o: &[u32],
        r: &[u32],
        coords: VertexAssignment,
    ) -> Result<Self, SweepError> {
        if (o.len(), r.len()) != arity(variant) || !distinct(o) || !distinct(r) {
            return Err(SweepError::MalformedFeatures(format!(
                "{variant:?} needs {:?} distinct vertices, got {o:?} and {r:?}",
                arity(variant)
            )));
        }
        let pair = ContactPair {
            variant,
            o: o.to_vec(),
            r: r.to_vec(),
            coords,
        };
        for v in pair.vertex_refs() {
            pair.coords
                .get(v)
                .ok_or_else(|| ApolyError::MissingVertex(v.to_string()))?;
        }
        Ok(pair)
    }

    /// Infers the variant from the feature sizes.
    pub fn from_features(
        o: &[u32],
        r: &[u32],
        coords: VertexAssignment,
    ) -> Result<Self, SweepError> {
        let variant = match (o.len(), r.len()) {
            (3, 1) => ContactType::FacetVertex,
            (1, 3) => ContactType::VertexFacet,
            (2, 2) => ContactType::EdgeEdge,
            (a, b) => {
                return Err(SweepError::MalformedFeatures(format!(
                    "no contact has {a} O and {b} R vertices"
                )))
            }
        };
        ContactPair::new(variant, o, r, coords)
    }

    fn vertex_refs(&self) -> impl Iterator<Item = VertexRef> + '_ {
        self.o
            .iter()
            .map(|&i| VertexRef::o(i))
            .chain(self.r.iter().map(|&i| VertexRef::r(i)))
    }

    fn po(&self, i: u32) -> Result<&Vec3<Q>, SweepError> {
        point(&self.coords, VertexRef::o(i))
    }

    fn pr(&self, i: u32) -> Result<&Vec3<Q>, SweepError> {
        point(&self.coords, VertexRef::r(i))
    }

    /// The contact as an a-poly element.
    pub fn element(&self) -> Element {
        Element::new(&sorted(&self.o), &sorted(&self.r)).expect("arity checked on construction")
    }

    /// The contact polynomial `n(t)·d + k(t)`.
    pub fn contact_poly(&self) -> Result<ContactPoly<Q>, SweepError> {
        let o: Vec<Vec3<Q>> = self
            .o
            .iter()
            .map(|&i| self.po(i).cloned())
            .collect::<Result<_, _>>()?;
        let r: Vec<Vec3<Q>> = self
            .r
            .iter()
            .map(|&i| self.pr(i).cloned())
            .collect::<Result<_, _>>()?;
        Ok(contact_polynomial(self.variant, &o, &r)?)
    }
}

impl fmt::Display for ContactPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.o {
            write!(f, "o{i}")?;
        }
        f.write_str("-")?;
        for i in &self.r {
            write!(f, "r{i}")?;
        }
        Ok(())
    }
}

fn point(va: &VertexAssignment, v: VertexRef) -> Result<&Vec3<Q>, SweepError> {
    va.get(v)
        .ok_or_else(|| SweepError::Apoly(ApolyError::MissingVertex(v.to_string())))
}

/// Parses `o3o1o2-r5` style feature lists, keeping the written order.
pub fn parse_features(s: &str) -> Result<(Vec<u32>, Vec<u32>), SweepError> {
    let bad = || SweepError::MalformedFeatures(format!("cannot parse features `{s}`"));
    let (os, rs) = s.trim().split_once('-').ok_or_else(bad)?;
    let side = |part: &str, c: char| -> Result<Vec<u32>, SweepError> {
        if part.is_empty() {
            return Ok(Vec::new());
        }
        let rest = part.strip_prefix(c).ok_or_else(bad)?;
        rest.split(c)
            .map(|x| x.parse().map_err(|_| bad()))
            .collect()
    };
    Ok((side(os, 'o')?, side(rs, 'r')?))
}

/// The contact set at a fixed `t`: a triangle for vertex/facet contacts and
/// a parallelogram, in cyclic order, for edge/edge contacts.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossSection {
    pub vertices: Vec<Vec3<Q>>,
}

pub fn cross_section(pair: &ContactPair, t: &Q) -> Result<CrossSection, SweepError> {
    let at = |o: u32, r: u32| -> Result<Vec3<Q>, SweepError> {
        Ok(pair.po(o)? - &rotate_point(t, pair.pr(r)?))
    };
    let (o, r) = (&pair.o, &pair.r);
    let vertices = match pair.variant {
        ContactType::FacetVertex => vec![at(o[0], r[0])?, at(o[1], r[0])?, at(o[2], r[0])?],
        ContactType::VertexFacet => vec![at(o[0], r[0])?, at(o[0], r[1])?, at(o[0], r[2])?],
        ContactType::EdgeEdge => vec![
            at(o[0], r[0])?,
            at(o[0], r[1])?,
            at(o[1], r[1])?,
            at(o[1], r[0])?,
        ],
    };
    Ok(CrossSection { vertices })
}

/// One sign condition on a contact facet: an a-poly together with the
/// oriented polynomial whose sign the condition constrains.
#[derive(Clone, Debug, PartialEq)]
pub struct SignCondition {
    pub apoly: APoly,
    /// The oriented angle polynomial, determined by the written vertex order.
    pub oriented: Poly<Q>,
    /// Sign relating [`signed_univariate`](crate::identity::signed_univariate)
    /// of `apoly` to `oriented`; `Zero` when `oriented` vanishes identically.
    pub parity: Sign,
}

impl SignCondition {
    fn new(apoly: APoly, oriented: Poly<Q>, va: &VertexAssignment) -> Result<Self, SweepError> {
        let coord = |v: VertexRef| va.get(v).cloned().unwrap_or_else(Vec3::zero);
        let plain = derive(&apoly, &coord)?.strip_one_plus_t2().0;
        let ours = oriented.strip_one_plus_t2().0;
        let parity = match (plain.lc(), ours.lc()) {
            (Some(a), Some(b)) => Sign::of_rational(&(a * b)),
            _ => Sign::Zero,
        };
        Ok(SignCondition {
            apoly,
            oriented,
            parity,
        })
    }

    pub fn sign_at(&self, t: &Q) -> Sign {
        Sign::of_rational(&self.oriented.eval(t))
    }

    /// Sign of the oriented polynomial just after the root `tau`.
    pub fn sign_after(
        &self,
        tau: &AlgebraicNumber,
        va: &VertexAssignment,
        table: &FactorTable,
    ) -> Result<(Sign, ZeroClass), SweepError> {
        if self.parity == Sign::Zero {
            return Ok((Sign::Zero, ZeroClass::Evaluated));
        }
        let (s, class) = predicate_sign(&self.apoly, va, tau, table)?;
        Ok((times(s, self.parity), class))
    }
}

fn times(a: Sign, b: Sign) -> Sign {
    match a.as_i32() * b.as_i32() {
        1 => Sign::Pos,
        -1 => Sign::Neg,
        _ => Sign::Zero,
    }
}

/// What a condition's sign must be for the contact facet to exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Required {
    Positive,
    Nonzero,
    SameAs(usize),
    OppositeOf(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalCondition {
    pub condition: SignCondition,
    pub required: Required,
}

/// Features adjacent to a contact pair's features.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Incident {
    /// Far endpoints of the edges at the pair's single vertex.
    Edges(Vec<u32>),
    /// Third vertices of the two triangles at each edge of an edge/edge pair.
    Triangles { o: [u32; 2], r: [u32; 2] },
}

fn single(o: &[u32], r: &[u32]) -> Result<APoly, SweepError> {
    Ok(APoly::new(vec![Element::new(&sorted(o), &sorted(r))?])?)
}

/// Sign conditions bounding the `t`-intervals on which the contact facet
/// of `pair` exists.
pub fn facet_interval_apolys(
    pair: &ContactPair,
    incident: &Incident,
) -> Result<Vec<IntervalCondition>, SweepError> {
    let va = &pair.coords;
    let (o, r) = (&pair.o, &pair.r);
    let mismatch = || {
        SweepError::MalformedFeatures(format!("incident features {incident:?} do not fit {pair}"))
    };
    let mut out = Vec::new();
    match (pair.variant, incident) {
        (ContactType::FacetVertex, Incident::Edges(ends)) => {
            let (oh, oi, oj) = (pair.po(o[0])?, pair.po(o[1])?, pair.po(o[2])?);
            let n = (oi - oh).cross(&(oj - oh)).lift();
            let rk = pair.pr(r[0])?;
            for &l in ends {
                if l == r[0] {
                    return Err(mismatch());
                }
                let rl = point(va, VertexRef::r(l))?;
                let oriented = n.dot(&(rl - rk).rot());
                let a = single(o, &[r[0], l])?;
                out.push(IntervalCondition {
                    condition: SignCondition::new(a, oriented, va)?,
                    required: Required::Positive,
                });
            }
        }
        (ContactType::VertexFacet, Incident::Edges(ends)) => {
            let (ri, rj, rk) = (pair.pr(r[0])?, pair.pr(r[1])?, pair.pr(r[2])?);
            let n = (rj - ri).cross(&(rk - ri)).rot();
            let oh = pair.po(o[0])?;
            for &l in ends {
                if l == o[0] {
                    return Err(mismatch());
                }
                let ol = point(va, VertexRef::o(l))?;
                let oriented = (ol - oh).lift().dot(&n);
                let a = single(&[o[0], l], r)?;
                out.push(IntervalCondition {
                    condition: SignCondition::new(a, oriented, va)?,
                    required: Required::Positive,
                });
            }
        }
        (ContactType::EdgeEdge, Incident::Triangles { o: m, r: n }) => {
            let (oh, oi) = (pair.po(o[0])?, pair.po(o[1])?);
            let (rj, rk) = (pair.pr(r[0])?, pair.pr(r[1])?);
            let eo = (oi - oh).lift();
            let er = (rk - rj).rot();
            for (x, &mx) in m.iter().enumerate() {
                if o.contains(&mx) {
                    return Err(mismatch());
                }
                let p = (point(va, VertexRef::o(mx))? - oh).lift();
                let a = single(&[o[0], o[1], mx], r)?;
                out.push(IntervalCondition {
                    condition: SignCondition::new(a, det3(&eo, &er, &p), va)?,
                    required: if x == 0 {
                        Required::Nonzero
                    } else {
                        Required::SameAs(0)
                    },
                });
            }
            for &nx in n {
                if r.contains(&nx) {
                    return Err(mismatch());
                }
                let p = (point(va, VertexRef::r(nx))? - rj).rot();
                let a = single(o, &[r[0], r[1], nx])?;
                out.push(IntervalCondition {
                    condition: SignCondition::new(a, det3(&eo, &er, &p), va)?,
                    required: Required::OppositeOf(0),
                });
            }
        }
        _ => return Err(mismatch()),
    }
    Ok(out)
}

/// Whether the signs (one per condition) satisfy the requirements.
pub fn relation_holds(conds: &[IntervalCondition], signs: &[Sign]) -> bool {
    conds.len() == signs.len()
        && conds.iter().zip(signs).all(|(c, &s)| match c.required {
            Required::Positive => s == Sign::Pos,
            Required::Nonzero => s != Sign::Zero,
            Required::SameAs(i) => s != Sign::Zero && s == signs[i],
            Required::OppositeOf(i) => s != Sign::Zero && s.as_i32() == -signs[i].as_i32(),
        })
}

/// Whether the contact facet exists at the rational parameter `t`.
pub fn interval_holds_at(conds: &[IntervalCondition], t: &Q) -> bool {
    let signs: Vec<Sign> = conds.iter().map(|c| c.condition.sign_at(t)).collect();
    relation_holds(conds, &signs)
}

/// The four structure-change event types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventType {
    /// A contact-facet vertex meets the plane of a contact facet.
    IIa,
    /// Two contact-facet edges meet.
    IIb,
    /// An edge/facet intersection vertex meets the plane of a facet.
    III,
    /// Four contact-facet planes meet in a point.
    IV,
}

impl EventType {
    pub const ALL: [EventType; 4] = [
        EventType::IIa,
        EventType::IIb,
        EventType::III,
        EventType::IV,
    ];

    pub fn profile(self) -> Profile {
        match self {
            EventType::IIa => Profile::ThreeOne,
            EventType::IIb => Profile::TwoTwo,
            EventType::III => Profile::TwoOneOne,
            EventType::IV => Profile::FourOne,
        }
    }

    /// Contact counts of the features, in decreasing order.
    fn contacts(self) -> &'static [u32] {
        match self {
            EventType::IIa => &[3, 1],
            EventType::IIb => &[2, 2],
            EventType::III => &[2, 1, 1],
            EventType::IV => &[1, 1, 1, 1],
        }
    }
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for EventType {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EventType::ALL
            .into_iter()
            .find(|e| e.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| SweepError::MalformedFeatures(format!("unknown event type `{s}`")))
    }
}

/// The contacts-kind a-poly whose roots are the events of type `ty` among
/// the given contact elements.
pub fn structure_change_apoly(ty: EventType, features: &[Element]) -> Result<APoly, SweepError> {
    let malformed = |why: String| SweepError::MalformedFeatures(format!("{ty}: {why}"));
    let mut counts = features
        .iter()
        .map(|e| {
            e.element_type()
                .ok()
                .and_then(|t| t.contact_count())
                .ok_or_else(|| malformed(format!("{e} is not a contact")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    counts.sort_unstable_by(|a, b| b.cmp(a));
    if counts != ty.contacts() {
        return Err(malformed(format!(
            "contact counts {counts:?}, expected {:?}",
            ty.contacts()
        )));
    }
    let a = APoly::new(features.to_vec()).map_err(|e| malformed(e.to_string()))?;
    if a.kind() != Kind::Contacts(ty.profile()) {
        return Err(malformed(format!("built a {} a-poly", a.kind())));
    }
    Ok(a)
}

/// Sign of `query` immediately after the event root `tau`.
pub fn event_sign_after(
    tau: &AlgebraicNumber,
    query: &APoly,
    va: &VertexAssignment,
    table: &FactorTable,
) -> Result<(Sign, ZeroClass), SweepError> {
    Ok(predicate_sign(query, va, tau, table)?)
}

/// A triangle mesh read from OFF-style text.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3<Q>>,
    pub triangles: Vec<[u32; 3]>,
}

impl Mesh {
    /// Parses OFF text: optional `OFF` header, a counts line `nv nf [ne]`,
    /// `nv` vertex lines and `nf` lines `3 a b c`. Coordinates are decimals
    /// or fractions, read exactly. `#` starts a comment.
    pub fn parse_off(text: &str) -> Result<Mesh, SweepError> {
        let err = |m: String| SweepError::Mesh(m);
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let mut first = lines.next().ok_or_else(|| err("empty mesh".into()))?;
        if first.eq_ignore_ascii_case("OFF") {
            first = lines
                .next()
                .ok_or_else(|| err("missing counts line".into()))?;
        }
        let counts: Vec<usize> = first
            .split_whitespace()
            .map(|x| {
                x.parse()
                    .map_err(|_| err(format!("bad counts line `{first}`")))
            })
            .collect::<Result<_, _>>()?;
        let (nv, nf) = match counts.as_slice() {
            [nv, nf, ..] => (*nv, *nf),
            _ => return Err(err(format!("bad counts line `{first}`"))),
        };
        let mut mesh = Mesh::default();
        for _ in 0..nv {
            let l = lines
                .next()
                .ok_or_else(|| err("too few vertex lines".into()))?;
            let c: Vec<Q> = l
                .split_whitespace()
                .map(|x| parse_rational(x).ok_or_else(|| err(format!("bad coordinate `{x}`"))))
                .collect::<Result<_, _>>()?;
            let [x, y, z]: [Q; 3] = c
                .try_into()
                .map_err(|_| err(format!("vertex line `{l}`")))?;
            mesh.vertices.push(Vec3([x, y, z]));
        }
        for _ in 0..nf {
            let l = lines
                .next()
                .ok_or_else(|| err("too few face lines".into()))?;
            let f: Vec<u32> = l
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| err(format!("bad face entry `{x}`"))))
                .collect::<Result<_, _>>()?;
            match f.as_slice() {
                [3, a, b, c] if [a, b, c].iter().all(|&&i| (i as usize) < nv) => {
                    mesh.triangles.push([*a, *b, *c])
                }
                _ => return Err(err(format!("face line `{l}` is not a valid triangle"))),
            }
        }
        Ok(mesh)
    }

    /// Vertices joined to `v` by an edge.
    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        let mut out = BTreeSet::new();
        for t in &self.triangles {
            if let Some(k) = t.iter().position(|&x| x == v) {
                out.insert(t[(k + 1) % 3]);
                out.insert(t[(k + 2) % 3]);
            }
        }
        out.into_iter().collect()
    }

    /// Third vertices of the triangles containing the directed edge `a→b`
    /// and `b→a`.
    pub fn edge_triangles(&self, a: u32, b: u32) -> Option<[u32; 2]> {
        let third = |from: u32, to: u32| {
            self.triangles.iter().find_map(|t| {
                (0..3)
                    .find(|&k| t[k] == from && t[(k + 1) % 3] == to)
                    .map(|k| t[(k + 2) % 3])
            })
        };
        Some([third(a, b)?, third(b, a)?])
    }

    /// Is `f` (in any rotation) a triangle of the mesh?
    pub fn has_facet(&self, f: &[u32]) -> bool {
        self.triangles
            .iter()
            .any(|t| (0..3).any(|k| (0..3).all(|i| t[(k + i) % 3] == f[i])))
    }
}

/// Coordinates `o<i>` from `o_mesh` and `r<j>` from `r_mesh`.
pub fn mesh_assignment(o_mesh: &Mesh, r_mesh: &Mesh) -> VertexAssignment {
    let o = o_mesh
        .vertices
        .iter()
        .enumerate()
        .map(|(i, p)| (VertexRef::o(i as u32), p.clone()));
    let r = r_mesh
        .vertices
        .iter()
        .enumerate()
        .map(|(i, p)| (VertexRef::r(i as u32), p.clone()));
    o.chain(r).collect()
}

/// Builds a contact pair and its incident features from two meshes: `O`
/// vertices are `o<index>` and `R` vertices `r<index>`.
pub fn pair_from_meshes(
    o_mesh: &Mesh,
    r_mesh: &Mesh,
    o: &[u32],
    r: &[u32],
) -> Result<(ContactPair, Incident), SweepError> {
    let pair = ContactPair::from_features(o, r, mesh_assignment(o_mesh, r_mesh))?;
    let missing = |what: String| SweepError::Mesh(format!("{what} is not in the mesh"));
    let incident = match pair.variant {
        ContactType::FacetVertex => {
            if !o_mesh.has_facet(o) {
                return Err(missing(format!("O facet {o:?}")));
            }
            Incident::Edges(r_mesh.neighbors(r[0]))
        }
        ContactType::VertexFacet => {
            if !r_mesh.has_facet(r) {
                return Err(missing(format!("R facet {r:?}")));
            }
            Incident::Edges(o_mesh.neighbors(o[0]))
        }
        ContactType::EdgeEdge => Incident::Triangles {
            o: o_mesh
                .edge_triangles(o[0], o[1])
                .ok_or_else(|| missing(format!("O edge {o:?}")))?,
            r: r_mesh
                .edge_triangles(r[0], r[1])
                .ok_or_else(|| missing(format!("R edge {r:?}")))?,
        },
    };
    Ok((pair, incident))
}

/// Distance-like quantity `det(b - a, c - a, p - a)`, zero iff `p` lies on
/// the plane through `a, b, c`.
pub fn plane_volume(a: &Vec3<Q>, b: &Vec3<Q>, c: &Vec3<Q>, p: &Vec3<Q>) -> Q {
    (b - a).cross(&(c - a)).dot(&(p - a))
}
