#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;
use std::sync::OnceLock;

use apoly::enumerate::enumerate_classes;
use apoly::geom::Vec3;
use apoly::sweep::{structure_change_apoly, EventType};
use apoly::table::{build, FactorTable, TableConfig};
use apoly::{APoly, Element, VertexAssignment, VertexRef};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn table_path() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("factor-table.txt")
}

pub fn store_table(t: &FactorTable) {
    let path = table_path();
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, t.to_text()).expect("write cached table");
    std::fs::rename(&tmp, &path).expect("move cached table");
}

/// The factor table with default settings, read from the build cache when
/// present.
pub fn table() -> &'static FactorTable {
    static TABLE: OnceLock<FactorTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        if let Ok(text) = std::fs::read_to_string(table_path()) {
            if let Ok(t) = FactorTable::from_text(&text) {
                return t;
            }
        }
        let reps = enumerate_classes().representatives;
        let t = build(&reps, &TableConfig::default()).expect("table builds").table;
        store_table(&t);
        t
    })
}

pub fn small_int(rng: &mut ChaCha8Rng, r: i64) -> Q {
    q(rng.gen_range(-r..=r))
}

pub fn random_point(rng: &mut ChaCha8Rng, r: i64) -> Vec3<Q> {
    Vec3([small_int(rng, r), small_int(rng, r), small_int(rng, r)])
}

/// `Θ(t)p`, rotation about z by the angle with `tan(θ/2) = t`.
pub fn rot(t: &Q, p: &Vec3<Q>) -> Vec3<Q> {
    let den = Q::one() + t * t;
    let c = (Q::one() - t * t) / &den;
    let s = (t + t) / &den;
    let [x, y, z] = &p.0;
    Vec3([&c * x - &s * y, &s * x + &c * y, z.clone()])
}

pub fn unrot(t: &Q, p: &Vec3<Q>) -> Vec3<Q> {
    rot(&-t, p)
}

fn add(a: &Vec3<Q>, b: &Vec3<Q>) -> Vec3<Q> {
    a + b
}

fn sub(a: &Vec3<Q>, b: &Vec3<Q>) -> Vec3<Q> {
    a - b
}

fn scale(a: &Vec3<Q>, s: &Q) -> Vec3<Q> {
    a.scale(s)
}

fn det(a: &Vec3<Q>, b: &Vec3<Q>, c: &Vec3<Q>) -> Q {
    a.dot(&b.cross(c))
}

/// `det(b - a, c - a, p - a)`.
pub fn plane_offset(plane: &[Vec3<Q>; 3], p: &Vec3<Q>) -> Q {
    let [a, b, c] = plane;
    det(&sub(b, a), &sub(c, a), &sub(p, a))
}

/// Incremental vertex allocator with coordinates.
#[derive(Default)]
pub struct Builder {
    pub va: VertexAssignment,
    next_o: u32,
    next_r: u32,
}

impl Builder {
    pub fn o(&mut self, p: Vec3<Q>) -> u32 {
        let i = self.next_o;
        self.next_o += 1;
        self.va.insert(VertexRef::o(i), p);
        i
    }

    pub fn r(&mut self, p: Vec3<Q>) -> u32 {
        let i = self.next_r;
        self.next_r += 1;
        self.va.insert(VertexRef::r(i), p);
        i
    }

    pub fn po(&self, i: u32) -> Vec3<Q> {
        self.va.get(VertexRef::o(i)).unwrap().clone()
    }

    pub fn pr(&self, i: u32) -> Vec3<Q> {
        self.va.get(VertexRef::r(i)).unwrap().clone()
    }
}

/// A contact feature in translation space at a fixed parameter.
#[derive(Clone, Debug)]
pub struct Feature {
    pub o: Vec<u32>,
    pub r: Vec<u32>,
}

impl Feature {
    pub fn element(&self) -> Element {
        let mut o = self.o.clone();
        let mut r = self.r.clone();
        o.sort_unstable();
        r.sort_unstable();
        Element::new(&o, &r).unwrap()
    }

    /// Facets span a plane and edges have distinct ends.
    pub fn is_generic(&self, b: &Builder) -> bool {
        let o: Vec<Vec3<Q>> = self.o.iter().map(|&i| b.po(i)).collect();
        let r: Vec<Vec3<Q>> = self.r.iter().map(|&i| b.pr(i)).collect();
        let ok = |v: &[Vec3<Q>]| match v {
            [a, c] => a != c,
            [a, c, d] => !sub(c, a).cross(&sub(d, a)).is_zero(),
            _ => true,
        };
        ok(&o) && ok(&r)
    }

    /// Three points spanning the plane of a 1-contact at `t`.
    pub fn plane(&self, b: &Builder, t: &Q) -> [Vec3<Q>; 3] {
        let d = |o: u32, r: u32| sub(&b.po(o), &rot(t, &b.pr(r)));
        match (self.o.as_slice(), self.r.as_slice()) {
            (&[h, i, j], &[k]) => [d(h, k), d(i, k), d(j, k)],
            (&[h], &[i, j, k]) => [d(h, i), d(h, j), d(h, k)],
            (&[h, i], &[j, k]) => [d(h, j), d(h, k), d(i, j)],
            _ => panic!("not a 1-contact"),
        }
    }

    /// Two points on the line of a 2-contact at `t`.
    pub fn line(&self, b: &Builder, t: &Q) -> [Vec3<Q>; 2] {
        let d = |o: u32, r: u32| sub(&b.po(o), &rot(t, &b.pr(r)));
        match (self.o.as_slice(), self.r.as_slice()) {
            (&[h, i], &[k]) => [d(h, k), d(i, k)],
            (&[h], &[i, j]) => [d(h, i), d(h, j)],
            _ => panic!("not a 2-contact"),
        }
    }
}

fn nonzero(rng: &mut ChaCha8Rng, r: i64) -> Q {
    loop {
        let x = rng.gen_range(-r..=r);
        if x != 0 {
            return q(x);
        }
    }
}

pub fn random_one_contact(b: &mut Builder, rng: &mut ChaCha8Rng) -> Feature {
    match rng.gen_range(0..3) {
        0 => Feature {
            o: (0..3).map(|_| b.o(random_point(rng, 9))).collect(),
            r: vec![b.r(random_point(rng, 9))],
        },
        1 => Feature {
            o: vec![b.o(random_point(rng, 9))],
            r: (0..3).map(|_| b.r(random_point(rng, 9))).collect(),
        },
        _ => Feature {
            o: (0..2).map(|_| b.o(random_point(rng, 9))).collect(),
            r: (0..2).map(|_| b.r(random_point(rng, 9))).collect(),
        },
    }
}

pub fn random_two_contact(b: &mut Builder, rng: &mut ChaCha8Rng) -> Feature {
    if rng.gen_bool(0.5) {
        Feature {
            o: (0..2).map(|_| b.o(random_point(rng, 9))).collect(),
            r: vec![b.r(random_point(rng, 9))],
        }
    } else {
        Feature {
            o: vec![b.o(random_point(rng, 9))],
            r: (0..2).map(|_| b.r(random_point(rng, 9))).collect(),
        }
    }
}

/// A 1-contact whose plane at `t` passes through `x`; its last vertex is
/// solved for.
pub fn one_contact_through(b: &mut Builder, rng: &mut ChaCha8Rng, t: &Q, x: &Vec3<Q>) -> Feature {
    let (lam, mu) = (nonzero(rng, 3), nonzero(rng, 3));
    match rng.gen_range(0..3) {
        0 => {
            let rk = random_point(rng, 9);
            let oh = random_point(rng, 9);
            let oi = random_point(rng, 9);
            let p = add(x, &rot(t, &rk));
            let oj = add(&p, &add(&scale(&sub(&oh, &p), &lam), &scale(&sub(&oi, &p), &mu)));
            Feature {
                o: vec![b.o(oh), b.o(oi), b.o(oj)],
                r: vec![b.r(rk)],
            }
        }
        1 => {
            let oh = random_point(rng, 9);
            let ri = random_point(rng, 9);
            let rj = random_point(rng, 9);
            let p = unrot(t, &sub(&oh, x));
            let rk = add(&p, &add(&scale(&sub(&ri, &p), &lam), &scale(&sub(&rj, &p), &mu)));
            Feature {
                o: vec![b.o(oh)],
                r: vec![b.r(ri), b.r(rj), b.r(rk)],
            }
        }
        _ => {
            let oh = random_point(rng, 9);
            let rj = random_point(rng, 9);
            let rk = random_point(rng, 9);
            let r = add(&rj, &scale(&sub(&rk, &rj), &lam));
            let oi = add(&oh, &scale(&sub(&add(x, &rot(t, &r)), &oh), &mu));
            Feature {
                o: vec![b.o(oh), b.o(oi)],
                r: vec![b.r(rj), b.r(rk)],
            }
        }
    }
}

/// A 2-contact whose line at `t` passes through `x`.
pub fn two_contact_through(b: &mut Builder, rng: &mut ChaCha8Rng, t: &Q, x: &Vec3<Q>) -> Feature {
    let k = nonzero(rng, 3);
    if rng.gen_bool(0.5) {
        let rk = random_point(rng, 9);
        let oa = random_point(rng, 9);
        let ob = add(&oa, &scale(&sub(&add(x, &rot(t, &rk)), &oa), &k));
        Feature {
            o: vec![b.o(oa), b.o(ob)],
            r: vec![b.r(rk)],
        }
    } else {
        let oh = random_point(rng, 9);
        let ri = random_point(rng, 9);
        let p = unrot(t, &sub(&oh, x));
        let rj = add(&ri, &scale(&sub(&p, &ri), &k));
        Feature {
            o: vec![b.o(oh)],
            r: vec![b.r(ri), b.r(rj)],
        }
    }
}

/// Intersection of three planes, if they meet in a single point.
pub fn meet3(p: &[[Vec3<Q>; 3]; 3]) -> Option<Vec3<Q>> {
    let n: Vec<Vec3<Q>> = p
        .iter()
        .map(|[a, b, c]| sub(b, a).cross(&sub(c, a)))
        .collect();
    let k: Vec<Q> = p.iter().zip(&n).map(|(pl, n)| n.dot(&pl[0])).collect();
    let d = det(&n[0], &n[1], &n[2]);
    if d.is_zero() {
        return None;
    }
    let cols = |i: usize| Vec3([n[0].0[i].clone(), n[1].0[i].clone(), n[2].0[i].clone()]);
    let kv = Vec3([k[0].clone(), k[1].clone(), k[2].clone()]);
    let solve = |i: usize| {
        let mut c = [cols(0), cols(1), cols(2)];
        c[i] = kv.clone();
        det(&c[0], &c[1], &c[2]) / &d
    };
    Some(Vec3([solve(0), solve(1), solve(2)]))
}

/// Intersection of a line and a plane, if unique.
pub fn meet_line_plane(l: &[Vec3<Q>; 2], p: &[Vec3<Q>; 3]) -> Option<Vec3<Q>> {
    let n = sub(&p[1], &p[0]).cross(&sub(&p[2], &p[0]));
    let dir = sub(&l[1], &l[0]);
    let den = n.dot(&dir);
    if den.is_zero() {
        return None;
    }
    let s = n.dot(&sub(&p[0], &l[0])) / den;
    Some(add(&l[0], &scale(&dir, &s)))
}

/// A structure-change instance whose geometric condition holds at `t`.
pub struct Planted {
    pub ty: EventType,
    pub apoly: APoly,
    pub va: VertexAssignment,
    pub t: Q,
    /// The distance- or volume-like quantity, computed from the geometry.
    pub geometric: Q,
}

/// The event's geometric quantity at `t`: distance-like offset of a point
/// from a plane, or the volume spanned by two segments. `None` when the
/// intersection defining the point is not unique.
pub fn geometric_at(ty: EventType, fs: &[Feature], b: &Builder, t: &Q) -> Option<Q> {
    Some(match ty {
        EventType::IIa => {
            let x = sub(&b.po(fs[0].o[0]), &rot(t, &b.pr(fs[0].r[0])));
            plane_offset(&fs[1].plane(b, t), &x)
        }
        EventType::IIb => {
            let [a1, a2] = fs[0].line(b, t);
            let [b1, b2] = fs[1].line(b, t);
            plane_offset(&[a1, a2, b1], &b2)
        }
        EventType::III => {
            let x = meet_line_plane(&fs[0].line(b, t), &fs[1].plane(b, t))?;
            plane_offset(&fs[2].plane(b, t), &x)
        }
        EventType::IV => {
            let planes = [fs[0].plane(b, t), fs[1].plane(b, t), fs[2].plane(b, t)];
            plane_offset(&fs[3].plane(b, t), &meet3(&planes)?)
        }
    })
}

pub fn plant(ty: EventType, t: &Q, rng: &mut ChaCha8Rng) -> Planted {
    loop {
        let mut b = Builder::default();
        let features = match ty {
            EventType::IIa => {
                let f0 = Feature {
                    o: vec![b.o(random_point(rng, 9))],
                    r: vec![b.r(random_point(rng, 9))],
                };
                let x = sub(&b.po(f0.o[0]), &rot(t, &b.pr(f0.r[0])));
                let f1 = one_contact_through(&mut b, rng, t, &x);
                vec![f0, f1]
            }
            EventType::IIb => {
                let f0 = random_two_contact(&mut b, rng);
                let [a1, a2] = f0.line(&b, t);
                let s = small_int(rng, 4);
                let x = add(&a1, &scale(&sub(&a2, &a1), &s));
                let f1 = two_contact_through(&mut b, rng, t, &x);
                vec![f0, f1]
            }
            EventType::III => {
                let f0 = random_two_contact(&mut b, rng);
                let f1 = random_one_contact(&mut b, rng);
                let Some(x) = meet_line_plane(&f0.line(&b, t), &f1.plane(&b, t)) else {
                    continue;
                };
                let f2 = one_contact_through(&mut b, rng, t, &x);
                vec![f0, f1, f2]
            }
            EventType::IV => {
                let mut fs: Vec<Feature> = (0..3).map(|_| random_one_contact(&mut b, rng)).collect();
                let planes = [fs[0].plane(&b, t), fs[1].plane(&b, t), fs[2].plane(&b, t)];
                let Some(x) = meet3(&planes) else { continue };
                fs.push(one_contact_through(&mut b, rng, t, &x));
                fs
            }
        };
        if !features.iter().all(|f| f.is_generic(&b)) || geometric_planes_degenerate(&features, &b, t) {
            continue;
        }
        let Some(geometric) = geometric_at(ty, &features, &b, t) else {
            continue;
        };
        // The condition must not hold for every parameter.
        let other = t + Q::one();
        if geometric_planes_degenerate(&features, &b, &other)
            || geometric_at(ty, &features, &b, &other).is_none_or(|g| g.is_zero())
        {
            continue;
        }
        let els: Vec<Element> = features.iter().map(Feature::element).collect();
        let Ok(apoly) = structure_change_apoly(ty, &els) else {
            continue;
        };
        return Planted {
            ty,
            apoly,
            va: b.va,
            t: t.clone(),
            geometric,
        };
    }
}

fn geometric_planes_degenerate(features: &[Feature], b: &Builder, t: &Q) -> bool {
    features.iter().any(|f| {
        if f.o.len() + f.r.len() != 4 {
            return false;
        }
        let [a, c, d] = f.plane(b, t);
        sub(&c, &a).cross(&sub(&d, &a)).is_zero()
    })
}

/// A random rational parameter `n/d` with small numerator and denominator.
pub fn random_parameter(rng: &mut ChaCha8Rng) -> Q {
    qf(rng.gen_range(-12..=12), rng.gen_range(1..=6))
}
