mod common;

use apoly::arith::{Interval, Sign};
use apoly::canonical::representative_of;
use apoly::geom::{ContactType, Vec3};
use apoly::identity::{factor_apoly, signed_univariate, AlgebraicNumber, ZeroClass};
use apoly::poly::Poly;
use apoly::sweep::{
    cross_section, event_sign_after, facet_interval_apolys, interval_holds_at, pair_from_meshes,
    structure_change_apoly, ContactPair, EventType, Incident, Mesh, Required,
};
use apoly::univariate::{derive, univariate_from_apoly};
use apoly::upoly::{sign_at, sign_at_rational};
use apoly::{Kind, Profile, VertexAssignment, VertexRef};
use common::*;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn assign(os: &[Vec3<Q>], rs: &[Vec3<Q>]) -> VertexAssignment {
    let o = os.iter().enumerate().map(|(i, p)| (VertexRef::o(i as u32), p.clone()));
    let r = rs.iter().enumerate().map(|(i, p)| (VertexRef::r(i as u32), p.clone()));
    o.chain(r).collect()
}

fn pt(x: i64, y: i64, z: i64) -> Vec3<Q> {
    Vec3([q(x), q(y), q(z)])
}

#[test]
fn cross_section_edge_edge_at_zero() {
    let os = [pt(1, 2, 3), pt(-1, 0, 4)];
    let rs = [pt(0, 1, -2), pt(5, 5, 5)];
    let p = ContactPair::new(ContactType::EdgeEdge, &[0, 1], &[0, 1], assign(&os, &rs)).unwrap();
    let cs = cross_section(&p, &Q::zero()).unwrap();
    assert_eq!(
        cs.vertices,
        vec![&os[0] - &rs[0], &os[0] - &rs[1], &os[1] - &rs[1], &os[1] - &rs[0]]
    );
}

#[test]
fn cross_section_vertices_on_contact_plane() {
    let mut g = rng(11);
    for case in 0..300 {
        let os: Vec<Vec3<Q>> = (0..3).map(|_| random_point(&mut g, 20)).collect();
        let rs: Vec<Vec3<Q>> = (0..3).map(|_| random_point(&mut g, 20)).collect();
        let va = assign(&os, &rs);
        let (o, r): (&[u32], &[u32]) = match case % 3 {
            0 => (&[0, 1, 2], &[0]),
            1 => (&[0], &[0, 1, 2]),
            _ => (&[0, 1], &[0, 1]),
        };
        let Ok(pair) = ContactPair::from_features(o, r, va) else { continue };
        let Ok(cp) = pair.contact_poly() else { continue };
        let t = random_parameter(&mut g);
        for v in cross_section(&pair, &t).unwrap().vertices {
            assert!(cp.eval(&t, &v).is_zero(), "case {case}: {pair} at t={t}");
        }
    }
}

fn enclose_div(n: Interval, d: Interval) -> Interval {
    assert!(d.lo > 0.0);
    let c = [n.lo / d.lo, n.lo / d.hi, n.hi / d.lo, n.hi / d.hi];
    let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Interval::new(lo.next_down(), hi.next_up())
}

/// Encloses `o - Θ(T) r` over the parameter interval `T`.
fn enclose_vertex(o: &Vec3<Q>, r: &Vec3<Q>, tl: &Q, th: &Q) -> [Interval; 3] {
    let t = Interval::new(
        Interval::from_rational(tl).lo,
        Interval::from_rational(th).hi,
    );
    let iv = |x: &Q| Interval::from_rational(x);
    let one = Interval::point(1.0);
    let two = Interval::point(2.0);
    let t2 = {
        let a = t * t;
        Interval::new(a.lo.max(0.0), a.hi)
    };
    let d = one + t2;
    let c = one - t2;
    let s = two * t;
    let [x, y, z] = &r.0;
    let rx = enclose_div(c * iv(x) - s * iv(y), d);
    let ry = enclose_div(s * iv(x) + c * iv(y), d);
    [iv(&o.0[0]) - rx, iv(&o.0[1]) - ry, iv(&o.0[2]) - iv(z)]
}

#[test]
fn cross_section_is_continuous() {
    let mut g = rng(12);
    for _ in 0..300 {
        let os: Vec<Vec3<Q>> = (0..3).map(|_| random_point(&mut g, 50)).collect();
        let rs: Vec<Vec3<Q>> = (0..3).map(|_| random_point(&mut g, 50)).collect();
        let Ok(pair) = ContactPair::from_features(&[0, 1, 2], &[0], assign(&os, &rs)) else {
            continue;
        };
        let t = random_parameter(&mut g);
        let dt = qf(1, 1 << g.gen_range(8..30));
        let t2 = &t + &dt;
        let a = cross_section(&pair, &t).unwrap();
        let b = cross_section(&pair, &t2).unwrap();
        let scale = (t.abs() + q(1)).to_f64().unwrap();
        for (i, (va, vb)) in a.vertices.iter().zip(&b.vertices).enumerate() {
            let e = enclose_vertex(&os[i], &rs[0], &t, &t2);
            let size = rs[0].0.iter().map(|c| c.abs().to_f64().unwrap()).sum::<f64>() + 1.0;
            for k in 0..3 {
                assert!(e[k].contains(&va.0[k]) && e[k].contains(&vb.0[k]));
                let bound = 16.0 * scale * scale * size * dt.to_f64().unwrap();
                assert!(e[k].width() <= bound, "width {} > {bound}", e[k].width());
            }
        }
    }
}

fn degree(p: &apoly::IntPoly) -> usize {
    p.degree().unwrap_or(0)
}

#[test]
fn event_profiles_and_degrees() {
    let mut g = rng(13);
    for ty in EventType::ALL {
        for _ in 0..50 {
            let p = plant(ty, &random_parameter(&mut g), &mut g);
            assert_eq!(p.apoly.kind(), Kind::Contacts(ty.profile()));
            let u = univariate_from_apoly(&p.apoly, &p.va).unwrap();
            assert!(degree(&u) <= Kind::Contacts(ty.profile()).degree_bound());
        }
    }
    let e = |o: &[u32], r: &[u32]| apoly::Element::new(o, r).unwrap();
    let iia = structure_change_apoly(EventType::IIa, &[e(&[0, 1, 2], &[0]), e(&[3], &[1])]).unwrap();
    assert_eq!(iia.kind(), Kind::Contacts(Profile::ThreeOne));
    let iv = structure_change_apoly(
        EventType::IV,
        &[e(&[0, 1, 2], &[0]), e(&[3], &[1, 2, 3]), e(&[4, 5], &[4, 5]), e(&[6, 7, 8], &[6])],
    )
    .unwrap();
    let mut g = rng(14);
    let mut va = VertexAssignment::new();
    for v in iv.vertices() {
        va.insert(v, random_point(&mut g, 1000));
    }
    assert_eq!(degree(&univariate_from_apoly(&iv, &va).unwrap()), 6);
}

#[test]
fn malformed_event_features() {
    let e = |o: &[u32], r: &[u32]| apoly::Element::new(o, r).unwrap();
    assert!(structure_change_apoly(EventType::IIa, &[e(&[0, 1], &[0]), e(&[2, 3], &[1])]).is_err());
    assert!(structure_change_apoly(EventType::IIb, &[e(&[0], &[0])]).is_err());
    assert!(structure_change_apoly(EventType::III, &[e(&[0, 1], &[0]), e(&[2, 3], &[])]).is_err());
    assert!(structure_change_apoly(
        EventType::IV,
        &[e(&[0, 1, 2], &[0]), e(&[3], &[1, 2, 3]), e(&[4, 5], &[4, 5]), e(&[6], &[6])]
    )
    .is_err());
}

#[test]
fn planted_events_vanish() {
    let mut g = rng(15);
    for ty in EventType::ALL {
        for i in 0..100 {
            let t = if i == 0 { Q::zero() } else { random_parameter(&mut g) };
            let p = plant(ty, &t, &mut g);
            assert!(p.geometric.is_zero(), "{ty}: geometry does not vanish");
            let u = univariate_from_apoly(&p.apoly, &p.va).unwrap();
            assert!(!u.is_zero(), "{ty}: {} is identically zero", p.apoly);
            assert_eq!(sign_at_rational(&u, &t), Sign::Zero, "{ty}: {} at {t}", p.apoly);
        }
    }
}

#[test]
fn event_representatives_are_in_table() {
    let table = common::table();
    let mut g = rng(16);
    for ty in EventType::ALL {
        for _ in 0..100 {
            let p = plant(ty, &random_parameter(&mut g), &mut g);
            let (rep, _) = representative_of(&p.apoly);
            assert!(table.get(&rep).is_some(), "{} has no entry", p.apoly);
        }
    }
}

fn facet_vertex_setup() -> (ContactPair, Vec<u32>) {
    let os = [pt(0, 0, 0), pt(4, 0, 0), pt(0, 4, 0)];
    let rs = [pt(1, 1, 0), pt(1, 1, -3), pt(3, 1, -2), pt(1, 2, -5)];
    let pair = ContactPair::new(ContactType::FacetVertex, &[0, 2, 1], &[0], assign(&os, &rs)).unwrap();
    (pair, vec![1, 2, 3])
}

#[test]
fn facet_vertex_conditions() {
    let (pair, ends) = facet_vertex_setup();
    let conds = facet_interval_apolys(&pair, &Incident::Edges(ends.clone())).unwrap();
    assert_eq!(conds.len(), 3);
    for (c, l) in conds.iter().zip(&ends) {
        assert_eq!(c.required, Required::Positive);
        assert_eq!(c.condition.apoly.to_string(), format!("(o0o1o2-r0r{l})"));
    }
    assert!(interval_holds_at(&conds, &Q::zero()));
    let t = qf(1, 3);
    let n = pt(0, 0, -16);
    for (c, &l) in conds.iter().zip(&ends) {
        let e = rot(&t, &(pair.coords.get(VertexRef::r(l)).unwrap() - &pt(1, 1, 0)));
        assert_eq!(c.condition.sign_at(&t), Sign::of_rational(&n.dot(&e)));
    }
}

#[test]
fn edge_edge_symmetric_instance() {
    let os = [pt(-1, 0, 0), pt(1, 0, 0), pt(0, 1, -1), pt(0, -1, -1)];
    let rs = [pt(0, -1, 0), pt(0, 1, 0), pt(1, 0, 1), pt(-1, 0, 1)];
    let pair = ContactPair::new(ContactType::EdgeEdge, &[0, 1], &[0, 1], assign(&os, &rs)).unwrap();
    let conds =
        facet_interval_apolys(&pair, &Incident::Triangles { o: [2, 3], r: [2, 3] }).unwrap();
    let req: Vec<Required> = conds.iter().map(|c| c.required).collect();
    assert_eq!(
        req,
        vec![Required::Nonzero, Required::SameAs(0), Required::OppositeOf(0), Required::OppositeOf(0)]
    );
    assert!(interval_holds_at(&conds, &Q::zero()));
    assert!(interval_holds_at(&conds, &qf(1, 2)));
    assert!(!interval_holds_at(&conds, &q(1)));

    let os2 = [pt(-1, 0, 0), pt(1, 0, 0), pt(0, 1, 1), pt(0, -1, -1)];
    let p2 = ContactPair::new(ContactType::EdgeEdge, &[0, 1], &[0, 1], assign(&os2, &rs)).unwrap();
    let c2 = facet_interval_apolys(&p2, &Incident::Triangles { o: [2, 3], r: [2, 3] }).unwrap();
    assert!(!interval_holds_at(&c2, &Q::zero()));
}

/// The oriented polynomial agrees with the a-poly's own polynomial up to the
/// recorded sign and a positive factor.
#[test]
fn orientation_parity_is_consistent() {
    let mut g = rng(17);
    let mut checked = 0;
    for case in 0..400 {
        let os: Vec<Vec3<Q>> = (0..5).map(|_| random_point(&mut g, 30)).collect();
        let rs: Vec<Vec3<Q>> = (0..5).map(|_| random_point(&mut g, 30)).collect();
        let va = assign(&os, &rs);
        let (o, r, inc): (Vec<u32>, Vec<u32>, Incident) = match case % 3 {
            0 => (vec![2, 0, 1], vec![3], Incident::Edges(vec![0, 4, 1])),
            1 => (vec![4], vec![1, 3, 0], Incident::Edges(vec![2, 0, 3])),
            _ => (vec![3, 1], vec![2, 0], Incident::Triangles { o: [0, 4], r: [4, 1] }),
        };
        let Ok(pair) = ContactPair::from_features(&o, &r, va.clone()) else { continue };
        let Ok(conds) = facet_interval_apolys(&pair, &inc) else { continue };
        for c in conds {
            let s = &c.condition;
            let plain: Poly<Q> = derive(&s.apoly, &|v| va.get(v).unwrap().clone()).unwrap();
            let plain = plain.strip_one_plus_t2().0;
            let ours = s.oriented.strip_one_plus_t2().0;
            let (Some(a), Some(b)) = (plain.lc(), ours.lc()) else { continue };
            let ratio = b / a;
            assert_eq!(ours, plain.scale(&ratio), "{} not proportional", s.apoly);
            assert_eq!(Sign::of_rational(&ratio), s.parity);
            let t = random_parameter(&mut g);
            let su = signed_univariate(&s.apoly, &va).unwrap();
            assert_eq!(
                s.sign_at(&t).as_i32(),
                sign_at_rational(&su, &t).as_i32() * s.parity.as_i32()
            );
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn mesh_pairs() {
    let tet = "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n";
    let m = Mesh::parse_off(tet).unwrap();
    assert_eq!(m.neighbors(0), vec![1, 2, 3]);
    assert_eq!(m.edge_triangles(0, 1), Some([3, 2]));
    let (pair, inc) = pair_from_meshes(&m, &m, &[0, 2, 1], &[3]).unwrap();
    assert_eq!(pair.variant, ContactType::FacetVertex);
    assert_eq!(inc, Incident::Edges(vec![0, 1, 2]));
    assert!(pair_from_meshes(&m, &m, &[0, 1, 2], &[3]).is_err());
    assert!(Mesh::parse_off("OFF\n1 1 0\n0 0 0\n4 0 0 0 0\n").is_err());
}

/// Builds a random IV event a-poly with a real root and returns it with the
/// root as an algebraic number.
fn random_event(g: &mut ChaCha8Rng) -> (apoly::APoly, VertexAssignment, AlgebraicNumber) {
    let table = common::table();
    loop {
        let p = plant(EventType::IV, &random_parameter(g), g);
        let mut va = p.va.clone();
        for v in p.apoly.vertices() {
            va.insert(v, random_point(g, 100));
        }
        let Ok(fs) = factor_apoly(&p.apoly, &va, table) else { continue };
        if let Some(f) = fs.into_iter().find(|f| !AlgebraicNumber::all_roots(f).is_empty()) {
            let tau = AlgebraicNumber::new(f, 1).unwrap();
            return (p.apoly, va, tau);
        }
    }
}

#[test]
fn event_sign_after_branches() {
    let table = common::table();
    let mut g = rng(18);
    for _ in 0..30 {
        let (event, va, tau) = random_event(&mut g);
        let (s, class) = event_sign_after(&tau, &tau.factor.apoly, &va, table).unwrap();
        assert_eq!(class, ZeroClass::Identity(1));
        let d = signed_univariate(&tau.factor.apoly, &va).unwrap().derivative();
        assert_eq!(s, sign_at(&d, &tau.interval));
        let (_, class) = event_sign_after(&tau, &event, &va, table).unwrap();
        assert!(matches!(class, ZeroClass::Identity(_)));

        let other = plant(EventType::IIb, &random_parameter(&mut g), &mut g);
        let mut va2 = va.clone();
        let shifted = other.apoly.map_vertices(|v| VertexRef {
            side: v.side,
            index: v.index + 20,
        });
        for v in shifted.vertices() {
            va2.insert(v, random_point(&mut g, 100));
        }
        let (s, class) = event_sign_after(&tau, &shifted, &va2, table).unwrap();
        assert_eq!(class, ZeroClass::Evaluated);
        assert_ne!(s, Sign::Zero);
    }
}

/// A two-factor representative evaluated at a root of one of its factors
/// is an identity of multiplicity one.
#[test]
fn event_sign_after_shared_factor() {
    let table = common::table();
    let mut g = rng(19);
    let mut found = 0;
    for e in table.entries().filter(|e| e.factor_sets.len() == 2) {
        if found == 40 {
            break;
        }
        if e.factor_sets.iter().any(|s| s.multiplicity != 1) || g.gen_bool(0.9) {
            continue;
        }
        let mut va = VertexAssignment::new();
        for v in e.rep.vertices() {
            va.insert(v, random_point(&mut g, 1000));
        }
        let fs = factor_apoly(&e.rep, &va, table).unwrap();
        let Some(f) = fs.iter().find(|f| !AlgebraicNumber::all_roots(f).is_empty()) else {
            continue;
        };
        let tau = AlgebraicNumber::new(f.clone(), 1).unwrap();
        let (_, class) = event_sign_after(&tau, &e.rep, &va, table).unwrap();
        assert_eq!(class, ZeroClass::Identity(1), "{}", e.rep);
        found += 1;
    }
    assert!(found >= 20);
}
