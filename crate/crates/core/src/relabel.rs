//! Matching angle polynomials up to a renaming of vertices.
//!
//! A polynomial is handled as a black box that returns its monic form modulo
//! a large prime at any vertex coordinates. Moving one vertex, or two
//! vertices together, along a fixed direction traces a rational curve of
//! polynomials whose degree does not depend on vertex names. These degrees
//! color the vertices and vertex pairs; color refinement and a backtracking
//! search over color-preserving bijections then find every renaming of a
//! source a-poly whose polynomial equals the target.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use num_traits::{One, Zero};
use rand::Rng;

use crate::apoly::{APoly, Side, VertexRef};
use crate::geom::Vec3;
use crate::poly::Poly;
use crate::scalar::FpFinger as F;
use crate::table::{RandomAssignment, SLOTS};
use crate::univariate::{derive, normalize_mod};

/// Vertex coordinates modulo the fingerprint prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModAssignment {
    coords: [[F; 3]; 2 * SLOTS],
}

fn slot(v: VertexRef) -> usize {
    v.side as usize * SLOTS + v.index as usize
}

impl ModAssignment {
    pub fn get(&self, v: VertexRef) -> [F; 3] {
        self.coords[slot(v)]
    }

    pub fn set(&mut self, v: VertexRef, p: [F; 3]) {
        self.coords[slot(v)] = p;
    }

    pub fn coord(&self, v: VertexRef) -> Vec3<F> {
        Vec3(self.get(v))
    }
}

impl From<&RandomAssignment> for ModAssignment {
    fn from(g: &RandomAssignment) -> Self {
        let mut coords = [[F::zero(); 3]; 2 * SLOTS];
        for side in [Side::O, Side::R] {
            for i in 0..SLOTS as u32 {
                let v = VertexRef { side, index: i };
                coords[slot(v)] = g.get(v).map(F::from_i64);
            }
        }
        ModAssignment { coords }
    }
}

/// Monic polynomial of `a` at `x`, or `None` if it vanishes there.
pub fn eval_apoly(a: &APoly, x: &ModAssignment) -> Option<Poly<F>> {
    let p = normalize_mod(&derive(a, &|v| x.coord(v)).ok()?);
    (!p.is_zero()).then_some(p)
}

/// A polynomial in `t` whose coefficients depend on vertex coordinates.
pub trait BlackBox {
    /// The vertices the polynomial depends on, sorted.
    fn vertices(&self) -> &[VertexRef];
    /// Monic value at `x`; `None` at a degenerate point.
    fn eval(&self, x: &ModAssignment) -> Option<Poly<F>>;
}

/// The polynomial of an a-poly.
pub struct ApolyBox<'a> {
    apoly: &'a APoly,
    vertices: Vec<VertexRef>,
}

impl<'a> ApolyBox<'a> {
    pub fn new(apoly: &'a APoly) -> Self {
        ApolyBox {
            apoly,
            vertices: apoly.vertices(),
        }
    }
}

impl BlackBox for ApolyBox<'_> {
    fn vertices(&self) -> &[VertexRef] {
        &self.vertices
    }

    fn eval(&self, x: &ModAssignment) -> Option<Poly<F>> {
        eval_apoly(self.apoly, x)
    }
}

/// One irreducible factor of an a-poly's polynomial, isolated by its
/// dependence set. `depends[i]` and `degrees[i]` describe factor `i`.
pub struct FactorBox<'a> {
    apoly: &'a APoly,
    depends: Vec<Vec<VertexRef>>,
    degrees: Vec<usize>,
    which: usize,
    alt: ModAssignment,
}

impl<'a> FactorBox<'a> {
    /// `alt` supplies the second point used to separate factors; it must
    /// differ from every evaluation point outside the factor's vertices.
    pub fn new(
        apoly: &'a APoly,
        depends: Vec<Vec<VertexRef>>,
        degrees: Vec<usize>,
        which: usize,
        alt: ModAssignment,
    ) -> Self {
        FactorBox {
            apoly,
            depends,
            degrees,
            which,
            alt,
        }
    }

    fn isolate(&self, i: usize, x: &ModAssignment) -> Option<Poly<F>> {
        let dep = &self.depends[i];
        let p = eval_apoly(self.apoly, x)?;
        let mut x2 = x.clone();
        for v in self.apoly.vertices() {
            if !dep.contains(&v) {
                x2.set(v, self.alt.get(v));
            }
        }
        let q = eval_apoly(self.apoly, &x2)?;
        let mut g = p.gcd(&q).square_free();
        for (j, d) in self.depends.iter().enumerate() {
            if j != i && d.len() < dep.len() && d.iter().all(|v| dep.contains(v)) {
                g = g.div_exact(&self.isolate(j, x)?)?;
            }
        }
        (g.degree() == Some(self.degrees[i])).then_some(g)
    }
}

impl BlackBox for FactorBox<'_> {
    fn vertices(&self) -> &[VertexRef] {
        &self.depends[self.which]
    }

    fn eval(&self, x: &ModAssignment) -> Option<Poly<F>> {
        self.isolate(self.which, x)
    }
}

/// Random data shared by every shape computation so that shapes compare.
#[derive(Clone, Debug)]
pub struct ShapeContext {
    base: ModAssignment,
    l1: Vec<F>,
    l2: Vec<F>,
    dir: [F; 3],
    samples: Vec<F>,
}

const MAX_SAMPLES: usize = 16;
const STAGES: [usize; 3] = [6, 10, MAX_SAMPLES];

fn random_f<R: Rng>(rng: &mut R) -> F {
    F::from_i64(rng.gen_range(1..(1i64 << 60)))
}

impl ShapeContext {
    pub fn new<R: Rng>(base: ModAssignment, rng: &mut R) -> Self {
        ShapeContext {
            base,
            l1: (0..32).map(|_| random_f(rng)).collect(),
            l2: (0..32).map(|_| random_f(rng)).collect(),
            dir: [0; 3].map(|_| random_f(rng)),
            samples: (0..MAX_SAMPLES + 8).map(|_| random_f(rng)).collect(),
        }
    }

    pub fn base(&self) -> &ModAssignment {
        &self.base
    }

    fn functional(l: &[F], p: &Poly<F>) -> F {
        p.coeffs()
            .iter()
            .zip(l)
            .fold(F::zero(), |acc, (c, x)| acc + *c * *x)
    }

    /// Degree of the curve traced when every vertex in `moving` travels
    /// along the shared direction.
    fn curve_degree(&self, bb: &dyn BlackBox, moving: &[VertexRef]) -> Option<u8> {
        let mut pts: Vec<(F, F, F)> = Vec::with_capacity(MAX_SAMPLES);
        let mut next = self.samples.iter();
        for &n in &STAGES {
            while pts.len() < n {
                let s = *next.next()?;
                let mut x = self.base.clone();
                for &v in moving {
                    let b = self.base.get(v);
                    x.set(v, [0, 1, 2].map(|k| b[k] + s * self.dir[k]));
                }
                if let Some(p) = bb.eval(&x) {
                    pts.push((
                        s,
                        Self::functional(&self.l1, &p),
                        Self::functional(&self.l2, &p),
                    ));
                }
            }
            for k in 0..=(n - 3) / 2 {
                if has_rational_fit(&pts, k) {
                    return Some(k as u8);
                }
            }
        }
        None
    }
}

/// Is there a nonzero pair `(L, M)` of polynomials of degree at most `k`
/// with `L(s)·b = M(s)·a` at every sample `(s, a, b)`?
fn has_rational_fit(pts: &[(F, F, F)], k: usize) -> bool {
    let cols = 2 * (k + 1);
    let mut m: Vec<Vec<F>> = pts
        .iter()
        .map(|&(s, a, b)| {
            let mut row = Vec::with_capacity(cols);
            let mut p = F::one();
            for _ in 0..=k {
                row.push(b * p);
                p = p * s;
            }
            let mut p = F::one();
            for _ in 0..=k {
                row.push(-(a * p));
                p = p * s;
            }
            row
        })
        .collect();
    rank(&mut m, cols) < cols
}

fn rank(m: &mut [Vec<F>], cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = *x * inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in c..cols {
                    let y = m[r][j];
                    m[i][j] = m[i][j] - f * y;
                }
            }
        }
        r += 1;
    }
    r
}

fn hash_of<T: Hash>(x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

/// Renaming-invariant description of a black-box polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub vertices: Vec<VertexRef>,
    pub degree: usize,
    /// Refined vertex colors, parallel to `vertices`.
    pub colors: Vec<u64>,
    rel: Vec<u8>,
    /// Equal for polynomials that agree up to renaming.
    pub key: u64,
}

impl Shape {
    fn rel(&self, i: usize, j: usize) -> u8 {
        self.rel[i * self.vertices.len() + j]
    }
}

/// Computes the shape of `bb`; `None` if its polynomial degenerates at the
/// base point.
pub fn shape(bb: &dyn BlackBox, cx: &ShapeContext) -> Option<Shape> {
    let vertices = bb.vertices().to_vec();
    let n = vertices.len();
    let degree = bb.eval(&cx.base)?.degree()?;
    let vdeg: Vec<u8> = vertices
        .iter()
        .map(|&v| cx.curve_degree(bb, &[v]))
        .collect::<Option<_>>()?;
    let mut rel = vec![0u8; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = cx.curve_degree(bb, &[vertices[i], vertices[j]])?;
            rel[i * n + j] = d;
            rel[j * n + i] = d;
        }
    }
    let mut colors: Vec<u64> = (0..n)
        .map(|i| hash_of(&(vertices[i].side, vdeg[i])))
        .collect();
    let distinct = |c: &[u64]| c.iter().collect::<HashSet<_>>().len();
    let mut classes = distinct(&colors);
    loop {
        let next: Vec<u64> = (0..n)
            .map(|i| {
                let mut nb: Vec<(u8, u64)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (rel[i * n + j], colors[j]))
                    .collect();
                nb.sort_unstable();
                hash_of(&(colors[i], nb))
            })
            .collect();
        let c = distinct(&next);
        colors = next;
        if c == classes {
            break;
        }
        classes = c;
    }
    let mut sorted = colors.clone();
    sorted.sort_unstable();
    let o = vertices.iter().filter(|v| v.side == Side::O).count();
    let key = hash_of(&(degree, o, n - o, sorted));
    Some(Shape {
        vertices,
        degree,
        colors,
        rel,
        key,
    })
}

/// Every distinct renaming of `src` onto the target's vertices whose
/// polynomial at `at` equals `target`, sorted. `src_shape` must be the shape
/// of `src` itself.
pub fn find_matches(
    src: &APoly,
    src_shape: &Shape,
    tgt_shape: &Shape,
    target: &Poly<F>,
    at: &ModAssignment,
) -> Vec<APoly> {
    if src_shape.key != tgt_shape.key {
        return Vec::new();
    }
    let n = src_shape.vertices.len();
    let class_size = |c: u64| src_shape.colors.iter().filter(|&&x| x == c).count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (class_size(src_shape.colors[i]), i));
    let indicator: Vec<u32> = src_shape
        .vertices
        .iter()
        .map(|v| {
            src.elements()
                .iter()
                .enumerate()
                .filter(|(_, e)| e.vertices().any(|w| w == *v))
                .fold(0u32, |m, (k, _)| m | (1 << k))
        })
        .collect();
    let mut search = Search {
        src,
        s: src_shape,
        t: tgt_shape,
        target,
        at,
        order,
        indicator,
        image: vec![usize::MAX; n],
        used: vec![false; n],
        seen: HashSet::new(),
        found: Vec::new(),
    };
    search.run(0);
    let mut found = search.found;
    found.sort();
    found
}

struct Search<'a> {
    src: &'a APoly,
    s: &'a Shape,
    t: &'a Shape,
    target: &'a Poly<F>,
    at: &'a ModAssignment,
    order: Vec<usize>,
    indicator: Vec<u32>,
    image: Vec<usize>,
    used: Vec<bool>,
    seen: HashSet<APoly>,
    found: Vec<APoly>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) {
        let n = self.order.len();
        if depth == n {
            self.leaf();
            return;
        }
        let u = self.order[depth];
        for w in 0..n {
            if self.used[w] || self.s.colors[u] != self.t.colors[w] {
                continue;
            }
            let consistent = self.order[..depth].iter().all(|&u2| {
                let w2 = self.image[u2];
                self.s.rel(u, u2) == self.t.rel(w, w2)
                    && !(self.indicator[u] == self.indicator[u2] && (u2 < u) != (w2 < w))
            });
            if !consistent {
                continue;
            }
            self.image[u] = w;
            self.used[w] = true;
            self.run(depth + 1);
            self.used[w] = false;
        }
        self.image[u] = usize::MAX;
    }

    fn leaf(&mut self) {
        let s = self.s;
        let t = self.t;
        let image = &self.image;
        let renamed = self.src.map_vertices(|v| {
            let i = s.vertices.binary_search(&v).expect("vertex of the source");
            t.vertices[image[i]]
        });
        if !self.seen.insert(renamed.clone()) {
            return;
        }
        if eval_apoly(&renamed, self.at).as_ref() == Some(self.target) {
            self.found.push(renamed);
        }
    }
}
