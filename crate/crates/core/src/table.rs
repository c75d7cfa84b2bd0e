//! Probabilistic factoring of the class representatives, basis selection and
//! the factor table.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::apoly::{APoly, Side, VertexRef};
use crate::geom::Vec3;
use crate::poly::Poly;
use crate::relabel::{
    eval_apoly, find_matches, shape, ApolyBox, BlackBox, FactorBox, ModAssignment, Shape,
    ShapeContext,
};
use crate::scalar::{Fp, FpFinger, Scalar};
use crate::univariate::{derive, univariate_int, univariate_mod};
use crate::upoly::{factor_integer, UPoly};

/// Number of vertex slots per side.
pub const SLOTS: usize = 12;

/// Random coordinates are drawn uniformly from `[-COORD_RANGE, COORD_RANGE]`.
pub const COORD_RANGE: i64 = 1 << 20;

/// Integer coordinates for `o0..o11` and `r0..r11`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomAssignment {
    coords: [[i64; 3]; 2 * SLOTS],
}

fn slot(v: VertexRef) -> usize {
    v.side as usize * SLOTS + v.index as usize
}

impl RandomAssignment {
    pub fn new<R: Rng>(rng: &mut R) -> Self {
        let mut coords = [[0; 3]; 2 * SLOTS];
        for c in coords.iter_mut().flatten() {
            *c = rng.gen_range(-COORD_RANGE..=COORD_RANGE);
        }
        RandomAssignment { coords }
    }

    pub fn get(&self, v: VertexRef) -> [i64; 3] {
        self.coords[slot(v)]
    }

    pub fn set(&mut self, v: VertexRef, p: [i64; 3]) {
        self.coords[slot(v)] = p;
    }

    /// A copy with fresh coordinates for `v`.
    pub fn rerandomized<R: Rng>(&self, v: VertexRef, rng: &mut R) -> Self {
        let mut out = self.clone();
        out.coords[slot(v)] = [0; 3].map(|_| rng.gen_range(-COORD_RANGE..=COORD_RANGE));
        out
    }

    pub fn coord<T: Scalar>(&self, v: VertexRef) -> Vec3<T> {
        Vec3(self.get(v).map(T::from_i64))
    }

    /// Coordinates after renaming: vertex `v` reads the slot of `map(v)`.
    pub fn coord_via<T: Scalar>(
        &self,
        v: VertexRef,
        map: &impl Fn(VertexRef) -> VertexRef,
    ) -> Vec3<T> {
        self.coord(map(v))
    }
}

/// Normalized univariate of `a` under `g`.
pub fn univariate_at(a: &APoly, g: &RandomAssignment) -> UPoly {
    univariate_int(a, &|v| g.coord::<BigInt>(v)).expect("random coordinates are generic")
}

/// Monic univariate of `a` under `g` modulo the fingerprint prime.
pub fn fingerprint_at(a: &APoly, g: &RandomAssignment) -> Poly<FpFinger> {
    univariate_mod(a, &|v| g.coord::<FpFinger>(v)).expect("random coordinates are generic")
}

/// Reduction of an integer polynomial to monic form modulo the fingerprint prime.
pub fn fingerprint_of(f: &UPoly) -> Poly<FpFinger> {
    let m = f.map(FpFinger::from_bigint);
    match m.lc() {
        None => m,
        Some(lc) => m.scale(&lc.inv().expect("leading coefficient survives reduction")),
    }
}

/// Does monic `f` divide `q` modulo the fingerprint prime?
pub fn divides_mod(f: &Poly<FpFinger>, q: &Poly<FpFinger>) -> bool {
    q.is_zero() || q.div_rem_monic(f).1.is_zero()
}

/// One irreducible factor of a representative's univariate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorInfo {
    pub poly: UPoly,
    pub multiplicity: u32,
    /// Vertices the factor changes with, sorted.
    pub depends: Vec<VertexRef>,
}

impl FactorInfo {
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    /// Number of O and R vertices in the dependence set.
    pub fn dependence_counts(&self) -> (usize, usize) {
        let o = self.depends.iter().filter(|v| v.side == Side::O).count();
        (o, self.depends.len() - o)
    }
}

/// Factors `a` under `g` and finds which vertices each factor depends on.
pub fn factor_once<R: Rng>(a: &APoly, g: &RandomAssignment, rng: &mut R) -> Vec<FactorInfo> {
    let p = univariate_at(a, g);
    if p.degree().is_none_or(|d| d == 0) {
        return Vec::new();
    }
    let mut out: Vec<FactorInfo> = factor_integer(&p)
        .into_iter()
        .map(|(poly, multiplicity)| FactorInfo {
            poly,
            multiplicity,
            depends: Vec::new(),
        })
        .collect();
    let fps: Vec<_> = out.iter().map(|f| fingerprint_of(&f.poly)).collect();
    for v in a.vertices() {
        let q = fingerprint_at(a, &g.rerandomized(v, rng));
        for (f, fp) in out.iter_mut().zip(&fps) {
            if !divides_mod(fp, &q) {
                f.depends.push(v);
            }
        }
    }
    out
}

/// The part of a factorization that must agree between independent trials.
fn structure(fs: &[FactorInfo]) -> Vec<(usize, u32, Vec<VertexRef>)> {
    let mut s: Vec<_> = fs
        .iter()
        .map(|f| (f.degree(), f.multiplicity, f.depends.clone()))
        .collect();
    s.sort();
    s
}

/// Factorization disagreement between trials.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent factor structure across trials for {rep}")]
pub struct InconsistentTrials {
    pub rep: String,
}

/// Factors `a` under `g` and confirms the structure under `trials - 1` fresh
/// assignments. The factors returned are those under `g`.
pub fn probabilistic_factor<R: Rng>(
    a: &APoly,
    g: &RandomAssignment,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<FactorInfo>, InconsistentTrials> {
    assert!(trials >= 1);
    let first = factor_once(a, g, rng);
    let s = structure(&first);
    for _ in 1..trials {
        let h = RandomAssignment::new(rng);
        if structure(&factor_once(a, &h, rng)) != s {
            return Err(InconsistentTrials { rep: a.to_string() });
        }
    }
    Ok(first)
}

/// Settings for building the factor table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableConfig {
    pub seed: u64,
    /// Independent factorizations that must agree, at least 2.
    pub trials: usize,
    /// Use random sampling instead of exhaustive search for degree-6
    /// candidates.
    pub birthday: bool,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            seed: 1,
            trials: 2,
            birthday: false,
        }
    }
}

/// Key of the map from univariates to basis a-polys: the monic univariate
/// evaluated at two fixed points modulo the fingerprint prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub u64, pub u64);

const FINGER_POINTS: [u64; 2] = [0x1d8e_4e27_c47d_124f, 0x0a3b_9c5f_26e1_7d33];

impl Fingerprint {
    pub fn of(p: &Poly<FpFinger>) -> Self {
        let [a, b] = FINGER_POINTS.map(|x| p.eval(&FpFinger::new(x)).value());
        Fingerprint(a, b)
    }
}

/// Failures while building or checking the table.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error(transparent)]
    Inconsistent(#[from] InconsistentTrials),
    #[error("no basis a-poly matches factor {factor} of {rep}")]
    NoMatchingBasisFactor { rep: String, factor: usize },
    #[error("verification failed for {0}")]
    VerificationFailure(String),
    #[error("table parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Is `fs` a single simple factor depending on every vertex of `a`?
pub fn is_complete_irreducible(a: &APoly, fs: &[FactorInfo]) -> bool {
    matches!(fs, [f] if f.multiplicity == 1 && f.depends == a.vertices())
}

/// Representatives sorted by element count, then by text form.
pub fn visit_order(reps: &[APoly]) -> Vec<APoly> {
    let mut v: Vec<(usize, String, APoly)> = reps
        .iter()
        .map(|a| (a.elements().len(), a.to_string(), a.clone()))
        .collect();
    v.sort();
    v.into_iter().map(|x| x.2).collect()
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Factor structure of every representative under one shared assignment.
#[derive(Clone, Debug)]
pub struct Factorizations {
    pub assignment: RandomAssignment,
    /// Representatives in visit order.
    pub reps: Vec<APoly>,
    pub factors: Vec<Vec<FactorInfo>>,
    position: HashMap<APoly, usize>,
}

impl Factorizations {
    pub fn new(
        assignment: RandomAssignment,
        reps: Vec<APoly>,
        factors: Vec<Vec<FactorInfo>>,
    ) -> Self {
        let position = reps
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        Factorizations {
            assignment,
            reps,
            factors,
            position,
        }
    }

    pub fn get(&self, a: &APoly) -> Option<&[FactorInfo]> {
        self.position.get(a).map(|&i| self.factors[i].as_slice())
    }
}

/// Factors every representative. A representative whose trials disagree
/// is retried once with fresh randomness before the build is aborted.
pub fn factor_representatives(
    reps: &[APoly],
    cfg: &TableConfig,
) -> Result<Factorizations, TableError> {
    let reps = visit_order(reps);
    let assignment = RandomAssignment::new(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let factors = reps
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let mut rng = stream_rng(cfg.seed, i as u64 + 1);
            probabilistic_factor(a, &assignment, cfg.trials, &mut rng).or_else(|_| {
                let mut rng = stream_rng(cfg.seed ^ 0x5eed, i as u64 + 1);
                probabilistic_factor(a, &assignment, cfg.trials, &mut rng)
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Factorizations::new(assignment, reps, factors))
}

/// The map from univariates to the basis a-polys generating them, with
/// the machinery to find renamed basis polynomials on demand.
#[derive(Clone, Debug)]
pub struct BasisIndex {
    context: ShapeContext,
    basis: Vec<APoly>,
    admitted: HashSet<APoly>,
    shapes: Vec<Shape>,
    by_shape: HashMap<u64, Vec<usize>>,
    entries: HashMap<Fingerprint, Vec<(Poly<FpFinger>, Vec<APoly>)>>,
    /// Factor sets of complete irreducible representatives left out.
    redundant: HashMap<APoly, Vec<APoly>>,
    birthday: Option<u64>,
}

impl BasisIndex {
    fn new(g: &RandomAssignment, cfg: &TableConfig) -> Self {
        let mut rng = stream_rng(cfg.seed, 0);
        BasisIndex {
            context: ShapeContext::new(ModAssignment::from(g), &mut rng),
            basis: Vec::new(),
            admitted: HashSet::new(),
            shapes: Vec::new(),
            by_shape: HashMap::new(),
            entries: HashMap::new(),
            redundant: HashMap::new(),
            birthday: cfg.birthday.then_some(cfg.seed),
        }
    }

    /// Basis representatives in the order they were admitted.
    pub fn basis(&self) -> &[APoly] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, a: &APoly) -> bool {
        self.admitted.contains(a)
    }

    /// The stored basis a-polys generating `p` (monic, modulo the
    /// fingerprint prime, under the build assignment).
    pub fn get(&self, p: &Poly<FpFinger>) -> Option<&[APoly]> {
        self.entries
            .get(&Fingerprint::of(p))?
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, v)| v.as_slice())
    }

    /// The factor set found for a complete irreducible representative that
    /// was left out of the basis.
    pub fn redundant_set(&self, a: &APoly) -> Option<&[APoly]> {
        self.redundant.get(a).map(Vec::as_slice)
    }

    /// Number of stored polynomials.
    pub fn entry_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    fn insert(&mut self, p: Poly<FpFinger>, members: Vec<APoly>) {
        let slot = self.entries.entry(Fingerprint::of(&p)).or_default();
        match slot.iter_mut().find(|(q, _)| *q == p) {
            Some((_, v)) => {
                v.extend(members);
                v.sort();
                v.dedup();
            }
            None => slot.push((p, members)),
        }
    }

    /// Every renamed basis a-poly on the vertices of `bb` whose polynomial
    /// is `target`. Results for polynomials of degree below 6 are stored.
    pub fn lookup(&mut self, bb: &dyn BlackBox, target: &Poly<FpFinger>) -> Vec<APoly> {
        if let Some(v) = self.get(target) {
            if v.first().is_some_and(|a| a.vertices() == bb.vertices()) {
                return v.to_vec();
            }
        }
        let Some(sh) = shape(bb, &self.context) else {
            return Vec::new();
        };
        let found = self.matches_for(&sh, target);
        if !found.is_empty() && sh.degree < 6 {
            self.insert(target.clone(), found.clone());
        }
        found
    }

    fn matches_for(&self, sh: &Shape, target: &Poly<FpFinger>) -> Vec<APoly> {
        let mut out = Vec::new();
        for &b in self.by_shape.get(&sh.key).map(Vec::as_slice).unwrap_or(&[]) {
            out.extend(find_matches(
                &self.basis[b],
                &self.shapes[b],
                sh,
                target,
                self.context.base(),
            ));
        }
        out.sort();
        out
    }

    fn admit(&mut self, a: &APoly, sh: Shape, p: Poly<FpFinger>) {
        let members = if sh.degree < 6 {
            find_matches(a, &sh, &sh, &p, self.context.base())
        } else {
            vec![a.clone()]
        };
        self.by_shape
            .entry(sh.key)
            .or_default()
            .push(self.basis.len());
        self.basis.push(a.clone());
        self.admitted.insert(a.clone());
        self.shapes.push(sh);
        self.insert(p, members);
    }
}

/// Selects the basis: visits the representatives in order and admits each
/// complete irreducible one whose polynomial no earlier basis class
/// generates under any renaming.
pub fn select_basis(f: &Factorizations, cfg: &TableConfig) -> BasisIndex {
    let mut index = BasisIndex::new(&f.assignment, cfg);
    for (a, fs) in f.reps.iter().zip(&f.factors) {
        if !is_complete_irreducible(a, fs) {
            continue;
        }
        let bb = ApolyBox::new(a);
        let p = fingerprint_of(&fs[0].poly);
        let sh = shape(&bb, &index.context).expect("generic base point");
        let found = match (index.birthday, sh.degree) {
            (Some(seed), 6) => index.birthday_matches(a, &sh, &p, seed),
            _ => index.matches_for(&sh, &p),
        };
        if found.is_empty() {
            index.admit(a, sh, p);
        } else {
            index.redundant.insert(a.clone(), found);
        }
    }
    index.basis_sorted();
    index
}

impl BasisIndex {
    fn basis_sorted(&mut self) {
        let mut order: Vec<usize> = (0..self.basis.len()).collect();
        order.sort_by_key(|&i| self.basis[i].to_string());
        let basis: Vec<APoly> = order.iter().map(|&i| self.basis[i].clone()).collect();
        let shapes: Vec<Shape> = order.iter().map(|&i| self.shapes[i].clone()).collect();
        let mut by_shape: HashMap<u64, Vec<usize>> = HashMap::new();
        for (i, s) in shapes.iter().enumerate() {
            by_shape.entry(s.key).or_default().push(i);
        }
        self.basis = basis;
        self.shapes = shapes;
        self.by_shape = by_shape;
    }

    /// Collision search between random renamings of `a` and of each
    /// candidate basis a-poly, about the square root of the number of
    /// color-preserving renamings from each side.
    fn birthday_matches(&self, a: &APoly, sh: &Shape, p: &Poly<FpFinger>, seed: u64) -> Vec<APoly> {
        let mut rng = stream_rng(seed, 0xb1d);
        let base = self.context.base();
        let mut out = Vec::new();
        for &b in self.by_shape.get(&sh.key).map(Vec::as_slice).unwrap_or(&[]) {
            let (src, ssh) = (&self.basis[b], &self.shapes[b]);
            let n = color_preserving_count(sh);
            let k = (n.sqrt().ceil() as usize).clamp(1, 1 << 16);
            let mut seen: HashMap<Poly<FpFinger>, Vec<VertexRef>> = HashMap::new();
            for _ in 0..k {
                let perm = random_color_permutation(sh, &mut rng);
                let renamed = rename(a, &sh.vertices, &perm);
                if let Some(q) = eval_apoly(&renamed, base) {
                    seen.insert(q, perm);
                }
            }
            for _ in 0..k {
                // A renaming of `src` onto the vertices of `a`.
                let img = random_color_bijection(ssh, sh, &mut rng);
                let Some(img) = img else { break };
                let renamed = rename(src, &ssh.vertices, &img);
                let Some(q) = eval_apoly(&renamed, base) else {
                    continue;
                };
                if let Some(perm) = seen.get(&q) {
                    // perm(a) and renamed share a polynomial, so undoing
                    // perm maps `renamed` to a match for `a`.
                    let inv: HashMap<VertexRef, VertexRef> = sh
                        .vertices
                        .iter()
                        .zip(perm)
                        .map(|(x, y)| (*y, *x))
                        .collect();
                    let m = renamed.map_vertices(|v| inv[&v]);
                    if eval_apoly(&m, base).as_ref() == Some(p) {
                        out.push(m);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

fn color_classes(sh: &Shape) -> BTreeMap<u64, Vec<usize>> {
    let mut m: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, c) in sh.colors.iter().enumerate() {
        m.entry(*c).or_default().push(i);
    }
    m
}

fn color_preserving_count(sh: &Shape) -> f64 {
    color_classes(sh)
        .values()
        .map(|v| (1..=v.len()).map(|x| x as f64).product::<f64>())
        .product()
}

fn random_color_permutation<R: Rng>(sh: &Shape, rng: &mut R) -> Vec<VertexRef> {
    random_color_bijection(sh, sh, rng).expect("a shape matches itself")
}

/// Random bijection from `from`'s vertices to `to`'s preserving colors.
fn random_color_bijection<R: Rng>(from: &Shape, to: &Shape, rng: &mut R) -> Option<Vec<VertexRef>> {
    let src = color_classes(from);
    let dst = color_classes(to);
    let mut img = vec![VertexRef::o(0); from.vertices.len()];
    for (c, idx) in &src {
        let mut tgt = dst.get(c)?.clone();
        if tgt.len() != idx.len() {
            return None;
        }
        tgt.shuffle(rng);
        for (i, j) in idx.iter().zip(tgt) {
            img[*i] = to.vertices[j];
        }
    }
    Some(img)
}

fn rename(a: &APoly, from: &[VertexRef], to: &[VertexRef]) -> APoly {
    a.map_vertices(|v| to[from.binary_search(&v).expect("vertex of the a-poly")])
}

/// The basis a-polys denoting one irreducible factor, with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactorSet {
    /// Sorted, nonempty.
    pub members: Vec<APoly>,
    pub multiplicity: u32,
}

impl FactorSet {
    /// The lexicographically smallest member, which names the factor.
    pub fn canonical(&self) -> &APoly {
        &self.members[0]
    }
}

/// Factor sets of one representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub rep: APoly,
    pub basis: bool,
    pub factor_sets: Vec<FactorSet>,
}

impl TableEntry {
    pub fn is_constant(&self) -> bool {
        self.factor_sets.is_empty()
    }

    /// Number of distinct irreducible factors.
    pub fn factor_count(&self) -> usize {
        self.factor_sets.len()
    }
}

/// Representative to factor sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactorTable {
    entries: BTreeMap<APoly, TableEntry>,
}

impl FactorTable {
    pub fn get(&self, rep: &APoly) -> Option<&TableEntry> {
        self.entries.get(rep)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &TableEntry> {
        self.entries.values()
    }

    pub fn insert(&mut self, e: TableEntry) {
        self.entries.insert(e.rep.clone(), e);
    }
}

/// Renaming that moves `first` to the lowest indices of each side, keeping
/// the order within both groups.
fn contiguize(all: &[VertexRef], first: &[VertexRef]) -> BTreeMap<VertexRef, VertexRef> {
    let mut map = BTreeMap::new();
    for side in [Side::O, Side::R] {
        let lead = first.iter().filter(|v| v.side == side);
        let rest = all.iter().filter(|v| v.side == side && !first.contains(v));
        for (k, v) in lead.chain(rest).enumerate() {
            map.insert(
                *v,
                VertexRef {
                    side,
                    index: k as u32,
                },
            );
        }
    }
    map
}

fn order_sets(mut sets: Vec<(usize, FactorSet)>) -> Vec<FactorSet> {
    sets.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.members.cmp(&b.1.members)));
    sets.into_iter().map(|x| x.1).collect()
}

/// Builds the factor table from the factorizations and the basis.
pub fn build_table(
    f: &Factorizations,
    index: &mut BasisIndex,
    cfg: &TableConfig,
) -> Result<FactorTable, TableError> {
    let g = &f.assignment;
    let mut rng = stream_rng(cfg.seed, 0xfac7);
    let alt = ModAssignment::from(&RandomAssignment::new(&mut rng));
    let mut table = FactorTable::default();
    for (a, fs) in f.reps.iter().zip(&f.factors) {
        let entry = |basis, factor_sets| TableEntry {
            rep: a.clone(),
            basis,
            factor_sets,
        };
        if fs.is_empty() {
            table.insert(entry(false, Vec::new()));
            continue;
        }
        if is_complete_irreducible(a, fs) {
            let p = fingerprint_of(&fs[0].poly);
            let (basis, members) = match index.redundant_set(a) {
                Some(m) => (false, m.to_vec()),
                None => (true, index.get(&p).expect("basis entry").to_vec()),
            };
            let set = FactorSet {
                members,
                multiplicity: 1,
            };
            table.insert(entry(basis, vec![set]));
            continue;
        }
        let mut sets = Vec::with_capacity(fs.len());
        for (i, fac) in fs.iter().enumerate() {
            let fail = || TableError::NoMatchingBasisFactor {
                rep: a.to_string(),
                factor: i,
            };
            let ren = contiguize(&a.vertices(), &fac.depends);
            let a2 = a.map_vertices(|v| ren[&v]);
            let dep2: Vec<VertexRef> = {
                let mut d: Vec<VertexRef> = fac.depends.iter().map(|v| ren[v]).collect();
                d.sort();
                d
            };
            let fs2 = factor_once(&a2, g, &mut rng);
            let j = fs2
                .iter()
                .position(|h| h.depends == dep2 && h.degree() == fac.degree())
                .ok_or_else(fail)?;
            let bb = FactorBox::new(
                &a2,
                fs2.iter().map(|h| h.depends.clone()).collect(),
                fs2.iter().map(FactorInfo::degree).collect(),
                j,
                alt.clone(),
            );
            let found = index.lookup(&bb, &fingerprint_of(&fs2[j].poly));
            if found.is_empty() {
                return Err(fail());
            }
            let back: BTreeMap<VertexRef, VertexRef> = ren.iter().map(|(x, y)| (*y, *x)).collect();
            let mut members: Vec<APoly> =
                found.iter().map(|m| m.map_vertices(|v| back[&v])).collect();
            members.sort();
            members.dedup();
            sets.push((
                fac.degree(),
                FactorSet {
                    members,
                    multiplicity: fac.multiplicity,
                },
            ));
        }
        table.insert(entry(false, order_sets(sets)));
    }
    Ok(table)
}

impl FactorTable {
    /// Line-oriented text form, sorted by representative text.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<String> = self.entries().map(entry_line).collect();
        lines.sort();
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    pub fn from_text(s: &str) -> Result<Self, TableError> {
        let mut t = FactorTable::default();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let e = parse_entry(line).map_err(|msg| TableError::Parse { line: i + 1, msg })?;
            t.insert(e);
        }
        Ok(t)
    }
}

fn entry_line(e: &TableEntry) -> String {
    let mut s = format!("REP {} KIND {} ::", e.rep, e.rep.kind());
    if e.is_constant() {
        s.push_str(" CONST");
    }
    if e.basis {
        s.push_str(" BASIS");
    }
    for f in &e.factor_sets {
        let m: Vec<String> = f.members.iter().map(ToString::to_string).collect();
        s.push_str(&format!(" FS{{ {} }}^{}", m.join(" ; "), f.multiplicity));
    }
    s
}

fn parse_entry(line: &str) -> Result<TableEntry, String> {
    let rest = line
        .strip_prefix("REP ")
        .ok_or("line must start with REP")?;
    let (head, body) = rest.split_once("::").ok_or("missing `::`")?;
    let (rep, kind) = head.split_once(" KIND ").ok_or("missing KIND")?;
    let rep: APoly = rep.trim().parse().map_err(|e| format!("{e}"))?;
    let kind: crate::apoly::Kind = kind.trim().parse().map_err(|e| format!("{e}"))?;
    if kind != rep.kind() {
        return Err(format!("kind {kind} does not match {rep}"));
    }
    let mut body = body.trim();
    let mut basis = false;
    let mut constant = false;
    loop {
        if let Some(b) = body.strip_prefix("BASIS") {
            basis = true;
            body = b.trim_start();
        } else if let Some(b) = body.strip_prefix("CONST") {
            constant = true;
            body = b.trim_start();
        } else {
            break;
        }
    }
    let mut factor_sets = Vec::new();
    while !body.is_empty() {
        let inner = body
            .strip_prefix("FS{")
            .ok_or_else(|| format!("expected FS{{ at `{body}`"))?;
        let (members, after) = inner.split_once("}^").ok_or("unterminated factor set")?;
        let end = after
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(after.len());
        let multiplicity: u32 = after[..end]
            .parse()
            .map_err(|_| "bad multiplicity".to_string())?;
        let mut members = members
            .split(';')
            .map(|m| m.trim().parse::<APoly>().map_err(|e| format!("{e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if members.is_empty() || multiplicity == 0 {
            return Err("empty factor set".into());
        }
        members.sort();
        factor_sets.push(FactorSet {
            members,
            multiplicity,
        });
        body = after[end..].trim_start();
    }
    if constant != factor_sets.is_empty() {
        return Err("CONST must appear exactly when there are no factor sets".into());
    }
    if basis && (factor_sets.len() != 1 || factor_sets[0].multiplicity != 1) {
        return Err("a basis entry has one simple factor set".into());
    }
    Ok(TableEntry {
        rep,
        basis,
        factor_sets,
    })
}

/// Prime modulus for verification, the smallest prime above 2^20.
pub const VERIFY_PRIME: u64 = 1_048_583;

type Fv = Fp<VERIFY_PRIME>;

/// Outcome of checking one factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationRecord {
    pub rep: APoly,
    /// Multiplier `a` found by the first substitution.
    pub constant: u64,
    /// Whether every round found the same multiplier.
    pub constant_stable: bool,
    pub prime: u64,
    pub trials: usize,
    pub passed: bool,
}

fn raw_mod(a: &APoly, c: &RandomAssignment) -> Poly<Fv> {
    derive(a, &|v| c.coord::<Fv>(v))
        .expect("table a-polys are well formed")
        .strip_one_plus_t2()
        .0
}

/// Solves `f = a·g` coefficient-wise; `None` if no such `a` exists or `g`
/// vanished modulo the prime.
fn proportional(f: &Poly<Fv>, g: &Poly<Fv>) -> Option<Fv> {
    let k = g.coeffs().iter().position(|c| !c.is_zero())?;
    let a = f.coeff(k) * g.coeff(k).inv()?;
    (*f == g.scale(&a)).then_some(a)
}

/// Checks one entry against `rounds` random substitutions.
pub fn verify_entry<R: Rng>(e: &TableEntry, rounds: usize, rng: &mut R) -> VerificationRecord {
    let mut first: Option<Fv> = None;
    let mut stable = true;
    let mut passed = true;
    let mut done = 0;
    while done < rounds {
        let c = RandomAssignment::new(rng);
        let f = raw_mod(&e.rep, &c);
        let mut g = Poly::<Fv>::one();
        for s in &e.factor_sets {
            g = &g * &raw_mod(s.canonical(), &c).pow(s.multiplicity);
        }
        if g.is_zero() {
            continue;
        }
        done += 1;
        match proportional(&f, &g) {
            Some(a) => {
                let a0 = *first.get_or_insert(a);
                stable &= a0 == a;
            }
            None => {
                passed = false;
                break;
            }
        }
    }
    VerificationRecord {
        rep: e.rep.clone(),
        constant: first.map_or(0, |a| a.value()),
        constant_stable: stable,
        prime: VERIFY_PRIME,
        trials: done,
        passed,
    }
}

/// Checks every non-basis entry, in parallel.
pub fn verify_table(table: &FactorTable, rounds: usize, seed: u64) -> Vec<VerificationRecord> {
    let todo: Vec<&TableEntry> = table.entries().filter(|e| !e.basis).collect();
    todo.par_iter()
        .enumerate()
        .map(|(i, e)| verify_entry(e, rounds, &mut stream_rng(seed, i as u64)))
        .collect()
}

/// Fails on the first record that did not pass.
pub fn check_records(records: &[VerificationRecord]) -> Result<(), TableError> {
    match records.iter().find(|r| !r.passed) {
        Some(r) => Err(TableError::VerificationFailure(r.rep.to_string())),
        None => Ok(()),
    }
}

/// Counts of representatives by factor structure. Factors are counted
/// without multiplicity; `squares` and `cubes` count representatives with a
/// factor of multiplicity 2 or 3 in any category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CountProfile {
    pub total: usize,
    pub basis: usize,
    pub constant: usize,
    pub irreducible: usize,
    pub two_factor: usize,
    pub squares: usize,
    pub three_factor: usize,
    pub cubes: usize,
}

impl FactorTable {
    pub fn count_profile(&self) -> CountProfile {
        let mut c = CountProfile::default();
        for e in self.entries() {
            c.total += 1;
            c.basis += e.basis as usize;
            let has = |m| e.factor_sets.iter().any(|s| s.multiplicity == m);
            c.squares += has(2) as usize;
            c.cubes += has(3) as usize;
            match e.factor_count() {
                0 => c.constant += 1,
                1 => c.irreducible += 1,
                2 => c.two_factor += 1,
                _ => c.three_factor += 1,
            }
        }
        c
    }

    /// Number of irreducible representatives whose single factor set has
    /// `k` members, for each `k` that occurs.
    pub fn irreducible_set_sizes(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for e in self.entries() {
            if let [s] = e.factor_sets.as_slice() {
                if s.multiplicity == 1 {
                    *m.entry(s.members.len()).or_default() += 1;
                }
            }
        }
        m
    }
}

/// Everything produced by one table build.
pub struct BuiltTable {
    pub factorizations: Factorizations,
    pub basis: BasisIndex,
    pub table: FactorTable,
}

/// Factors the representatives, selects the basis and assembles the table.
pub fn build(reps: &[APoly], cfg: &TableConfig) -> Result<BuiltTable, TableError> {
    let factorizations = factor_representatives(reps, cfg)?;
    let mut basis = select_basis(&factorizations, cfg);
    let table = build_table(&factorizations, &mut basis, cfg)?;
    Ok(BuiltTable {
        factorizations,
        basis,
        table,
    })
}
