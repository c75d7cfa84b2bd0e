//! Class representatives under vertex relabeling.
//!
//! Each permutation of the elements that keeps them grouped by
//! `(size, |L_O|)` gives every vertex an indicator: bit `k` (most significant
//! first) is set when the vertex occurs in the `k`-th element. A permutation
//! is labeled by its O indicators in decreasing order followed by its R
//! indicators in decreasing order. The permutation with the largest label
//! wins and the `i`-th O vertex in indicator order becomes `o_i` (likewise
//! for R). Vertices with equal indicators occur in exactly the same elements,
//! so the label alone determines the representative.

use std::collections::BTreeMap;
use std::fmt;

use crate::apoly::{APoly, Element, ElementList, VertexRef};
use crate::error::ApolyError;

/// A side-preserving injective vertex renaming.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexBijection {
    map: BTreeMap<VertexRef, VertexRef>,
}

impl VertexBijection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity_on(vertices: impl IntoIterator<Item = VertexRef>) -> Self {
        VertexBijection {
            map: vertices.into_iter().map(|v| (v, v)).collect(),
        }
    }

    /// Adds `from -> to`. Panics if the sides differ or the map stops being
    /// injective.
    pub fn insert(&mut self, from: VertexRef, to: VertexRef) {
        assert_eq!(from.side, to.side, "bijections preserve sides");
        if let Some(prev) = self.map.insert(from, to) {
            assert_eq!(prev, to, "conflicting image for {from}");
        }
        debug_assert!(self.is_injective());
    }

    pub fn get(&self, v: VertexRef) -> Option<VertexRef> {
        self.map.get(&v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexRef, VertexRef)> + '_ {
        self.map.iter().map(|(a, b)| (*a, *b))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn is_injective(&self) -> bool {
        let mut imgs: Vec<_> = self.map.values().collect();
        imgs.sort();
        imgs.windows(2).all(|w| w[0] != w[1])
    }

    pub fn inverse(&self) -> Self {
        VertexBijection {
            map: self.map.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &VertexBijection) -> Option<Self> {
        let mut out = VertexBijection::new();
        for (a, b) in self.iter() {
            out.insert(a, other.get(b)?);
        }
        Some(out)
    }
}

impl fmt::Display for VertexBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Renames the vertices of `a`; every vertex must be covered.
pub fn apply_bijection(a: &APoly, bij: &VertexBijection) -> Result<APoly, ApolyError> {
    if let Some(v) = a.vertices().into_iter().find(|v| bij.get(*v).is_none()) {
        return Err(ApolyError::IncompleteBijection(v.to_string()));
    }
    Ok(a.map_vertices(|v| bij.get(v).unwrap()))
}

/// Small vertex -> indicator table; a-polys have at most 12 vertices per side.
struct Indicators {
    o: Vec<(u32, u8)>,
    r: Vec<(u32, u8)>,
}

impl Indicators {
    fn with_capacity() -> Self {
        Indicators {
            o: Vec::with_capacity(12),
            r: Vec::with_capacity(12),
        }
    }

    fn clear(&mut self) {
        self.o.clear();
        self.r.clear();
    }

    fn set(list: &mut Vec<(u32, u8)>, v: u32, bit: u8) {
        match list.iter_mut().find(|(x, _)| *x == v) {
            Some(e) => e.1 |= bit,
            None => list.push((v, bit)),
        }
    }

    fn fill(&mut self, elements: &[Element], order: &[usize]) {
        self.clear();
        let n = order.len();
        for (pos, &ei) in order.iter().enumerate() {
            let bit = 1u8 << (n - 1 - pos);
            let e = &elements[ei];
            for &v in &e.o {
                Self::set(&mut self.o, v, bit);
            }
            for &v in &e.r {
                Self::set(&mut self.r, v, bit);
            }
        }
        self.o.sort_unstable_by(|a, b| b.1.cmp(&a.1));
        self.r.sort_unstable_by(|a, b| b.1.cmp(&a.1));
    }

    /// Decreasing indicator lists packed into one comparable key.
    fn label(&self) -> u128 {
        let pack = |l: &[(u32, u8)]| {
            l.iter().enumerate().fold(0u64, |acc, (i, (_, ind))| {
                acc | ((*ind as u64) << (60 - 4 * i))
            })
        };
        ((pack(&self.o) as u128) << 64) | pack(&self.r) as u128
    }
}

/// Every element order that keeps the `(size, |L_O|)` blocks in place.
fn block_permutations(elements: &[Element]) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, e) in elements.iter().enumerate() {
        match blocks.last_mut() {
            Some(b) if elements[b[0]].block() == e.block() => b.push(i),
            _ => blocks.push(vec![i]),
        }
    }
    let mut out = vec![Vec::with_capacity(elements.len())];
    for b in &blocks {
        let perms = permutations(b);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                perms.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.extend_from_slice(p);
                    v
                })
            })
            .collect();
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Finds the winning indicator assignment; returns the O and R vertex lists
/// in canonical order.
fn best_order(elements: &[Element]) -> (Vec<u32>, Vec<u32>) {
    let mut ind = Indicators::with_capacity();
    let mut best: Option<(u128, Vec<u32>, Vec<u32>)> = None;
    for order in block_permutations(elements) {
        ind.fill(elements, &order);
        let label = ind.label();
        if best.as_ref().is_none_or(|(b, _, _)| label > *b) {
            best = Some((
                label,
                ind.o.iter().map(|x| x.0).collect(),
                ind.r.iter().map(|x| x.0).collect(),
            ));
        }
    }
    let (_, o, r) = best.expect("at least one permutation");
    (o, r)
}

fn sorted_elements(a: &[Element]) -> Vec<Element> {
    let mut v = a.to_vec();
    v.sort();
    v
}

/// The class representative of `a` and the bijection from `a`'s vertices to
/// the representative's canonical vertices.
pub fn representative_of(a: &APoly) -> (APoly, VertexBijection) {
    let elements = sorted_elements(a.elements());
    let (o, r) = best_order(&elements);
    let mut bij = VertexBijection::new();
    for (i, v) in o.iter().enumerate() {
        bij.insert(VertexRef::o(*v), VertexRef::o(i as u32));
    }
    for (i, v) in r.iter().enumerate() {
        bij.insert(VertexRef::r(*v), VertexRef::r(i as u32));
    }
    let rep = a.map_vertices(|v| bij.get(v).unwrap());
    (rep, bij)
}

/// Representative of an unsorted element list, skipping the bijection.
pub fn representative_of_elements(elements: &[Element]) -> APoly {
    let elements = sorted_elements(elements);
    let (o, r) = best_order(&elements);
    let lookup = |list: &[u32], v: u32| list.iter().position(|x| *x == v).unwrap() as u32;
    let mapped: ElementList = elements
        .iter()
        .map(|e| {
            let ov: Vec<u32> = e.o.iter().map(|&v| lookup(&o, v)).collect();
            let rv: Vec<u32> = e.r.iter().map(|&v| lookup(&r, v)).collect();
            Element::from_unsorted(&ov, &rv)
        })
        .collect();
    APoly::from_elements_unchecked(mapped)
}

pub fn is_equivalent(a: &APoly, b: &APoly) -> bool {
    a.elements().len() == b.elements().len()
        && a.vertex_counts() == b.vertex_counts()
        && representative_of(a).0 == representative_of(b).0
}
