//! Enumeration of every a-poly shape and reduction to class representatives.
//!
//! Element templates come in six families; a raw a-poly is a product of
//! families with vertices assigned left to right. Each vertex slot either
//! reuses a vertex already introduced on its side or takes the next fresh
//! index, keeping indices increasing within a feature.

use std::collections::HashSet;

use crate::apoly::{APoly, Element, ElementList};
use crate::canonical::representative_of_elements;

/// Element shapes as `(|L_O|, |L_R|)`.
type Template = (usize, usize);

const S: &[Template] = &[(1, 1)];
const T: &[Template] = &[(1, 2), (2, 1)];
const U: &[Template] = &[(1, 3), (2, 2), (3, 1)];
const V: &[Template] = &[(2, 3), (3, 2)];
const W: &[Template] = &[(0, 2), (2, 0)];
const X: &[Template] = &[(0, 3), (2, 2), (3, 0)];

/// The seven family products.
pub const FAMILIES: &[(&str, &[&[Template]])] = &[
    ("s1*u2", &[S, U]),
    ("t1*t2", &[T, T]),
    ("t1*u2*u3", &[T, U, U]),
    ("u1*u2*u3*u4", &[U, U, U, U]),
    ("v1", &[V]),
    ("w1*w2*w3", &[W, W, W]),
    ("x1*x2*x3", &[X, X, X]),
];

/// Knobs for details of the enumeration that the family definitions leave
/// open. [`EnumOptions::default`] is the configuration used everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    /// Keep a-polys in which two elements are identical.
    pub duplicate_elements: bool,
    /// Contract edge triples where two edges of one side share a vertex.
    pub contract_parallel: bool,
    /// Keep edge triples whose three edges lie on the same side.
    pub same_side_parallel: bool,
    /// Take template products as multisets (non-decreasing template order
    /// across repeated families) instead of ordered tuples.
    pub unordered_templates: bool,
    /// Keep minor triples made only of facets of one side.
    pub same_side_minor: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            duplicate_elements: false,
            contract_parallel: false,
            same_side_parallel: false,
            unordered_templates: true,
            same_side_minor: false,
        }
    }
}

fn combinations(n: u32, k: usize, out: &mut Vec<Vec<u32>>) {
    fn rec(start: u32, n: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), out);
}

/// Every admissible vertex list of length `k` when `next` vertices exist.
fn side_choices(next: u32, k: usize) -> Vec<(Vec<u32>, u32)> {
    let mut out = Vec::new();
    for reuse in 0..=k.min(next as usize) {
        let mut combos = Vec::new();
        combinations(next, reuse, &mut combos);
        let fresh = (k - reuse) as u32;
        for mut c in combos {
            c.extend(next..next + fresh);
            out.push((c, next + fresh));
        }
    }
    out
}

fn assign(
    shapes: &[Template],
    next_o: u32,
    next_r: u32,
    acc: &mut Vec<Element>,
    emit: &mut dyn FnMut(&[Element]),
) {
    let Some((&(ko, kr), rest)) = shapes.split_first() else {
        emit(acc);
        return;
    };
    for (o, no) in side_choices(next_o, ko) {
        for (r, nr) in side_choices(next_r, kr) {
            acc.push(Element::from_unsorted(&o, &r));
            assign(rest, no, nr, acc, emit);
            acc.pop();
        }
    }
}

/// Applies the parallel-kind contraction; `None` drops the triple.
fn contract_edges(elements: &[Element], opts: &EnumOptions) -> Option<Vec<Element>> {
    let (o_edges, r_edges): (Vec<&Element>, Vec<&Element>) =
        elements.iter().partition(|e| !e.o.is_empty());
    if o_edges.is_empty() || r_edges.is_empty() {
        return opts.same_side_parallel.then(|| elements.to_vec());
    }
    if !opts.contract_parallel {
        return Some(elements.to_vec());
    }
    let (single, pair, pair_is_o) = if o_edges.len() == 1 {
        (o_edges[0], [r_edges[0], r_edges[1]], false)
    } else {
        (r_edges[0], [o_edges[0], o_edges[1]], true)
    };
    let (a, b) = if pair_is_o {
        (&pair[0].o, &pair[1].o)
    } else {
        (&pair[0].r, &pair[1].r)
    };
    let shared = a.iter().filter(|v| b.contains(v)).count();
    if shared != 1 {
        return Some(elements.to_vec());
    }
    let mut union: Vec<u32> = a.iter().chain(b.iter()).copied().collect();
    union.sort_unstable();
    union.dedup();
    Some(vec![if pair_is_o {
        Element::from_unsorted(&union, &single.r)
    } else {
        Element::from_unsorted(&single.o, &union)
    }])
}

/// Streams every raw a-poly (as an unsorted element list) to `emit`.
pub fn generate_raw_with(opts: &EnumOptions, mut emit: impl FnMut(&[Element])) {
    for (name, family) in FAMILIES {
        generate_family_with(name, family, opts, &mut emit);
    }
}

fn generate_family_with(
    name: &str,
    family: &[&[Template]],
    opts: &EnumOptions,
    emit: &mut dyn FnMut(&[Element]),
) {
    let parallel = name.starts_with('w');
    let minor = name.starts_with('x');
    let mut shapes = vec![(0, 0); family.len()];
    let mut pick = |shapes: &[Template]| {
        let mut acc = Vec::with_capacity(4);
        assign(shapes, 0, 0, &mut acc, &mut |els: &[Element]| {
            if !opts.duplicate_elements {
                let mut v = els.to_vec();
                v.sort();
                if v.windows(2).any(|w| w[0] == w[1]) {
                    return;
                }
            }
            if minor
                && !opts.same_side_minor
                && (els.iter().all(|e| e.r.is_empty()) || els.iter().all(|e| e.o.is_empty()))
            {
                return;
            }
            if parallel {
                if let Some(c) = contract_edges(els, opts) {
                    emit(&c);
                }
            } else {
                emit(els);
            }
        });
    };
    fn product(
        family: &[&[Template]],
        i: usize,
        unordered: bool,
        shapes: &mut Vec<Template>,
        f: &mut dyn FnMut(&[Template]),
    ) {
        if i == family.len() {
            f(shapes);
            return;
        }
        for (k, &t) in family[i].iter().enumerate() {
            if unordered && i > 0 && std::ptr::eq(family[i], family[i - 1]) {
                let prev = family[i].iter().position(|x| *x == shapes[i - 1]).unwrap();
                if k < prev {
                    continue;
                }
            }
            shapes[i] = t;
            product(family, i + 1, unordered, shapes, f);
        }
    }
    product(family, 0, opts.unordered_templates, &mut shapes, &mut pick);
}

/// Raw a-polys of one named family product, in generation order.
pub fn generate_family(name: &str) -> Vec<APoly> {
    let (_, family) = FAMILIES
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("unknown family {name}"));
    let mut out = Vec::new();
    generate_family_with(name, family, &EnumOptions::default(), &mut |els| {
        out.push(APoly::from_elements_unchecked(
            els.iter().cloned().collect(),
        ));
    });
    out
}

/// Every raw a-poly of the default enumeration.
pub fn generate_raw() -> Vec<APoly> {
    let mut out = Vec::new();
    generate_raw_with(&EnumOptions::default(), |els| {
        out.push(APoly::from_elements_unchecked(
            els.iter().cloned().collect::<ElementList>(),
        ));
    });
    out
}

/// Result of reducing the raw enumeration to representatives.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub raw_count: usize,
    /// Sorted by serialized form.
    pub representatives: Vec<APoly>,
}

pub fn enumerate_classes_with(opts: &EnumOptions) -> Enumeration {
    let mut raw_count = 0usize;
    let mut set: HashSet<APoly> = HashSet::new();
    generate_raw_with(opts, |els| {
        raw_count += 1;
        set.insert(representative_of_elements(els));
    });
    let mut keyed: Vec<(String, APoly)> = set.into_iter().map(|a| (a.to_string(), a)).collect();
    keyed.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    Enumeration {
        raw_count,
        representatives: keyed.into_iter().map(|(_, a)| a).collect(),
    }
}

/// All class representatives, sorted by their text form.
pub fn enumerate_classes() -> Enumeration {
    enumerate_classes_with(&EnumOptions::default())
}
