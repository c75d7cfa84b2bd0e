//! The a-poly: a symbolic angle polynomial written as a list of
//! `L_O - L_R` elements over obstacle (`o`) and robot (`r`) vertices.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use arrayvec::ArrayVec;

use crate::error::ApolyError;

/// Which polyhedron a vertex belongs to: the obstacle `O` or the robot `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    O,
    R,
}

/// A vertex `o<i>` or `r<i>`. Ordered O before R, then by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexRef {
    pub side: Side,
    pub index: u32,
}

impl VertexRef {
    pub const fn o(index: u32) -> Self {
        VertexRef {
            side: Side::O,
            index,
        }
    }
    pub const fn r(index: u32) -> Self {
        VertexRef {
            side: Side::R,
            index,
        }
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::O => write!(f, "o{}", self.index),
            Side::R => write!(f, "r{}", self.index),
        }
    }
}

impl FromStr for VertexRef {
    type Err = ApolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (side, rest) = match s.as_bytes().first() {
            Some(b'o') => (Side::O, &s[1..]),
            Some(b'r') => (Side::R, &s[1..]),
            _ => return Err(ApolyError::Parse(format!("bad vertex `{s}`"))),
        };
        let index = rest
            .parse()
            .map_err(|_| ApolyError::Parse(format!("bad vertex index in `{s}`")))?;
        Ok(VertexRef { side, index })
    }
}

pub type VertexList = ArrayVec<u32, 3>;

/// One `L_O - L_R` element. Both lists are strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    pub o: VertexList,
    pub r: VertexList,
}

/// How many contact polynomials an element stands for, and what it means.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementType {
    /// `o_h - r_i`: the two vertices coincide (three polynomials).
    VertexVertex,
    /// `o_h - r_i r_j`: O vertex on an R edge line (two polynomials).
    VertexEdge,
    /// `o_h o_i - r_j`: R vertex on an O edge line (two polynomials).
    EdgeVertex,
    /// `o_h o_i o_j - r_k`.
    FacetVertex,
    /// `o_h - r_i r_j r_k`.
    VertexFacet,
    /// `o_h o_i - r_j r_k`: edge/edge contact, or the edge/edge normal in
    /// a minor a-poly.
    EdgeEdge,
    /// `o_h o_i -` or `- r_h r_i`.
    Edge,
    /// `o_h o_i o_j -` or `- r_h r_i r_j`.
    Facet,
    /// Contracted `o_h o_i - r_j r_k r_l` or `o_h o_i o_j - r_k r_l`.
    EdgeFacetParallel,
}

impl ElementType {
    /// Number of contact polynomials denoted, for contact elements.
    pub fn contact_count(self) -> Option<u32> {
        match self {
            ElementType::VertexVertex => Some(3),
            ElementType::VertexEdge | ElementType::EdgeVertex => Some(2),
            ElementType::FacetVertex | ElementType::VertexFacet | ElementType::EdgeEdge => Some(1),
            _ => None,
        }
    }
}

impl Element {
    pub fn new(o: &[u32], r: &[u32]) -> Result<Self, ApolyError> {
        let strictly = |v: &[u32]| v.windows(2).all(|w| w[0] < w[1]);
        if o.len() > 3 || r.len() > 3 || !strictly(o) || !strictly(r) {
            return Err(ApolyError::Malformed(format!(
                "element vertex lists must be strictly increasing with at most 3 entries: {o:?} {r:?}"
            )));
        }
        let e = Element {
            o: o.iter().copied().collect(),
            r: r.iter().copied().collect(),
        };
        e.element_type()?;
        Ok(e)
    }

    /// Builds an element from unsorted vertex lists, sorting them.
    pub(crate) fn from_unsorted(o: &[u32], r: &[u32]) -> Self {
        let mut ov: VertexList = o.iter().copied().collect();
        let mut rv: VertexList = r.iter().copied().collect();
        ov.sort_unstable();
        rv.sort_unstable();
        Element { o: ov, r: rv }
    }

    pub fn size(&self) -> usize {
        self.o.len() + self.r.len()
    }

    /// Block key used for ordering and for the permutations considered by
    /// canonicalization.
    pub fn block(&self) -> (usize, usize) {
        (self.size(), self.o.len())
    }

    pub fn element_type(&self) -> Result<ElementType, ApolyError> {
        use ElementType::*;
        Ok(match (self.o.len(), self.r.len()) {
            (1, 1) => VertexVertex,
            (1, 2) => VertexEdge,
            (2, 1) => EdgeVertex,
            (3, 1) => FacetVertex,
            (1, 3) => VertexFacet,
            (2, 2) => EdgeEdge,
            (2, 0) | (0, 2) => Edge,
            (3, 0) | (0, 3) => Facet,
            (2, 3) | (3, 2) => EdgeFacetParallel,
            (a, b) => {
                return Err(ApolyError::Malformed(format!(
                    "no element type has {a} O and {b} R vertices"
                )))
            }
        })
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexRef> + '_ {
        self.o
            .iter()
            .map(|&i| VertexRef::o(i))
            .chain(self.r.iter().map(|&i| VertexRef::r(i)))
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.block()
            .cmp(&other.block())
            .then_with(|| self.o.as_slice().cmp(other.o.as_slice()))
            .then_with(|| self.r.as_slice().cmp(other.r.as_slice()))
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.o {
            write!(f, "o{i}")?;
        }
        write!(f, "-")?;
        for i in &self.r {
            write!(f, "r{i}")?;
        }
        Ok(())
    }
}

fn parse_side(s: &str, tag: char) -> Result<Vec<u32>, ApolyError> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let Some(body) = rest.strip_prefix(tag) else {
            return Err(ApolyError::Parse(format!("expected `{tag}` in `{s}`")));
        };
        let end = body
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(body.len());
        if end == 0 {
            return Err(ApolyError::Parse(format!("missing index in `{s}`")));
        }
        out.push(
            body[..end]
                .parse()
                .map_err(|_| ApolyError::Parse(format!("bad index in `{s}`")))?,
        );
        rest = &body[end..];
    }
    Ok(out)
}

impl FromStr for Element {
    type Err = ApolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().replace('\u{2212}', "-");
        let (o, r) = s
            .split_once('-')
            .ok_or_else(|| ApolyError::Parse(format!("element `{s}` has no `-`")))?;
        Element::new(&parse_side(o, 'o')?, &parse_side(r, 'r')?)
    }
}

/// Which of the four contact-kind shapes an a-poly has.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Profile {
    /// Four 1-contacts; univariate degree at most 6.
    FourOne,
    /// One 2-contact and two 1-contacts; degree at most 4.
    TwoOneOne,
    /// Two 2-contacts; degree at most 4.
    TwoTwo,
    /// One 3-contact and one 1-contact; degree at most 2.
    ThreeOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Contacts(Profile),
    /// An edge and two edges of the other polyhedron parallel to a plane.
    Parallel,
    /// The d-coefficient minor of three contact polynomials.
    Minor,
}

impl Kind {
    /// Upper bound on the univariate degree in `t`.
    pub fn degree_bound(self) -> usize {
        match self {
            Kind::Contacts(Profile::FourOne) => 6,
            Kind::Contacts(Profile::TwoOneOne) | Kind::Contacts(Profile::TwoTwo) => 4,
            Kind::Contacts(Profile::ThreeOne) => 2,
            Kind::Parallel => 2,
            Kind::Minor => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Contacts(Profile::FourOne) => "contacts-1111",
            Kind::Contacts(Profile::TwoOneOne) => "contacts-211",
            Kind::Contacts(Profile::TwoTwo) => "contacts-22",
            Kind::Contacts(Profile::ThreeOne) => "contacts-31",
            Kind::Parallel => "parallel",
            Kind::Minor => "minor",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = ApolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "contacts-1111" => Kind::Contacts(Profile::FourOne),
            "contacts-211" => Kind::Contacts(Profile::TwoOneOne),
            "contacts-22" => Kind::Contacts(Profile::TwoTwo),
            "contacts-31" => Kind::Contacts(Profile::ThreeOne),
            "parallel" => Kind::Parallel,
            "minor" => Kind::Minor,
            _ => return Err(ApolyError::Parse(format!("unknown kind `{s}`"))),
        })
    }
}

pub type ElementList = ArrayVec<Element, 4>;

/// An a-poly with its elements in canonical order: increasing size, then
/// increasing number of O vertices, then lexicographic vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct APoly {
    elements: ElementList,
}

/// Classifies an element list without requiring it to be sorted.
pub fn classify_elements(elements: &[Element]) -> Result<Kind, ApolyError> {
    let types = elements
        .iter()
        .map(Element::element_type)
        .collect::<Result<Vec<_>, _>>()?;
    let malformed = || {
        ApolyError::Malformed(format!(
            "elements {} do not form an a-poly",
            elements
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ))
    };
    if let Some(counts) = types
        .iter()
        .map(|t| t.contact_count())
        .collect::<Option<Vec<u32>>>()
    {
        if counts.iter().sum::<u32>() == 4 {
            let mut c = counts;
            c.sort_unstable();
            return Ok(Kind::Contacts(match c.as_slice() {
                [1, 1, 1, 1] => Profile::FourOne,
                [1, 1, 2] => Profile::TwoOneOne,
                [2, 2] => Profile::TwoTwo,
                [1, 3] => Profile::ThreeOne,
                _ => return Err(malformed()),
            }));
        }
    }
    use ElementType::*;
    match types.as_slice() {
        [EdgeFacetParallel] => Ok(Kind::Parallel),
        [a, b, c] if [a, b, c].iter().all(|t| **t == Edge) => Ok(Kind::Parallel),
        [a, b, c] if [a, b, c].iter().all(|t| matches!(t, Facet | EdgeEdge)) => Ok(Kind::Minor),
        _ => Err(malformed()),
    }
}

impl APoly {
    /// Sorts the elements and validates the overall shape.
    pub fn new(mut elements: Vec<Element>) -> Result<Self, ApolyError> {
        if elements.is_empty() || elements.len() > 4 {
            return Err(ApolyError::Malformed(format!(
                "an a-poly has 1 to 4 elements, got {}",
                elements.len()
            )));
        }
        classify_elements(&elements)?;
        elements.sort();
        Ok(APoly {
            elements: elements.into_iter().collect(),
        })
    }

    /// Builds from elements assumed structurally valid; sorts them.
    pub(crate) fn from_elements_unchecked(mut elements: ElementList) -> Self {
        elements.sort();
        APoly { elements }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn kind(&self) -> Kind {
        classify_elements(&self.elements).expect("validated at construction")
    }

    /// All distinct vertices, sorted O before R then by index.
    pub fn vertices(&self) -> Vec<VertexRef> {
        let mut v: Vec<VertexRef> = self.elements.iter().flat_map(|e| e.vertices()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Number of distinct O and R vertices.
    pub fn vertex_counts(&self) -> (usize, usize) {
        let v = self.vertices();
        let o = v.iter().filter(|x| x.side == Side::O).count();
        (o, v.len() - o)
    }

    /// True if the vertices are exactly `o0..o(l-1)` and `r0..r(m-1)`.
    pub fn is_contiguous(&self) -> bool {
        let v = self.vertices();
        let mut next = [0u32, 0u32];
        v.iter().all(|x| {
            let slot = &mut next[x.side as usize];
            let ok = x.index == *slot;
            *slot += 1;
            ok
        })
    }

    /// Renames every vertex; the result is re-sorted.
    pub fn map_vertices(&self, mut f: impl FnMut(VertexRef) -> VertexRef) -> Self {
        let elements = self
            .elements
            .iter()
            .map(|e| {
                let o: Vec<u32> = e.o.iter().map(|&i| f(VertexRef::o(i)).index).collect();
                let r: Vec<u32> = e.r.iter().map(|&i| f(VertexRef::r(i)).index).collect();
                Element::from_unsorted(&o, &r)
            })
            .collect();
        APoly::from_elements_unchecked(elements)
    }
}

impl fmt::Display for APoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for APoly {
    type Err = ApolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| ApolyError::Parse(format!("a-poly `{s}` must be parenthesized")))?;
        let elements = inner
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<Element>, _>>()?;
        APoly::new(elements)
    }
}
