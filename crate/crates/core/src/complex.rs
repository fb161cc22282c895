//! Finite abstract simplicial complexes.
//!
//! A complex owns a sorted table of [`VertexName`]s (vertex id = position in the
//! table) and its maximal simplices; the full face poset is indexed lazily on first
//! use. All constructions go through [`ComplexBuilder`], which canonicalizes ids,
//! rejects degenerate input, and drops dominated simplices, so two structurally
//! equal inputs always yield identical complexes.

use crate::name::VertexName;
use smallvec::SmallVec;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

pub type VertexId = u32;

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("simplex {0:?} repeats a vertex")]
    DegenerateSimplex(Vec<String>),
    #[error("vertex {0} is not in the complex")]
    UnknownVertex(String),
    #[error("face {0} is not in the complex")]
    MissingFace(String),
    #[error("join operands share the vertex {0}")]
    JoinOverlap(String),
    #[error("{what} needs at least {min} vertices, got {n}")]
    TooSmall {
        what: &'static str,
        n: u32,
        min: u32,
    },
    #[error("simplex with {0} vertices exceeds the supported dimension")]
    TooLarge(usize),
}

/// A face, stored as strictly increasing vertex ids of its owning complex.
///
/// The empty face is not represented; every `Simplex` has at least one vertex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(SmallVec<[VertexId; 8]>);

// Face-index construction enumerates all subsets of a maximal simplex.
const MAX_SIMPLEX_VERTICES: usize = 24;

impl Simplex {
    /// Builds from arbitrary-order ids; rejects repeats.
    pub fn try_new(mut ids: Vec<VertexId>) -> Result<Self, ComplexError> {
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(ComplexError::DegenerateSimplex(
                ids.iter().map(|v| v.to_string()).collect(),
            ));
        }
        if ids.is_empty() || ids.len() > MAX_SIMPLEX_VERTICES {
            return Err(ComplexError::TooLarge(ids.len()));
        }
        Ok(Simplex(SmallVec::from_vec(ids)))
    }

    /// Builds from ids already known to be strictly increasing and nonempty.
    pub(crate) fn from_sorted(ids: SmallVec<[VertexId; 8]>) -> Self {
        debug_assert!(!ids.is_empty());
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Simplex(ids)
    }

    /// Sorts and dedups, e.g. for the image of a simplex under a vertex map.
    pub fn from_image(ids: impl IntoIterator<Item = VertexId>) -> Self {
        let mut ids: SmallVec<[VertexId; 8]> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        Simplex::from_sorted(ids)
    }

    pub fn vertex(v: VertexId) -> Self {
        Simplex(SmallVec::from_slice(&[v]))
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        if self.0.len() > other.0.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for v in &self.0 {
            for w in it.by_ref() {
                match w.cmp(v) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    /// Codimension-1 faces, in the order that omits vertex 0, 1, ...; only
    /// defined for positive dimension.
    pub fn boundary_faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        debug_assert!(self.dim() >= 1);
        (0..self.0.len()).map(move |i| self.without_index(i))
    }

    pub(crate) fn without_index(&self, i: usize) -> Simplex {
        let mut ids = self.0.clone();
        ids.remove(i);
        Simplex(ids)
    }

    /// The face obtained by removing one vertex (which must be present).
    pub fn without_vertex(&self, v: VertexId) -> Simplex {
        let i = self.0.binary_search(&v).expect("vertex not in simplex");
        self.without_index(i)
    }

    /// Disjoint union with a simplex over disjoint vertices (as in a join).
    pub fn merge_disjoint(&self, other: &Simplex) -> Simplex {
        let mut ids: SmallVec<[VertexId; 8]> = SmallVec::with_capacity(self.0.len() + other.0.len());
        ids.extend_from_slice(&self.0);
        ids.extend_from_slice(&other.0);
        ids.sort_unstable();
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Simplex(ids)
    }

    pub fn with_vertex(&self, v: VertexId) -> Simplex {
        debug_assert!(!self.contains_vertex(v));
        let mut ids = self.0.clone();
        let pos = ids.binary_search(&v).unwrap_err();
        ids.insert(pos, v);
        Simplex(ids)
    }

    /// All nonempty subsets.
    fn all_faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.0.len();
        (1u32..(1u32 << n)).map(move |mask| {
            let ids: SmallVec<[VertexId; 8]> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.0[i])
                .collect();
            Simplex(ids)
        })
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Default)]
struct FaceIndex {
    /// `by_dim[q]` holds every q-face, sorted ascending.
    by_dim: Vec<Vec<Simplex>>,
}

impl FaceIndex {
    fn build(maximal: &[Simplex]) -> FaceIndex {
        let dim = maximal.iter().map(|s| s.dim()).max();
        let Some(dim) = dim else {
            return FaceIndex::default();
        };
        let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); dim + 1];
        for top in maximal {
            for face in top.all_faces() {
                sets[face.dim()].insert(face);
            }
        }
        FaceIndex {
            by_dim: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }
}

/// An immutable simplicial complex with canonically numbered vertices.
pub struct Complex {
    names: Vec<VertexName>,
    maximal: Vec<Simplex>,
    index: OnceLock<FaceIndex>,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.maximal == other.maximal
    }
}
impl Eq for Complex {}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Complex(v={}, max={}, f={:?})",
            self.names.len(),
            self.maximal.len(),
            self.f_vector()
        )
    }
}

impl Complex {
    pub fn builder() -> ComplexBuilder {
        ComplexBuilder::default()
    }

    /// Builds from maximal simplices given as vertex-name lists.
    pub fn from_simplices(
        simplices: impl IntoIterator<Item = Vec<VertexName>>,
    ) -> Result<Arc<Complex>, ComplexError> {
        let mut b = Complex::builder();
        for s in simplices {
            b.simplex(s);
        }
        b.build()
    }

    pub fn n_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[VertexName] {
        &self.names
    }

    pub fn name(&self, v: VertexId) -> &VertexName {
        &self.names[v as usize]
    }

    pub fn vertex_id(&self, name: &VertexName) -> Option<VertexId> {
        self.names.binary_search(name).ok().map(|i| i as VertexId)
    }

    pub fn require_vertex(&self, name: &VertexName) -> Result<VertexId, ComplexError> {
        self.vertex_id(name)
            .ok_or_else(|| ComplexError::UnknownVertex(name.to_string()))
    }

    pub fn maximal_simplices(&self) -> &[Simplex] {
        &self.maximal
    }

    /// None for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.maximal.iter().map(|s| s.dim()).max()
    }

    fn index(&self) -> &FaceIndex {
        self.index.get_or_init(|| FaceIndex::build(&self.maximal))
    }

    /// All q-faces, sorted ascending; empty slice when out of range.
    pub fn faces(&self, q: usize) -> &[Simplex] {
        self.index().by_dim.get(q).map_or(&[], |v| v.as_slice())
    }

    /// Position of `s` within the sorted q-face list, if present.
    pub fn face_position(&self, s: &Simplex) -> Option<usize> {
        self.index()
            .by_dim
            .get(s.dim())?
            .binary_search(s)
            .ok()
    }

    pub fn contains_simplex(&self, s: &Simplex) -> bool {
        self.face_position(s).is_some()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.index().by_dim.iter().map(|v| v.len()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(q, &n)| if q % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    pub fn simplex_names(&self, s: &Simplex) -> Vec<VertexName> {
        s.vertices().iter().map(|&v| self.name(v).clone()).collect()
    }

    /// Renders a simplex with vertex names, for error messages and reports.
    pub fn describe(&self, s: &Simplex) -> String {
        let names: Vec<String> = s.vertices().iter().map(|&v| self.name(v).to_string()).collect();
        format!("{{{}}}", names.join(" "))
    }

    /// The subcomplex of faces of dimension at most `k`.
    pub fn skeleton(&self, k: usize) -> Result<Arc<Complex>, ComplexError> {
        let mut b = Complex::builder();
        for s in self.faces(k) {
            b.simplex(self.simplex_names(s));
        }
        for s in &self.maximal {
            if s.dim() < k {
                b.simplex(self.simplex_names(s));
            }
        }
        b.build()
    }

    /// The closed star of a vertex: all simplices containing it, with their faces.
    pub fn closed_star(&self, name: &VertexName) -> Result<Arc<Complex>, ComplexError> {
        let v = self.require_vertex(name)?;
        let mut b = Complex::builder();
        for s in self.maximal.iter().filter(|s| s.contains_vertex(v)) {
            b.simplex(self.simplex_names(s));
        }
        b.build()
    }

    /// The link of a vertex: faces whose union with the vertex is a face.
    pub fn link(&self, name: &VertexName) -> Result<Arc<Complex>, ComplexError> {
        let v = self.require_vertex(name)?;
        let mut b = Complex::builder();
        for s in self.maximal.iter().filter(|s| s.contains_vertex(v)) {
            if s.dim() == 0 {
                // isolated star: empty link
                continue;
            }
            b.simplex(self.simplex_names(&s.without_vertex(v)));
        }
        b.build()
    }

    /// Removes every face containing any of the marked faces (and nothing else).
    /// Marking a vertex removes its open star.
    pub fn delete_cofaces(&self, marked: &[Simplex]) -> Result<Arc<Complex>, ComplexError> {
        for m in marked {
            if !self.contains_simplex(m) {
                return Err(ComplexError::MissingFace(self.describe(m)));
            }
        }
        let survives = |s: &Simplex| !marked.iter().any(|m| m.is_face_of(s));
        self.maximal_of_filtered(survives)
    }

    /// The full subcomplex spanned by the named vertices: every face of `self`
    /// all of whose vertices lie in the set.
    pub fn full_subcomplex(
        &self,
        verts: &BTreeSet<VertexName>,
    ) -> Result<Arc<Complex>, ComplexError> {
        let mut in_set = vec![false; self.names.len()];
        for name in verts {
            in_set[self.require_vertex(name)? as usize] = true;
        }
        self.maximal_of_filtered(|s| s.vertices().iter().all(|&v| in_set[v as usize]))
    }

    /// Builds the subcomplex of all faces passing `keep` (which must be closed
    /// under taking faces) by extracting its maximal elements top-down.
    fn maximal_of_filtered(
        &self,
        keep: impl Fn(&Simplex) -> bool,
    ) -> Result<Arc<Complex>, ComplexError> {
        let Some(dim) = self.dim() else {
            return Complex::builder().build();
        };
        let mut b = Complex::builder();
        // covered = kept faces that sit inside some kept face one dimension up
        let mut covered: BTreeSet<Simplex> = BTreeSet::new();
        for q in (0..=dim).rev() {
            let mut next_covered = BTreeSet::new();
            for s in self.faces(q) {
                if !keep(s) {
                    continue;
                }
                if !covered.contains(s) {
                    b.simplex(self.simplex_names(s));
                }
                if q > 0 {
                    for face in s.boundary_faces() {
                        next_covered.insert(face);
                    }
                }
            }
            covered = next_covered;
        }
        b.build()
    }

    /// True if every simplex of `self` is (by vertex name) a face of `other`.
    pub fn is_subcomplex_of(&self, other: &Complex) -> bool {
        self.translate_all(other).is_some()
    }

    fn translate_all(&self, other: &Complex) -> Option<Vec<Simplex>> {
        self.maximal
            .iter()
            .map(|s| {
                let ids: Option<SmallVec<[VertexId; 8]>> = s
                    .vertices()
                    .iter()
                    .map(|&v| other.vertex_id(self.name(v)))
                    .collect();
                let t = Simplex::from_image(ids?);
                other.contains_simplex(&t).then_some(t)
            })
            .collect()
    }

    /// True if `self` is a subcomplex of `other` containing every face of
    /// `other` spanned by `self`'s vertices.
    pub fn is_full_subcomplex_of(&self, other: &Complex) -> bool {
        if !self.is_subcomplex_of(other) {
            return false;
        }
        let mut in_sub = vec![false; other.n_vertices()];
        for name in &self.names {
            match other.vertex_id(name) {
                Some(v) => in_sub[v as usize] = true,
                None => return false,
            }
        }
        let Some(dim) = other.dim() else { return true };
        for q in 0..=dim {
            for s in other.faces(q) {
                if s.vertices().iter().all(|&v| in_sub[v as usize]) {
                    let ids = s.vertices().iter().map(|&v| {
                        self.vertex_id(other.name(v)).expect("vertex translated above")
                    });
                    if !self.contains_simplex(&Simplex::from_image(ids)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Number of connected components (isolated vertices count).
    pub fn component_count(&self) -> usize {
        let labels = self.component_labels();
        labels.iter().collect::<BTreeSet<_>>().len()
    }

    /// Component label per vertex; labels are the least vertex id in the component.
    pub fn component_labels(&self) -> Vec<VertexId> {
        let mut parent: Vec<VertexId> = (0..self.names.len() as VertexId).collect();
        fn find(parent: &mut [VertexId], v: VertexId) -> VertexId {
            let mut v = v;
            while parent[v as usize] != v {
                parent[v as usize] = parent[parent[v as usize] as usize];
                v = parent[v as usize];
            }
            v
        }
        for e in self.faces(1) {
            let (a, b) = (e.vertices()[0], e.vertices()[1]);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi as usize] = lo;
        }
        (0..self.names.len() as VertexId)
            .map(|v| find(&mut parent, v))
            .collect()
    }
}

/// Join of two complexes on disjoint vertex sets: faces are all unions of a face
/// of one with a face of the other (and the original faces).
pub fn join(a: &Complex, b: &Complex) -> Result<Arc<Complex>, ComplexError> {
    let mut ai = a.names.iter().peekable();
    let mut bi = b.names.iter().peekable();
    while let (Some(x), Some(y)) = (ai.peek(), bi.peek()) {
        match x.cmp(y) {
            std::cmp::Ordering::Less => {
                ai.next();
            }
            std::cmp::Ordering::Greater => {
                bi.next();
            }
            std::cmp::Ordering::Equal => return Err(ComplexError::JoinOverlap(x.to_string())),
        }
    }
    let mut builder = Complex::builder();
    if a.maximal.is_empty() || b.maximal.is_empty() {
        let src = if a.maximal.is_empty() { b } else { a };
        for s in &src.maximal {
            builder.simplex(src.simplex_names(s));
        }
        return builder.build();
    }
    for sa in &a.maximal {
        for sb in &b.maximal {
            let mut names = a.simplex_names(sa);
            names.extend(b.simplex_names(sb));
            builder.simplex(names);
        }
    }
    builder.build()
}

/// Disjoint union; vertex names are tagged with the operand index.
pub fn disjoint_union(parts: &[&Complex]) -> Result<Arc<Complex>, ComplexError> {
    let mut b = Complex::builder();
    for (k, part) in parts.iter().enumerate() {
        for s in &part.maximal {
            b.simplex(
                part.simplex_names(s)
                    .into_iter()
                    .map(|n| VertexName::tagged(k as u32, n))
                    .collect(),
            );
        }
    }
    b.build()
}

/// The cycle on `n >= 3` vertices, with atoms `{prefix}0 .. {prefix}{n-1}`.
pub fn cycle_complex(n: u32, prefix: &str) -> Result<Arc<Complex>, ComplexError> {
    if n < 3 {
        return Err(ComplexError::TooSmall {
            what: "cycle",
            n,
            min: 3,
        });
    }
    let name = |i: u32| VertexName::atom(format!("{prefix}{i}"));
    Complex::from_simplices((0..n).map(|i| vec![name(i), name((i + 1) % n)]))
}

/// The full n-simplex on atoms `s0 .. s{n}`.
pub fn simplex_complex(n: u32) -> Arc<Complex> {
    let verts: Vec<VertexName> = (0..=n).map(|i| VertexName::atom(format!("s{i}"))).collect();
    Complex::from_simplices([verts]).expect("distinct atoms")
}

/// The boundary of the n-simplex (empty for n = 0).
pub fn boundary_simplex(n: u32) -> Arc<Complex> {
    let verts: Vec<VertexName> = (0..=n).map(|i| VertexName::atom(format!("s{i}"))).collect();
    let faces = (0..=n).map(|omit| {
        verts
            .iter()
            .enumerate()
            .filter(|(i, _)| *i as u32 != omit)
            .map(|(_, v)| v.clone())
            .collect::<Vec<_>>()
    });
    Complex::from_simplices(faces.filter(|f| !f.is_empty())).expect("distinct atoms")
}

/// Boundary of the n-dimensional cross polytope: vertices `p{i}`/`m{i}` per axis
/// `i < n`, facets = one sign choice per axis. Dimension n-1, 2^n facets.
pub fn cross_polytope_boundary(n: u32) -> Arc<Complex> {
    assert!(n >= 1 && n <= 16, "cross polytope axis count out of range");
    let facets = (0u32..(1 << n)).map(|signs| {
        (0..n)
            .map(|i| {
                let side = if signs & (1 << i) != 0 { "p" } else { "m" };
                VertexName::atom(format!("{side}{i}"))
            })
            .collect::<Vec<_>>()
    });
    Complex::from_simplices(facets).expect("distinct atoms")
}

#[derive(Default)]
pub struct ComplexBuilder {
    simplices: Vec<Vec<VertexName>>,
}

impl ComplexBuilder {
    pub fn simplex(&mut self, vertices: Vec<VertexName>) -> &mut Self {
        self.simplices.push(vertices);
        self
    }

    pub fn build(&mut self) -> Result<Arc<Complex>, ComplexError> {
        let mut name_set: BTreeSet<VertexName> = BTreeSet::new();
        for s in &self.simplices {
            name_set.extend(s.iter().cloned());
        }
        let names: Vec<VertexName> = name_set.into_iter().collect();
        let id_of = |n: &VertexName| names.binary_search(n).expect("collected above") as VertexId;

        let mut simplices: Vec<Simplex> = Vec::with_capacity(self.simplices.len());
        for s in &self.simplices {
            let mut ids: SmallVec<[VertexId; 8]> = s.iter().map(id_of).collect();
            ids.sort_unstable();
            if ids.windows(2).any(|w| w[0] == w[1]) {
                return Err(ComplexError::DegenerateSimplex(
                    s.iter().map(|n| n.to_string()).collect(),
                ));
            }
            if ids.len() > MAX_SIMPLEX_VERTICES {
                return Err(ComplexError::TooLarge(ids.len()));
            }
            simplices.push(Simplex(ids));
        }

        // Drop duplicates and dominated simplices. Longer first, so a dominator
        // is always already kept when its faces come up; a simplex is dominated
        // iff some kept simplex through its first vertex contains it.
        simplices.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.cmp(b)));
        simplices.dedup();
        let mut kept: Vec<Simplex> = Vec::with_capacity(simplices.len());
        let mut through_vertex: Vec<Vec<usize>> = vec![Vec::new(); names.len()];
        for s in simplices {
            let first = s.vertices()[0] as usize;
            let dominated = through_vertex[first]
                .iter()
                .any(|&k| s.is_face_of(&kept[k]));
            if dominated {
                continue;
            }
            let idx = kept.len();
            for &v in s.vertices() {
                through_vertex[v as usize].push(idx);
            }
            kept.push(s);
        }
        kept.sort();

        Ok(Arc::new(Complex {
            names,
            maximal: kept,
            index: OnceLock::new(),
        }))
    }
}
