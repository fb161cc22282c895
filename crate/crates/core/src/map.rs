//! Simplicial maps between complexes.

use crate::complex::{Complex, ComplexError, Simplex, VertexId};
use crate::name::VertexName;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("vertex map has {got} entries for a domain with {want} vertices")]
    WrongLength { got: usize, want: usize },
    #[error("vertex {0} maps outside the codomain")]
    TargetOutOfRange(String),
    #[error("image of {simplex} is {image}, not a face of the codomain")]
    NotSimplicial { simplex: String, image: String },
    #[error("codomain of the first map differs from domain of the second")]
    CompositionMismatch,
    #[error("{0} does not match the expected complex")]
    WrongComplex(&'static str),
    #[error("{0} is not a subcomplex of the domain")]
    NotASubcomplex(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A vertex map between complexes that sends simplices to simplices.
///
/// The map may collapse vertices; `is_nondegenerate` reports whether it does.
#[derive(Clone)]
pub struct SimplicialMap {
    domain: Arc<Complex>,
    codomain: Arc<Complex>,
    vertex_map: Vec<VertexId>,
}

impl fmt::Debug for SimplicialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimplicialMap({:?} -> {:?})", self.domain, self.codomain)
    }
}

impl SimplicialMap {
    /// Checks simplex images of every maximal simplex; faces follow.
    pub fn new(
        domain: Arc<Complex>,
        codomain: Arc<Complex>,
        vertex_map: Vec<VertexId>,
    ) -> Result<SimplicialMap, MapError> {
        if vertex_map.len() != domain.n_vertices() {
            return Err(MapError::WrongLength {
                got: vertex_map.len(),
                want: domain.n_vertices(),
            });
        }
        if let Some(v) = vertex_map
            .iter()
            .position(|&w| (w as usize) >= codomain.n_vertices())
        {
            return Err(MapError::TargetOutOfRange(domain.name(v as VertexId).to_string()));
        }
        let map = SimplicialMap {
            domain,
            codomain,
            vertex_map,
        };
        for s in map.domain.maximal_simplices() {
            let image = map.image_of(s);
            if !map.codomain.contains_simplex(&image) {
                return Err(MapError::NotSimplicial {
                    simplex: map.domain.describe(s),
                    image: map.codomain.describe(&image),
                });
            }
        }
        Ok(map)
    }

    /// Builds the vertex map by transforming names: domain vertex `n` goes to
    /// the codomain vertex named `f(n)`.
    pub fn by_name(
        domain: Arc<Complex>,
        codomain: Arc<Complex>,
        f: impl Fn(&VertexName) -> VertexName,
    ) -> Result<SimplicialMap, MapError> {
        let mut vertex_map = Vec::with_capacity(domain.n_vertices());
        for name in domain.names() {
            vertex_map.push(codomain.require_vertex(&f(name))?);
        }
        SimplicialMap::new(domain, codomain, vertex_map)
    }

    /// Identity on a complex.
    pub fn identity(c: Arc<Complex>) -> SimplicialMap {
        let n = c.n_vertices() as VertexId;
        SimplicialMap {
            domain: c.clone(),
            codomain: c,
            vertex_map: (0..n).collect(),
        }
    }

    /// Inclusion of a subcomplex, matching vertices by name.
    pub fn inclusion(sub: Arc<Complex>, sup: Arc<Complex>) -> Result<SimplicialMap, MapError> {
        if !sub.is_subcomplex_of(&sup) {
            return Err(MapError::NotASubcomplex(format!("{sub:?}")));
        }
        SimplicialMap::by_name(sub, sup, |n| n.clone())
    }

    pub fn domain(&self) -> &Arc<Complex> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Complex> {
        &self.codomain
    }

    pub fn vertex_map(&self) -> &[VertexId] {
        &self.vertex_map
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        self.vertex_map[v as usize]
    }

    /// Image of a simplex, with repeats collapsed.
    pub fn image_of(&self, s: &Simplex) -> Simplex {
        Simplex::from_image(s.vertices().iter().map(|&v| self.apply(v)))
    }

    /// Image of a simplex with the sign of the vertex-sorting permutation, or
    /// None when the image is degenerate.
    pub fn signed_image(&self, s: &Simplex) -> Option<(Simplex, i64)> {
        let images: Vec<VertexId> = s.vertices().iter().map(|&v| self.apply(v)).collect();
        let mut inversions = 0usize;
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                match images[i].cmp(&images[j]) {
                    std::cmp::Ordering::Greater => inversions += 1,
                    std::cmp::Ordering::Equal => return None,
                    std::cmp::Ordering::Less => {}
                }
            }
        }
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        Some((Simplex::from_image(images), sign))
    }

    /// True if no simplex loses dimension. Checked on maximal simplices; a map
    /// injective on a simplex is injective on its faces.
    pub fn is_nondegenerate(&self) -> bool {
        self.domain
            .maximal_simplices()
            .iter()
            .all(|s| self.image_of(s).dim() == s.dim())
    }

    pub fn is_injective_on_vertices(&self) -> bool {
        let mut seen = vec![false; self.codomain.n_vertices()];
        self.vertex_map.iter().all(|&w| {
            let hit = seen[w as usize];
            seen[w as usize] = true;
            !hit
        })
    }

    /// True if every codomain vertex is hit.
    pub fn is_surjective_on_vertices(&self) -> bool {
        let mut seen = vec![false; self.codomain.n_vertices()];
        for &w in &self.vertex_map {
            seen[w as usize] = true;
        }
        seen.into_iter().all(|b| b)
    }

    /// `other` after `self` (self: K -> L, other: L -> M, result: K -> M).
    pub fn then(&self, other: &SimplicialMap) -> Result<SimplicialMap, MapError> {
        if !Arc::ptr_eq(&self.codomain, &other.domain) && *self.codomain != *other.domain {
            return Err(MapError::CompositionMismatch);
        }
        let vertex_map = self.vertex_map.iter().map(|&v| other.apply(v)).collect();
        // composite of simplicial maps is simplicial; skip re-verification
        Ok(SimplicialMap {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            vertex_map,
        })
    }

    /// Restriction to a subcomplex of the domain (matched by name).
    pub fn restrict_to(&self, sub: Arc<Complex>) -> Result<SimplicialMap, MapError> {
        if !sub.is_subcomplex_of(&self.domain) {
            return Err(MapError::NotASubcomplex(format!("{sub:?}")));
        }
        let mut vertex_map = Vec::with_capacity(sub.n_vertices());
        for name in sub.names() {
            let v = self.domain.require_vertex(name)?;
            vertex_map.push(self.apply(v));
        }
        Ok(SimplicialMap {
            domain: sub,
            codomain: self.codomain.clone(),
            vertex_map,
        })
    }

    /// Vertices of the codomain hit by the map, as a sorted id list.
    pub fn image_vertices(&self) -> Vec<VertexId> {
        let mut image: Vec<VertexId> = self.vertex_map.clone();
        image.sort_unstable();
        image.dedup();
        image
    }

    /// The image subcomplex in the codomain.
    pub fn image_complex(&self) -> Result<Arc<Complex>, ComplexError> {
        let mut b = Complex::builder();
        for s in self.domain.maximal_simplices() {
            b.simplex(self.codomain.simplex_names(&self.image_of(s)));
        }
        b.build()
    }

    /// Preimage subcomplex of a subcomplex of the codomain: all domain faces
    /// whose image lands in it. The result is a subcomplex of the domain.
    pub fn preimage_of(&self, target: &Complex) -> Result<Arc<Complex>, ComplexError> {
        let target_ids: Result<Vec<Option<VertexId>>, _> = self
            .codomain
            .names()
            .iter()
            .map(|n| Ok(target.vertex_id(n)))
            .collect::<Result<_, ComplexError>>();
        let target_ids = target_ids?;
        let lands_in = |s: &Simplex| -> bool {
            let ids: Option<Vec<VertexId>> = s
                .vertices()
                .iter()
                .map(|&v| target_ids[self.apply(v) as usize])
                .collect();
            match ids {
                Some(ids) => target.contains_simplex(&Simplex::from_image(ids)),
                None => false,
            }
        };
        let mut b = Complex::builder();
        let Some(dim) = self.domain.dim() else {
            return b.build();
        };
        for q in (0..=dim).rev() {
            for s in self.domain.faces(q) {
                if lands_in(s) {
                    b.simplex(self.domain.simplex_names(s));
                }
            }
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cycle_complex, simplex_complex};

    fn atom(s: impl Into<String>) -> VertexName {
        VertexName::atom(s)
    }

    #[test]
    fn wrap_double_cover_is_simplicial_and_degenerate_nowhere() {
        // c6 -> c3 by index mod 3
        let c6 = cycle_complex(6, "a").unwrap();
        let c3 = cycle_complex(3, "b").unwrap();
        let wrap = SimplicialMap::by_name(c6.clone(), c3.clone(), |n| {
            let VertexName::Atom(s) = n else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            atom(format!("b{}", i % 3))
        })
        .unwrap();
        assert!(wrap.is_nondegenerate());
        assert!(wrap.is_surjective_on_vertices());
        assert!(!wrap.is_injective_on_vertices());
        assert_eq!(*wrap.image_complex().unwrap(), *c3);
    }

    #[test]
    fn collapsing_an_edge_of_a_triangle_is_rejected_on_a_hollow_target() {
        // collapse c4 to a single vertex: simplicial but degenerate
        let c4 = cycle_complex(4, "a").unwrap();
        let point = Complex::from_simplices([vec![atom("a0")]]).unwrap();
        let collapse = SimplicialMap::by_name(c4.clone(), point, |_| atom("a0")).unwrap();
        assert!(!collapse.is_nondegenerate());

        // but a vertex map whose simplex image is a missing face fails
        let tri = cycle_complex(3, "t").unwrap(); // hollow triangle
        let full = simplex_complex(2);
        let bad = SimplicialMap::by_name(full, tri, |_| atom("t0"));
        // constant map is fine on a hollow target (image is a vertex)
        assert!(bad.is_ok());
        let hollow_square = cycle_complex(4, "q").unwrap();
        let skew = SimplicialMap::new(
            hollow_square.clone(),
            hollow_square.clone(),
            vec![0, 2, 1, 3],
        );
        assert!(matches!(skew, Err(MapError::NotSimplicial { .. })));
    }

    #[test]
    fn composition_and_identity() {
        let c6 = cycle_complex(6, "a").unwrap();
        let c3 = cycle_complex(3, "b").unwrap();
        let wrap = SimplicialMap::by_name(c6.clone(), c3.clone(), |n| {
            let VertexName::Atom(s) = n else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            atom(format!("b{}", i % 3))
        })
        .unwrap();
        let id = SimplicialMap::identity(c3.clone());
        let comp = wrap.then(&id).unwrap();
        assert_eq!(comp.vertex_map(), wrap.vertex_map());
        let mismatch = wrap.then(&SimplicialMap::identity(c6.clone()));
        assert!(matches!(mismatch, Err(MapError::CompositionMismatch)));
    }

    #[test]
    fn preimage_of_a_vertex_under_the_wrap() {
        let c6 = cycle_complex(6, "a").unwrap();
        let c3 = cycle_complex(3, "b").unwrap();
        let wrap = SimplicialMap::by_name(c6.clone(), c3.clone(), |n| {
            let VertexName::Atom(s) = n else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            atom(format!("b{}", i % 3))
        })
        .unwrap();
        let point = Complex::from_simplices([vec![atom("b0")]]).unwrap();
        let fiber = wrap.preimage_of(&point).unwrap();
        // two antipodal vertices, no edges
        assert_eq!(fiber.f_vector(), vec![2]);
        let sub_edge = Complex::from_simplices([vec![atom("b0"), atom("b1")]]).unwrap();
        let strip = wrap.preimage_of(&sub_edge).unwrap();
        assert_eq!(strip.f_vector(), vec![4, 2]);
    }

    #[test]
    fn restriction_to_a_subcomplex() {
        let c6 = cycle_complex(6, "a").unwrap();
        let c3 = cycle_complex(3, "b").unwrap();
        let wrap = SimplicialMap::by_name(c6.clone(), c3.clone(), |n| {
            let VertexName::Atom(s) = n else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            atom(format!("b{}", i % 3))
        })
        .unwrap();
        let arc = Complex::from_simplices([
            vec![atom("a0"), atom("a1")],
            vec![atom("a1"), atom("a2")],
        ])
        .unwrap();
        let r = wrap.restrict_to(arc).unwrap();
        assert!(r.is_nondegenerate());
        assert_eq!(r.domain().n_vertices(), 3);
    }
}
