//! Barycentric subdivision, with enough structure kept to transport maps,
//! actions, and carrier information.
//!
//! Vertices of `sd(K)` are the faces of K: 0-faces keep their names, higher
//! faces get barycenter names listing their vertices. Simplices of `sd(K)` are
//! the strictly increasing chains of faces. Carriers are recorded at build
//! time; they cannot be parsed back out of names once subdivisions are
//! iterated, because a kept vertex may itself be barycenter-named.

use crate::action::{ActionError, CyclicAction};
use crate::complex::{simplex_complex, Complex, Simplex, VertexId};
use crate::map::{MapError, SimplicialMap};
use crate::name::VertexName;
use itertools::Itertools;
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A barycentric subdivision remembering its base.
pub struct Subdivision {
    pub base: Arc<Complex>,
    pub complex: Arc<Complex>,
    carriers: Vec<Simplex>,
}

fn face_name(base: &Complex, face: &Simplex) -> VertexName {
    if face.dim() == 0 {
        base.name(face.vertices()[0]).clone()
    } else {
        VertexName::bary(base.simplex_names(face))
    }
}

impl Subdivision {
    pub fn of(base: &Arc<Complex>) -> Subdivision {
        let mut b = Complex::builder();
        let mut face_of_name: BTreeMap<VertexName, Simplex> = BTreeMap::new();
        for top in base.maximal_simplices() {
            let n = top.vertices().len();
            for perm in top.vertices().iter().permutations(n) {
                let mut chain: Vec<VertexName> = Vec::with_capacity(n);
                let mut prefix: SmallVec<[VertexId; 8]> = SmallVec::new();
                for &&v in &perm {
                    let pos = prefix.binary_search(&v).unwrap_err();
                    prefix.insert(pos, v);
                    let face = Simplex::from_sorted(prefix.clone());
                    let name = face_name(base, &face);
                    // a name shared by two faces would merge them silently
                    match face_of_name.entry(name.clone()) {
                        std::collections::btree_map::Entry::Vacant(e) => {
                            e.insert(face);
                        }
                        std::collections::btree_map::Entry::Occupied(e) => {
                            assert_eq!(
                                *e.get(),
                                face,
                                "barycenter name {name} is shared by two base faces"
                            );
                        }
                    }
                    chain.push(name);
                }
                b.simplex(chain);
            }
        }
        let complex = b.build().expect("chains never repeat a face");
        let carriers = (0..complex.n_vertices() as VertexId)
            .map(|v| {
                face_of_name
                    .remove(complex.name(v))
                    .expect("every subdivision vertex came from a face")
            })
            .collect();
        Subdivision {
            base: base.clone(),
            complex,
            carriers,
        }
    }

    /// The base face a subdivision vertex sits in (its carrier).
    pub fn carrier(&self, v: VertexId) -> Simplex {
        self.carriers[v as usize].clone()
    }

    /// Simplicial approximation of the identity: each subdivision vertex goes
    /// to the least vertex of its carrier. Homotopic to the identity, hence an
    /// H-isomorphism (checked in tests, certified where it matters).
    pub fn approx_identity(&self) -> SimplicialMap {
        let vertex_map: Vec<VertexId> = (0..self.complex.n_vertices() as VertexId)
            .map(|v| self.carrier(v).vertices()[0])
            .collect();
        SimplicialMap::new(self.complex.clone(), self.base.clone(), vertex_map)
            .expect("carrier vertices of a chain span a face")
    }

    /// Transports an action on the base to the subdivision (barycenters move
    /// with their faces).
    pub fn induced_action(&self, action: &CyclicAction) -> Result<CyclicAction, ActionError> {
        if **action.complex() != *self.base {
            return Err(ActionError::ComplexMismatch);
        }
        let mut generator = Vec::with_capacity(self.complex.n_vertices());
        for v in 0..self.complex.n_vertices() as VertexId {
            let image = action.simplex_image(1, &self.carrier(v));
            generator.push(
                self.complex
                    .require_vertex(&face_name(&self.base, &image))?,
            );
        }
        CyclicAction::new(self.complex.clone(), action.order(), generator)
    }

    /// The coloring of `sd(base)` by carrier dimension, a nondegenerate map
    /// onto the full simplex of the base's dimension.
    pub fn dimension_coloring(&self) -> SimplicialMap {
        let n = self.base.dim().expect("nonempty base") as u32;
        let target = simplex_complex(n);
        let vertex_map: Vec<VertexId> = self
            .carriers
            .iter()
            .map(|c| {
                target
                    .require_vertex(&VertexName::atom(format!("s{}", c.dim())))
                    .expect("carrier dimension fits the base dimension")
            })
            .collect();
        SimplicialMap::new(self.complex.clone(), target, vertex_map)
            .expect("chain dimensions are strictly increasing")
    }
}

/// Functorial subdivision of a map: the barycenter of a face goes to the
/// barycenter of its image face.
pub fn sd_map(
    f: &SimplicialMap,
    sd_dom: &Subdivision,
    sd_cod: &Subdivision,
) -> Result<SimplicialMap, MapError> {
    if *sd_dom.base != **f.domain() {
        return Err(MapError::WrongComplex("domain subdivision"));
    }
    if *sd_cod.base != **f.codomain() {
        return Err(MapError::WrongComplex("codomain subdivision"));
    }
    SimplicialMap::new(
        sd_dom.complex.clone(),
        sd_cod.complex.clone(),
        (0..sd_dom.complex.n_vertices() as VertexId)
            .map(|v| {
                let image = f.image_of(&sd_dom.carrier(v));
                sd_cod
                    .complex
                    .require_vertex(&face_name(&sd_cod.base, &image))
                    .expect("image faces are subdivision vertices")
            })
            .collect(),
    )
}

/// Convenience: just the subdivided complex.
pub fn sd(base: &Arc<Complex>) -> Arc<Complex> {
    Subdivision::of(base).complex
}

/// Two rounds of subdivision make any simplicial action regular enough for a
/// certified quotient; this returns the action transported to sd(sd(K)).
pub fn make_regular(action: &CyclicAction) -> Result<(Subdivision, Subdivision, CyclicAction), ActionError> {
    let first = Subdivision::of(action.complex());
    let a1 = first.induced_action(action)?;
    let second = Subdivision::of(&first.complex);
    let a2 = second.induced_action(&a1)?;
    Ok((first, second, a2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::quotient;
    use crate::chain::{betti_numbers, is_iso_on_all_h};
    use crate::complex::{boundary_simplex, cycle_complex, join, simplex_complex};
    use crate::linalg::Prime;

    fn f2() -> Prime {
        Prime::new(2).unwrap()
    }
    fn f3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn sd_counts_chains() {
        // full triangle: 7 vertices, 12 edges, 6 triangles
        let t = simplex_complex(2);
        let s = sd(&t);
        assert_eq!(s.f_vector(), vec![7, 12, 6]);
        // circle doubles
        let c = sd(&cycle_complex(4, "c").unwrap());
        assert_eq!(c.f_vector(), vec![8, 8]);
        // boundary of the 5-simplex: 6 facets, 120 chains each
        let b = sd(&boundary_simplex(5));
        assert_eq!(b.faces(4).len(), 720);
    }

    #[test]
    fn sd_preserves_homology() {
        let complexes = [
            join(
                &cycle_complex(5, "x").unwrap(),
                &cycle_complex(4, "y").unwrap(),
            )
            .unwrap(),
            boundary_simplex(3),
        ];
        for k in complexes {
            let s = sd(&k);
            for fp in [f2(), f3()] {
                assert_eq!(betti_numbers(&s, fp), betti_numbers(&k, fp));
            }
            assert_eq!(s.euler_characteristic(), k.euler_characteristic());
        }
    }

    #[test]
    fn carrier_reads_back_from_names() {
        let base = simplex_complex(2);
        let s = Subdivision::of(&base);
        for v in 0..s.complex.n_vertices() as u32 {
            let carrier = s.carrier(v);
            assert!(base.contains_simplex(&carrier));
        }
        // one vertex per face of the base
        assert_eq!(
            s.complex.n_vertices(),
            base.faces(0).len() + base.faces(1).len() + base.faces(2).len()
        );
    }

    #[test]
    fn approx_identity_is_an_h_iso() {
        for k in [
            cycle_complex(5, "c").unwrap(),
            boundary_simplex(3),
            join(
                &cycle_complex(4, "x").unwrap(),
                &cycle_complex(4, "y").unwrap(),
            )
            .unwrap(),
        ] {
            let s = Subdivision::of(&k);
            let a = s.approx_identity();
            assert!(is_iso_on_all_h(&a, f2()).unwrap());
            assert!(is_iso_on_all_h(&a, f3()).unwrap());
        }
    }

    #[test]
    fn dimension_coloring_is_nondegenerate_and_onto() {
        let base = boundary_simplex(3);
        let s = Subdivision::of(&base);
        let coloring = s.dimension_coloring();
        assert!(coloring.is_nondegenerate());
        // top chains hit the full color simplex
        let top = s.complex.dim().unwrap();
        for cell in s.complex.faces(top) {
            assert_eq!(coloring.image_of(cell).dim(), top);
        }
    }

    #[test]
    fn sd_map_is_functorial() {
        let c6 = cycle_complex(6, "a").unwrap();
        let c3 = cycle_complex(3, "b").unwrap();
        let wrap = SimplicialMap::by_name(c6.clone(), c3.clone(), |n| {
            let VertexName::Atom(s) = n else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            VertexName::atom(format!("b{}", i % 3))
        })
        .unwrap();
        let sd6 = Subdivision::of(&c6);
        let sd3 = Subdivision::of(&c3);
        let swrap = sd_map(&wrap, &sd6, &sd3).unwrap();
        assert!(swrap.is_nondegenerate());
        // subdivided identity is the identity
        let id = SimplicialMap::identity(c3.clone());
        let sid = sd_map(&id, &sd3, &sd3).unwrap();
        assert_eq!(sid.vertex_map(), SimplicialMap::identity(sd3.complex.clone()).vertex_map());
        // functoriality: sd(wrap then id) = sd(wrap) then sd(id)
        let lhs = sd_map(&wrap.then(&id).unwrap(), &sd6, &sd3).unwrap();
        let rhs = swrap.then(&sid).unwrap();
        assert_eq!(lhs.vertex_map(), rhs.vertex_map());
        // degree is preserved under subdivision
        assert_eq!(
            crate::degree::simplicial_degree(&swrap).unwrap().abs(),
            2
        );
    }

    #[test]
    fn induced_action_and_regularization() {
        // the half turn on C4 does not quotient; after one sd it does
        let c4 = cycle_complex(4, "y").unwrap();
        let half = CyclicAction::by_name(c4.clone(), 2, |name| {
            let VertexName::Atom(s) = name else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            VertexName::atom(format!("y{}", (i + 2) % 4))
        })
        .unwrap();
        assert!(quotient(&half).is_err());

        let s1 = Subdivision::of(&c4);
        let a1 = s1.induced_action(&half).unwrap();
        assert_eq!(a1.exact_order(), 2);
        let q1 = quotient(&a1).unwrap();
        // C8 / half turn = C4
        assert_eq!(q1.complex.f_vector(), vec![4, 4]);

        // make_regular goes through two rounds and also certifies
        let (_, _, a2) = make_regular(&half).unwrap();
        let q2 = quotient(&a2).unwrap();
        assert_eq!(q2.complex.f_vector(), vec![8, 8]);
        assert_eq!(betti_numbers(&q2.complex, f2()), vec![1, 1]);
    }

    #[test]
    fn induced_action_rejects_foreign_complexes() {
        let c4 = cycle_complex(4, "y").unwrap();
        let c5 = cycle_complex(5, "z").unwrap();
        let rot = CyclicAction::by_name(c5.clone(), 5, |name| {
            let VertexName::Atom(s) = name else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            VertexName::atom(format!("z{}", (i + 1) % 5))
        })
        .unwrap();
        let s4 = Subdivision::of(&c4);
        assert!(matches!(
            s4.induced_action(&rot),
            Err(ActionError::ComplexMismatch)
        ));
    }
}
