//! A shared zoo of small complexes and maps used by property suites and
//! negative controls. Everything here is deterministic and cheap to build.

use crate::action::CyclicAction;
use crate::complex::{
    boundary_simplex, cross_polytope_boundary, cycle_complex, join, Complex, ComplexError,
};
use crate::map::{MapError, SimplicialMap};
use crate::name::VertexName;
use std::sync::Arc;

/// The 6-vertex triangulation of the projective plane. Its homology
/// separates the primes: mod 2 it is (1, 1, 1), mod odd it is (1, 0, 0).
pub fn projective_plane() -> Arc<Complex> {
    let tri = [
        [1, 2, 5],
        [1, 2, 6],
        [1, 3, 4],
        [1, 3, 6],
        [1, 4, 5],
        [2, 3, 5],
        [2, 3, 4],
        [2, 4, 6],
        [3, 5, 6],
        [4, 5, 6],
    ];
    Complex::from_simplices(tri.iter().map(|t| {
        t.iter()
            .map(|i| VertexName::atom(format!("v{i}")))
            .collect::<Vec<_>>()
    }))
    .expect("fixed triangle list")
}

/// Two points, the 0-sphere, with the given vertex names.
pub fn two_points(a: &str, b: &str) -> Arc<Complex> {
    let mut builder = Complex::builder();
    builder.simplex(vec![VertexName::atom(a)]);
    builder.simplex(vec![VertexName::atom(b)]);
    builder.build().expect("two distinct atoms")
}

/// Suspension with poles named `south` and `north`.
pub fn suspension(c: &Complex, south: &str, north: &str) -> Result<Arc<Complex>, ComplexError> {
    join(&two_points(south, north), c)
}

/// Suspends a map: poles go to poles, the body by `f`.
pub fn suspend_map(
    f: &SimplicialMap,
    dom_poles: (&str, &str),
    cod_poles: (&str, &str),
) -> Result<SimplicialMap, MapError> {
    let dom = suspension(f.domain(), dom_poles.0, dom_poles.1)
        .map_err(MapError::from)?;
    let cod = suspension(f.codomain(), cod_poles.0, cod_poles.1)
        .map_err(MapError::from)?;
    let body_dom = f.domain().clone();
    let body_cod = f.codomain().clone();
    let south = VertexName::atom(dom_poles.0);
    let north = VertexName::atom(dom_poles.1);
    SimplicialMap::by_name(dom, cod, move |name| {
        if *name == south {
            VertexName::atom(cod_poles.0)
        } else if *name == north {
            VertexName::atom(cod_poles.1)
        } else {
            let v = body_dom.vertex_id(name).expect("suspension body vertex");
            body_cod.name(f.apply(v)).clone()
        }
    })
}

/// The standard degree-k wrap of cycles: vertex i of the (k*m)-cycle goes to
/// vertex i mod m.
pub fn wrap_map(
    k: u32,
    m: u32,
    src_prefix: &str,
    dst_prefix: &str,
) -> Result<SimplicialMap, MapError> {
    let src = cycle_complex(k * m, src_prefix).map_err(MapError::from)?;
    let dst = cycle_complex(m, dst_prefix).map_err(MapError::from)?;
    let sp = src_prefix.to_string();
    let dp = dst_prefix.to_string();
    SimplicialMap::by_name(src, dst, move |name| {
        let VertexName::Atom(s) = name else {
            unreachable!("cycle vertices are atoms")
        };
        let i: u32 = s[sp.len()..].parse().expect("cycle vertex index");
        VertexName::atom(format!("{dp}{}", i % m))
    })
}

/// A degree-zero fold of the 8-cycle onto itself: vertex i goes to the
/// zigzag label 0,1,2,3,4,3,2,1. Suspending it gives the degree-zero sphere
/// map used as a negative control.
pub fn zigzag_fold(src_prefix: &str, dst_prefix: &str) -> Result<SimplicialMap, MapError> {
    let src = cycle_complex(8, src_prefix).map_err(MapError::from)?;
    let dst = cycle_complex(8, dst_prefix).map_err(MapError::from)?;
    let sp = src_prefix.to_string();
    let dp = dst_prefix.to_string();
    let zig = [0u32, 1, 2, 3, 4, 3, 2, 1];
    SimplicialMap::by_name(src, dst, move |name| {
        let VertexName::Atom(s) = name else {
            unreachable!("cycle vertices are atoms")
        };
        let i: usize = s[sp.len()..].parse().expect("cycle vertex index");
        VertexName::atom(format!("{dp}{}", zig[i]))
    })
}

/// Rotation of a cycle complex by `step` positions, an action of the given
/// order (which must divide n / gcd adjustments are on the caller).
pub fn cycle_rotation(
    c: &Arc<Complex>,
    prefix: &str,
    n: u32,
    step: u32,
    order: u32,
) -> CyclicAction {
    let p = prefix.to_string();
    CyclicAction::by_name(c.clone(), order, |name| {
        let VertexName::Atom(s) = name else {
            unreachable!("cycle vertices are atoms")
        };
        let i: u32 = s[p.len()..].parse().expect("cycle vertex index");
        VertexName::atom(format!("{p}{}", (i + step) % n))
    })
    .expect("rotation permutes the cycle")
}

/// The standard corpus: cycles, simplex boundaries up to dimension 5, the
/// 4-dimensional cross-polytope boundary, a couple of joins, and the
/// projective plane.
pub fn zoo() -> Vec<(String, Arc<Complex>)> {
    let mut z: Vec<(String, Arc<Complex>)> = Vec::new();
    for n in [3u32, 4, 5, 8] {
        z.push((format!("cycle-{n}"), cycle_complex(n, "c").expect("n >= 3")));
    }
    for n in [2u32, 3, 4, 5] {
        z.push((format!("boundary-simplex-{n}"), boundary_simplex(n)));
    }
    z.push(("cross-polytope-4".into(), cross_polytope_boundary(4)));
    let c3 = cycle_complex(3, "a").expect("3-cycle");
    let c4 = cycle_complex(4, "b").expect("4-cycle");
    z.push((
        "join-c3-c4".into(),
        join(&c3, &c4).expect("disjoint prefixes"),
    ));
    z.push((
        "suspension-c5".into(),
        suspension(&cycle_complex(5, "s").expect("5-cycle"), "pS", "pN")
            .expect("disjoint prefixes"),
    ));
    z.push(("projective-plane".into(), projective_plane()));
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::betti_numbers;
    use crate::degree::simplicial_degree;
    use crate::linalg::Prime;

    #[test]
    fn zoo_members_have_the_frozen_euler_characteristics() {
        let chi: Vec<i64> = zoo().iter().map(|(_, c)| c.euler_characteristic()).collect();
        // cycles, boundaries of simplices (alternating 0/2), cross-polytope,
        // join (3-sphere), suspension (2-sphere), projective plane
        assert_eq!(chi, vec![0, 0, 0, 0, 0, 2, 0, 2, 0, 0, 2, 1]);
    }

    #[test]
    fn wrap_has_degree_k_and_zigzag_degree_zero() {
        let w = wrap_map(2, 4, "a", "b").unwrap();
        assert_eq!(simplicial_degree(&w).unwrap().abs(), 2);
        let z = zigzag_fold("a", "b").unwrap();
        assert_eq!(simplicial_degree(&z).unwrap(), 0);
    }

    #[test]
    fn suspended_zigzag_is_a_degree_zero_sphere_map() {
        let z = zigzag_fold("a", "b").unwrap();
        let s = suspend_map(&z, ("aS", "aN"), ("bS", "bN")).unwrap();
        assert_eq!(
            betti_numbers(s.domain(), Prime::new(2).unwrap()),
            vec![1, 0, 1]
        );
        assert_eq!(simplicial_degree(&s).unwrap(), 0);
        let w = wrap_map(2, 4, "a", "b").unwrap();
        let sw = suspend_map(&w, ("aS", "aN"), ("bS", "bN")).unwrap();
        assert_eq!(simplicial_degree(&sw).unwrap().abs(), 2);
    }

    #[test]
    fn cycle_rotation_is_free_with_the_right_order() {
        let c8 = cycle_complex(8, "r").unwrap();
        let act = cycle_rotation(&c8, "r", 8, 2, 4);
        assert_eq!(act.exact_order(), 4);
        assert!(act.fixed_subcomplex().unwrap().n_vertices() == 0);
    }
}
