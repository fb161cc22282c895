//! Fiber products of simplicial maps.
//!
//! The pullback of lambda: L -> D (nondegenerate) and delta: G -> D has the
//! compatible vertex pairs (a, b) with lambda(a) = delta(b) as vertices, and a
//! set of pairs is a simplex exactly when both projections are. Nondegeneracy
//! of lambda makes this triangulate the fiber product: over each simplex of L
//! the projection restricts to an isomorphism onto the delta-preimage of its
//! image, which `verify_fibers` checks exhaustively.

use crate::complex::{Complex, ComplexError, VertexId};
use crate::map::{MapError, SimplicialMap};
use crate::name::VertexName;
use crate::subdivide::{sd_map, Subdivision};
use std::collections::BTreeSet;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PullbackError {
    #[error("base leg collapses a simplex, pullback needs it nondegenerate")]
    DegenerateLeg,
    #[error("the two legs do not share a target")]
    TargetMismatch,
    #[error("subdivision chain does not start at the map's target")]
    ChainMismatch,
    #[error("fiber over {0} does not match the target-side fiber")]
    FiberMismatch(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// The fiber product complex with its two projections.
pub struct Pullback {
    pub complex: Arc<Complex>,
    /// Projection to the nondegenerate leg's source.
    pub onto_base: SimplicialMap,
    /// Projection to the other leg's source.
    pub onto_fiber: SimplicialMap,
}

/// Builds the fiber product of `lambda` (nondegenerate) and `delta`.
pub fn pullback(lambda: &SimplicialMap, delta: &SimplicialMap) -> Result<Pullback, PullbackError> {
    if **lambda.codomain() != **delta.codomain() {
        return Err(PullbackError::TargetMismatch);
    }
    if !lambda.is_nondegenerate() {
        return Err(PullbackError::DegenerateLeg);
    }
    let l = lambda.domain();
    let g = delta.domain();
    let d = lambda.codomain();

    // bucket fiber-side cells by the target vertices they touch, so each base
    // cell only meets the cells over its image
    let mut bucket: Vec<Vec<u32>> = vec![Vec::new(); d.n_vertices()];
    for (ti, tau) in g.maximal_simplices().iter().enumerate() {
        let image: BTreeSet<VertexId> = tau.vertices().iter().map(|&b| delta.apply(b)).collect();
        for w in image {
            bucket[w as usize].push(ti as u32);
        }
    }

    let mut builder = Complex::builder();
    let mut stamp: Vec<u32> = vec![u32::MAX; g.maximal_simplices().len()];
    for (si, sigma) in l.maximal_simplices().iter().enumerate() {
        // lambda is injective on sigma, so each target vertex pulls back to
        // at most one vertex of sigma
        let mut back: Vec<Option<VertexId>> = vec![None; d.n_vertices()];
        for &a in sigma.vertices() {
            back[lambda.apply(a) as usize] = Some(a);
        }
        for &a in sigma.vertices() {
            for &ti in &bucket[lambda.apply(a) as usize] {
                if stamp[ti as usize] == si as u32 {
                    continue;
                }
                stamp[ti as usize] = si as u32;
                let tau = &g.maximal_simplices()[ti as usize];
                let names: Vec<VertexName> = tau
                    .vertices()
                    .iter()
                    .filter_map(|&b| {
                        back[delta.apply(b) as usize].map(|a| {
                            VertexName::pair(l.name(a).clone(), g.name(b).clone())
                        })
                    })
                    .collect();
                if !names.is_empty() {
                    builder.simplex(names);
                }
            }
        }
    }
    let complex = builder.build()?;

    let onto_base = SimplicialMap::new(
        complex.clone(),
        l.clone(),
        complex
            .names()
            .iter()
            .map(|n| {
                l.require_vertex(pair_members(n).0)
                    .expect("first member names a base vertex")
            })
            .collect(),
    )?;
    let onto_fiber = SimplicialMap::new(
        complex.clone(),
        g.clone(),
        complex
            .names()
            .iter()
            .map(|n| {
                g.require_vertex(pair_members(n).1)
                    .expect("second member names a fiber vertex")
            })
            .collect(),
    )?;
    Ok(Pullback {
        complex,
        onto_base,
        onto_fiber,
    })
}

fn pair_members(name: &VertexName) -> (&VertexName, &VertexName) {
    match name {
        VertexName::Pair(a, b) => (a, b),
        _ => unreachable!("pullback vertices are pairs"),
    }
}

/// The unique map into the pullback induced by a commuting square
/// lambda . u = delta . w.
pub fn induced_into(
    pb: &Pullback,
    u: &SimplicialMap,
    w: &SimplicialMap,
) -> Result<SimplicialMap, PullbackError> {
    if **u.domain() != **w.domain() {
        return Err(PullbackError::TargetMismatch);
    }
    let l = pb.onto_base.codomain();
    let g = pb.onto_fiber.codomain();
    if **u.codomain() != **l || **w.codomain() != **g {
        return Err(PullbackError::TargetMismatch);
    }
    let t = u.domain();
    let mut vertex_map = Vec::with_capacity(t.n_vertices());
    for v in 0..t.n_vertices() as VertexId {
        let name = VertexName::pair(
            l.name(u.apply(v)).clone(),
            g.name(w.apply(v)).clone(),
        );
        let target = pb
            .complex
            .require_vertex(&name)
            .map_err(|_| PullbackError::TargetMismatch)?;
        vertex_map.push(target);
    }
    Ok(SimplicialMap::new(t.clone(), pb.complex.clone(), vertex_map)?)
}

/// Checks, for every simplex of the base leg's source, that the pullback's
/// fiber over it is isomorphic to the delta-preimage of its image. Exhaustive,
/// so meant for desk-sized instances and the property suite.
pub fn verify_fibers(
    pb: &Pullback,
    lambda: &SimplicialMap,
    delta: &SimplicialMap,
) -> Result<(), PullbackError> {
    let l = lambda.domain();
    let dim = match l.dim() {
        Some(d) => d,
        None => return Ok(()),
    };
    for q in 0..=dim {
        for sigma in l.faces(q) {
            let over = Complex::from_simplices([l.simplex_names(sigma)])?;
            let image = lambda.image_of(sigma);
            let under = Complex::from_simplices([lambda.codomain().simplex_names(&image)])?;
            let base_fiber = pb.onto_base.preimage_of(&over)?;
            let delta_fiber = delta.preimage_of(&under)?;
            if base_fiber.n_vertices() != delta_fiber.n_vertices()
                || base_fiber.f_vector() != delta_fiber.f_vector()
            {
                return Err(PullbackError::FiberMismatch(l.describe(sigma)));
            }
            if base_fiber.n_vertices() == 0 {
                continue;
            }
            // dropping to the second member is the canonical candidate; a
            // valid injective map with equal face counts is an isomorphism
            let drop = SimplicialMap::by_name(base_fiber.clone(), delta_fiber.clone(), |n| {
                match n {
                    VertexName::Pair(_, b) => (**b).clone(),
                    _ => unreachable!("pullback vertices are pairs"),
                }
            })
            .map_err(|_| PullbackError::FiberMismatch(l.describe(sigma)))?;
            if !drop.is_injective_on_vertices() {
                return Err(PullbackError::FiberMismatch(l.describe(sigma)));
            }
        }
    }
    Ok(())
}

/// Pulls an iterated barycentric subdivision of the target back across a
/// nondegenerate map: the source subdivides the same number of rounds and the
/// map stays nondegenerate. Returns the source-side subdivision chain and the
/// matched map.
pub fn subdivide_to_match(
    lambda: &SimplicialMap,
    target_chain: &[Subdivision],
) -> Result<(Vec<Subdivision>, SimplicialMap), PullbackError> {
    if !lambda.is_nondegenerate() {
        return Err(PullbackError::DegenerateLeg);
    }
    let mut expected = lambda.codomain().clone();
    for round in target_chain {
        if *round.base != *expected {
            return Err(PullbackError::ChainMismatch);
        }
        expected = round.complex.clone();
    }
    let mut chain = Vec::with_capacity(target_chain.len());
    let mut matched = lambda.clone();
    for round in target_chain {
        let source_round = Subdivision::of(matched.domain());
        matched = sd_map(&matched, &source_round, round)?;
        chain.push(source_round);
    }
    Ok((chain, matched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::betti_numbers;
    use crate::complex::cycle_complex;
    use crate::complex::simplex_complex;
    use crate::linalg::Prime;
    use crate::subdivide::sd;

    fn f2() -> Prime {
        Prime::new(2).unwrap()
    }

    fn wrap(n: u32, m: u32, src: &str, dst: &str) -> SimplicialMap {
        let a = cycle_complex(n, src).unwrap();
        let b = cycle_complex(m, dst).unwrap();
        SimplicialMap::by_name(a, b, |name| {
            let VertexName::Atom(s) = name else { unreachable!() };
            let i: u32 = s[src.len()..].parse().unwrap();
            VertexName::atom(format!("{}{}", dst, i % m))
        })
        .unwrap()
    }

    #[test]
    fn pullback_along_the_identity_recovers_the_other_leg() {
        let delta = wrap(6, 3, "a", "b");
        let id = SimplicialMap::identity(delta.codomain().clone());
        let pb = pullback(&id, &delta).unwrap();
        assert_eq!(pb.complex.f_vector(), delta.domain().f_vector());
        assert!(pb.onto_fiber.is_injective_on_vertices());
        assert!(pb.onto_fiber.is_surjective_on_vertices());
        // the base projection is delta read through the renaming
        let through = pb.onto_fiber.then(&delta).unwrap();
        assert_eq!(through.vertex_map(), pb.onto_base.vertex_map());
        verify_fibers(&pb, &id, &delta).unwrap();
    }

    #[test]
    fn pullback_of_the_identity_fiber_recovers_the_base() {
        let lambda = wrap(6, 3, "a", "b");
        let id = SimplicialMap::identity(lambda.codomain().clone());
        let pb = pullback(&lambda, &id).unwrap();
        assert_eq!(pb.complex.f_vector(), lambda.domain().f_vector());
        assert!(pb.onto_base.is_injective_on_vertices());
        assert!(pb.onto_base.is_surjective_on_vertices());
        verify_fibers(&pb, &lambda, &id).unwrap();
    }

    #[test]
    fn pullback_along_a_subcomplex_inclusion_is_the_preimage() {
        let delta = wrap(12, 6, "a", "b");
        let c6 = delta.codomain().clone();
        let edge = Complex::from_simplices([vec![
            VertexName::atom("b0"),
            VertexName::atom("b1"),
        ]])
        .unwrap();
        let include = SimplicialMap::by_name(edge.clone(), c6, |n| n.clone()).unwrap();
        let pb = pullback(&include, &delta).unwrap();
        let direct = delta.preimage_of(&edge).unwrap();
        assert_eq!(pb.complex.f_vector(), direct.f_vector());
        assert_eq!(pb.complex.component_count(), 2);
        verify_fibers(&pb, &include, &delta).unwrap();
    }

    #[test]
    fn two_double_covers_pull_back_to_two_circles() {
        let lambda = wrap(6, 3, "a", "b");
        let delta = wrap(6, 3, "c", "b");
        let pb = pullback(&lambda, &delta).unwrap();
        assert_eq!(pb.complex.f_vector(), vec![12, 12]);
        assert_eq!(pb.complex.component_count(), 2);
        assert_eq!(betti_numbers(&pb.complex, f2()), vec![2, 2]);
        verify_fibers(&pb, &lambda, &delta).unwrap();
    }

    #[test]
    fn commuting_square_factors_uniquely_through_the_pullback() {
        let lambda = wrap(6, 3, "a", "b");
        let delta = wrap(6, 3, "c", "b");
        let pb = pullback(&lambda, &delta).unwrap();
        let c12 = cycle_complex(12, "t").unwrap();
        let u = SimplicialMap::by_name(c12.clone(), lambda.domain().clone(), |n| {
            let VertexName::Atom(s) = n else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            VertexName::atom(format!("a{}", i % 6))
        })
        .unwrap();
        let w = SimplicialMap::by_name(c12, delta.domain().clone(), |n| {
            let VertexName::Atom(s) = n else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            VertexName::atom(format!("c{}", (i + 3) % 6))
        })
        .unwrap();
        let lifted = induced_into(&pb, &u, &w).unwrap();
        assert_eq!(
            lifted.then(&pb.onto_base).unwrap().vertex_map(),
            u.vertex_map()
        );
        assert_eq!(
            lifted.then(&pb.onto_fiber).unwrap().vertex_map(),
            w.vertex_map()
        );
    }

    #[test]
    fn degenerate_fiber_legs_are_fine_but_degenerate_base_legs_are_not() {
        let tri = simplex_complex(2);
        let edge = simplex_complex(1);
        // collapse the triangle onto an edge: s0, s1 -> s0; s2 -> s1
        let collapse = SimplicialMap::by_name(tri.clone(), edge.clone(), |n| {
            let VertexName::Atom(s) = n else { unreachable!() };
            match s.as_str() {
                "s0" | "s1" => VertexName::atom("s0"),
                _ => VertexName::atom("s1"),
            }
        })
        .unwrap();
        assert!(!collapse.is_nondegenerate());
        let id = SimplicialMap::identity(edge);
        let pb = pullback(&id, &collapse).unwrap();
        assert_eq!(pb.complex.f_vector(), tri.f_vector());
        verify_fibers(&pb, &id, &collapse).unwrap();
        assert!(matches!(
            pullback(&collapse, &id),
            Err(PullbackError::DegenerateLeg)
        ));
    }

    #[test]
    fn matching_subdivisions_track_the_target_chain() {
        let lambda = wrap(6, 3, "a", "b");
        let round1 = Subdivision::of(lambda.codomain());
        let round2 = Subdivision::of(&round1.complex);
        let (chain, matched) = subdivide_to_match(&lambda, &[round1, round2]).unwrap();
        assert_eq!(chain.len(), 2);
        assert_eq!(matched.domain().f_vector(), vec![24, 24]);
        assert_eq!(matched.codomain().f_vector(), vec![12, 12]);
        assert!(matched.is_nondegenerate());
        assert_eq!(
            matched.domain().euler_characteristic(),
            lambda.domain().euler_characteristic()
        );

        // empty chain returns the map unchanged
        let (none, same) = subdivide_to_match(&lambda, &[]).unwrap();
        assert!(none.is_empty());
        assert_eq!(same.vertex_map(), lambda.vertex_map());

        // a chain rooted elsewhere is rejected
        let stray = Subdivision::of(&sd(lambda.domain()));
        assert!(matches!(
            subdivide_to_match(&lambda, &[stray]),
            Err(PullbackError::ChainMismatch)
        ));
    }
}
