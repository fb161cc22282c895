//! Mapping cylinders and copy gluings.
//!
//! The cylinder of f: K -> L is built from ordered cells: for a simplex of K
//! listed as a0 < ... < aq by a chosen vertex rank, the cells are
//! {a0..ai} u {f(ai)..f(aq)}. The rank must be strict on every simplex; a rank
//! that is constant on group orbits makes the cylinder inherit an action. End
//! copies of K and L sit inside as full subcomplexes; the projection to L is
//! simplicial.

use crate::action::{ActionError, CyclicAction};
use crate::complex::{Complex, ComplexError, VertexId};
use crate::map::{MapError, SimplicialMap};
use crate::name::VertexName;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CylError {
    #[error("rank is not strict on simplex {0}")]
    RankNotInjective(String),
    #[error("rank vector has wrong length")]
    RankLength,
    #[error("gluing locus is not a full subcomplex")]
    GluingNotFull,
    #[error("cannot glue zero copies")]
    ZeroCopies,
    #[error("copy tag collides with an existing vertex name: {0}")]
    NameCollision(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Action(#[from] ActionError),
}

/// Tags for the two cylinder ends.
const BOTTOM: u32 = 0;
const TOP: u32 = 1;

/// A mapping cylinder with its structure maps.
pub struct MappingCylinder {
    pub complex: Arc<Complex>,
    /// The map the cylinder was built from.
    pub map: SimplicialMap,
    /// Copy of the domain inside the cylinder (tag 0), a full subcomplex.
    pub bottom: Arc<Complex>,
    /// Copy of the codomain inside the cylinder (tag 1), a full subcomplex.
    pub top: Arc<Complex>,
    pub bottom_inclusion: SimplicialMap,
    pub top_inclusion: SimplicialMap,
    /// Projection collapsing the cylinder onto the codomain.
    pub retraction: SimplicialMap,
}

/// Cylinder with the default rank (domain vertex ids).
pub fn mapping_cylinder(f: &SimplicialMap) -> Result<MappingCylinder, CylError> {
    let n = f.domain().n_vertices() as u32;
    mapping_cylinder_ranked(f, &(0..n).collect::<Vec<_>>())
}

/// Cylinder whose cells are ordered by `rank` (one entry per domain vertex).
/// The rank must be injective on every simplex of the domain; a rank constant
/// on the orbits of an action (and injective on simplices) yields a cylinder
/// that carries the action.
pub fn mapping_cylinder_ranked(
    f: &SimplicialMap,
    rank: &[u32],
) -> Result<MappingCylinder, CylError> {
    let k = f.domain();
    let l = f.codomain();
    if rank.len() != k.n_vertices() {
        return Err(CylError::RankLength);
    }
    let mut b = Complex::builder();
    for s in l.maximal_simplices() {
        b.simplex(
            l.simplex_names(s)
                .into_iter()
                .map(|n| VertexName::tagged(TOP, n))
                .collect(),
        );
    }
    for s in k.maximal_simplices() {
        let mut ordered: Vec<VertexId> = s.vertices().to_vec();
        ordered.sort_by_key(|&v| rank[v as usize]);
        if ordered
            .windows(2)
            .any(|w| rank[w[0] as usize] == rank[w[1] as usize])
        {
            return Err(CylError::RankNotInjective(k.describe(s)));
        }
        for i in 0..ordered.len() {
            let mut names: Vec<VertexName> = Vec::with_capacity(ordered.len() + 1);
            for &v in &ordered[..=i] {
                names.push(VertexName::tagged(BOTTOM, k.name(v).clone()));
            }
            for &v in &ordered[i..] {
                let w = f.apply(v);
                let name = VertexName::tagged(TOP, l.name(w).clone());
                if !names.contains(&name) {
                    names.push(name);
                }
            }
            b.simplex(names);
        }
    }
    let complex = b.build()?;

    let tag_complex = |src: &Arc<Complex>, tag: u32| -> Result<Arc<Complex>, ComplexError> {
        let mut b = Complex::builder();
        for s in src.maximal_simplices() {
            b.simplex(
                src.simplex_names(s)
                    .into_iter()
                    .map(|n| VertexName::tagged(tag, n))
                    .collect(),
            );
        }
        b.build()
    };
    let bottom = tag_complex(k, BOTTOM)?;
    let top = tag_complex(l, TOP)?;
    let bottom_inclusion = SimplicialMap::by_name(k.clone(), complex.clone(), |n| {
        VertexName::tagged(BOTTOM, n.clone())
    })?;
    let top_inclusion = SimplicialMap::by_name(l.clone(), complex.clone(), |n| {
        VertexName::tagged(TOP, n.clone())
    })?;
    let retraction = SimplicialMap::by_name(complex.clone(), l.clone(), |name| match name {
        VertexName::Tagged(t, inner) if *t == BOTTOM => {
            let v = k.require_vertex(inner).expect("bottom names come from the domain");
            l.name(f.apply(v)).clone()
        }
        VertexName::Tagged(_, inner) => (**inner).clone(),
        _ => unreachable!("cylinder vertices are tagged"),
    })?;
    Ok(MappingCylinder {
        complex,
        map: f.clone(),
        bottom,
        top,
        bottom_inclusion,
        top_inclusion,
        retraction,
    })
}

/// Transports actions on the two ends to the cylinder. Fails (as a
/// non-automorphism) unless the rank used for the cylinder was invariant and
/// the map equivariant.
pub fn cylinder_action(
    cyl: &MappingCylinder,
    act_dom: &CyclicAction,
    act_cod: &CyclicAction,
    order: u32,
) -> Result<CyclicAction, CylError> {
    if **act_dom.complex() != **cyl.map.domain() || **act_cod.complex() != **cyl.map.codomain() {
        return Err(CylError::Action(ActionError::ComplexMismatch));
    }
    let k = cyl.map.domain();
    let l = cyl.map.codomain();
    let act = CyclicAction::by_name(cyl.complex.clone(), order, |name| match name {
        VertexName::Tagged(t, inner) if *t == BOTTOM => {
            let v = k.require_vertex(inner).expect("bottom names come from the domain");
            VertexName::tagged(BOTTOM, k.name(act_dom.apply(1, v)).clone())
        }
        VertexName::Tagged(t, inner) => {
            let v = l.require_vertex(inner).expect("top names come from the codomain");
            VertexName::tagged(*t, l.name(act_cod.apply(1, v)).clone())
        }
        _ => unreachable!("cylinder vertices are tagged"),
    })?;
    Ok(act)
}

/// Several copies of a complex glued along a common full subcomplex.
pub struct GluedCopies {
    pub complex: Arc<Complex>,
    pub copies: u32,
    /// The shared locus inside the glued complex (names unchanged).
    pub shared: Arc<Complex>,
    /// Inclusion of the source complex as each copy.
    pub inclusions: Vec<SimplicialMap>,
    /// Collapses every copy back onto the source.
    pub fold: SimplicialMap,
}

/// Glues `copies` copies of `k` along the subcomplex `a`, which must be full
/// in `k` (otherwise distinct copies of a face spanned by shared vertices
/// would silently merge). Vertex names outside `a` are tagged per copy.
pub fn glue_copies(
    k: &Arc<Complex>,
    a: &Complex,
    copies: u32,
) -> Result<GluedCopies, CylError> {
    if copies == 0 {
        return Err(CylError::ZeroCopies);
    }
    if !a.is_full_subcomplex_of(k) {
        return Err(CylError::GluingNotFull);
    }
    let shared_vertex: Vec<bool> = k
        .names()
        .iter()
        .map(|n| a.vertex_id(n).is_some())
        .collect();
    // a single copy is the complex itself, so keep names untouched
    let copy_name = |c: u32, v: VertexId| -> VertexName {
        if copies == 1 || shared_vertex[v as usize] {
            k.name(v).clone()
        } else {
            VertexName::tagged(c, k.name(v).clone())
        }
    };
    // tagged copy names must not land on each other or on shared names
    let mut preimage: std::collections::BTreeMap<VertexName, VertexId> =
        std::collections::BTreeMap::new();
    for c in 0..copies {
        for v in 0..k.n_vertices() as VertexId {
            let name = copy_name(c, v);
            if let Some(&prev) = preimage.get(&name) {
                if prev != v {
                    return Err(CylError::NameCollision(name.to_string()));
                }
            } else {
                preimage.insert(name, v);
            }
        }
    }
    let mut b = Complex::builder();
    for c in 0..copies {
        for s in k.maximal_simplices() {
            b.simplex(s.vertices().iter().map(|&v| copy_name(c, v)).collect());
        }
    }
    let complex = b.build()?;
    let mut inclusions = Vec::with_capacity(copies as usize);
    for c in 0..copies {
        inclusions.push(SimplicialMap::new(
            k.clone(),
            complex.clone(),
            (0..k.n_vertices() as VertexId)
                .map(|v| complex.require_vertex(&copy_name(c, v)).expect("copied vertex"))
                .collect(),
        )?);
    }
    let mut shared_builder = Complex::builder();
    for s in a.maximal_simplices() {
        shared_builder.simplex(a.simplex_names(s));
    }
    let shared = shared_builder.build()?;
    let fold = SimplicialMap::new(
        complex.clone(),
        k.clone(),
        complex
            .names()
            .iter()
            .map(|n| preimage[n])
            .collect(),
    )?;
    Ok(GluedCopies {
        complex,
        copies,
        shared,
        inclusions,
        fold,
    })
}

/// The deck action on glued copies: copy c of v goes to copy c+1 of g(v),
/// shared vertices just move by g. With the base action of order equal to the
/// copy count this is the standard fiberwise rotation.
pub fn glued_rotation(
    glued: &GluedCopies,
    base: &CyclicAction,
    order: u32,
) -> Result<CyclicAction, CylError> {
    if **base.complex() != **glued.fold.codomain() {
        return Err(CylError::Action(ActionError::ComplexMismatch));
    }
    let copies = glued.copies;
    let n = glued.complex.n_vertices() as VertexId;
    let mut gen = Vec::with_capacity(n as usize);
    for v in 0..n {
        let u = glued.fold.apply(v);
        // shared vertices sit in every copy; any representative copy works
        // because the next inclusion agrees on them
        let c = (0..copies)
            .find(|&c| glued.inclusions[c as usize].apply(u) == v)
            .expect("fold and inclusions are inverse on each copy");
        gen.push(glued.inclusions[((c + 1) % copies) as usize].apply(base.apply(1, u)));
    }
    let act = CyclicAction::new(glued.complex.clone(), order, gen)?;
    Ok(act)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{quotient, Quotient};
    use crate::chain::{betti_numbers, is_iso_on_all_h, relative_betti_numbers};
    use crate::complex::{cycle_complex, simplex_complex};
    use crate::linalg::Prime;

    fn f2() -> Prime {
        Prime::new(2).unwrap()
    }
    fn f3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn wrap_c6_c3() -> SimplicialMap {
        let c6 = cycle_complex(6, "a").unwrap();
        let c3 = cycle_complex(3, "b").unwrap();
        SimplicialMap::by_name(c6, c3, |n| {
            let VertexName::Atom(s) = n else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            VertexName::atom(format!("b{}", i % 3))
        })
        .unwrap()
    }

    #[test]
    fn cylinder_of_identity_on_an_edge_is_a_square() {
        let edge = simplex_complex(1);
        let cyl = mapping_cylinder(&SimplicialMap::identity(edge)).unwrap();
        assert_eq!(cyl.complex.f_vector(), vec![4, 5, 2]);
        assert_eq!(cyl.complex.euler_characteristic(), 1);
    }

    #[test]
    fn cylinder_of_the_wrap_retracts_to_the_target() {
        let cyl = mapping_cylinder(&wrap_c6_c3()).unwrap();
        assert_eq!(cyl.complex.euler_characteristic(), 0);
        assert_eq!(betti_numbers(&cyl.complex, f2()), vec![1, 1, 0]);
        // ends are full subcomplexes
        assert!(cyl.bottom.is_full_subcomplex_of(&cyl.complex));
        assert!(cyl.top.is_full_subcomplex_of(&cyl.complex));
        // projection to the target is an H-iso
        assert!(is_iso_on_all_h(&cyl.retraction, f2()).unwrap());
        assert!(is_iso_on_all_h(&cyl.retraction, f3()).unwrap());
        // cylinder mod its top is connected-contractible rel: all zero
        let rel_top = relative_betti_numbers(&cyl.complex, &cyl.top, f2()).unwrap();
        assert!(rel_top.iter().all(|&b| b == 0));
        // composing inclusion with retraction gives back the wrap
        let back = cyl.bottom_inclusion.then(&cyl.retraction).unwrap();
        assert_eq!(back.vertex_map(), cyl.map.vertex_map());
    }

    #[test]
    fn cylinder_mod_bottom_detects_the_wrap_degree_per_prime() {
        // H2(cyl, bottom) = kernel and H1(cyl, bottom) = cokernel of the
        // degree-2 map on H1 of the circle: both rank 1 over F2, both zero
        // over F3 where 2 is invertible
        let cyl = mapping_cylinder(&wrap_c6_c3()).unwrap();
        let rel2 = relative_betti_numbers(&cyl.complex, &cyl.bottom, f2()).unwrap();
        assert_eq!(rel2, vec![0, 1, 1]);
        let rel3 = relative_betti_numbers(&cyl.complex, &cyl.bottom, f3()).unwrap();
        assert_eq!(rel3, vec![0, 0, 0]);
    }

    #[test]
    fn ranked_cylinder_carries_the_action_when_the_rank_is_invariant() {
        // quotient projection C6 -> C3 by the half rotation, rank = image id
        let c6 = cycle_complex(6, "a").unwrap();
        let half = CyclicAction::by_name(c6.clone(), 2, |name| {
            let VertexName::Atom(s) = name else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            VertexName::atom(format!("a{}", (i + 3) % 6))
        })
        .unwrap();
        let q = quotient(&half).unwrap();
        let mu = &q.projection;
        let rank: Vec<u32> = mu.vertex_map().to_vec();
        let cyl = mapping_cylinder_ranked(mu, &rank).unwrap();
        // the action extends: bottom rotates, top (the quotient) is fixed
        let trivial_top = CyclicAction::trivial(q.complex.clone(), 2);
        let act = cylinder_action(&cyl, &half, &trivial_top, 2).unwrap();
        assert_eq!(act.exact_order(), 2);
        // and the full cylinder quotient certifies
        let Quotient { complex: folded, .. } = quotient(&act).unwrap();
        assert_eq!(folded.euler_characteristic(), 0);
        assert_eq!(betti_numbers(&folded, f2()), vec![1, 1, 0]);

        // with the default (non-invariant) rank the action does not extend
        let cyl_plain = mapping_cylinder(mu).unwrap();
        assert!(cylinder_action(&cyl_plain, &half, &trivial_top, 2).is_err());
    }

    #[test]
    fn cylinder_of_a_degree_three_wrap_detects_mod_three() {
        let c9 = cycle_complex(9, "a").unwrap();
        let c3 = cycle_complex(3, "b").unwrap();
        let wrap = SimplicialMap::by_name(c9, c3, |n| {
            let VertexName::Atom(s) = n else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            VertexName::atom(format!("b{}", i % 3))
        })
        .unwrap();
        let cyl = mapping_cylinder(&wrap).unwrap();
        let rel3 = relative_betti_numbers(&cyl.complex, &cyl.bottom, f3()).unwrap();
        assert_eq!(rel3, vec![0, 1, 1]);
        let rel2 = relative_betti_numbers(&cyl.complex, &cyl.bottom, f2()).unwrap();
        assert_eq!(rel2, vec![0, 0, 0]);
    }

    #[test]
    fn one_copy_glues_to_the_complex_itself() {
        let tri = simplex_complex(2);
        let edge = Complex::from_simplices([vec![
            VertexName::atom("s0"),
            VertexName::atom("s1"),
        ]])
        .unwrap();
        let glued = glue_copies(&tri, &edge, 1).unwrap();
        assert_eq!(*glued.complex, *tri);
        assert_eq!(glued.fold.vertex_map(), glued.inclusions[0].vertex_map());
    }

    #[test]
    fn fold_inverts_each_inclusion() {
        let tri = simplex_complex(2);
        let edge = Complex::from_simplices([vec![
            VertexName::atom("s0"),
            VertexName::atom("s1"),
        ]])
        .unwrap();
        let glued = glue_copies(&tri, &edge, 3).unwrap();
        for inc in &glued.inclusions {
            let round = inc.then(&glued.fold).unwrap();
            assert_eq!(round.vertex_map(), (0..3).collect::<Vec<_>>());
        }
    }

    #[test]
    fn gluing_rejects_names_that_collide_with_copy_tags() {
        // the shared locus already contains the name a copy tag would mint
        let k = Complex::from_simplices([
            vec![VertexName::atom("s"), VertexName::atom("x")],
            vec![VertexName::atom("s"), VertexName::tagged(0, VertexName::atom("x"))],
        ])
        .unwrap();
        let locus = Complex::from_simplices([vec![
            VertexName::atom("s"),
            VertexName::tagged(0, VertexName::atom("x")),
        ]])
        .unwrap();
        assert!(matches!(
            glue_copies(&k, &locus, 2),
            Err(CylError::NameCollision(_))
        ));
    }

    #[test]
    fn gluing_two_triangles_along_an_edge() {
        let tri = simplex_complex(2);
        let edge = Complex::from_simplices([vec![
            VertexName::atom("s0"),
            VertexName::atom("s1"),
        ]])
        .unwrap();
        let glued = glue_copies(&tri, &edge, 2).unwrap();
        assert_eq!(glued.complex.f_vector(), vec![4, 5, 2]);
        assert_eq!(glued.complex.euler_characteristic(), 1);
        for inc in &glued.inclusions {
            assert!(inc.is_nondegenerate());
        }
    }

    #[test]
    fn gluing_respects_the_count_formula() {
        // f(glued) = p f(K) - (p-1) f(A), valid because A is full
        let tri = simplex_complex(2);
        let edge = Complex::from_simplices([vec![
            VertexName::atom("s0"),
            VertexName::atom("s1"),
        ]])
        .unwrap();
        for p in [2u32, 3, 5] {
            let glued = glue_copies(&tri, &edge, p).unwrap();
            let (fk, fa) = (tri.f_vector(), edge.f_vector());
            let expect: Vec<usize> = (0..fk.len())
                .map(|q| {
                    p as usize * fk[q] - (p as usize - 1) * fa.get(q).copied().unwrap_or(0)
                })
                .collect();
            assert_eq!(glued.complex.f_vector(), expect);
        }
    }

    #[test]
    fn gluing_rejects_a_non_full_locus() {
        let c3 = cycle_complex(3, "v").unwrap();
        let two_points = Complex::from_simplices([
            vec![VertexName::atom("v0")],
            vec![VertexName::atom("v1")],
        ])
        .unwrap();
        // the edge v0 v1 is in c3 but not in the locus
        assert!(matches!(
            glue_copies(&c3, &two_points, 2),
            Err(CylError::GluingNotFull)
        ));
    }

    #[test]
    fn deck_rotation_on_glued_paths_quotients_back() {
        // path a - b - c, glued at both endpoints into a theta-like graph
        let path = Complex::from_simplices([
            vec![VertexName::atom("a"), VertexName::atom("b")],
            vec![VertexName::atom("b"), VertexName::atom("c")],
        ])
        .unwrap();
        let ends = Complex::from_simplices([
            vec![VertexName::atom("a")],
            vec![VertexName::atom("c")],
        ])
        .unwrap();
        let glued = glue_copies(&path, &ends, 3).unwrap();
        assert_eq!(glued.complex.f_vector(), vec![5, 6]);
        assert_eq!(betti_numbers(&glued.complex, f2()), vec![1, 2]);

        let trivial = CyclicAction::trivial(path.clone(), 3);
        let rot = glued_rotation(&glued, &trivial, 3).unwrap();
        assert_eq!(rot.exact_order(), 3);
        let q = quotient(&rot).unwrap();
        // the quotient is the path again
        assert_eq!(q.complex.f_vector(), vec![3, 2]);
        assert_eq!(q.complex.euler_characteristic(), 1);
    }
}
