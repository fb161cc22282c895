//! Chain complexes over prime fields: Betti numbers, homology class bases,
//! induced maps.
//!
//! Chains are coordinate vectors over a [`ChainBasis`]: the q-faces of a complex,
//! minus those of a relative subcomplex, in face-index order. Faces are oriented by
//! ascending vertex id; the boundary of a face omits its i-th vertex with sign
//! (-1)^i.

use crate::complex::{Complex, ComplexError, Simplex};
use crate::linalg::{dense_rank, LinalgError, Order, Prime, Reduction, SparseMat, SparseVec, Track};
use crate::map::SimplicialMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("relative part is not a subcomplex of the total complex")]
    NotSubcomplex,
    #[error("chain term {0} is not a basis face")]
    NotABasisFace(String),
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("map does not respect the given chain bases")]
    BasisMismatch,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Basis of the (relative) chain groups of a complex.
pub struct ChainBasis {
    complex: Arc<Complex>,
    /// kept[q] = positions into `complex.faces(q)` spanning C_q, ascending.
    kept: Vec<Vec<u32>>,
    /// pos[q][face_position] = basis position, None for relative faces.
    pos: Vec<Vec<Option<u32>>>,
}

impl ChainBasis {
    pub fn absolute(complex: Arc<Complex>) -> ChainBasis {
        let dims = complex.dim().map_or(0, |d| d + 1);
        let mut kept = Vec::with_capacity(dims);
        let mut pos = Vec::with_capacity(dims);
        for q in 0..dims {
            let n = complex.faces(q).len();
            kept.push((0..n as u32).collect());
            pos.push((0..n as u32).map(Some).collect());
        }
        ChainBasis { complex, kept, pos }
    }

    /// Basis of C_*(complex, rel): faces of `complex` not in `rel` (matched by
    /// vertex names).
    pub fn relative(complex: Arc<Complex>, rel: &Complex) -> Result<ChainBasis, ChainError> {
        if !rel.is_subcomplex_of(&complex) {
            return Err(ChainError::NotSubcomplex);
        }
        let dims = complex.dim().map_or(0, |d| d + 1);
        let mut kept = Vec::with_capacity(dims);
        let mut pos = Vec::with_capacity(dims);
        for q in 0..dims {
            let faces = complex.faces(q);
            let mut kept_q = Vec::new();
            let mut pos_q = vec![None; faces.len()];
            for (i, s) in faces.iter().enumerate() {
                let in_rel = (|| {
                    let ids: Option<Vec<_>> = s
                        .vertices()
                        .iter()
                        .map(|&v| rel.vertex_id(complex.name(v)))
                        .collect();
                    Some(rel.contains_simplex(&Simplex::from_image(ids?)))
                })()
                .unwrap_or(false);
                if !in_rel {
                    pos_q[i] = Some(kept_q.len() as u32);
                    kept_q.push(i as u32);
                }
            }
            kept.push(kept_q);
            pos.push(pos_q);
        }
        Ok(ChainBasis { complex, kept, pos })
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    /// dim C_q.
    pub fn rank_c(&self, q: usize) -> usize {
        self.kept.get(q).map_or(0, |v| v.len())
    }

    pub fn top_dim(&self) -> usize {
        self.kept.len().saturating_sub(1)
    }

    pub fn face_at(&self, q: usize, basis_pos: u32) -> &Simplex {
        &self.complex.faces(q)[self.kept[q][basis_pos as usize] as usize]
    }

    /// Basis position of a simplex of the underlying complex, if it is a basis
    /// face (present and not relative).
    pub fn position_of(&self, s: &Simplex) -> Option<u32> {
        let q = s.dim();
        let fp = self.complex.face_position(s)?;
        *self.pos.get(q)?.get(fp)?
    }

    /// Boundary matrix of C_q -> C_{q-1}; columns follow the q-basis.
    pub fn boundary_matrix(&self, fp: Prime, q: usize) -> SparseMat {
        let n_rows = if q == 0 { 0 } else { self.rank_c(q - 1) };
        if q > self.top_dim() || self.rank_c(q) == 0 {
            return SparseMat { n_rows, cols: Vec::new() };
        }
        let cols = self
            .kept[q]
            .iter()
            .map(|&fi| {
                let s = &self.complex.faces(q)[fi as usize];
                if q == 0 {
                    return Vec::new();
                }
                let mut col: Vec<(u32, i64)> = Vec::with_capacity(q + 1);
                for (i, face) in s.boundary_faces().enumerate() {
                    let fpos = self
                        .complex
                        .face_position(&face)
                        .expect("boundary face present");
                    if let Some(row) = self.pos[q - 1][fpos] {
                        col.push((row, if i % 2 == 0 { 1 } else { -1 }));
                    }
                }
                col
            })
            .collect::<Vec<_>>();
        SparseMat::from_columns(
            n_rows,
            fp,
            cols,
        )
        .expect("rows in range by construction")
    }

    /// Betti number of the (relative) homology in degree q.
    pub fn betti(&self, fp: Prime, q: usize) -> usize {
        if q > self.top_dim() {
            return 0;
        }
        let rank_dq = Reduction::of(&self.boundary_matrix(fp, q), fp, Track::RankOnly, Order::BySupport).rank();
        let rank_dq1 = Reduction::of(&self.boundary_matrix(fp, q + 1), fp, Track::RankOnly, Order::BySupport).rank();
        self.rank_c(q) - rank_dq - rank_dq1
    }

    pub fn betti_all(&self, fp: Prime) -> Vec<usize> {
        let top = self.top_dim();
        if self.rank_c(0) == 0 && top == 0 {
            return Vec::new();
        }
        let mut ranks = Vec::with_capacity(top + 2);
        for q in 0..=top + 1 {
            ranks.push(
                Reduction::of(&self.boundary_matrix(fp, q), fp, Track::RankOnly, Order::BySupport)
                    .rank(),
            );
        }
        (0..=top)
            .map(|q| self.rank_c(q) - ranks[q] - ranks[q + 1])
            .collect()
    }

    /// Assembles a chain vector from simplex terms.
    pub fn chain(&self, fp: Prime, terms: &[(Simplex, i64)]) -> Result<SparseVec, ChainError> {
        let mut entries: Vec<(u32, i64)> = Vec::with_capacity(terms.len());
        for (s, c) in terms {
            let Some(p) = self.position_of(s) else {
                return Err(ChainError::NotABasisFace(self.complex.describe(s)));
            };
            entries.push((p, *c));
        }
        entries.sort_by_key(|&(i, _)| i);
        let mut out: SparseVec = Vec::with_capacity(entries.len());
        for (i, c) in entries {
            let c = fp.from_i64(c);
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc = fp.add(*acc, c),
                _ => out.push((i, c)),
            }
        }
        out.retain(|&(_, c)| c != 0);
        Ok(out)
    }
}

/// Betti numbers of a complex over F_p.
pub fn betti_numbers(complex: &Arc<Complex>, fp: Prime) -> Vec<usize> {
    ChainBasis::absolute(complex.clone()).betti_all(fp)
}

/// Betti numbers of a pair over F_p.
pub fn relative_betti_numbers(
    complex: &Arc<Complex>,
    rel: &Complex,
    fp: Prime,
) -> Result<Vec<usize>, ChainError> {
    Ok(ChainBasis::relative(complex.clone(), rel)?.betti_all(fp))
}

/// Pushes a chain through a simplicial map: degenerate images drop, others pick
/// up the sign of the vertex-sorting permutation; images landing in the
/// codomain's relative part drop.
pub fn push_chain(
    f: &SimplicialMap,
    dom: &ChainBasis,
    cod: &ChainBasis,
    q: usize,
    chain: &SparseVec,
    fp: Prime,
) -> Result<SparseVec, ChainError> {
    if **dom.complex() != **f.domain() || **cod.complex() != **f.codomain() {
        return Err(ChainError::BasisMismatch);
    }
    let mut terms: Vec<(u32, u32)> = Vec::new();
    for &(pos, coeff) in chain {
        let s = dom.face_at(q, pos);
        let images: Vec<u32> = s.vertices().iter().map(|&v| f.apply(v)).collect();
        let mut sorted = images.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        // parity of the sorting permutation
        let mut inversions = 0usize;
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                if images[i] > images[j] {
                    inversions += 1;
                }
            }
        }
        let image = Simplex::from_image(images);
        let Some(cod_pos) = cod.position_of(&image) else {
            // relative face of the codomain pair
            if cod.complex().contains_simplex(&image) {
                continue;
            }
            return Err(ChainError::NotABasisFace(cod.complex().describe(&image)));
        };
        let signed = if inversions % 2 == 0 {
            coeff
        } else {
            fp.neg(coeff)
        };
        terms.push((cod_pos, signed));
    }
    terms.sort_by_key(|&(i, _)| i);
    let mut out: SparseVec = Vec::with_capacity(terms.len());
    for (i, c) in terms {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc = fp.add(*acc, c),
            _ => out.push((i, c)),
        }
    }
    out.retain(|&(_, c)| c != 0);
    Ok(out)
}

/// A basis of H_q together with the reduction needed to take coordinates.
pub struct HomologyClasses {
    basis: ChainBasis,
    fp: Prime,
    q: usize,
    reduction: Reduction,
    /// pivot indices (into the reduction) forming the H-basis, in order
    class_pivots: Vec<u32>,
    /// representative cycles, in chain coordinates
    reps: Vec<SparseVec>,
}

impl HomologyClasses {
    pub fn new(basis: ChainBasis, fp: Prime, q: usize) -> HomologyClasses {
        // boundaries first, then a kernel basis: pivots landed by kernel columns
        // descend to a basis of H_q = Z_q / B_q
        let z = Reduction::of(&basis.boundary_matrix(fp, q), fp, Track::Ops, Order::BySupport);
        let b = Reduction::of(
            &basis.boundary_matrix(fp, q + 1),
            fp,
            Track::RankOnly,
            Order::BySupport,
        );
        let n_b = b.rank();
        let mut cols: Vec<SparseVec> = Vec::with_capacity(n_b + z.kernel_basis().len());
        for k in 0..n_b {
            cols.push(b.pivot_column(k).clone());
        }
        cols.extend(z.kernel_basis().iter().cloned());
        let combined = SparseMat {
            n_rows: basis.rank_c(q),
            cols,
        };
        let reduction = Reduction::of(&combined, fp, Track::Ops, Order::AsGiven);
        let mut class_pivots = Vec::new();
        let mut reps = Vec::new();
        for (k, origin) in reduction.pivot_origins().into_iter().enumerate() {
            if origin as usize >= n_b {
                class_pivots.push(k as u32);
                reps.push(reduction.pivot_column(k).clone());
            }
        }
        HomologyClasses {
            basis,
            fp,
            q,
            reduction,
            class_pivots,
            reps,
        }
    }

    pub fn dim(&self) -> usize {
        self.class_pivots.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn basis(&self) -> &ChainBasis {
        &self.basis
    }

    pub fn rep(&self, i: usize) -> &SparseVec {
        &self.reps[i]
    }

    /// Coordinates of a cycle's class in the H-basis. Errors if the chain is
    /// not a cycle (equivalently: not in the span of boundaries and kernel).
    pub fn coords(&self, chain: &SparseVec) -> Result<Vec<u32>, ChainError> {
        let (residual, used) = self.reduction.reduce_vector(chain.clone());
        if !residual.is_empty() {
            return Err(ChainError::NotACycle);
        }
        let mut out = vec![0u32; self.class_pivots.len()];
        for (k, coeff) in used {
            if let Ok(i) = self.class_pivots.binary_search(&k) {
                out[i] = self.fp.add(out[i], coeff);
            }
        }
        Ok(out)
    }
}

/// The matrix of f_* : H_q(domain pair) -> H_q(codomain pair), stored by columns
/// (one per domain basis class).
pub struct InducedMap {
    pub fp: Prime,
    pub q: usize,
    pub dom_dim: usize,
    pub cod_dim: usize,
    pub columns: Vec<Vec<u32>>,
}

impl InducedMap {
    pub fn rank(&self) -> usize {
        dense_rank(self.fp, &self.columns)
    }

    pub fn is_iso(&self) -> bool {
        self.dom_dim == self.cod_dim && self.rank() == self.dom_dim
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|&x| x == 0))
    }
}

/// Computes f_* on H_q, absolutely or for pairs (pass the relative parts; the
/// map must send the domain's relative part into the codomain's).
pub fn induced_map(
    f: &SimplicialMap,
    fp: Prime,
    q: usize,
    rel_dom: Option<&Complex>,
    rel_cod: Option<&Complex>,
) -> Result<InducedMap, ChainError> {
    let dom_basis = match rel_dom {
        Some(a) => ChainBasis::relative(f.domain().clone(), a)?,
        None => ChainBasis::absolute(f.domain().clone()),
    };
    let cod_basis = match rel_cod {
        Some(a) => ChainBasis::relative(f.codomain().clone(), a)?,
        None => ChainBasis::absolute(f.codomain().clone()),
    };
    let dom_h = HomologyClasses::new(dom_basis, fp, q);
    let cod_h = HomologyClasses::new(cod_basis, fp, q);
    let mut columns = Vec::with_capacity(dom_h.dim());
    for i in 0..dom_h.dim() {
        let pushed = push_chain(f, dom_h.basis(), cod_h.basis(), q, dom_h.rep(i), fp)?;
        columns.push(cod_h.coords(&pushed)?);
    }
    Ok(InducedMap {
        fp,
        q,
        dom_dim: dom_h.dim(),
        cod_dim: cod_h.dim(),
        columns,
    })
}

/// True iff f induces an isomorphism on H_q over F_p.
pub fn is_iso_on_h(
    f: &SimplicialMap,
    fp: Prime,
    q: usize,
    rel_dom: Option<&Complex>,
    rel_cod: Option<&Complex>,
) -> Result<bool, ChainError> {
    Ok(induced_map(f, fp, q, rel_dom, rel_cod)?.is_iso())
}

/// True iff f induces isomorphisms on H_q for all q up to the larger dimension.
pub fn is_iso_on_all_h(f: &SimplicialMap, fp: Prime) -> Result<bool, ChainError> {
    let top = f
        .domain()
        .dim()
        .unwrap_or(0)
        .max(f.codomain().dim().unwrap_or(0));
    for q in 0..=top {
        if !is_iso_on_h(f, fp, q, None, None)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{boundary_simplex, cycle_complex, join, simplex_complex};
    use crate::name::VertexName;

    fn f2() -> Prime {
        Prime::new(2).unwrap()
    }
    fn f3() -> Prime {
        Prime::new(3).unwrap()
    }

    /// Minimal 6-vertex triangulation of the real projective plane.
    fn projective_plane() -> Arc<Complex> {
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
        .unwrap()
    }

    #[test]
    fn betti_of_spheres_and_circles() {
        let c10 = cycle_complex(10, "c").unwrap();
        assert_eq!(betti_numbers(&c10, f2()), vec![1, 1]);
        assert_eq!(betti_numbers(&c10, f3()), vec![1, 1]);

        // join of two circles is a 3-sphere
        let s3 = join(
            &cycle_complex(10, "x").unwrap(),
            &cycle_complex(4, "y").unwrap(),
        )
        .unwrap();
        assert_eq!(betti_numbers(&s3, f2()), vec![1, 0, 0, 1]);
        assert_eq!(betti_numbers(&s3, f3()), vec![1, 0, 0, 1]);

        let s4 = boundary_simplex(5);
        assert_eq!(betti_numbers(&s4, f2()), vec![1, 0, 0, 0, 1]);
    }

    #[test]
    fn betti_counts_components_in_degree_zero() {
        let two = crate::complex::disjoint_union(&[
            &cycle_complex(3, "a").unwrap(),
            &cycle_complex(4, "b").unwrap(),
        ])
        .unwrap();
        let b = betti_numbers(&two, f2());
        assert_eq!(b[0], two.component_count());
        assert_eq!(b, vec![2, 2]);
    }

    #[test]
    fn projective_plane_homology_depends_on_the_prime() {
        let rp2 = projective_plane();
        assert_eq!(rp2.euler_characteristic(), 1);
        assert_eq!(betti_numbers(&rp2, f2()), vec![1, 1, 1]);
        assert_eq!(betti_numbers(&rp2, f3()), vec![1, 0, 0]);
    }

    #[test]
    fn euler_characteristic_equals_alternating_betti_sum() {
        let complexes = [
            projective_plane(),
            join(
                &cycle_complex(5, "x").unwrap(),
                &cycle_complex(4, "y").unwrap(),
            )
            .unwrap(),
            boundary_simplex(4),
        ];
        for k in &complexes {
            for fp in [f2(), f3()] {
                let alt: i64 = betti_numbers(k, fp)
                    .iter()
                    .enumerate()
                    .map(|(q, &b)| if q % 2 == 0 { b as i64 } else { -(b as i64) })
                    .sum();
                assert_eq!(alt, k.euler_characteristic(), "{k:?} over {fp}");
            }
        }
    }

    #[test]
    fn relative_homology_of_disc_mod_boundary() {
        let disc = simplex_complex(2);
        let rim = boundary_simplex(2);
        // names agree: boundary_simplex uses the same atoms
        let b = relative_betti_numbers(&disc, &rim, f2()).unwrap();
        assert_eq!(b, vec![0, 0, 1]);
        let b3 = relative_betti_numbers(&disc, &rim, f3()).unwrap();
        assert_eq!(b3, vec![0, 0, 1]);
        // H(K, K) = 0
        let zero = relative_betti_numbers(&disc, &disc, f2()).unwrap();
        assert!(zero.iter().all(|&x| x == 0));
    }

    #[test]
    fn homology_classes_give_coordinates_for_cycles() {
        let c10 = cycle_complex(10, "c").unwrap();
        let basis = ChainBasis::absolute(c10.clone());
        let h1 = HomologyClasses::new(basis, f3(), 1);
        assert_eq!(h1.dim(), 1);
        // the full loop with coherent signs is a cycle; its class generates
        let loop_chain: Vec<(Simplex, i64)> = (0..10)
            .map(|i| {
                let a = c10.vertex_id(&VertexName::atom(format!("c{i}"))).unwrap();
                let b = c10
                    .vertex_id(&VertexName::atom(format!("c{}", (i + 1) % 10)))
                    .unwrap();
                let s = Simplex::try_new(vec![a, b]).unwrap();
                // orient consistently around the loop
                (s, if a < b { 1 } else { -1 })
            })
            .collect();
        let z = h1.basis().chain(f3(), &loop_chain).unwrap();
        let coords = h1.coords(&z).unwrap();
        assert_eq!(coords.len(), 1);
        assert_ne!(coords[0], 0);
        // a single edge is not a cycle
        let one_edge = h1
            .basis()
            .chain(f3(), &[(h1.basis().face_at(1, 0).clone(), 1)])
            .unwrap();
        assert!(matches!(h1.coords(&one_edge), Err(ChainError::NotACycle)));
    }

    #[test]
    fn doubling_wrap_on_circles_is_iso_exactly_away_from_two()
    {
        // c6 -> c3 by index mod 3 has degree 2 on the circle
        let c6 = cycle_complex(6, "a").unwrap();
        let c3 = cycle_complex(3, "b").unwrap();
        let wrap = SimplicialMap::by_name(c6.clone(), c3.clone(), |n| {
            let VertexName::Atom(s) = n else { unreachable!() };
            let i: u32 = s[1..].parse().unwrap();
            VertexName::atom(format!("b{}", i % 3))
        })
        .unwrap();
        let over_2 = induced_map(&wrap, f2(), 1, None, None).unwrap();
        assert_eq!((over_2.dom_dim, over_2.cod_dim), (1, 1));
        assert!(over_2.is_zero());
        assert!(!over_2.is_iso());
        let over_3 = induced_map(&wrap, f3(), 1, None, None).unwrap();
        assert!(over_3.is_iso());
    }

    #[test]
    fn identity_induces_isos_everywhere() {
        let rp2 = projective_plane();
        let id = SimplicialMap::identity(rp2);
        assert!(is_iso_on_all_h(&id, f2()).unwrap());
        assert!(is_iso_on_all_h(&id, f3()).unwrap());
    }

    #[test]
    fn inclusion_of_the_core_circle_into_the_join_kills_h1() {
        let core = cycle_complex(4, "y").unwrap();
        let s3 = join(&cycle_complex(10, "x").unwrap(), &core).unwrap();
        let inc = SimplicialMap::inclusion(core, s3).unwrap();
        let m = induced_map(&inc, f2(), 1, None, None).unwrap();
        assert_eq!(m.dom_dim, 1);
        assert_eq!(m.cod_dim, 0);
        assert!(!m.is_iso());
    }
}
