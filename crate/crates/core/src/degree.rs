//! Degrees of simplicial maps between closed oriented pseudomanifolds.
//!
//! A complex qualifies when every codimension-1 face lies in exactly two top
//! cells, the top cells are connected through codimension-1 faces, and a global
//! orientation propagates without conflict. The degree of a map is then the
//! signed count of nondegenerate preimages of any top cell; the count is computed
//! over every top cell of the codomain and must agree.

use crate::complex::Complex;
use crate::map::SimplicialMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DegreeError {
    #[error("{side}: face {face} lies in {count} top cells, not 2")]
    NotPseudomanifold {
        side: &'static str,
        face: String,
        count: usize,
    },
    #[error("{side}: top cells are not connected through codimension-1 faces")]
    FacetGraphDisconnected { side: &'static str },
    #[error("{side}: orientation propagation hit a conflict at {face}")]
    NotOrientable { side: &'static str, face: String },
    #[error("domain dimension {dom} differs from codomain dimension {cod}")]
    DimensionMismatch { dom: usize, cod: usize },
    #[error("empty complex has no degree")]
    Empty,
    #[error(
        "signed preimage counts disagree: {count_a} over {cell_a} vs {count_b} over {cell_b}"
    )]
    Inconsistent {
        cell_a: String,
        count_a: i64,
        cell_b: String,
        count_b: i64,
    },
}

/// Orients a closed connected pseudomanifold: returns one sign per top cell (in
/// `faces(dim)` order) under which induced orientations cancel on every ridge.
pub fn orientation(complex: &Complex, side: &'static str) -> Result<Vec<i8>, DegreeError> {
    let dim = complex.dim().ok_or(DegreeError::Empty)?;
    let tops = complex.faces(dim);
    if dim == 0 {
        // zero-dimensional: no ridges; a single point orients trivially
        return if tops.len() == 1 {
            Ok(vec![1])
        } else {
            Err(DegreeError::FacetGraphDisconnected { side })
        };
    }
    let ridges = complex.faces(dim - 1);
    // cofacet pairs per ridge, with the omitted-vertex parity
    let mut cofacets: Vec<Vec<(u32, i8)>> = vec![Vec::new(); ridges.len()];
    for (ti, top) in tops.iter().enumerate() {
        for (omit, ridge) in top.boundary_faces().enumerate() {
            let ri = ridges.binary_search(&ridge).expect("face of a top cell");
            let parity = if omit % 2 == 0 { 1 } else { -1 };
            cofacets[ri].push((ti as u32, parity));
        }
    }
    for (ri, c) in cofacets.iter().enumerate() {
        if c.len() != 2 {
            return Err(DegreeError::NotPseudomanifold {
                side,
                face: complex.describe(&ridges[ri]),
                count: c.len(),
            });
        }
    }
    let mut orient: Vec<i8> = vec![0; tops.len()];
    orient[0] = 1;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(ti) = queue.pop_front() {
        let top = &tops[ti];
        for (omit, ridge) in top.boundary_faces().enumerate() {
            let ri = ridges.binary_search(&ridge).expect("face of a top cell");
            let [(a, pa), (b, pb)] = cofacets[ri][..] else {
                unreachable!()
            };
            let (other, po, ps) = if a as usize == ti {
                (b as usize, pb, pa)
            } else {
                (a as usize, pa, pb)
            };
            debug_assert_eq!(ps, if omit % 2 == 0 { 1 } else { -1 });
            // induced orientations must cancel: or(other)*po = -or(ti)*ps
            let needed = -orient[ti] * ps * po;
            if orient[other] == 0 {
                orient[other] = needed;
                queue.push_back(other);
            } else if orient[other] != needed {
                return Err(DegreeError::NotOrientable {
                    side,
                    face: complex.describe(&ridges[ri]),
                });
            }
        }
    }
    if orient.iter().any(|&o| o == 0) {
        return Err(DegreeError::FacetGraphDisconnected { side });
    }
    Ok(orient)
}

/// Degree of a simplicial map between closed connected oriented pseudomanifolds
/// of equal dimension. Signed preimage counts are taken over every top cell of
/// the codomain and must all agree.
pub fn simplicial_degree(f: &SimplicialMap) -> Result<i64, DegreeError> {
    let dom = f.domain();
    let cod = f.codomain();
    let (dd, cd) = (
        dom.dim().ok_or(DegreeError::Empty)?,
        cod.dim().ok_or(DegreeError::Empty)?,
    );
    if dd != cd {
        return Err(DegreeError::DimensionMismatch { dom: dd, cod: cd });
    }
    let or_dom = orientation(dom, "domain")?;
    let or_cod = orientation(cod, "codomain")?;

    let cod_tops = cod.faces(cd);
    let mut counts: Vec<i64> = vec![0; cod_tops.len()];
    for (si, s) in dom.faces(dd).iter().enumerate() {
        let Some((image, sign)) = f.signed_image(s) else {
            continue;
        };
        if image.dim() == cd {
            let ti = cod_tops.binary_search(&image).expect("map is simplicial");
            counts[ti] += or_dom[si] as i64 * sign;
        }
    }
    let degree = counts[0] * or_cod[0] as i64;
    for ti in 1..counts.len() {
        let here = counts[ti] * or_cod[ti] as i64;
        if here != degree {
            return Err(DegreeError::Inconsistent {
                cell_a: cod.describe(&cod_tops[0]),
                count_a: degree,
                cell_b: cod.describe(&cod_tops[ti]),
                count_b: here,
            });
        }
    }
    Ok(degree)
}
