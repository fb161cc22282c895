//! The branched-cover bundle over the cone model.
//!
//! Starting from the block model M with its rotation, this module wraps the
//! boundary spheres into their orbit quotients (W), cones the wrapped spheres
//! off and cones the result again (the cone model D), glues p rotated copies
//! of M along the boundary, folds them back, and forms the deck-orbit
//! quotient of the fold cylinder (Gamma). Gamma is built directly as the
//! cylinder of the descended fold W -> M/g and certified to be the orbit
//! rename of the big cylinder: the deck action is free but a bare cut sits
//! under parallel cylinder edges from every copy, so the generic orbit
//! quotient would reject it. The projection Gamma -> D identifies the
//! cylinder bottom with the capped sphere and crushes everything else to the
//! cone apex. Collapsing the p section copies of the book instead gives the
//! singular model Gamma_*, which still maps to D and carries the residual
//! rotation with a two-dimensional fixed set.

use crate::action::{partial_orbit_quotient, ActionError, CyclicAction, Quotient};
use crate::cert::{CertError, CertLog};
use crate::chain::{betti_numbers, is_iso_on_h, relative_betti_numbers, ChainError};
use crate::complex::{Complex, ComplexError, Simplex, VertexId};
use crate::cylinder::{
    cylinder_action, glue_copies, glued_rotation, mapping_cylinder, mapping_cylinder_ranked,
    CylError, GluedCopies, MappingCylinder,
};
use crate::degree::{simplicial_degree, DegreeError};
use crate::linalg::Prime;
use crate::map::{MapError, SimplicialMap};
use crate::model::{
    build_inward_retraction, build_outward_retraction, BlockModel, ModelError, OutwardRetraction,
    XPart,
};
use crate::name::VertexName;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GammaError {
    #[error("the bundle needs the ten-vertex equator block model, got a = {0}")]
    WrongArity(u32),
    #[error("wrapping the boundary needs 2b/p >= 3, got b = {b}, p = {p}")]
    CapTooSmall { b: u32, p: u32 },
    #[error("the fold-back control is built for order two, got p = {0}")]
    FoldNeedsTwo(u32),
    #[error("unexpected vertex name {0} in the glued cylinder")]
    UnexpectedName(String),
    #[error("cone vertex {0} was never classified into a region")]
    Unclassified(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Cylinder(#[from] CylError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

/// Which part of the cone model a vertex belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Region {
    /// Shared by every cut disk.
    Core,
    /// Proper to cut disk j.
    Disk(u32),
    /// Proper to wrapped block j, including its cap cone.
    Block(u32),
    /// The cone apex.
    Apex,
}

/// The cone model D: the wrapped quotient with its holes capped off, coned.
pub struct ConeModel {
    pub complex: Arc<Complex>,
    pub apex: VertexId,
    /// Apexes of the five cap cones.
    pub cap_apexes: Vec<VertexId>,
    /// The capped sphere: everything except the apex cone.
    pub sphere: Arc<Complex>,
    /// Region of each vertex of `complex`.
    pub regions: Vec<Region>,
    /// Image of the book, the 2-skeleton region.
    pub book: Arc<Complex>,
    /// Images of the five cut disks.
    pub disks: Vec<Arc<Complex>>,
    /// Images of the five shells together with their cap cones.
    pub blocks: Vec<Arc<Complex>>,
    /// Images of the five outer spheres O_j.
    pub outers: Vec<Arc<Complex>>,
    /// The five wrapped boundary spheres.
    pub caps: Vec<Arc<Complex>>,
}

fn region_of(x: XPart) -> Region {
    match x {
        XPart::Core => Region::Core,
        XPart::Cut(j) => Region::Disk(j),
        XPart::Marked(i) | XPart::PoleLeft(i) | XPart::PoleRight(i) => Region::Block(i),
    }
}

/// Every maximal cell of `a` must span a face of `b`, matching by name.
fn cells_within(a: &Complex, b: &Complex) -> Result<(), String> {
    for s in a.maximal_simplices() {
        let mut ids = Vec::with_capacity(s.vertices().len());
        for n in a.simplex_names(s) {
            ids.push(
                b.vertex_id(&n)
                    .ok_or_else(|| format!("vertex {n} is missing from the target"))?,
            );
        }
        let img = Simplex::from_image(ids);
        if !b.contains_simplex(&img) {
            return Err(format!("cell {} does not fit", a.describe(s)));
        }
    }
    Ok(())
}

fn image_of(sub: &Arc<Complex>, to_w: &SimplicialMap) -> Result<Arc<Complex>, GammaError> {
    Ok(to_w.restrict_to(sub.clone())?.image_complex()?)
}

/// Builds the cone model over the codomain of `to_w` (the block complex
/// folded along its boundary in some way), classifies every vertex into a
/// region, and checks the region dictionary: each wrapped outer sphere sits
/// inside both the book image and its block image, adjacent block images meet
/// exactly in a disk image, and the disk images cover the book image.
fn cone_model(
    log: &mut CertLog,
    tag: &str,
    block: &BlockModel,
    to_w: &SimplicialMap,
    caps: Vec<Arc<Complex>>,
) -> Result<ConeModel, GammaError> {
    let w = to_w.codomain().clone();

    let mut qb = Complex::builder();
    for s in w.maximal_simplices() {
        qb.simplex(w.simplex_names(s));
    }
    for (i, cap) in caps.iter().enumerate() {
        let t = VertexName::fresh("cap-cone", i as u32);
        for s in cap.maximal_simplices() {
            let mut names = cap.simplex_names(s);
            names.push(t.clone());
            qb.simplex(names);
        }
    }
    let sphere = qb.build()?;

    let apex_name = VertexName::fresh("cone-apex", 0);
    let mut db = Complex::builder();
    for s in sphere.maximal_simplices() {
        let mut names = sphere.simplex_names(s);
        names.push(apex_name.clone());
        db.simplex(names);
    }
    let complex = db.build()?;
    let apex = complex.require_vertex(&apex_name)?;
    let cap_apexes: Vec<VertexId> = (0..caps.len())
        .map(|i| complex.require_vertex(&VertexName::fresh("cap-cone", i as u32)))
        .collect::<Result<_, _>>()?;

    let mut regions: Vec<Option<Region>> = vec![None; complex.n_vertices()];
    for v in 0..block.complex.n_vertices() as VertexId {
        let r = region_of(block.geo[v as usize].xpart);
        let wname = w.name(to_w.apply(v));
        let d = complex.require_vertex(wname)?;
        // folds keep regions: orbit members and fold fibers share a position class
        debug_assert!(regions[d as usize].is_none_or(|prev| prev == r));
        regions[d as usize] = Some(r);
    }
    for (i, &t) in cap_apexes.iter().enumerate() {
        regions[t as usize] = Some(Region::Block(i as u32));
    }
    regions[apex as usize] = Some(Region::Apex);
    let regions: Vec<Region> = regions
        .into_iter()
        .enumerate()
        .map(|(v, r)| r.ok_or_else(|| GammaError::Unclassified(complex.name(v as VertexId).to_string())))
        .collect::<Result<_, _>>()?;

    let book = image_of(&block.book, to_w)?;
    let disks: Vec<Arc<Complex>> = block
        .disks
        .iter()
        .map(|dk| image_of(dk, to_w))
        .collect::<Result<_, _>>()?;
    let outers: Vec<Arc<Complex>> = block
        .outer
        .iter()
        .map(|o| image_of(o, to_w))
        .collect::<Result<_, _>>()?;
    let mut blocks: Vec<Arc<Complex>> = Vec::with_capacity(caps.len());
    for (i, cap) in caps.iter().enumerate() {
        let shell_img = image_of(&block.shells[i], to_w)?;
        let mut bb = Complex::builder();
        for s in shell_img.maximal_simplices() {
            bb.simplex(shell_img.simplex_names(s));
        }
        let t = VertexName::fresh("cap-cone", i as u32);
        for s in cap.maximal_simplices() {
            let mut names = cap.simplex_names(s);
            names.push(t.clone());
            bb.simplex(names);
        }
        blocks.push(bb.build()?);
    }

    for j in 0..outers.len() {
        log.check(
            &format!("{tag}-outer-frame-{j}"),
            "the wrapped outer sphere lies in the book image and in its block image",
            || {
                cells_within(&outers[j], &book)?;
                cells_within(&outers[j], &blocks[j])
            },
        )?;
    }
    for i in 0..blocks.len() {
        let k = (i + 1) % blocks.len();
        log.check(
            &format!("{tag}-blocks-meet-{i}"),
            "adjacent wrapped blocks share exactly the disk image between them",
            || {
                let a: BTreeSet<&VertexName> = blocks[i].names().iter().collect();
                let b: BTreeSet<&VertexName> = blocks[k].names().iter().collect();
                let d: BTreeSet<&VertexName> = disks[i].names().iter().collect();
                let meet: BTreeSet<&VertexName> = a.intersection(&b).copied().collect();
                if meet != d {
                    return Err(format!(
                        "blocks {i} and {k} meet in {} vertices, disk has {}",
                        meet.len(),
                        d.len()
                    ));
                }
                Ok(())
            },
        )?;
    }
    log.check(
        &format!("{tag}-book-cover"),
        "the disk images cover the book image",
        || {
            for dk in &disks {
                cells_within(dk, &book)?;
            }
            let covered: BTreeSet<&VertexName> =
                disks.iter().flat_map(|dk| dk.names().iter()).collect();
            let all: BTreeSet<&VertexName> = book.names().iter().collect();
            if covered != all {
                return Err("disk images miss part of the book image".into());
            }
            Ok(())
        },
    )?;

    Ok(ConeModel {
        complex,
        apex,
        cap_apexes,
        sphere,
        regions,
        book,
        disks,
        blocks,
        outers,
        caps,
    })
}

/// Splits a glued-copy vertex name into its copy index and block vertex.
fn split_copy(block: &BlockModel, name: &VertexName) -> Result<(u32, VertexId), GammaError> {
    match name {
        VertexName::Tagged(c, inner) => Ok((*c, block.complex.require_vertex(inner)?)),
        other => Ok((0, block.complex.require_vertex(other)?)),
    }
}

/// Rotates a glued-copy vertex back to copy zero of the block complex.
fn to_copy_zero(block: &BlockModel, p: u32, name: &VertexName) -> Result<VertexId, GammaError> {
    let (c, v) = split_copy(block, name)?;
    Ok(block.action.apply((p - c % p) % p, v))
}

/// The branched-cover bundle: all complexes, maps and actions derived from a
/// block model, with their certificates recorded along the way.
pub struct GammaBundle {
    pub block: BlockModel,
    pub fp: Prime,
    pub outward: OutwardRetraction,
    /// Inward retractions Shell_j -> Lk_j.
    pub inward: Vec<SimplicialMap>,
    /// Boundary-orbit quotient M -> W.
    pub mu: Quotient,
    pub cone: ConeModel,
    pub m_plus: GluedCopies,
    /// Deck rotation of the glued copies.
    pub deck: CyclicAction,
    /// Cylinder of the fold, ranked by wrapped-quotient class, bare cuts last.
    pub cyl: MappingCylinder,
    pub action_plus: CyclicAction,
    /// Orbit quotient of the base, M -> V.
    pub v_quotient: Quotient,
    /// Cylinder of the descended fold W -> V; its complex is Gamma.
    pub gamma_cyl: MappingCylinder,
    /// Deck-orbit rename of the big cylinder onto Gamma.
    pub gamma_map: SimplicialMap,
    /// The cylinder bottom inside Gamma, a canonical copy of W.
    pub bottom: Arc<Complex>,
    pub w_to_bottom: SimplicialMap,
    /// Projection Gamma -> D.
    pub delta: SimplicialMap,
    /// Section-collapsed cylinder Gamma_*.
    pub star: Quotient,
    pub action_star: CyclicAction,
    /// Factorization Gamma_* -> Gamma.
    pub to_gamma: SimplicialMap,
    /// Projection Gamma_* -> D.
    pub delta_star: SimplicialMap,
}

impl GammaBundle {
    /// The outward retraction value at the barycenter of a face of the block
    /// complex, as a vertex of the wrapped quotient W.
    pub fn collapse_value(&self, face: &Simplex) -> Result<VertexId, GammaError> {
        let name = if face.dim() == 0 {
            self.block.complex.name(face.vertices()[0]).clone()
        } else {
            VertexName::bary(self.block.complex.simplex_names(face))
        };
        let sv = self.outward.sdiv.complex.require_vertex(&name)?;
        let rv = self.outward.map.apply(sv);
        Ok(self.mu.projection.apply(rv))
    }
}

/// Builds the bundle and certifies it: the capped sphere has the homology of
/// a 3-sphere, the projection is constant on orbits and splits over the book
/// region, the fiber over each wrapped block is the wrapped shell and its
/// outer restriction has degree +-p, the pair (Gamma, bottom) has rank-one
/// H_4 mapping isomorphically to H_4(D, capped sphere), and the residual
/// rotation on Gamma_* fixes exactly a two-dimensional set.
pub fn build_gamma(log: &mut CertLog, block: BlockModel) -> Result<GammaBundle, GammaError> {
    let p = block.model.p.get();
    let fp = block.model.p;
    if block.model.a != 10 {
        return Err(GammaError::WrongArity(block.model.a));
    }
    if (2 * block.model.b) % p != 0 || (2 * block.model.b) / p < 3 {
        return Err(GammaError::CapTooSmall {
            b: block.model.b,
            p,
        });
    }

    let outward = build_outward_retraction(log, &block)?;
    let inward: Vec<SimplicialMap> = (0..block.links.len() as u32)
        .map(|i| build_inward_retraction(log, &block, i))
        .collect::<Result<_, _>>()?;

    let mu = partial_orbit_quotient(&block.action, &block.boundary)?;
    let w = mu.complex.clone();
    let caps: Vec<Arc<Complex>> = block
        .links
        .iter()
        .map(|lk| image_of(lk, &mu.projection))
        .collect::<Result<_, _>>()?;
    let cone = cone_model(log, "cone", &block, &mu.projection, caps)?;

    log.check(
        "bundle-capped-sphere",
        "the capped wrapped quotient has the F_p homology of a 3-sphere",
        || {
            let b = betti_numbers(&cone.sphere, fp);
            if b == vec![1, 0, 0, 1] {
                Ok(())
            } else {
                Err(format!("betti {b:?}"))
            }
        },
    )?;
    log.check(
        "bundle-cone-collapsible",
        "the cone model is F_p acyclic",
        || {
            let b = betti_numbers(&cone.complex, fp);
            if b == vec![1, 0, 0, 0, 0] {
                Ok(())
            } else {
                Err(format!("betti {b:?}"))
            }
        },
    )?;

    let m_plus = glue_copies(&block.complex, &block.boundary, p)?;
    let deck = glued_rotation(&m_plus, &block.action, p)?;

    let v_quotient = crate::action::quotient(&block.action)?;

    // fold of the wrapped quotient onto the base orbits; well defined since
    // the wrap identifies along the same rotation
    let mut fb: Vec<Option<VertexId>> = vec![None; w.n_vertices()];
    for v in 0..block.complex.n_vertices() as VertexId {
        let wv = mu.projection.apply(v) as usize;
        let target = v_quotient.projection.apply(v);
        debug_assert!(fb[wv].is_none_or(|t| t == target));
        fb[wv] = Some(target);
    }
    let fb: Vec<VertexId> = fb
        .into_iter()
        .map(|t| t.expect("the wrap projection is surjective"))
        .collect();
    let fold_bar = SimplicialMap::new(w.clone(), v_quotient.complex.clone(), fb)?;

    // rank classes with the bare cuts last: a bare cut is fixed by the
    // rotation, so anything ranked behind one must be fixed too or the orbit
    // rename below would merge cells that are not orbit mates
    let bare_cuts: BTreeSet<VertexId> = (0..block.complex.n_vertices() as VertexId)
        .filter(|&v| {
            let g = &block.geo[v as usize];
            matches!(g.xpart, XPart::Cut(_)) && g.y_ids.is_empty()
        })
        .map(|v| mu.projection.apply(v))
        .collect();
    let mut rank_w = vec![0u32; w.n_vertices()];
    let mut next = 0u32;
    for wv in 0..w.n_vertices() as VertexId {
        if !bare_cuts.contains(&wv) {
            rank_w[wv as usize] = next;
            next += 1;
        }
    }
    for &wv in &bare_cuts {
        rank_w[wv as usize] = next;
        next += 1;
    }
    let gamma_cyl = mapping_cylinder_ranked(&fold_bar, &rank_w)?;
    let gamma = gamma_cyl.complex.clone();

    let mp = m_plus.complex.clone();
    let mut rank = vec![0u32; mp.n_vertices()];
    for v in 0..mp.n_vertices() as VertexId {
        let m0 = to_copy_zero(&block, p, mp.name(v))?;
        rank[v as usize] = rank_w[mu.projection.apply(m0) as usize];
    }
    let cyl = mapping_cylinder_ranked(&m_plus.fold, &rank)?;
    let action_plus = cylinder_action(&cyl, &deck, &block.action, p)?;

    // the orbit rename onto Gamma; the shared rank makes prefixes transport
    let mut gm: Vec<VertexId> = Vec::with_capacity(cyl.complex.n_vertices());
    for v in 0..cyl.complex.n_vertices() as VertexId {
        let target = match cyl.complex.name(v) {
            VertexName::Tagged(0, inner) => {
                let m0 = to_copy_zero(&block, p, inner)?;
                let wn = w.name(mu.projection.apply(m0));
                gamma.require_vertex(&VertexName::tagged(0, wn.clone()))?
            }
            VertexName::Tagged(1, inner) => {
                let mv = block.complex.require_vertex(inner)?;
                let vn = v_quotient.complex.name(v_quotient.projection.apply(mv));
                gamma.require_vertex(&VertexName::tagged(1, vn.clone()))?
            }
            other => return Err(GammaError::UnexpectedName(other.to_string())),
        };
        gm.push(target);
    }
    let gamma_map = SimplicialMap::new(cyl.complex.clone(), gamma.clone(), gm)?;

    log.check(
        "bundle-quotient-invariant",
        "the rename onto Gamma is deck invariant",
        || {
            for v in 0..cyl.complex.n_vertices() as VertexId {
                if gamma_map.apply(action_plus.apply(1, v)) != gamma_map.apply(v) {
                    return Err(format!("moves at {}", cyl.complex.name(v)));
                }
            }
            Ok(())
        },
    )?;
    log.check(
        "bundle-quotient-fibers",
        "vertex fibers of the rename are single deck orbits",
        || {
            let mut fibers: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
            for v in 0..cyl.complex.n_vertices() as VertexId {
                fibers.entry(gamma_map.apply(v)).or_default().insert(v);
            }
            if fibers.len() != gamma.n_vertices() {
                return Err("the rename misses a vertex of Gamma".into());
            }
            for (gv, fiber) in &fibers {
                let rep = *fiber.iter().next().expect("fibers are nonempty");
                let orbit: BTreeSet<VertexId> =
                    action_plus.vertex_orbit(rep).into_iter().collect();
                if *fiber != orbit {
                    return Err(format!("fiber of {} splits", gamma.name(*gv)));
                }
            }
            Ok(())
        },
    )?;
    log.check(
        "bundle-quotient-onto-cells",
        "every maximal cell of Gamma is the rename of a cylinder cell",
        || {
            let images: BTreeSet<Vec<VertexId>> = cyl
                .complex
                .maximal_simplices()
                .iter()
                .map(|s| {
                    let mut vs: Vec<VertexId> =
                        s.vertices().iter().map(|&v| gamma_map.apply(v)).collect();
                    vs.sort_unstable();
                    vs.dedup();
                    vs
                })
                .collect();
            for s in gamma.maximal_simplices() {
                if !images.contains(&s.vertices().to_vec()) {
                    return Err(format!("a {}-cell of Gamma is unreached", s.dim()));
                }
            }
            Ok(())
        },
    )?;

    // canonical copy of W at the cylinder bottom
    let bottom = gamma_cyl.bottom.clone();
    let wb: Vec<VertexId> = (0..w.n_vertices() as VertexId)
        .map(|wv| gamma.require_vertex(&VertexName::tagged(0, w.name(wv).clone())))
        .collect::<Result<_, _>>()?;
    let w_to_bottom = SimplicialMap::new(w.clone(), gamma.clone(), wb)?;

    // the projection to the cone model: bottom classes keep their cone
    // vertex, everything over the base is crushed to the apex
    let dt: Vec<VertexId> = (0..gamma.n_vertices() as VertexId)
        .map(|v| match gamma.name(v) {
            VertexName::Tagged(0, inner) => Ok(cone.complex.require_vertex(inner)?),
            VertexName::Tagged(1, _) => Ok(cone.apex),
            other => Err(GammaError::UnexpectedName(other.to_string())),
        })
        .collect::<Result<_, _>>()?;
    let delta = SimplicialMap::new(gamma.clone(), cone.complex.clone(), dt)?;

    log.check(
        "bundle-projection-splits",
        "the projection restricted to the bottom is the inclusion of the wrapped quotient",
        || {
            for wv in 0..w.n_vertices() as VertexId {
                let through = delta.apply(w_to_bottom.apply(wv));
                let direct = cone
                    .complex
                    .vertex_id(w.name(wv))
                    .ok_or_else(|| format!("{} missing from the cone", w.name(wv)))?;
                if through != direct {
                    return Err(format!("class {} is displaced", w.name(wv)));
                }
            }
            Ok(())
        },
    )?;

    log.check(
        "bundle-boundary-fiber",
        "the preimage of the capped sphere is exactly the cylinder bottom",
        || {
            let bot: BTreeSet<VertexId> = w_to_bottom.vertex_map().iter().copied().collect();
            for v in 0..gamma.n_vertices() as VertexId {
                let over_sphere = delta.apply(v) != cone.apex;
                if over_sphere != bot.contains(&v) {
                    return Err(format!(
                        "vertex {} sits on the wrong side",
                        gamma.name(v)
                    ));
                }
            }
            Ok(())
        },
    )?;

    // section over the book region: one class over each book-image vertex
    let book_ids: Vec<VertexId> = cone
        .book
        .names()
        .iter()
        .map(|n| cone.complex.require_vertex(n))
        .collect::<Result<_, _>>()?;
    let book_set: BTreeSet<VertexId> = book_ids.iter().copied().collect();
    let mut fibers: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for v in 0..gamma.n_vertices() as VertexId {
        let d = delta.apply(v);
        if book_set.contains(&d) {
            fibers.entry(d).or_default().push(v);
        }
    }
    log.check(
        "bundle-book-fibers",
        "the projection is one-to-one over the book region",
        || {
            for &d in &book_ids {
                match fibers.get(&d).map(Vec::as_slice) {
                    Some([_]) => {}
                    Some(more) => {
                        return Err(format!(
                            "{} has {} preimages",
                            cone.complex.name(d),
                            more.len()
                        ))
                    }
                    None => return Err(format!("{} has no preimage", cone.complex.name(d))),
                }
            }
            if fibers.len() != book_ids.len() {
                return Err("a non-book vertex slipped into the book fibers".into());
            }
            Ok(())
        },
    )?;
    let section_table: Vec<VertexId> = cone
        .book
        .names()
        .iter()
        .map(|n| {
            let d = cone.complex.require_vertex(n)?;
            Ok::<VertexId, GammaError>(fibers[&d][0])
        })
        .collect::<Result<_, _>>()?;
    let section = SimplicialMap::new(cone.book.clone(), gamma.clone(), section_table)?;
    log.check(
        "bundle-book-section",
        "the unique preimages over the book region form a simplicial section",
        || {
            for v in 0..cone.book.n_vertices() as VertexId {
                let d = cone
                    .complex
                    .vertex_id(cone.book.name(v))
                    .ok_or("book image vertex missing from the cone")?;
                if delta.apply(section.apply(v)) != d {
                    return Err(format!("section misses over {}", cone.book.name(v)));
                }
            }
            Ok(())
        },
    )?;

    // fibers over the wrapped blocks: the wrapped shells, nothing more
    for j in 0..cone.blocks.len() {
        let block_ids: BTreeSet<VertexId> = cone.blocks[j]
            .names()
            .iter()
            .map(|n| cone.complex.require_vertex(n))
            .collect::<Result<_, _>>()?;
        let mut lhs: BTreeSet<VertexId> = BTreeSet::new();
        for v in 0..gamma.n_vertices() as VertexId {
            if block_ids.contains(&delta.apply(v)) {
                lhs.insert(v);
            }
        }
        let mut rhs: BTreeSet<VertexId> = BTreeSet::new();
        for n in block.shells[j].names() {
            let v = block.complex.require_vertex(n)?;
            rhs.insert(w_to_bottom.apply(mu.projection.apply(v)));
        }
        log.check(
            &format!("bundle-fiber-over-block-{j}"),
            "the fiber over a wrapped block is its wrapped shell at the bottom",
            || {
                if lhs == rhs {
                    Ok(())
                } else {
                    Err(format!("{} fiber vertices vs {} shell classes", lhs.len(), rhs.len()))
                }
            },
        )?;
    }

    // restriction of the shell collapse to the outer sphere has degree +-p
    for j in 0..block.links.len() {
        let into_shell = SimplicialMap::by_name(
            block.outer[j].clone(),
            block.shells[j].clone(),
            |n| n.clone(),
        )?;
        let wrap = SimplicialMap::by_name(block.links[j].clone(), cone.caps[j].clone(), |n| {
            let v = block
                .complex
                .vertex_id(n)
                .expect("link vertices live in the block complex");
            w.name(mu.projection.apply(v)).clone()
        })?;
        let fiber = into_shell.then(&inward[j])?.then(&wrap)?;
        let deg = simplicial_degree(&fiber)?;
        log.check(
            &format!("bundle-fiber-degree-{j}"),
            "the outer sphere wraps around the cap with degree +-p",
            || {
                if deg.unsigned_abs() == u64::from(p) {
                    Ok(())
                } else {
                    Err(format!("degree {deg}"))
                }
            },
        )?;
    }

    log.check(
        "bundle-pair-rank",
        "H_4 of (Gamma, bottom) over F_p has rank one",
        || {
            let b = relative_betti_numbers(&gamma, &bottom, fp).map_err(|e| e.to_string())?;
            if b.get(4) == Some(&1) {
                Ok(())
            } else {
                Err(format!("relative betti {b:?}"))
            }
        },
    )?;
    log.check(
        "bundle-cone-pair-rank",
        "H_4 of (D, capped sphere) over F_p has rank one",
        || {
            let b = relative_betti_numbers(&cone.complex, &cone.sphere, fp)
                .map_err(|e| e.to_string())?;
            if b.get(4) == Some(&1) {
                Ok(())
            } else {
                Err(format!("relative betti {b:?}"))
            }
        },
    )?;
    log.check(
        "bundle-pair-iso",
        "the projection induces an isomorphism on relative H_4",
        || {
            match is_iso_on_h(&delta, fp, 4, Some(&bottom), Some(&cone.sphere)) {
                Ok(true) => Ok(()),
                Ok(false) => Err("not an isomorphism".into()),
                Err(e) => Err(e.to_string()),
            }
        },
    )?;

    // collapse the p section copies of the book
    let mut sb = Complex::builder();
    for c in 0..p {
        for s in block.book.maximal_simplices() {
            let names: Vec<VertexName> = block
                .book
                .simplex_names(s)
                .into_iter()
                .map(|n| VertexName::tagged(0, VertexName::tagged(c, n)))
                .collect();
            sb.simplex(names);
        }
    }
    let s_star = sb.build()?;
    let star = partial_orbit_quotient(&action_plus, &s_star)?;

    let mut gen_table: Vec<Option<VertexId>> = vec![None; star.complex.n_vertices()];
    let mut gen_conflict: Option<String> = None;
    for v in 0..cyl.complex.n_vertices() as VertexId {
        let sv = star.projection.apply(v) as usize;
        let target = star.projection.apply(action_plus.apply(1, v));
        match gen_table[sv] {
            None => gen_table[sv] = Some(target),
            Some(t) if t != target && gen_conflict.is_none() => {
                gen_conflict = Some(format!(
                    "rotation at {} depends on the representative",
                    cyl.complex.name(v)
                ));
            }
            _ => {}
        }
    }
    log.check(
        "bundle-star-action",
        "the deck rotation descends to the section-collapsed cylinder",
        || gen_conflict.clone().map_or(Ok(()), Err),
    )?;
    let gen_table: Vec<VertexId> = gen_table
        .into_iter()
        .map(|t| t.expect("the collapse projection is surjective"))
        .collect();
    let action_star = CyclicAction::new(star.complex.clone(), p, gen_table)?;

    let mut q_table: Vec<Option<VertexId>> = vec![None; star.complex.n_vertices()];
    let mut q_conflict: Option<String> = None;
    for v in 0..cyl.complex.n_vertices() as VertexId {
        let sv = star.projection.apply(v) as usize;
        let target = gamma_map.apply(v);
        match q_table[sv] {
            None => q_table[sv] = Some(target),
            Some(t) if t != target && q_conflict.is_none() => {
                q_conflict = Some(format!(
                    "orbit quotient at {} depends on the representative",
                    cyl.complex.name(v)
                ));
            }
            _ => {}
        }
    }
    log.check(
        "bundle-star-factors",
        "the orbit quotient factors through the section collapse",
        || q_conflict.clone().map_or(Ok(()), Err),
    )?;
    let q_table: Vec<VertexId> = q_table
        .into_iter()
        .map(|t| t.expect("the collapse projection is surjective"))
        .collect();
    let to_gamma = SimplicialMap::new(star.complex.clone(), gamma.clone(), q_table)?;
    let delta_star = to_gamma.then(&delta)?;

    log.check(
        "bundle-star-invariant",
        "the cone projection of Gamma_* is rotation invariant",
        || {
            for v in 0..star.complex.n_vertices() as VertexId {
                if delta_star.apply(action_star.apply(1, v)) != delta_star.apply(v) {
                    return Err(format!("moves over {}", star.complex.name(v)));
                }
            }
            Ok(())
        },
    )?;
    log.check(
        "bundle-star-fixed-plane",
        "the residual rotation on Gamma_* fixes a two-dimensional set",
        || {
            let fixed = action_star.fixed_subcomplex().map_err(|e| e.to_string())?;
            if fixed.dim() == Some(2) {
                Ok(())
            } else {
                Err(format!("fixed set has dimension {:?}", fixed.dim()))
            }
        },
    )?;

    Ok(GammaBundle {
        block,
        fp,
        outward,
        inward,
        mu,
        cone,
        m_plus,
        deck,
        cyl,
        action_plus,
        v_quotient,
        gamma_cyl,
        gamma_map,
        bottom,
        w_to_bottom,
        delta,
        star,
        action_star,
        to_gamma,
        delta_star,
    })
}

/// A fold-back control: the block complex with each boundary sphere folded
/// onto a fresh sphere by a degree-zero map (around the target cycle and
/// straight back), coned the same way as the honest quotient, with the
/// cylinder of the fold standing in for the bundle.
pub struct FoldScaffold {
    pub cone: ConeModel,
    /// Cylinder of the fold: block complex at the bottom, folded complex on top.
    pub cyl: MappingCylinder,
    /// Projection to the cone: the folded end by identity, the block end to the apex.
    pub delta: SimplicialMap,
}

/// Equator labels walking up around the target cycle and straight back.
fn fold_back_labels(b: u32) -> Vec<u32> {
    (0..2 * b).map(|t| if t <= b { t % b } else { 2 * b - t }).collect()
}

/// Builds the degree-zero control for an order-two block model. Certifies
/// that each boundary fold really has degree zero; every structural property
/// of the honest bundle that survives is checked downstream by comparing
/// pullbacks over the two cones.
pub fn zigzag_scaffold(log: &mut CertLog, block: &BlockModel) -> Result<FoldScaffold, GammaError> {
    let p = block.model.p.get();
    if p != 2 {
        return Err(GammaError::FoldNeedsTwo(p));
    }
    let b = block.model.b;
    let labels = fold_back_labels(b);
    let sphere = &block.model.complex;

    let mut rename: BTreeMap<VertexName, VertexName> = BTreeMap::new();
    for (i, e) in block.model.marked_edges.iter().enumerate() {
        let target = |l: u32| VertexName::atom(format!("fold{i}e{l}"));
        for j in 0..b as usize {
            let y0 = block.model.y_ids[j];
            let y1 = block.model.y_ids[(j + 1) % b as usize];
            let vs = VertexName::bary(sphere.simplex_names(
                &Simplex::from_image(e.vertices().iter().copied().chain([y0])),
            ));
            let es = VertexName::bary(sphere.simplex_names(
                &Simplex::from_image(e.vertices().iter().copied().chain([y0, y1])),
            ));
            rename.insert(vs, target(labels[2 * j]));
            rename.insert(es, target(labels[2 * j + 1]));
        }
        let left = sphere.name(block.model.x_ids[2 * i]).clone();
        let right = sphere.name(block.model.x_ids[2 * i + 1]).clone();
        rename.insert(left, VertexName::atom(format!("fold{i}S")));
        rename.insert(right, VertexName::atom(format!("fold{i}N")));
    }

    let mut wb = Complex::builder();
    for s in block.complex.maximal_simplices() {
        let names: Vec<VertexName> = block
            .complex
            .simplex_names(s)
            .into_iter()
            .map(|n| rename.get(&n).cloned().unwrap_or(n))
            .collect();
        wb.simplex(names);
    }
    let w = wb.build()?;
    let to_w = {
        let rename = rename.clone();
        SimplicialMap::by_name(block.complex.clone(), w.clone(), move |n| {
            rename.get(n).cloned().unwrap_or_else(|| n.clone())
        })?
    };

    let caps: Vec<Arc<Complex>> = block
        .links
        .iter()
        .map(|lk| image_of(lk, &to_w))
        .collect::<Result<_, _>>()?;
    for (i, lk) in block.links.iter().enumerate() {
        let fold = {
            let rename = rename.clone();
            SimplicialMap::by_name(lk.clone(), caps[i].clone(), move |n| {
                rename.get(n).cloned().unwrap_or_else(|| n.clone())
            })?
        };
        let deg = simplicial_degree(&fold)?;
        log.check(
            &format!("control-fold-degree-{i}"),
            "the fold-back of the boundary sphere has degree zero",
            || {
                if deg == 0 {
                    Ok(())
                } else {
                    Err(format!("degree {deg}"))
                }
            },
        )?;
    }

    let cone = cone_model(log, "control-cone", block, &to_w, caps)?;
    let cyl = mapping_cylinder(&to_w)?;
    let mut table: Vec<VertexId> = Vec::with_capacity(cyl.complex.n_vertices());
    for v in 0..cyl.complex.n_vertices() as VertexId {
        let target = match cyl.complex.name(v) {
            VertexName::Tagged(1, inner) => cone.complex.require_vertex(inner)?,
            VertexName::Tagged(0, _) => cone.apex,
            other => return Err(GammaError::UnexpectedName(other.to_string())),
        };
        table.push(target);
    }
    let delta = SimplicialMap::new(cyl.complex.clone(), cone.complex.clone(), table)?;

    Ok(FoldScaffold { cone, cyl, delta })
}
