//! The sphere model and its block decomposition.
//!
//! The model is the join of two cycles: an x-cycle of length a that stays
//! fixed, and a y-cycle of length b rotated by b/p. Five pairwise disjoint
//! marked edges e_i = {x_2i, x_2i+1} on the x-cycle label five invariant
//! solid regions. The complement model M lives in the barycentric
//! subdivision: deleting the open stars of the five edge barycenters leaves
//! a complex whose boundary is five disjoint 2-spheres (the links).
//!
//! Vertices of M classify by the x-part of their carrier: pure-y (core),
//! marked edge, a single pole x_2i or x_2i+1, or an unmarked cut edge
//! cut_i = {x_2i+1, x_2i+2}. The classification drives the block
//! decomposition (shells, disks, book, outer spheres) and both retractions.

use crate::action::CyclicAction;
use crate::cert::{CertError, CertLog};
use crate::chain::{betti_numbers, is_iso_on_h};
use crate::complex::{cycle_complex, join, Complex, ComplexError, Simplex, VertexId};
use crate::degree::simplicial_degree;
use crate::extension::{Carrier, ExtensionError, PartialMap};
use crate::linalg::Prime;
use crate::map::{MapError, SimplicialMap};
use crate::name::VertexName;
use crate::subdivide::Subdivision;
use std::collections::BTreeSet;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("p = {0} is not an odd-friendly prime for this model")]
    BadPrime(u32),
    #[error("model parameters rejected: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Action(#[from] crate::action::ActionError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

/// The x-part of a vertex carrier, relative to the five marked edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XPart {
    /// Carrier is a pure y-face.
    Core,
    /// Carrier contains the marked edge e_i.
    Marked(u32),
    /// Carrier's x-part is the single left pole x_2i.
    PoleLeft(u32),
    /// Carrier's x-part is the single right pole x_2i+1.
    PoleRight(u32),
    /// Carrier's x-part is the unmarked edge cut_i = {x_2i+1, x_2i+2}.
    Cut(u32),
}

/// The round sphere: join of the fixed x-cycle and the rotated y-cycle.
pub struct SphereModel {
    pub p: Prime,
    pub a: u32,
    pub b: u32,
    pub complex: Arc<Complex>,
    pub action: CyclicAction,
    pub fixed_circle: Arc<Complex>,
    /// Marked edges e_i, in complex ids.
    pub marked_edges: Vec<Simplex>,
    /// For each maximal simplex: the marked ball it belongs to, if any.
    pub ball_labels: Vec<Option<u32>>,
    /// x-cycle vertex ids in cycle order.
    pub x_ids: Vec<VertexId>,
    /// y-cycle vertex ids in cycle order.
    pub y_ids: Vec<VertexId>,
}

/// Builds and certifies the sphere model. Requires p prime, a >= 10, b a
/// multiple of p with b >= 3.
pub fn build_sphere_model(
    log: &mut CertLog,
    p: u32,
    a: u32,
    b: u32,
) -> Result<SphereModel, ModelError> {
    let prime = Prime::new(p).map_err(|_| ModelError::BadPrime(p))?;
    if a < 10 {
        return Err(ModelError::BadParameters(format!("a = {a} < 10")));
    }
    if b < 3 || b % p != 0 {
        return Err(ModelError::BadParameters(format!(
            "b = {b} must be a multiple of p = {p} and at least 3"
        )));
    }
    let xc = cycle_complex(a, "x")?;
    let yc = cycle_complex(b, "y")?;
    let complex = join(&xc, &yc)?;
    let x_ids: Vec<VertexId> = (0..a)
        .map(|i| {
            complex
                .vertex_id(&VertexName::atom(format!("x{i}")))
                .expect("join keeps cycle names")
        })
        .collect();
    let y_ids: Vec<VertexId> = (0..b)
        .map(|j| {
            complex
                .vertex_id(&VertexName::atom(format!("y{j}")))
                .expect("join keeps cycle names")
        })
        .collect();

    let step = b / p;
    let action = CyclicAction::by_name(complex.clone(), p, |name| {
        let VertexName::Atom(s) = name else {
            unreachable!("join of cycles has atom names")
        };
        if let Some(rest) = s.strip_prefix('y') {
            let j: u32 = rest.parse().expect("cycle index");
            VertexName::atom(format!("y{}", (j + step) % b))
        } else {
            name.clone()
        }
    })?;

    let f2 = Prime::new(2).expect("2 is prime");
    log.check(
        "sphere-betti",
        "the join of the two cycles has the homology of the 3-sphere mod 2 and mod p",
        || {
            let want = vec![1, 0, 0, 1];
            let got2 = betti_numbers(&complex, f2);
            if got2 != want {
                return Err(format!("mod 2 betti {got2:?}"));
            }
            let gotp = betti_numbers(&complex, prime);
            if gotp != want {
                return Err(format!("mod {p} betti {gotp:?}"));
            }
            Ok(())
        },
    )?;

    let fixed_circle = xc.clone();
    log.check(
        "sphere-fixed-circle",
        "the fixed subcomplex of the rotation is exactly the x-cycle",
        || {
            let fixed = action.fixed_subcomplex().map_err(|e| e.to_string())?;
            if !fixed.is_subcomplex_of(&fixed_circle) || !fixed_circle.is_subcomplex_of(&fixed) {
                return Err(format!(
                    "fixed subcomplex has f-vector {:?}, expected the x-cycle {:?}",
                    fixed.f_vector(),
                    fixed_circle.f_vector()
                ));
            }
            Ok(())
        },
    )?;

    log.check(
        "sphere-free-off-circle",
        "no power of the rotation fixes a vertex off the x-cycle, and no simplex off the x-cycle is invariant",
        || {
            match action.max_invariant_dim() {
                Some(d) if d <= 1 => {}
                other => return Err(format!("invariant simplices up to dimension {other:?}")),
            }
            for k in 1..p {
                for v in 0..complex.n_vertices() as VertexId {
                    if action.apply(k, v) == v
                        && fixed_circle.vertex_id(complex.name(v)).is_none()
                    {
                        return Err(format!(
                            "power {k} fixes {} off the circle",
                            complex.name(v)
                        ));
                    }
                }
            }
            Ok(())
        },
    )?;

    let marked_edges: Vec<Simplex> = (0..5)
        .map(|i| {
            Simplex::from_image([x_ids[(2 * i) as usize], x_ids[(2 * i + 1) as usize]])
        })
        .collect();
    log.check(
        "sphere-marked-edges",
        "the five marked edges are pairwise disjoint edges of the fixed circle",
        || {
            for (i, e) in marked_edges.iter().enumerate() {
                if !complex.contains_simplex(e) {
                    return Err(format!("edge {i} is not a simplex"));
                }
                for f in marked_edges.iter().skip(i + 1) {
                    if e.vertices().iter().any(|v| f.contains_vertex(*v)) {
                        return Err(format!("edges {i} and {f:?} share a vertex"));
                    }
                }
            }
            Ok(())
        },
    )?;

    let ball_labels: Vec<Option<u32>> = complex
        .maximal_simplices()
        .iter()
        .map(|s| {
            marked_edges
                .iter()
                .position(|e| e.is_face_of(s))
                .map(|i| i as u32)
        })
        .collect();

    log.check(
        "sphere-balls",
        "each marked edge spans an invariant contractible ball whose boundary is a 2-sphere containing the edge's endpoints",
        || {
            for (i, e) in marked_edges.iter().enumerate() {
                let mut ball_builder = Complex::builder();
                for s in complex.maximal_simplices() {
                    if e.is_face_of(s) {
                        ball_builder.simplex(complex.simplex_names(s));
                    }
                }
                let ball = ball_builder.build().map_err(|e| e.to_string())?;
                action.restrict_to(ball.clone()).map_err(|err| {
                    format!("ball {i} is not invariant: {err}")
                })?;
                let bb = betti_numbers(&ball, f2);
                if bb != vec![1, 0, 0, 0] {
                    return Err(format!("ball {i} has betti {bb:?}"));
                }
                let e_in_ball = Simplex::from_image(
                    e.vertices()
                        .iter()
                        .map(|&v| ball.require_vertex(complex.name(v)).expect("edge spans its ball")),
                );
                let sphere = ball
                    .delete_cofaces(&[e_in_ball])
                    .map_err(|e| e.to_string())?;
                let bs = betti_numbers(&sphere, f2);
                if bs != vec![1, 0, 1] {
                    return Err(format!("boundary of ball {i} has betti {bs:?}"));
                }
                for &v in e.vertices() {
                    if sphere.vertex_id(complex.name(v)).is_none() {
                        return Err(format!(
                            "endpoint {} of edge {i} is missing from the boundary sphere",
                            complex.name(v)
                        ));
                    }
                }
            }
            Ok(())
        },
    )?;

    Ok(SphereModel {
        p: prime,
        a,
        b,
        complex,
        action,
        fixed_circle,
        marked_edges,
        ball_labels,
        x_ids,
        y_ids,
    })
}

/// Per-vertex carrier geometry inside the block model.
#[derive(Clone, Debug)]
pub struct VertexGeo {
    pub xpart: XPart,
    /// y-part of the carrier, in sphere-model ids (may be empty).
    pub y_ids: Vec<VertexId>,
}

/// The complement model M: the subdivided sphere minus the open stars of the
/// five marked-edge barycenters, with its block decomposition.
pub struct BlockModel {
    pub model: SphereModel,
    /// Subdivision of the sphere model the block model lives in.
    pub sdiv: Subdivision,
    /// The complement complex M.
    pub complex: Arc<Complex>,
    pub action: CyclicAction,
    /// Union of the five boundary spheres.
    pub boundary: Arc<Complex>,
    /// The five boundary spheres (links of the deleted barycenters).
    pub links: Vec<Arc<Complex>>,
    /// Shell_i: the block around marked edge i.
    pub shells: Vec<Arc<Complex>>,
    /// Cut disk D_j: positions {core, cut_j}.
    pub disks: Vec<Arc<Complex>>,
    /// The book: union of the five disks.
    pub book: Arc<Complex>,
    /// The core circle: pure-y positions.
    pub core: Arc<Complex>,
    /// O_i = D_{i-1} u D_i, the inner 2-sphere of shell i.
    pub outer: Vec<Arc<Complex>>,
    /// Carrier geometry per vertex of `complex`.
    pub geo: Vec<VertexGeo>,
    /// Cut edges cut_j in sphere-model ids.
    pub cut_edges: Vec<Simplex>,
}

impl BlockModel {
    /// The vertex of M sitting at the barycenter of the given sphere-model
    /// face (the face itself for vertices).
    pub fn vertex_at(&self, face: &Simplex) -> Option<VertexId> {
        let name = if face.dim() == 0 {
            self.model.complex.name(face.vertices()[0]).clone()
        } else {
            VertexName::bary(self.model.complex.simplex_names(face))
        };
        self.complex.vertex_id(&name)
    }

    pub fn position(&self, v: VertexId) -> XPart {
        self.geo[v as usize].xpart
    }
}

fn classify_x(x_ids_sorted: &[u32], a: u32) -> Result<XPart, String> {
    match *x_ids_sorted {
        [] => Ok(XPart::Core),
        [k] => {
            if k % 2 == 0 {
                Ok(XPart::PoleLeft(k / 2))
            } else {
                Ok(XPart::PoleRight(k / 2))
            }
        }
        [k, l] => {
            // cycle edge, possibly the wraparound {0, a-1}
            let (lo, hi) = if l == (k + 1) % a { (k, l) } else { (l, k) };
            if hi != (lo + 1) % a {
                return Err(format!("x-part {{{k},{l}}} is not an edge"));
            }
            if lo % 2 == 0 {
                Ok(XPart::Marked(lo / 2))
            } else {
                Ok(XPart::Cut(lo / 2))
            }
        }
        _ => Err(format!("x-part {x_ids_sorted:?} has more than two vertices")),
    }
}

/// Builds and certifies the block model over a sphere model. The block
/// decomposition needs the tight spacing a = 10 (five marked edges separated
/// by single cut edges).
pub fn build_block_model(log: &mut CertLog, model: SphereModel) -> Result<BlockModel, ModelError> {
    if model.a != 10 {
        return Err(ModelError::BadParameters(format!(
            "block decomposition needs a = 10, got a = {}",
            model.a
        )));
    }
    let sphere = &model.complex;
    let sdiv = Subdivision::of(sphere);
    let stilde = sdiv.complex.clone();
    let action_tilde = sdiv.induced_action(&model.action)?;

    let center_names: Vec<VertexName> = model
        .marked_edges
        .iter()
        .map(|e| VertexName::bary(sphere.simplex_names(e)))
        .collect();
    let kept: BTreeSet<VertexName> = stilde
        .names()
        .iter()
        .filter(|n| !center_names.contains(n))
        .cloned()
        .collect();
    let complex = stilde.full_subcomplex(&kept)?;
    let action = action_tilde.restrict_to(complex.clone())?;

    // carrier geometry per vertex, via the subdivision names
    let x_index: Vec<Option<u32>> = (0..sphere.n_vertices() as VertexId)
        .map(|v| {
            model
                .x_ids
                .iter()
                .position(|&x| x == v)
                .map(|i| i as u32)
        })
        .collect();
    let mut geo = Vec::with_capacity(complex.n_vertices());
    for v in 0..complex.n_vertices() as VertexId {
        let members: Vec<VertexId> = match complex.name(v) {
            VertexName::Bary(names) => names
                .iter()
                .map(|n| sphere.require_vertex(n).expect("carrier names live in the sphere"))
                .collect(),
            other => vec![sphere
                .require_vertex(other)
                .expect("original vertices keep their names")],
        };
        let mut xs: Vec<u32> = members
            .iter()
            .filter_map(|&m| x_index[m as usize])
            .collect();
        xs.sort_unstable();
        let y_ids: Vec<VertexId> = members
            .iter()
            .copied()
            .filter(|&m| x_index[m as usize].is_none())
            .collect();
        let xpart = classify_x(&xs, model.a).map_err(ModelError::BadParameters)?;
        geo.push(VertexGeo { xpart, y_ids });
    }

    let cut_edges: Vec<Simplex> = (0..5)
        .map(|j| {
            Simplex::from_image([
                model.x_ids[(2 * j + 1) as usize],
                model.x_ids[((2 * j + 2) % 10) as usize],
            ])
        })
        .collect();

    let select = |pred: &dyn Fn(&VertexGeo) -> bool| -> Result<Arc<Complex>, ComplexError> {
        let verts: BTreeSet<VertexName> = (0..complex.n_vertices() as VertexId)
            .filter(|&v| pred(&geo[v as usize]))
            .map(|v| complex.name(v).clone())
            .collect();
        complex.full_subcomplex(&verts)
    };

    let core = select(&|g| g.xpart == XPart::Core)?;
    let disks: Vec<Arc<Complex>> = (0..5u32)
        .map(|j| select(&|g| matches!(g.xpart, XPart::Core) || g.xpart == XPart::Cut(j)))
        .collect::<Result<_, _>>()?;
    let book = select(&|g| matches!(g.xpart, XPart::Core | XPart::Cut(_)))?;
    let outer: Vec<Arc<Complex>> = (0..5u32)
        .map(|i| {
            select(&|g| {
                matches!(g.xpart, XPart::Core)
                    || g.xpart == XPart::Cut((i + 4) % 5)
                    || g.xpart == XPart::Cut(i)
            })
        })
        .collect::<Result<_, _>>()?;
    let shells: Vec<Arc<Complex>> = (0..5u32)
        .map(|i| {
            select(&|g| match g.xpart {
                XPart::Core => true,
                XPart::Marked(k) | XPart::PoleLeft(k) | XPart::PoleRight(k) => k == i,
                XPart::Cut(j) => j == i || j == (i + 4) % 5,
            })
        })
        .collect::<Result<_, _>>()?;
    let links: Vec<Arc<Complex>> = center_names
        .iter()
        .map(|n| stilde.link(n))
        .collect::<Result<_, _>>()?;
    let mut boundary_builder = Complex::builder();
    for l in &links {
        for s in l.maximal_simplices() {
            boundary_builder.simplex(l.simplex_names(s));
        }
    }
    let boundary = boundary_builder.build()?;

    let f2 = Prime::new(2).expect("2 is prime");
    let fp = model.p;

    log.check(
        "complement-betti",
        "the complement of the five open stars has the homology of a wedge of four 2-spheres, mod 2 and mod p",
        || {
            let want = vec![1, 0, 4, 0];
            let got2 = betti_numbers(&complex, f2);
            if got2 != want {
                return Err(format!("mod 2 betti {got2:?}"));
            }
            let gotp = betti_numbers(&complex, fp);
            if gotp != want {
                return Err(format!("mod {} betti {gotp:?}", fp.get()));
            }
            if complex.euler_characteristic() != 5 {
                return Err(format!("euler characteristic {}", complex.euler_characteristic()));
            }
            Ok(())
        },
    )?;

    log.check(
        "complement-boundary",
        "the boundary is five pairwise disjoint 2-spheres, each full in the complement",
        || {
            if boundary.component_count() != 5 {
                return Err(format!("{} components", boundary.component_count()));
            }
            let mut seen: BTreeSet<VertexName> = BTreeSet::new();
            for (i, l) in links.iter().enumerate() {
                for n in l.names() {
                    if !seen.insert(n.clone()) {
                        return Err(format!("links {i} and an earlier one share {n}"));
                    }
                }
                let bl = betti_numbers(l, f2);
                if bl != vec![1, 0, 1] {
                    return Err(format!("link {i} has betti {bl:?}"));
                }
                if !l.is_full_subcomplex_of(&complex) {
                    return Err(format!("link {i} is not full"));
                }
            }
            Ok(())
        },
    )?;

    log.check(
        "block-cover",
        "the five shells cover the complement, adjacent shells meet in cut disks, and each boundary sphere lies in its shell",
        || {
            for s in complex.maximal_simplices() {
                let inside = (0..5).any(|i| {
                    s.vertices()
                        .iter()
                        .all(|&v| shells[i].vertex_id(complex.name(v)).is_some())
                        && shells[i].contains_simplex(&Simplex::from_image(
                            s.vertices().iter().map(|&v| {
                                shells[i].vertex_id(complex.name(v)).expect("checked")
                            }),
                        ))
                });
                if !inside {
                    return Err(format!("cell {} is in no shell", complex.describe(s)));
                }
            }
            for i in 0..5usize {
                if !links[i].is_subcomplex_of(&shells[i]) {
                    return Err(format!("link {i} is not inside shell {i}"));
                }
                let next = (i + 1) % 5;
                // shared vertices of adjacent shells are exactly disk i
                for v in 0..complex.n_vertices() as VertexId {
                    let in_both = shells[i].vertex_id(complex.name(v)).is_some()
                        && shells[next].vertex_id(complex.name(v)).is_some();
                    let in_disk = disks[i].vertex_id(complex.name(v)).is_some();
                    if in_both != in_disk {
                        return Err(format!(
                            "vertex {} disagrees between shell overlap and disk {i}",
                            complex.name(v)
                        ));
                    }
                }
                if !outer[i].is_subcomplex_of(&book) {
                    return Err(format!("outer sphere {i} leaves the book"));
                }
                let bo = betti_numbers(&outer[i], f2);
                if bo != vec![1, 0, 1] {
                    return Err(format!("outer sphere {i} has betti {bo:?}"));
                }
            }
            Ok(())
        },
    )?;

    log.check(
        "block-invariance",
        "boundary, book, core, disks, shells, and outer spheres are all invariant",
        || {
            let mut parts: Vec<(&str, &Arc<Complex>)> = vec![
                ("boundary", &boundary),
                ("book", &book),
                ("core", &core),
            ];
            for (i, d) in disks.iter().enumerate() {
                parts.push((Box::leak(format!("disk-{i}").into_boxed_str()), d));
            }
            for (i, s) in shells.iter().enumerate() {
                parts.push((Box::leak(format!("shell-{i}").into_boxed_str()), s));
            }
            for (i, o) in outer.iter().enumerate() {
                parts.push((Box::leak(format!("outer-{i}").into_boxed_str()), o));
            }
            for (label, part) in parts {
                action
                    .restrict_to((*part).clone())
                    .map_err(|e| format!("{label}: {e}"))?;
            }
            Ok(())
        },
    )?;

    Ok(BlockModel {
        model,
        sdiv,
        complex,
        action,
        boundary,
        links,
        shells,
        disks,
        book,
        core,
        outer,
        geo,
        cut_edges,
    })
}

/// The outward retraction r: sd(M) -> M with image in the book.
pub struct OutwardRetraction {
    /// Subdivision of the block complex the retraction is defined on.
    pub sdiv: Subdivision,
    pub map: SimplicialMap,
}

/// Flag side: which cut edge the image is pushed onto, if any.
enum Side {
    Core,
    Onto(u32),
}

fn flag_side(block: &BlockModel, flag: &Simplex) -> Side {
    let mut cut: Option<u32> = None;
    for &v in flag.vertices() {
        match block.geo[v as usize].xpart {
            XPart::PoleLeft(i) => return Side::Onto((i + 4) % 5),
            XPart::PoleRight(i) => return Side::Onto(i),
            XPart::Cut(j) => cut = Some(j),
            _ => {}
        }
    }
    match cut {
        Some(j) => Side::Onto(j),
        None => Side::Core,
    }
}

/// Builds and certifies the outward retraction: subdivide M once, send the
/// flag through its top face's y-part, attached to the cut edge its side
/// dictates. Identity on the book's own vertices, cellwise exact over the
/// book, and shell-disciplined (shell i lands in the outer sphere O_i).
pub fn build_outward_retraction(
    log: &mut CertLog,
    block: &BlockModel,
) -> Result<OutwardRetraction, ModelError> {
    let sdiv = Subdivision::of(&block.complex);
    let sd_complex = sdiv.complex.clone();
    let sphere = &block.model.complex;

    let mut table: Vec<VertexId> = Vec::with_capacity(sd_complex.n_vertices());
    for v in 0..sd_complex.n_vertices() as VertexId {
        let flag = sdiv.carrier(v);
        let top = *flag
            .vertices()
            .iter()
            .max_by_key(|&&m| {
                block.geo[m as usize].y_ids.len()
                    + match block.geo[m as usize].xpart {
                        XPart::Core => 0,
                        XPart::PoleLeft(_) | XPart::PoleRight(_) => 1,
                        _ => 2,
                    }
            })
            .expect("flags are nonempty");
        let y_top = &block.geo[top as usize].y_ids;
        let image_face = match flag_side(block, &flag) {
            Side::Core => Simplex::from_image(y_top.iter().copied()),
            Side::Onto(j) => {
                let cut = &block.cut_edges[j as usize];
                Simplex::from_image(cut.vertices().iter().chain(y_top.iter()).copied())
            }
        };
        let _ = sphere;
        let image = block.vertex_at(&image_face).ok_or_else(|| {
            ModelError::BadParameters(format!(
                "retraction image {image_face:?} is not a vertex of the complement"
            ))
        })?;
        table.push(image);
    }
    let map = SimplicialMap::new(sd_complex.clone(), block.complex.clone(), table)?;

    log.check(
        "retraction-identity-on-book",
        "the retraction fixes every vertex of the book",
        || {
            for name in block.book.names() {
                let in_m = block.complex.require_vertex(name).map_err(|e| e.to_string())?;
                let in_sd = sd_complex.require_vertex(name).map_err(|e| e.to_string())?;
                if map.apply(in_sd) != in_m {
                    return Err(format!("book vertex {name} moves"));
                }
            }
            Ok(())
        },
    )?;

    log.check(
        "retraction-book-exact",
        "over the book the retraction is the top-face approximation: each flag inside the book goes to its top face's barycenter",
        || {
            for v in 0..sd_complex.n_vertices() as VertexId {
                let flag = sdiv.carrier(v);
                let in_book = flag
                    .vertices()
                    .iter()
                    .all(|&m| block.book.vertex_id(block.complex.name(m)).is_some());
                if !in_book {
                    continue;
                }
                let top = *flag
                    .vertices()
                    .iter()
                    .max_by_key(|&&m| {
                        block.geo[m as usize].y_ids.len()
                            + if block.geo[m as usize].xpart == XPart::Core { 0 } else { 2 }
                    })
                    .expect("flags are nonempty");
                if map.apply(v) != top {
                    return Err(format!(
                        "book flag at {} retracts to {}, not its top {}",
                        sd_complex.name(v),
                        block.complex.name(map.apply(v)),
                        block.complex.name(top)
                    ));
                }
            }
            Ok(())
        },
    )?;

    log.check(
        "retraction-carrier-discipline",
        "as a carrier-constrained map, shell flags stay inside their outer sphere and core flags inside the book",
        || {
            let book_carrier = Carrier::new(
                block
                    .book
                    .maximal_simplices()
                    .iter()
                    .map(|s| {
                        Simplex::from_image(s.vertices().iter().map(|&v| {
                            block
                                .complex
                                .require_vertex(block.book.name(v))
                                .expect("book is a subcomplex")
                        }))
                    })
                    .collect(),
            );
            let outer_carriers: Vec<Carrier> = block
                .outer
                .iter()
                .map(|o| {
                    Carrier::new(
                        o.maximal_simplices()
                            .iter()
                            .map(|s| {
                                Simplex::from_image(s.vertices().iter().map(|&v| {
                                    block
                                        .complex
                                        .require_vertex(o.name(v))
                                        .expect("outer sphere is a subcomplex")
                                }))
                            })
                            .collect(),
                    )
                })
                .collect();
            let carriers: Vec<Carrier> = (0..sd_complex.n_vertices() as VertexId)
                .map(|v| match flag_side(block, &sdiv.carrier(v)) {
                    Side::Core => book_carrier.clone(),
                    Side::Onto(j) => {
                        // a flag pushed onto cut j lies in shells j and j+1;
                        // its image must stay in both outer spheres, and the
                        // smaller constraint is the shared disk
                        let _ = j;
                        outer_carriers[((j + 1) % 5) as usize].clone()
                    }
                })
                .collect();
            let pm = PartialMap::new(
                sd_complex.clone(),
                block.complex.clone(),
                map.vertex_map().iter().map(|&w| Some(w)).collect(),
                carriers,
            )
            .map_err(|e| e.to_string())?;
            pm.validate().map_err(|w| w.to_string())?;
            Ok(())
        },
    )?;

    let f2 = Prime::new(2).expect("2 is prime");
    log.check(
        "retraction-h-iso",
        "the retraction induces isomorphisms on H2 mod 2 and mod p",
        || {
            for fp in [f2, block.model.p] {
                let ind = is_iso_on_h(&map, fp, 2, None, None).map_err(|e| e.to_string())?;
                if !ind {
                    return Err(format!("not an iso on H2 mod {}", fp.get()));
                }
            }
            Ok(())
        },
    )?;

    Ok(OutwardRetraction { sdiv, map })
}

/// The inward retraction of shell i onto its boundary sphere: satellites of
/// the marked edge stay, everything else folds onto the equator or the poles.
pub fn build_inward_retraction(
    log: &mut CertLog,
    block: &BlockModel,
    i: u32,
) -> Result<SimplicialMap, ModelError> {
    let shell = &block.shells[i as usize];
    let link = &block.links[i as usize];
    let sphere = &block.model.complex;
    let e = &block.model.marked_edges[i as usize];
    let left_pole = block.model.x_ids[(2 * i) as usize];
    let right_pole = block.model.x_ids[(2 * i + 1) as usize];

    let map = SimplicialMap::by_name(shell.clone(), link.clone(), |name| {
        let v = block
            .complex
            .vertex_id(name)
            .expect("shell vertices live in the complement");
        let g = &block.geo[v as usize];
        let equator = |y_ids: &[VertexId]| {
            VertexName::bary(
                sphere.simplex_names(&Simplex::from_image(
                    e.vertices().iter().chain(y_ids.iter()).copied(),
                )),
            )
        };
        match g.xpart {
            XPart::Marked(_) => name.clone(),
            XPart::PoleLeft(_) | XPart::PoleRight(_) if g.y_ids.is_empty() => name.clone(),
            XPart::PoleLeft(_) | XPart::PoleRight(_) => equator(&g.y_ids),
            XPart::Core => equator(&g.y_ids),
            XPart::Cut(_) if !g.y_ids.is_empty() => equator(&g.y_ids),
            XPart::Cut(j) => {
                // bare cut barycenter folds to the pole it touches
                if j == i {
                    sphere.name(right_pole).clone()
                } else {
                    sphere.name(left_pole).clone()
                }
            }
        }
    })?;

    log.check(
        &format!("inward-identity-{i}"),
        "the inward retraction fixes the boundary sphere pointwise",
        || {
            for name in link.names() {
                let v = shell.require_vertex(name).map_err(|e| e.to_string())?;
                if link.name(map.apply(v)) != name {
                    return Err(format!("boundary vertex {name} moves"));
                }
            }
            Ok(())
        },
    )?;

    log.check(
        &format!("inward-equivariant-{i}"),
        "the inward retraction commutes with the rotation",
        || {
            let act_shell = block
                .action
                .restrict_to(shell.clone())
                .map_err(|e| e.to_string())?;
            let act_link = block
                .action
                .restrict_to(link.clone())
                .map_err(|e| e.to_string())?;
            for v in 0..shell.n_vertices() as VertexId {
                let lhs = map.apply(act_shell.apply(1, v));
                let rhs = act_link.apply(1, map.apply(v));
                if lhs != rhs {
                    return Err(format!(
                        "disagrees at {}: {} vs {}",
                        shell.name(v),
                        link.name(lhs),
                        link.name(rhs)
                    ));
                }
            }
            Ok(())
        },
    )?;

    log.check(
        &format!("inward-degree-{i}"),
        "restricted to the inner sphere O_i the inward retraction has degree +-1",
        || {
            let o = &block.outer[i as usize];
            let incl = SimplicialMap::by_name(o.clone(), shell.clone(), |n| n.clone())
                .map_err(|e| e.to_string())?;
            let composite = incl.then(&map).map_err(|e| e.to_string())?;
            let d = simplicial_degree(&composite).map_err(|e| e.to_string())?;
            if d.abs() != 1 {
                return Err(format!("degree {d}"));
            }
            Ok(())
        },
    )?;

    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard() -> (CertLog, BlockModel) {
        let mut log = CertLog::new();
        let model = build_sphere_model(&mut log, 2, 10, 4).unwrap();
        let block = build_block_model(&mut log, model).unwrap();
        (log, block)
    }

    #[test]
    fn sphere_model_rejects_bad_parameters() {
        let mut log = CertLog::new();
        assert!(build_sphere_model(&mut log, 4, 10, 4).is_err());
        assert!(build_sphere_model(&mut log, 2, 8, 4).is_err());
        assert!(build_sphere_model(&mut log, 2, 10, 5).is_err());
        assert!(build_sphere_model(&mut log, 3, 10, 4).is_err());
    }

    #[test]
    fn sphere_model_p3_passes_its_certificates() {
        let mut log = CertLog::new();
        let model = build_sphere_model(&mut log, 3, 12, 6).unwrap();
        assert!(log.all_passed());
        assert_eq!(model.complex.f_vector(), vec![18, 90, 144, 72]);
    }

    #[test]
    fn block_model_has_the_frozen_f_vectors() {
        let (log, block) = standard();
        assert!(log.all_passed());
        assert_eq!(block.sdiv.complex.f_vector(), vec![188, 1148, 1920, 960]);
        assert_eq!(block.complex.f_vector(), vec![183, 1098, 1800, 880]);
        for l in &block.links {
            assert_eq!(l.f_vector(), vec![10, 24, 16]);
        }
        for d in &block.disks {
            assert_eq!(d.f_vector()[0], 17);
        }
        assert_eq!(block.core.f_vector(), vec![8, 8]);
        assert_eq!(block.book.euler_characteristic(), 5);
        assert_eq!(
            betti_numbers(&block.book, Prime::new(2).unwrap()),
            vec![1, 0, 4]
        );
    }

    #[test]
    fn outward_retraction_certifies() {
        let (mut log, block) = standard();
        let r = build_outward_retraction(&mut log, &block).unwrap();
        assert!(log.all_passed());
        // image is inside the book
        for v in 0..r.map.domain().n_vertices() as VertexId {
            let w = r.map.apply(v);
            assert!(block
                .book
                .vertex_id(block.complex.name(w))
                .is_some());
        }
    }

    #[test]
    fn inward_retractions_certify_for_every_block() {
        let (mut log, block) = standard();
        for i in 0..5 {
            build_inward_retraction(&mut log, &block, i).unwrap();
        }
        assert!(log.all_passed());
    }

    #[test]
    fn shells_are_solid_tori_mod_2() {
        let (_, block) = standard();
        for s in &block.shells {
            // shell deformation retracts to its boundary sphere side; its
            // homology matches a 2-sphere thickened by the fold
            let b = betti_numbers(s, Prime::new(2).unwrap());
            assert_eq!(b[0], 1);
            assert_eq!(b[1], 0);
        }
    }
}
