//! Cyclic group actions on complexes and their certified quotients.
//!
//! A quotient here is not a formal pushout: it is accepted only when the
//! projection is nondegenerate on every simplex and the faces over each image
//! simplex form a single orbit. Those two conditions make the simplicial quotient
//! model the topological one, and they are checked, not assumed. Setwise-but-not-
//! pointwise invariance of a simplex (the usual obstruction) shows up as a fiber
//! that is larger than one orbit and is reported with a witness.

use crate::complex::{Complex, ComplexError, Simplex, VertexId};
use crate::map::{MapError, SimplicialMap};
use crate::name::VertexName;
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ActionError {
    #[error("generator map is not a vertex permutation")]
    NotAPermutation,
    #[error("generator does not act simplicially: {0} has no image face")]
    NotAnAutomorphism(String),
    #[error("generator does not have order dividing {order}: moves {witness}")]
    WrongOrder { order: u32, witness: String },
    #[error("order zero action")]
    OrderZero,
    #[error("action does not leave {0} invariant")]
    NotInvariant(String),
    #[error("projection collapses {0}")]
    DegenerateProjection(String),
    #[error("fiber over {image} is not a single orbit ({fiber} faces, orbit size {orbit})")]
    FiberNotSingleOrbit {
        image: String,
        fiber: usize,
        orbit: usize,
    },
    #[error("quotient name {0} collides with an untouched vertex name")]
    NameCollision(String),
    #[error("group exponent {power} is not a homomorphism target for orders {dom} -> {cod}")]
    BadHomomorphism { power: u32, dom: u32, cod: u32 },
    #[error("map and actions live on different complexes")]
    ComplexMismatch,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// An action of Z/order on a complex, given by the generator's vertex
/// permutation. The generator must be a simplicial automorphism with
/// `gen^order = id`; `order` need not be the exact order (the trivial action of
/// any cyclic group is allowed).
#[derive(Clone)]
pub struct CyclicAction {
    complex: Arc<Complex>,
    order: u32,
    generator: Vec<VertexId>,
}

impl CyclicAction {
    pub fn new(
        complex: Arc<Complex>,
        order: u32,
        generator: Vec<VertexId>,
    ) -> Result<CyclicAction, ActionError> {
        if order == 0 {
            return Err(ActionError::OrderZero);
        }
        let n = complex.n_vertices();
        if generator.len() != n {
            return Err(ActionError::NotAPermutation);
        }
        let mut seen = vec![false; n];
        for &w in &generator {
            if (w as usize) >= n || seen[w as usize] {
                return Err(ActionError::NotAPermutation);
            }
            seen[w as usize] = true;
        }
        let action = CyclicAction {
            complex,
            order,
            generator,
        };
        for s in action.complex.maximal_simplices() {
            let image = Simplex::from_image(s.vertices().iter().map(|&v| action.generator[v as usize]));
            if image.dim() != s.dim() || !action.complex.contains_simplex(&image) {
                return Err(ActionError::NotAnAutomorphism(action.complex.describe(s)));
            }
        }
        for v in 0..n as VertexId {
            let mut w = v;
            for _ in 0..action.order {
                w = action.generator[w as usize];
            }
            if w != v {
                return Err(ActionError::WrongOrder {
                    order: action.order,
                    witness: action.complex.name(v).to_string(),
                });
            }
        }
        Ok(action)
    }

    /// Builds the generator by name transformation.
    pub fn by_name(
        complex: Arc<Complex>,
        order: u32,
        f: impl Fn(&VertexName) -> VertexName,
    ) -> Result<CyclicAction, ActionError> {
        let mut generator = Vec::with_capacity(complex.n_vertices());
        for name in complex.names() {
            generator.push(complex.require_vertex(&f(name))?);
        }
        CyclicAction::new(complex, order, generator)
    }

    pub fn trivial(complex: Arc<Complex>, order: u32) -> CyclicAction {
        let n = complex.n_vertices() as VertexId;
        CyclicAction {
            complex,
            order,
            generator: (0..n).collect(),
        }
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// g^k(v).
    pub fn apply(&self, k: u32, v: VertexId) -> VertexId {
        let mut v = v;
        for _ in 0..(k % self.order.max(1)) {
            v = self.generator[v as usize];
        }
        v
    }

    pub fn generator_map(&self) -> SimplicialMap {
        SimplicialMap::new(self.complex.clone(), self.complex.clone(), self.generator.clone())
            .expect("validated on construction")
    }

    /// Smallest k > 0 with g^k = id (divides `order`).
    pub fn exact_order(&self) -> u32 {
        (1..=self.order)
            .find(|&k| {
                self.order % k == 0
                    && (0..self.complex.n_vertices() as VertexId).all(|v| self.apply(k, v) == v)
            })
            .expect("g^order = id was validated")
    }

    pub fn vertex_orbit(&self, v: VertexId) -> Vec<VertexId> {
        let mut orbit: Vec<VertexId> = (0..self.order).map(|k| self.apply(k, v)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        orbit
    }

    pub fn simplex_image(&self, k: u32, s: &Simplex) -> Simplex {
        Simplex::from_image(s.vertices().iter().map(|&v| self.apply(k, v)))
    }

    /// Distinct images of a simplex under the whole group, sorted.
    pub fn simplex_orbit(&self, s: &Simplex) -> Vec<Simplex> {
        let mut orbit: Vec<Simplex> = (0..self.order).map(|k| self.simplex_image(k, s)).collect();
        orbit.sort();
        orbit.dedup();
        orbit
    }

    /// The subcomplex of simplices fixed pointwise by the generator.
    pub fn fixed_subcomplex(&self) -> Result<Arc<Complex>, ComplexError> {
        let fixed_vertex: Vec<bool> = (0..self.complex.n_vertices() as VertexId)
            .map(|v| self.generator[v as usize] == v)
            .collect();
        let mut b = Complex::builder();
        let Some(dim) = self.complex.dim() else {
            return b.build();
        };
        for q in (0..=dim).rev() {
            for s in self.complex.faces(q) {
                if s.vertices().iter().all(|&v| fixed_vertex[v as usize]) {
                    b.simplex(self.complex.simplex_names(s));
                }
            }
        }
        b.build()
    }

    /// Largest dimension of a simplex left setwise invariant by some nontrivial
    /// power, or None when every nontrivial power moves every simplex.
    pub fn max_invariant_dim(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let dim = self.complex.dim()?;
        for k in 1..self.order {
            if (0..self.complex.n_vertices() as VertexId).all(|v| self.apply(k, v) == v) {
                continue; // non-faithful power acts trivially; skip
            }
            for q in (0..=dim).rev() {
                if best.is_some_and(|b| b >= q) {
                    break;
                }
                if self
                    .complex
                    .faces(q)
                    .iter()
                    .any(|s| self.simplex_image(k, s) == *s)
                {
                    best = Some(best.map_or(q, |b| b.max(q)));
                }
            }
        }
        best
    }

    /// True when no nontrivial power leaves any simplex of dimension > k
    /// setwise invariant: the action is free off the k-skeleton.
    pub fn is_free_off_skeleton(&self, k: usize) -> bool {
        self.max_invariant_dim().is_none_or(|d| d <= k)
    }

    /// The action restricted to an invariant subcomplex (matched by names).
    pub fn restrict_to(&self, sub: Arc<Complex>) -> Result<CyclicAction, ActionError> {
        if !sub.is_subcomplex_of(&self.complex) {
            return Err(ActionError::NotInvariant(format!("{sub:?}")));
        }
        let mut generator = Vec::with_capacity(sub.n_vertices());
        for name in sub.names() {
            let v = self.complex.require_vertex(name)?;
            let gv = self.generator[v as usize];
            let in_sub = sub
                .vertex_id(self.complex.name(gv))
                .ok_or_else(|| ActionError::NotInvariant(self.complex.name(v).to_string()))?;
            generator.push(in_sub);
        }
        CyclicAction::new(sub, self.order, generator)
    }
}

/// A quotient complex together with its projection.
#[derive(Debug)]
pub struct Quotient {
    pub complex: Arc<Complex>,
    pub projection: SimplicialMap,
}

/// Forms K/G and certifies it: the projection must be nondegenerate on every
/// simplex, and the faces over each image simplex must form a single orbit.
pub fn quotient(action: &CyclicAction) -> Result<Quotient, ActionError> {
    partial_quotient_on(action, None)
}

/// Forms the quotient that identifies orbits only inside `within` (an invariant
/// subcomplex); vertices outside keep their names. Certifies nondegeneracy
/// everywhere, the single-orbit fiber condition over the image of `within`, and
/// injectivity elsewhere.
pub fn partial_orbit_quotient(
    action: &CyclicAction,
    within: &Complex,
) -> Result<Quotient, ActionError> {
    partial_quotient_on(action, Some(within))
}

fn partial_quotient_on(
    action: &CyclicAction,
    within: Option<&Complex>,
) -> Result<Quotient, ActionError> {
    let k = action.complex();
    // which vertices get identified
    let collapse: Vec<bool> = match within {
        None => vec![true; k.n_vertices()],
        Some(w) => {
            if !w.is_subcomplex_of(k) {
                return Err(ActionError::NotInvariant(format!("{w:?}")));
            }
            let mut c = vec![false; k.n_vertices()];
            for name in w.names() {
                c[k.require_vertex(name)? as usize] = true;
            }
            c
        }
    };
    // invariance of the collapsed vertex set and of the subcomplex itself
    for v in 0..k.n_vertices() as VertexId {
        if collapse[v as usize] != collapse[action.apply(1, v) as usize] {
            return Err(ActionError::NotInvariant(k.name(v).to_string()));
        }
    }
    if let Some(w) = within {
        for s in w.maximal_simplices() {
            let in_k = Simplex::from_image(
                s.vertices()
                    .iter()
                    .map(|&v| k.vertex_id(w.name(v)).expect("subcomplex checked")),
            );
            let image = action.simplex_image(1, &in_k);
            let back: Option<Vec<_>> = image
                .vertices()
                .iter()
                .map(|&v| w.vertex_id(k.name(v)))
                .collect();
            let ok = back
                .map(|ids| w.contains_simplex(&Simplex::from_image(ids)))
                .unwrap_or(false);
            if !ok {
                return Err(ActionError::NotInvariant(k.describe(&in_k)));
            }
        }
    }

    // new vertex names
    let new_name = |v: VertexId| -> VertexName {
        if collapse[v as usize] {
            VertexName::orbit(
                action
                    .vertex_orbit(v)
                    .into_iter()
                    .map(|w| k.name(w).clone())
                    .collect(),
            )
        } else {
            k.name(v).clone()
        }
    };
    // guard against an orbit name colliding with an untouched name
    let untouched: BTreeSet<&VertexName> = (0..k.n_vertices() as VertexId)
        .filter(|&v| !collapse[v as usize])
        .map(|v| k.name(v))
        .collect();
    if !untouched.is_empty() {
        for v in 0..k.n_vertices() as VertexId {
            if collapse[v as usize] && untouched.contains(&new_name(v)) {
                return Err(ActionError::NameCollision(new_name(v).to_string()));
            }
        }
    }

    // nondegeneracy on maximal simplices implies it everywhere
    let mut b = Complex::builder();
    for s in k.maximal_simplices() {
        let names: Vec<VertexName> = s.vertices().iter().map(|&v| new_name(v)).collect();
        let distinct: BTreeSet<&VertexName> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(ActionError::DegenerateProjection(k.describe(s)));
        }
        b.simplex(names);
    }
    let q_complex = b.build()?;
    let projection = SimplicialMap::by_name(k.clone(), q_complex.clone(), |n| {
        new_name(k.vertex_id(n).expect("name of this complex"))
    })?;

    // fiber certification: group all faces by image
    let dim = k.dim().unwrap_or(0);
    for q in 0..=dim {
        let mut fibers: BTreeMap<Simplex, Vec<&Simplex>> = BTreeMap::new();
        for s in k.faces(q) {
            fibers.entry(projection.image_of(s)).or_default().push(s);
        }
        for (image, fiber) in fibers {
            if fiber.len() == 1 {
                continue;
            }
            // several faces share an image: they must be exactly one orbit
            let orbit = action.simplex_orbit(fiber[0]);
            if orbit.len() != fiber.len()
                || !fiber.iter().all(|s| orbit.binary_search(s).is_ok())
            {
                return Err(ActionError::FiberNotSingleOrbit {
                    image: q_complex.describe(&image),
                    fiber: fiber.len(),
                    orbit: orbit.len(),
                });
            }
        }
    }

    Ok(Quotient {
        complex: q_complex,
        projection,
    })
}

/// A homomorphism between cyclic groups: the domain generator is sent to the
/// `gen_power`-th power of the codomain generator.
#[derive(Clone, Copy, Debug)]
pub struct GroupHom {
    pub dom_order: u32,
    pub cod_order: u32,
    pub gen_power: u32,
}

impl GroupHom {
    pub fn new(dom_order: u32, cod_order: u32, gen_power: u32) -> Result<GroupHom, ActionError> {
        // well-defined iff cod_order divides gen_power * dom_order
        if cod_order == 0 || dom_order == 0 || (gen_power as u64 * dom_order as u64) % cod_order as u64 != 0
        {
            return Err(ActionError::BadHomomorphism {
                power: gen_power,
                dom: dom_order,
                cod: cod_order,
            });
        }
        Ok(GroupHom {
            dom_order,
            cod_order,
            gen_power,
        })
    }

    pub fn identity(order: u32) -> GroupHom {
        GroupHom {
            dom_order: order,
            cod_order: order,
            gen_power: 1,
        }
    }
}

/// Checks f(g v) = h^t(f v) for all vertices, where g, h are the generators and
/// t the homomorphism exponent.
pub fn is_equivariant(
    f: &SimplicialMap,
    dom: &CyclicAction,
    cod: &CyclicAction,
    hom: &GroupHom,
) -> Result<bool, ActionError> {
    if **dom.complex() != **f.domain()
        || **cod.complex() != **f.codomain()
        || hom.dom_order != dom.order()
        || hom.cod_order != cod.order()
    {
        return Err(ActionError::ComplexMismatch);
    }
    for v in 0..f.domain().n_vertices() as VertexId {
        if f.apply(dom.apply(1, v)) != cod.apply(hom.gen_power, f.apply(v)) {
            return Ok(false);
        }
    }
    Ok(true)
}
