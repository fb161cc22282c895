//! Extension of partial simplicial maps under carrier constraints.
//!
//! A partial map assigns target vertices to some source vertices and a
//! carrier (a target subcomplex, given by its maximal cells) to every source
//! vertex. The image of a simplex must land inside the carrier of each of its
//! vertices, so the carrier of a cell is effectively the intersection of the
//! vertex carriers; restricting to a face can only enlarge the constraint.
//!
//! The engine walks undefined vertices in id order and, for each, scans the
//! recorded coning recipe first and then the carrier vertices in id order,
//! keeping the first candidate compatible with every incident cell. It then
//! re-validates every cell in (dimension, id) order. The walk is greedy, not
//! a search: failure is a first-class witness naming the first cell that
//! blocks, never a panic.

use crate::complex::{Complex, ComplexError, Simplex, VertexId};
use crate::map::{MapError, SimplicialMap};
use crate::name::VertexName;
use crate::subdivide::Subdivision;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtensionError {
    #[error("assignment and carrier tables must have one entry per source vertex")]
    TableLength,
    #[error("carrier of {0} lists {1}, which is not a simplex of the target")]
    CarrierNotInTarget(String, String),
    #[error("carrier of {0} is empty")]
    CarrierEmpty(String),
    #[error("assigned image of {0} lies outside its carrier")]
    ImageOutsideCarrier(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A target subcomplex, stored as its maximal simplices.
#[derive(Clone, Debug)]
pub struct Carrier {
    members: Vec<Simplex>,
}

impl Carrier {
    pub fn new(mut members: Vec<Simplex>) -> Carrier {
        members.sort();
        members.dedup();
        // drop members that are faces of others
        let kept: Vec<Simplex> = members
            .iter()
            .filter(|m| !members.iter().any(|n| *m != n && m.is_face_of(n)))
            .cloned()
            .collect();
        Carrier { members: kept }
    }

    /// The whole target as a carrier (no constraint beyond simpliciality).
    pub fn whole(target: &Complex) -> Carrier {
        Carrier::new(target.maximal_simplices().to_vec())
    }

    /// A single closed simplex as a carrier.
    pub fn simplex(s: Simplex) -> Carrier {
        Carrier { members: vec![s] }
    }

    pub fn members(&self) -> &[Simplex] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Does the carrier contain `s` (inside one of its members)?
    pub fn admits(&self, s: &Simplex) -> bool {
        self.members.iter().any(|m| s.is_face_of(m))
    }

    /// All vertices of the carrier, in id order.
    pub fn vertex_pool(&self) -> Vec<VertexId> {
        let mut pool: Vec<VertexId> = self
            .members
            .iter()
            .flat_map(|m| m.vertices().iter().copied())
            .collect();
        pool.sort_unstable();
        pool.dedup();
        pool
    }

    /// Intersection of two carriers as subcomplexes.
    pub fn intersect(&self, other: &Carrier) -> Carrier {
        let mut cells = Vec::new();
        for a in &self.members {
            for b in &other.members {
                let common: Vec<VertexId> = a
                    .vertices()
                    .iter()
                    .copied()
                    .filter(|v| b.contains_vertex(*v))
                    .collect();
                if !common.is_empty() {
                    cells.push(Simplex::from_image(common));
                }
            }
        }
        Carrier::new(cells)
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m:?}")?;
        }
        write!(f, "}}")
    }
}

/// A partial simplicial map with carrier constraints.
pub struct PartialMap {
    source: Arc<Complex>,
    target: Arc<Complex>,
    assignment: Vec<Option<VertexId>>,
    carriers: Vec<Carrier>,
}

impl PartialMap {
    pub fn new(
        source: Arc<Complex>,
        target: Arc<Complex>,
        assignment: Vec<Option<VertexId>>,
        carriers: Vec<Carrier>,
    ) -> Result<PartialMap, ExtensionError> {
        if assignment.len() != source.n_vertices() || carriers.len() != source.n_vertices() {
            return Err(ExtensionError::TableLength);
        }
        for (v, carrier) in carriers.iter().enumerate() {
            if carrier.is_empty() {
                return Err(ExtensionError::CarrierEmpty(source.name(v as u32).to_string()));
            }
            for m in carrier.members() {
                if !target.contains_simplex(m) {
                    return Err(ExtensionError::CarrierNotInTarget(
                        source.name(v as u32).to_string(),
                        format!("{m:?}"),
                    ));
                }
            }
            if let Some(w) = assignment[v] {
                if !carrier.admits(&Simplex::vertex(w)) {
                    return Err(ExtensionError::ImageOutsideCarrier(
                        source.name(v as u32).to_string(),
                    ));
                }
            }
        }
        Ok(PartialMap {
            source,
            target,
            assignment,
            carriers,
        })
    }

    /// Wraps a total map, with every carrier the whole target.
    pub fn from_total(f: &SimplicialMap) -> PartialMap {
        let target = f.codomain().clone();
        PartialMap {
            source: f.domain().clone(),
            target: target.clone(),
            assignment: f.vertex_map().iter().map(|&w| Some(w)).collect(),
            carriers: vec![Carrier::whole(&target); f.domain().n_vertices()],
        }
    }

    pub fn source(&self) -> &Arc<Complex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Complex> {
        &self.target
    }

    pub fn assignment(&self) -> &[Option<VertexId>] {
        &self.assignment
    }

    pub fn carrier(&self, v: VertexId) -> &Carrier {
        &self.carriers[v as usize]
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(|a| a.is_some())
    }

    pub fn defined_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_some()).count()
    }

    fn partial_image(&self, s: &Simplex) -> Option<Simplex> {
        let ids: Vec<VertexId> = s
            .vertices()
            .iter()
            .filter_map(|&v| self.assignment[v as usize])
            .collect();
        if ids.is_empty() {
            None
        } else {
            Some(Simplex::from_image(ids))
        }
    }

    /// Checks every fully defined cell in (dimension, id) order: the image
    /// must be a target simplex inside the carrier of each vertex. The first
    /// violation is returned as a witness.
    pub fn validate(&self) -> Result<(), Box<ExtensionWitness>> {
        let Some(dim) = self.source.dim() else {
            return Ok(());
        };
        for q in 0..=dim {
            for s in self.source.faces(q) {
                if s.vertices().iter().any(|&v| self.assignment[v as usize].is_none()) {
                    continue;
                }
                let image = self.partial_image(s).expect("cell is fully defined");
                if !self.target.contains_simplex(&image) {
                    return Err(Box::new(self.witness(s, &image, WitnessReason::ImageNotASimplex)));
                }
                for &v in s.vertices() {
                    if !self.carriers[v as usize].admits(&image) {
                        return Err(Box::new(self.witness(
                            s,
                            &image,
                            WitnessReason::ImageEscapesCarrier(
                                self.source.name(v).to_string(),
                            ),
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn witness(&self, cell: &Simplex, image: &Simplex, reason: WitnessReason) -> ExtensionWitness {
        ExtensionWitness {
            cell: cell.clone(),
            cell_names: self.source.simplex_names(cell),
            boundary_image: cell
                .vertices()
                .iter()
                .map(|&v| {
                    (
                        self.source.name(v).clone(),
                        self.assignment[v as usize].map(|w| self.target.name(w).clone()),
                    )
                })
                .collect(),
            image_desc: format!("{image:?}"),
            carrier_desc: cell
                .vertices()
                .iter()
                .map(|&v| self.carriers[v as usize].to_string())
                .collect(),
            reason,
        }
    }
}

/// Why an extension attempt stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessReason {
    /// A fully defined cell maps to a vertex set that is not a target simplex.
    ImageNotASimplex,
    /// A fully defined cell maps outside the carrier of the named vertex.
    ImageEscapesCarrier(String),
    /// No candidate for the named vertex satisfies the cell's constraints.
    NoCandidate(String),
}

impl fmt::Display for WitnessReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessReason::ImageNotASimplex => write!(f, "image is not a simplex of the target"),
            WitnessReason::ImageEscapesCarrier(v) => {
                write!(f, "image escapes the carrier of {v}")
            }
            WitnessReason::NoCandidate(v) => {
                write!(f, "no candidate for {v} satisfies this cell")
            }
        }
    }
}

/// A failed extension, naming the first blocking cell in (dimension, id)
/// order together with the partial images and carriers seen there.
#[derive(Clone, Debug)]
pub struct ExtensionWitness {
    pub cell: Simplex,
    pub cell_names: Vec<VertexName>,
    /// Per cell vertex: its name and its assigned image, if any.
    pub boundary_image: Vec<(VertexName, Option<VertexName>)>,
    pub image_desc: String,
    pub carrier_desc: Vec<String>,
    pub reason: WitnessReason,
}

impl fmt::Display for ExtensionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "extension blocked at cell {:?}: {}", self.cell, self.reason)?;
        for (name, image) in &self.boundary_image {
            match image {
                Some(w) => writeln!(f, "  {name} -> {w}")?,
                None => writeln!(f, "  {name} -> (undefined)")?,
            }
        }
        for (i, c) in self.carrier_desc.iter().enumerate() {
            writeln!(f, "  carrier[{i}] = {c}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ExtensionWitness {}

/// Recorded coning recipes: for a source vertex, target vertices to try
/// first, in order. Keyed by name so the table survives subdivision of the
/// source (only original vertices keep their recipes; barycenters fall back
/// to the carrier scan).
#[derive(Clone, Debug, Default)]
pub struct ContractionData {
    pub recipes: BTreeMap<VertexName, Vec<VertexName>>,
}

impl ContractionData {
    pub fn empty() -> ContractionData {
        ContractionData::default()
    }

    pub fn recipe(mut self, source: VertexName, targets: Vec<VertexName>) -> ContractionData {
        self.recipes.insert(source, targets);
        self
    }
}

/// Extends `pm` to a total simplicial map in one pass, or reports the first
/// blocking cell. A total input is validated and returned unchanged.
pub fn extend_over_cells(
    pm: &PartialMap,
    data: &ContractionData,
) -> Result<SimplicialMap, Box<ExtensionWitness>> {
    let mut assignment = pm.assignment.to_vec();
    let source = &pm.source;
    let target = &pm.target;

    // incident maximal cells per vertex, visited in (dimension, lex) order
    let mut star: Vec<Vec<&Simplex>> = vec![Vec::new(); source.n_vertices()];
    let mut tops: Vec<&Simplex> = source.maximal_simplices().iter().collect();
    tops.sort_by_key(|s| (s.dim(), (*s).clone()));
    for s in &tops {
        for &v in s.vertices() {
            star[v as usize].push(s);
        }
    }

    let feasible = |assignment: &[Option<VertexId>], cell: &Simplex, v: VertexId, w: VertexId| {
        let mut ids: Vec<VertexId> = cell
            .vertices()
            .iter()
            .filter_map(|&u| {
                if u == v {
                    Some(w)
                } else {
                    assignment[u as usize]
                }
            })
            .collect();
        ids.sort_unstable();
        ids.dedup();
        let image = Simplex::from_image(ids);
        target.contains_simplex(&image)
            && cell
                .vertices()
                .iter()
                .all(|&u| pm.carriers[u as usize].admits(&image))
    };

    for v in 0..source.n_vertices() as VertexId {
        if assignment[v as usize].is_some() {
            continue;
        }
        let mut candidates: Vec<VertexId> = Vec::new();
        if let Some(recipe) = data.recipes.get(source.name(v)) {
            for name in recipe {
                if let Some(w) = target.vertex_id(name) {
                    candidates.push(w);
                }
            }
        }
        for w in pm.carriers[v as usize].vertex_pool() {
            if !candidates.contains(&w) {
                candidates.push(w);
            }
        }
        // narrow the candidate list cell by cell; the cell that empties it
        // is the witness
        for cell in &star[v as usize] {
            candidates.retain(|&w| feasible(&assignment, cell, v, w));
            if candidates.is_empty() {
                let image = pm.partial_image(cell);
                return Err(Box::new(pm.witness(
                    cell,
                    &image.unwrap_or_else(|| Simplex::vertex(v)),
                    WitnessReason::NoCandidate(source.name(v).to_string()),
                )));
            }
        }
        assignment[v as usize] = Some(candidates[0]);
    }

    let extended = PartialMap {
        source: source.clone(),
        target: target.clone(),
        assignment,
        carriers: pm.carriers.clone(),
    };
    extended.validate()?;
    let vertex_map: Vec<VertexId> = extended
        .assignment
        .iter()
        .map(|a| a.expect("all vertices assigned"))
        .collect();
    Ok(SimplicialMap::new(source.clone(), target.clone(), vertex_map)
        .expect("validated cell images are simplices"))
}

/// A successful extension, possibly after subdividing the source.
pub struct Extended {
    pub map: SimplicialMap,
    /// Subdivision rounds applied to the source before success.
    pub rounds: u32,
    /// The subdivisions, innermost first (empty when rounds = 0).
    pub stages: Vec<Subdivision>,
}

/// Extends, subdividing the source at most `max_rounds` times (two by
/// default elsewhere) when the plain pass fails. Assigned values survive on
/// original vertices; barycenters inherit the intersection of the carriers
/// along their carrier face.
pub fn extend_with_retries(
    pm: &PartialMap,
    data: &ContractionData,
    max_rounds: u32,
) -> Result<Extended, Box<ExtensionWitness>> {
    let mut witness = match extend_over_cells(pm, data) {
        Ok(map) => {
            return Ok(Extended {
                map,
                rounds: 0,
                stages: Vec::new(),
            })
        }
        Err(w) => w,
    };
    let mut current = PartialMap {
        source: pm.source.clone(),
        target: pm.target.clone(),
        assignment: pm.assignment.clone(),
        carriers: pm.carriers.clone(),
    };
    let mut stages = Vec::new();
    for round in 1..=max_rounds {
        let sdiv = Subdivision::of(&current.source);
        let sd_complex = sdiv.complex.clone();
        let mut assignment = Vec::with_capacity(sd_complex.n_vertices());
        let mut carriers = Vec::with_capacity(sd_complex.n_vertices());
        for v in 0..sd_complex.n_vertices() as VertexId {
            let face = sdiv.carrier(v);
            let verts = face.vertices();
            if verts.len() == 1 {
                assignment.push(current.assignment[verts[0] as usize]);
            } else {
                assignment.push(None);
            }
            let mut carrier = current.carriers[verts[0] as usize].clone();
            for &u in &verts[1..] {
                carrier = carrier.intersect(&current.carriers[u as usize]);
            }
            carriers.push(carrier);
        }
        if let Some(bad) = carriers.iter().position(|c| c.is_empty()) {
            // an empty carrier can never be coned; keep the previous witness
            // but note where the subdivision ran dry
            let mut w = witness.clone();
            w.reason = WitnessReason::NoCandidate(sd_complex.name(bad as u32).to_string());
            return Err(w);
        }
        current = PartialMap {
            source: sd_complex,
            target: current.target.clone(),
            assignment,
            carriers,
        };
        stages.push(sdiv);
        match extend_over_cells(&current, data) {
            Ok(map) => {
                return Ok(Extended {
                    map,
                    rounds: round,
                    stages,
                })
            }
            Err(w) => witness = w,
        }
    }
    Err(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cycle_complex, Complex};
    use crate::name::VertexName;

    fn wheel(n: u32, hub: &str, rim_prefix: &str) -> Arc<Complex> {
        let mut b = Complex::builder();
        for i in 0..n {
            b.simplex(vec![
                VertexName::atom(hub),
                VertexName::atom(format!("{rim_prefix}{i}")),
                VertexName::atom(format!("{rim_prefix}{}", (i + 1) % n)),
            ]);
        }
        b.build().unwrap()
    }

    #[test]
    fn hub_extension_finds_the_center() {
        let src = wheel(6, "h", "r");
        let tgt = wheel(6, "c", "s");
        let mut assignment = vec![None; src.n_vertices()];
        let mut carriers = vec![Carrier::whole(&tgt); src.n_vertices()];
        for i in 0..6 {
            let v = src.vertex_id(&VertexName::atom(format!("r{i}"))).unwrap();
            let w = tgt.vertex_id(&VertexName::atom(format!("s{i}"))).unwrap();
            assignment[v as usize] = Some(w);
            carriers[v as usize] = Carrier::whole(&tgt);
        }
        let pm = PartialMap::new(src.clone(), tgt.clone(), assignment, carriers).unwrap();
        assert!(!pm.is_total());
        let f = extend_over_cells(&pm, &ContractionData::empty()).unwrap();
        let hub = src.vertex_id(&VertexName::atom("h")).unwrap();
        let center = tgt.vertex_id(&VertexName::atom("c")).unwrap();
        assert_eq!(f.apply(hub), center);
    }

    #[test]
    fn total_input_comes_back_unchanged() {
        let c6 = cycle_complex(6, "a").unwrap();
        let f = SimplicialMap::identity(c6);
        let pm = PartialMap::from_total(&f);
        let g = extend_over_cells(&pm, &ContractionData::empty()).unwrap();
        assert_eq!(f.vertex_map(), g.vertex_map());
    }

    #[test]
    fn cone_without_target_apex_yields_a_witness() {
        let src = wheel(4, "h", "r");
        let tgt = cycle_complex(4, "s").unwrap();
        let mut assignment = vec![None; src.n_vertices()];
        for i in 0..4 {
            let v = src.vertex_id(&VertexName::atom(format!("r{i}"))).unwrap();
            let w = tgt.vertex_id(&VertexName::atom(format!("s{i}"))).unwrap();
            assignment[v as usize] = Some(w);
        }
        let carriers = vec![Carrier::whole(&tgt); src.n_vertices()];
        let pm = PartialMap::new(src, tgt, assignment, carriers).unwrap();
        let w = extend_over_cells(&pm, &ContractionData::empty()).unwrap_err();
        assert!(matches!(w.reason, WitnessReason::NoCandidate(_)));
        // blocked on a triangle of the hub's star: the rim pair cannot be
        // coned from any single target vertex
        assert_eq!(w.cell.dim(), 2);
        let again = {
            let src = wheel(4, "h", "r");
            let tgt = cycle_complex(4, "s").unwrap();
            let mut assignment = vec![None; src.n_vertices()];
            for i in 0..4 {
                let v = src.vertex_id(&VertexName::atom(format!("r{i}"))).unwrap();
                let w = tgt.vertex_id(&VertexName::atom(format!("s{i}"))).unwrap();
                assignment[v as usize] = Some(w);
            }
            let carriers = vec![Carrier::whole(&tgt); src.n_vertices()];
            let pm = PartialMap::new(src, tgt, assignment, carriers).unwrap();
            extend_over_cells(&pm, &ContractionData::empty()).unwrap_err()
        };
        assert_eq!(w.cell, again.cell);
        assert_eq!(w.reason, again.reason);
    }

    #[test]
    fn edge_onto_path_needs_one_subdivision() {
        let mut b = Complex::builder();
        b.simplex(vec![VertexName::atom("a"), VertexName::atom("b")]);
        let src = b.build().unwrap();
        let mut b = Complex::builder();
        b.simplex(vec![VertexName::atom("a"), VertexName::atom("m")]);
        b.simplex(vec![VertexName::atom("m"), VertexName::atom("b")]);
        let tgt = b.build().unwrap();
        let assignment = vec![
            Some(tgt.vertex_id(&VertexName::atom("a")).unwrap()),
            Some(tgt.vertex_id(&VertexName::atom("b")).unwrap()),
        ];
        let carriers = vec![Carrier::whole(&tgt); 2];
        let pm = PartialMap::new(src.clone(), tgt.clone(), assignment, carriers).unwrap();
        assert!(extend_over_cells(&pm, &ContractionData::empty()).is_err());
        let ext = extend_with_retries(&pm, &ContractionData::empty(), 2).unwrap();
        assert_eq!(ext.rounds, 1);
        // original vertices keep their assigned values
        let a = ext.map.domain().vertex_id(&VertexName::atom("a")).unwrap();
        let b_ = ext.map.domain().vertex_id(&VertexName::atom("b")).unwrap();
        assert_eq!(ext.map.apply(a), tgt.vertex_id(&VertexName::atom("a")).unwrap());
        assert_eq!(ext.map.apply(b_), tgt.vertex_id(&VertexName::atom("b")).unwrap());
        let mid = ext
            .map
            .domain()
            .vertex_id(&VertexName::bary(vec![
                VertexName::atom("a"),
                VertexName::atom("b"),
            ]))
            .unwrap();
        assert_eq!(ext.map.apply(mid), tgt.vertex_id(&VertexName::atom("m")).unwrap());
    }

    #[test]
    fn recipes_take_precedence_over_the_scan() {
        let src = wheel(6, "h", "r");
        let tgt = wheel(6, "c", "s");
        // both the center and s0 would do for the hub if carriers allow;
        // the recipe pins the center even though s-vertices come first by id
        let mut assignment = vec![None; src.n_vertices()];
        for i in 0..6 {
            let v = src.vertex_id(&VertexName::atom(format!("r{i}"))).unwrap();
            let w = tgt.vertex_id(&VertexName::atom(format!("s{i}"))).unwrap();
            assignment[v as usize] = Some(w);
        }
        let carriers = vec![Carrier::whole(&tgt); src.n_vertices()];
        let pm = PartialMap::new(src.clone(), tgt.clone(), assignment, carriers).unwrap();
        let data = ContractionData::empty()
            .recipe(VertexName::atom("h"), vec![VertexName::atom("c")]);
        let f = extend_over_cells(&pm, &data).unwrap();
        let hub = src.vertex_id(&VertexName::atom("h")).unwrap();
        assert_eq!(tgt.name(f.apply(hub)), &VertexName::atom("c"));
    }

    #[test]
    fn carrier_violations_are_rejected_up_front() {
        let c4 = cycle_complex(4, "a").unwrap();
        let assignment = vec![Some(2), None, None, None];
        let mut carriers = vec![Carrier::whole(&c4); 4];
        carriers[0] = Carrier::simplex(c4.maximal_simplices()[0].clone());
        match PartialMap::new(c4.clone(), c4.clone(), assignment, carriers) {
            Err(ExtensionError::ImageOutsideCarrier(_)) => {}
            Err(other) => panic!("expected carrier rejection, got {other:?}"),
            Ok(_) => panic!("expected carrier rejection, got a map"),
        }
    }

    #[test]
    fn validate_reports_the_first_bad_cell_in_dimension_order() {
        let c4 = cycle_complex(4, "a").unwrap();
        // a0 and a2 are not adjacent: constant-ish map breaks on an edge
        let assignment = vec![Some(0), Some(2), Some(0), Some(2)];
        let carriers = vec![Carrier::whole(&c4); 4];
        let pm = PartialMap::new(c4.clone(), c4, assignment, carriers).unwrap();
        let w = pm.validate().unwrap_err();
        assert_eq!(w.cell.dim(), 1);
        assert_eq!(w.reason, WitnessReason::ImageNotASimplex);
    }
}
