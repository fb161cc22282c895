//! Equivariant simplicial complexes with certified constructions.
//!
//! The crate builds finite simplicial complexes carrying cyclic group actions and
//! derives new ones (quotients, mapping cylinders, copy gluings, pullbacks) while
//! emitting machine-checkable certificates for the properties each construction is
//! supposed to have: homology over small prime fields, degrees of sphere maps,
//! freeness of actions off a skeleton, carrier conditions for retractions. The
//! top-level driver assembles these pieces into an inductive tower of branched
//! covers and verifies every stage.

pub mod action;
pub mod cert;
pub mod chain;
pub mod complex;
pub mod corpus;
pub mod cylinder;
pub mod degree;
pub mod extension;
pub mod gamma;
pub mod linalg;
pub mod map;
pub mod model;
pub mod name;
pub mod pullback;
pub mod subdivide;

pub use action::{
    is_equivariant, partial_orbit_quotient, quotient, ActionError, CyclicAction, GroupHom,
    Quotient,
};
pub use cert::{render_report, CertError, CertLog, Certificate, Status};
pub use chain::{
    betti_numbers, induced_map, is_iso_on_all_h, is_iso_on_h, relative_betti_numbers, ChainBasis,
    ChainError, HomologyClasses, InducedMap,
};
pub use corpus::{
    cycle_rotation, projective_plane, suspend_map, suspension, two_points, wrap_map, zigzag_fold,
    zoo,
};
pub use cylinder::{
    cylinder_action, glue_copies, glued_rotation, mapping_cylinder, mapping_cylinder_ranked,
    CylError, GluedCopies, MappingCylinder,
};
pub use degree::{orientation, simplicial_degree, DegreeError};
pub use extension::{
    extend_over_cells, extend_with_retries, Carrier, ContractionData, Extended, ExtensionError,
    ExtensionWitness, PartialMap, WitnessReason,
};
pub use gamma::{
    build_gamma, zigzag_scaffold, ConeModel, FoldScaffold, GammaBundle, GammaError, Region,
};
pub use complex::{
    boundary_simplex, cross_polytope_boundary, cycle_complex, disjoint_union, join,
    simplex_complex, Complex, ComplexBuilder, ComplexError, Simplex, VertexId,
};
pub use linalg::{LinalgError, Prime};
pub use map::{MapError, SimplicialMap};
pub use model::{
    build_block_model, build_inward_retraction, build_outward_retraction, build_sphere_model,
    BlockModel, ModelError, OutwardRetraction, SphereModel, XPart,
};
pub use name::VertexName;
pub use pullback::{
    induced_into, pullback, subdivide_to_match, verify_fibers, Pullback, PullbackError,
};
pub use subdivide::{make_regular, sd, sd_map, Subdivision};
