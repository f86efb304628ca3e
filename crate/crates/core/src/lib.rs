//! Circle polyhedra on the 2-sphere, modelled as polyhedra with vertices on
//! the de Sitter sphere of Minkowski space `R^{3,1}`.
//!
//! The crate certifies convexity, hyperbolicity, shallowness, properness and
//! infinitesimal rigidity of triangulated circle polyhedra, and decides
//! Möbius congruence of locally congruent instances, including the case of
//! tangent vertex-disks, by deforming away from tangency and fitting a
//! Lorentz transformation.

pub mod continuation;
pub mod cpolyhedron;
pub mod disk;
pub mod format;
pub mod generate;
pub mod lorentz;
pub mod moebius;
pub mod properness;
pub mod render;
pub mod rigidity;
pub mod tolerance;

pub use continuation::{
    congruent_via_deformation, deform, fit_congruence, newton_correct, target_measure,
    CongruenceResult, ContinuationError, DeformDirection, DeformationResult, PathSpec,
};
pub use cpolyhedron::{
    analyze, AnalysisReport, CPolyhedron, PolyhedronError, Shallowness, Triangulation,
    TriangulationError,
};
pub use disk::{Cap, Disk, DiskError, PairClass, SpherePoint};
pub use lorentz::{det4, hyperplane_normal, lorentz_ip, CausalClass, LVec4, LorentzError};
pub use moebius::{random_moebius, MoebiusError, MoebiusMap};
pub use properness::{is_proper, LinkPolygon, PropernessError, PropernessReport};
pub use rigidity::{ConfigurationState, RankReport};
