//! Numerical contract shared across the crate.
//!
//! Every threshold used by a predicate or solver lives here so that the
//! library, the CLI and the acceptance suite agree on one set of numbers.
//! All arithmetic is IEEE 754 binary64.

/// Relative tolerance separating spacelike, lightlike and timelike vectors.
pub const CAUSAL_CLASS: f64 = 1e-10;

/// Ratio of smallest to largest singular value below which three vectors are
/// treated as linearly dependent.
pub const DEGENERATE_SPAN: f64 = 1e-12;

/// Entrywise residual of `mᵀ η m − η` accepted for a Möbius map.
pub const LORENTZ: f64 = 1e-9;

/// Residual above which a near-Lorentz matrix is rejected instead of being
/// re-orthogonalized.
pub const LORENTZ_REPAIR_LIMIT: f64 = 1e-6;

/// Absolute tolerance on inversive distance for pair classification.
pub const PAIR_CLASS: f64 = 1e-9;

/// De Sitter membership accepted for vertex vectors of a polyhedron.
pub const DE_SITTER_MEMBERSHIP: f64 = 1e-10;

/// Relative threshold on edge determinants for strict convexity.
pub const STRICT_CONVEXITY: f64 = 1e-9;

/// Strict sign margin required of off-face pairings when fixing an orthodisk.
pub const ORTHODISK_SIGN: f64 = 1e-9;

/// Unitary-edge detection `|Inv − 1| < ε`.
pub const UNITARY: f64 = 1e-9;

/// Slack on the pencil properness inequality.
pub const PROPERNESS: f64 = 1e-9;

/// Relative singular value threshold for the measure Jacobian rank.
pub const RANK: f64 = 1e-8;

/// Sup-norm target for the Gauss–Newton corrector.
pub const NEWTON: f64 = 1e-11;

/// Default iteration cap for the Gauss–Newton corrector.
pub const NEWTON_MAX_ITER: usize = 50;

/// Sup-norm agreement of measure vectors required for local congruence.
pub const LOCAL_CONGRUENCE: f64 = 1e-8;

/// Default vertex residual accepted by a congruence fit.
pub const CONGRUENCE: f64 = 1e-8;

/// Smallest continuation step before a deformation gives up.
pub const MIN_STEP: f64 = 1e-4;

/// Final successive difference required of the transform trail.
pub const CAUCHY: f64 = 1e-7;

/// Link-vertex classification band around `|⟨O, O'⟩| = 1`.
pub const LINK_CLASS: f64 = 1e-9;

/// Residual of the ideal-point construction tolerated inside the band.
pub const LINK_IDEAL_RESIDUAL: f64 = 1e-6;
