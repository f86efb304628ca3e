//! Canonical and random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cpolyhedron::{CPolyhedron, PolyhedronError, Triangulation};
use crate::disk::{cap_to_disk, Cap, Disk};
use crate::lorentz::LVec4;
use crate::moebius::random_moebius;
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("no certified instance after {0} attempts")]
    GenerationFailed(usize),
    #[error(transparent)]
    Polyhedron(#[from] PolyhedronError),
}

pub const REJECTION_BUDGET: usize = 10_000;

/// Directions of the regular tetrahedron, each scaled by `√3`.
pub const TETRA_DIRECTIONS: [[f64; 3]; 4] =
    [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];

pub fn tetrahedron_triangulation() -> Triangulation {
    Triangulation::new(4, vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]])
        .expect("tetrahedron is a valid triangulation")
}

/// Vertices `+e₁, −e₁, +e₂, −e₂, +e₃, −e₃`.
pub fn octahedron_triangulation() -> Triangulation {
    Triangulation::new(
        6,
        vec![
            [0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
            [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5],
        ],
    )
    .expect("octahedron is a valid triangulation")
}

const OCTA_DIRECTIONS: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
];

fn from_caps(tri: Triangulation, caps: &[Cap]) -> Result<CPolyhedron, GenerateError> {
    let disks = caps
        .iter()
        .map(|&c| cap_to_disk(c).map_err(|e| GenerateError::ParamOutOfRange(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CPolyhedron::from_disks(tri, disks)?)
}

fn tetra_with_offset(h: f64) -> Result<CPolyhedron, GenerateError> {
    let caps: Vec<Cap> = TETRA_DIRECTIONS.iter().map(|&u| Cap::new(u, h)).collect();
    from_caps(tetrahedron_triangulation(), &caps)
}

/// Four mutually tangent disks at the tetrahedral directions.
pub fn tetra_koebe() -> CPolyhedron {
    tetra_with_offset(1.0 / 3f64.sqrt()).expect("valid offset")
}

/// Six disks at `±eᵢ`, tangent along the octahedron edges.
pub fn octa_koebe() -> CPolyhedron {
    octa_with_offset(1.0 / 2f64.sqrt()).expect("valid offset")
}

fn octa_with_offset(h: f64) -> Result<CPolyhedron, GenerateError> {
    let caps: Vec<Cap> = OCTA_DIRECTIONS.iter().map(|&u| Cap::new(u, h)).collect();
    from_caps(octahedron_triangulation(), &caps)
}

/// Symmetric octahedron whose adjacent disks overlap, `h ∈ (1/√3, 1/√2)`.
pub fn octa_koebe_overlapping(h: f64) -> Result<CPolyhedron, GenerateError> {
    if !(h > 1.0 / 3f64.sqrt() && h < 1.0 / 2f64.sqrt()) {
        return Err(GenerateError::ParamOutOfRange(format!("h = {h} not in (1/√3, 1/√2)")));
    }
    octa_with_offset(h)
}

/// Pairwise disjoint tetrahedral disks, `h ∈ (1/√3, 1)`.
pub fn tetra_hyperideal(h: f64) -> Result<CPolyhedron, GenerateError> {
    if !(h > 1.0 / 3f64.sqrt() && h < 1.0) {
        return Err(GenerateError::ParamOutOfRange(format!("h = {h} not in (1/√3, 1)")));
    }
    tetra_with_offset(h)
}

/// Closed-form offset of the symmetric tetrahedron with adjacent inversive
/// distance `inv`.
pub fn tetra_offset_for_inv(inv: f64) -> f64 {
    ((inv - 1.0 / 3.0) / (inv + 1.0)).sqrt()
}

/// `P` moved by `random_moebius(seed, scale)`.
pub fn transported(base: &CPolyhedron, seed: u64, scale: f64) -> CPolyhedron {
    let f = random_moebius(seed, scale);
    let disks = base.disks().iter().map(|d| d.transform(&f)).collect();
    CPolyhedron::from_disks(base.triangulation().clone(), disks)
        .expect("Möbius maps preserve inversive distances")
}

/// Adds a uniform `[−size, size]⁴` perturbation to every vertex vector and
/// returns to the de Sitter sphere.
pub fn perturb(p: &CPolyhedron, size: f64, seed: u64) -> Result<CPolyhedron, PolyhedronError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let disks = perturbed_disks(p.disks(), size, &mut rng);
    CPolyhedron::from_disks(p.triangulation().clone(), disks)
}

fn perturbed_disks(disks: &[Disk], size: f64, rng: &mut ChaCha8Rng) -> Vec<Disk> {
    disks
        .iter()
        .map(|d| {
            let mut delta = [0.0; 4];
            for c in &mut delta {
                *c = if size > 0.0 { rng.random_range(-size..=size) } else { 0.0 };
            }
            let v = d.vector() + LVec4::from_array(delta);
            Disk::new(v).unwrap_or(*d)
        })
        .collect()
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Outward-oriented faces of the convex hull of points in general position,
/// or `None` when four points are (nearly) coplanar.
fn hull_faces(pts: &[[f64; 3]]) -> Option<Vec<[usize; 3]>> {
    let n = pts.len();
    let mut faces = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let nrm = cross(sub(pts[j], pts[i]), sub(pts[k], pts[i]));
                let len = dot(nrm, nrm).sqrt();
                let (mut pos, mut neg) = (0, 0);
                for (l, &q) in pts.iter().enumerate() {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    let s = dot(sub(q, pts[i]), nrm) / len;
                    if s.abs() < 1e-9 {
                        return None;
                    }
                    if s > 0.0 {
                        pos += 1;
                    } else {
                        neg += 1;
                    }
                }
                if pos == 0 {
                    faces.push([i, j, k]);
                } else if neg == 0 {
                    faces.push([i, k, j]);
                }
            }
        }
    }
    Some(faces)
}

/// A certified globally shallow, strictly convex, hyperbolic polyhedron on
/// `n` vertices.
///
/// Vertex directions are random points on the sphere whose convex hull gives
/// the triangulation; every disk starts with a common offset above both the
/// largest pairwise direction cosine and the largest face-plane distance,
/// and is then perturbed on the de Sitter sphere by shrinking amounts until
/// the predicates certify.
pub fn random_shallow(n: usize, seed: u64) -> Result<CPolyhedron, GenerateError> {
    if n < 4 {
        return Err(GenerateError::ParamOutOfRange(format!("n = {n} < 4")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..REJECTION_BUDGET {
        let pts: Vec<[f64; 3]> = (0..n).map(|_| random_unit(&mut rng)).collect();
        let Some(faces) = hull_faces(&pts) else { continue };
        let Ok(tri) = Triangulation::new(n, faces) else { continue };
        let mut lb = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                lb = lb.max(dot(pts[i], pts[j]).max(0.0).sqrt());
            }
        }
        for f in tri.faces() {
            let nrm = cross(sub(pts[f[1]], pts[f[0]]), sub(pts[f[2]], pts[f[0]]));
            lb = lb.max(dot(nrm, pts[f[0]]).abs() / dot(nrm, nrm).sqrt());
        }
        if lb > 0.97 {
            continue;
        }
        let h = lb + rng.random_range(0.02..0.5) * (1.0 - lb);
        let caps: Vec<Cap> = pts.iter().map(|&u| Cap::new(u, h)).collect();
        let Ok(base) = from_caps(tri.clone(), &caps) else { continue };
        for size in [0.05, 0.02, 0.005, 0.001, 0.0] {
            let disks = perturbed_disks(base.disks(), size, &mut rng);
            let Ok(p) = CPolyhedron::from_disks(tri.clone(), disks) else { continue };
            if p.shallowness().globally_shallow()
                && p.is_strictly_convex(tolerance::STRICT_CONVEXITY)
                && p.is_hyperbolic()
            {
                return Ok(p);
            }
        }
    }
    Err(GenerateError::GenerationFailed(REJECTION_BUDGET))
}

/// A convex hyperbolic octahedron that is not proper.
///
/// Vertex 5 is the southern hemisphere and vertex 0 touches it at `(1,0,0)`.
/// Vertex 3 overlaps the hemisphere by more than a right angle, and the
/// half-plane it cuts from the hemisphere leaves out the tangency point.
pub fn deep_overlap_star() -> CPolyhedron {
    let th: f64 = 0.49;
    let caps = [
        Cap::new([th.cos(), 0.0, th.sin()], th.cos()),
        Cap::new([-0.79, -0.59, 0.2], 0.86),
        Cap::new([-0.1, 0.99, 0.05], 0.65),
        Cap::new([0.11, -0.89, -0.45], -0.15),
        Cap::new([-0.11, 0.19, 0.98], 0.87),
        Cap::new([0.0, 0.0, -1.0], 0.0),
    ];
    from_caps(octahedron_triangulation(), &caps).expect("frozen instance is valid")
}
