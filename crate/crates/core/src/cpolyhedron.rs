//! Triangulated circle polyhedra and their structural predicates.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::disk::{classify_inv, inversive_distance, Disk, DiskError, PairClass};
use crate::lorentz::{det4, hyperplane_normal, CausalClass, LVec4, LorentzError};
use crate::moebius::MoebiusMap;
use crate::properness::{self, Witness};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error("a triangulation needs at least 4 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("face {0} is not a triple of distinct vertices in range")]
    InvalidFace(usize),
    #[error("Euler count violated: {faces} faces and {edges} edges for {n} vertices")]
    EulerViolation { n: usize, faces: usize, edges: usize },
    #[error("edge ({0}, {1}) lies in {2} faces")]
    NonManifoldEdge(usize, usize, usize),
    #[error("directed edge ({0}, {1}) occurs in two faces")]
    InconsistentOrientation(usize, usize),
    #[error("the faces around vertex {0} do not form a single cycle")]
    NonManifoldVertex(usize),
    #[error("removing vertices {0} and {1} disconnects the graph")]
    NotThreeConnected(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyhedronError {
    #[error("expected {expected} disks, got {got}")]
    WrongDiskCount { expected: usize, got: usize },
    #[error("vertex {vertex} is not a unit de Sitter point (⟨v,v⟩ = {norm_sq})")]
    NotDeSitter { vertex: usize, norm_sq: f64 },
    #[error("adjacent disks {0} and {1} are nested or internally tangent (Inv = {2})")]
    NestedEdge(usize, usize, f64),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FaceError {
    #[error("face disks are linearly dependent")]
    DegenerateSpan,
    #[error("face support plane misses the interior of the light cone")]
    NormalNotSpacelike,
    #[error("off-face pairings with the face normal do not share a strict sign")]
    SignAmbiguous,
}

/// A validated, consistently oriented, 3-connected triangulation of the
/// sphere. Vertices are `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    n: usize,
    faces: Vec<[usize; 3]>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    quads: Vec<[usize; 4]>,
    neighbors: Vec<Vec<usize>>,
    vertex_faces: Vec<Vec<usize>>,
}

impl Triangulation {
    pub fn new(n: usize, faces: Vec<[usize; 3]>) -> Result<Self, TriangulationError> {
        if n < 4 {
            return Err(TriangulationError::TooFewVertices(n));
        }
        for (k, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= n) || f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(TriangulationError::InvalidFace(k));
            }
        }
        let mut undirected: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &faces {
            for a in 0..3 {
                let (i, j) = (f[a], f[(a + 1) % 3]);
                *undirected.entry((i.min(j), i.max(j))).or_default() += 1;
            }
        }
        if faces.len() != 2 * n - 4 || undirected.len() != 3 * n - 6 {
            return Err(TriangulationError::EulerViolation {
                n,
                faces: faces.len(),
                edges: undirected.len(),
            });
        }
        let mut edges: Vec<(usize, usize)> = undirected.keys().copied().collect();
        edges.sort_unstable();
        for &(i, j) in &edges {
            let c = undirected[&(i, j)];
            if c != 2 {
                return Err(TriangulationError::NonManifoldEdge(i, j, c));
            }
        }
        // Directed edge -> (face index, opposite vertex).
        let mut directed: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (k, f) in faces.iter().enumerate() {
            for a in 0..3 {
                let key = (f[a], f[(a + 1) % 3]);
                if directed.insert(key, (k, f[(a + 2) % 3])).is_some() {
                    return Err(TriangulationError::InconsistentOrientation(key.0, key.1));
                }
            }
        }
        let edge_index = edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let quads = edges
            .iter()
            .map(|&(i, j)| [i, j, directed[&(i, j)].1, directed[&(j, i)].1])
            .collect();

        // Around v, face (v, a, b) is followed by (v, b, c).
        let mut neighbors = Vec::with_capacity(n);
        let mut vertex_faces = Vec::with_capacity(n);
        for v in 0..n {
            let mut next: HashMap<usize, (usize, usize)> = HashMap::new();
            for (k, f) in faces.iter().enumerate() {
                if let Some(p) = f.iter().position(|&x| x == v) {
                    next.insert(f[(p + 1) % 3], (f[(p + 2) % 3], k));
                }
            }
            let start = *next.keys().min().ok_or(TriangulationError::NonManifoldVertex(v))?;
            let (mut ring, mut ring_faces) = (vec![start], Vec::new());
            let mut cur = start;
            loop {
                let (b, k) = next[&cur];
                ring_faces.push(k);
                if b == start {
                    break;
                }
                if ring.len() > next.len() {
                    return Err(TriangulationError::NonManifoldVertex(v));
                }
                ring.push(b);
                cur = b;
            }
            if ring.len() != next.len() {
                return Err(TriangulationError::NonManifoldVertex(v));
            }
            neighbors.push(ring);
            vertex_faces.push(ring_faces);
        }
        let tri = Self { n, faces, edges, edge_index, quads, neighbors, vertex_faces };
        tri.check_three_connected()?;
        Ok(tri)
    }

    fn check_three_connected(&self) -> Result<(), TriangulationError> {
        for a in 0..self.n {
            for b in a + 1..self.n {
                let start = (0..self.n).find(|&x| x != a && x != b).unwrap();
                let mut seen = vec![false; self.n];
                seen[a] = true;
                seen[b] = true;
                seen[start] = true;
                let mut count = 1;
                let mut queue = VecDeque::from([start]);
                while let Some(x) = queue.pop_front() {
                    for &y in &self.neighbors[x] {
                        if !seen[y] {
                            seen[y] = true;
                            count += 1;
                            queue.push_back(y);
                        }
                    }
                }
                if count != self.n - 2 {
                    return Err(TriangulationError::NotThreeConnected(a, b));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Undirected edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edge_index.get(&(i.min(j), i.max(j))).copied()
    }

    /// `(i, j, k, l)` with left face `(i, j, k)` and right face `(j, i, l)`.
    pub fn quad(&self, edge: usize) -> [usize; 4] {
        self.quads[edge]
    }

    /// Neighbors of `v` in counterclockwise order seen from outside.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// Faces around `v`; entry `i` is the face `(v, nb[i], nb[i+1])`.
    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        self.edge_index(i, j).is_some()
    }
}

/// A triangulation with one oriented disk per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct CPolyhedron {
    tri: Triangulation,
    disks: Vec<Disk>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shallowness {
    Hyperideal,
    Koebe,
    GloballyShallow,
    LocallyShallowOnly,
    NotShallow,
}

impl Shallowness {
    pub fn globally_shallow(self) -> bool {
        matches!(self, Self::Hyperideal | Self::Koebe | Self::GloballyShallow)
    }

    pub fn locally_shallow(self) -> bool {
        self != Self::NotShallow
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub strictly_convex: bool,
    pub convex: bool,
    pub min_abs_psi: f64,
    pub sign: i8,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicReport {
    pub hyperbolic: bool,
    pub orthodisks: Vec<Result<Disk, FaceError>>,
}

impl CPolyhedron {
    pub fn new(tri: Triangulation, vectors: Vec<LVec4>) -> Result<Self, PolyhedronError> {
        if vectors.len() != tri.n() {
            return Err(PolyhedronError::WrongDiskCount { expected: tri.n(), got: vectors.len() });
        }
        let mut disks = Vec::with_capacity(vectors.len());
        for (vertex, v) in vectors.into_iter().enumerate() {
            let norm_sq = v.norm_sq();
            if !((norm_sq - 1.0).abs() <= tolerance::DE_SITTER_MEMBERSHIP) {
                return Err(PolyhedronError::NotDeSitter { vertex, norm_sq });
            }
            disks.push(Disk::new(v).map_err(|_| PolyhedronError::NotDeSitter { vertex, norm_sq })?);
        }
        Self::from_disks(tri, disks)
    }

    pub fn from_disks(tri: Triangulation, disks: Vec<Disk>) -> Result<Self, PolyhedronError> {
        if disks.len() != tri.n() {
            return Err(PolyhedronError::WrongDiskCount { expected: tri.n(), got: disks.len() });
        }
        for &(i, j) in tri.edges() {
            let inv = inversive_distance(disks[i], disks[j]);
            if !(inv > -1.0 + tolerance::PAIR_CLASS) {
                return Err(PolyhedronError::NestedEdge(i, j, inv));
            }
        }
        Ok(Self { tri, disks })
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn n(&self) -> usize {
        self.tri.n()
    }

    pub fn disk(&self, i: usize) -> Disk {
        self.disks[i]
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn vector(&self, i: usize) -> LVec4 {
        self.disks[i].vector()
    }

    pub fn vectors(&self) -> Vec<LVec4> {
        self.disks.iter().map(Disk::vector).collect()
    }

    pub fn transform(&self, f: &MoebiusMap) -> Result<Self, PolyhedronError> {
        Self::new(self.tri.clone(), self.disks.iter().map(|d| f.apply(d.vector())).collect())
    }

    pub fn inv(&self, i: usize, j: usize) -> f64 {
        inversive_distance(self.disks[i], self.disks[j])
    }

    pub fn edge_determinant(&self, edge: usize) -> f64 {
        let [i, j, k, l] = self.tri.quad(edge);
        det4(self.vector(i), self.vector(j), self.vector(k), self.vector(l))
    }

    pub fn edge_determinants(&self) -> Vec<f64> {
        (0..self.tri.edges().len()).map(|e| self.edge_determinant(e)).collect()
    }

    pub fn convexity(&self, eps: f64) -> ConvexityReport {
        let psi = self.edge_determinants();
        let max_norm = self.disks.iter().map(|d| d.vector().euclid_norm()).fold(0.0, f64::max);
        let threshold = eps * max_norm.powi(4);
        let min_abs_psi = psi.iter().map(|p| p.abs()).fold(f64::INFINITY, f64::min);
        let lead = psi.iter().copied().fold(0.0_f64, |a, p| if p.abs() > a.abs() { p } else { a });
        let sign: i8 = if lead > 0.0 { 1 } else if lead < 0.0 { -1 } else { 0 };
        let s = f64::from(sign);
        let convex = sign != 0 && psi.iter().all(|p| s * p >= -threshold);
        let strictly_convex = sign != 0 && psi.iter().all(|p| s * p > threshold);
        ConvexityReport { strictly_convex, convex, min_abs_psi, sign, threshold }
    }

    pub fn is_strictly_convex(&self, eps: f64) -> bool {
        self.convexity(eps).strictly_convex
    }

    /// The unit disk orthogonal to the three disks of `face`, oriented to
    /// pair positively with every disk off the face.
    pub fn face_orthodisk(&self, face: usize) -> Result<Disk, FaceError> {
        let f = self.tri.faces()[face];
        let n = hyperplane_normal(self.vector(f[0]), self.vector(f[1]), self.vector(f[2]))
            .map_err(|e| match e {
                LorentzError::DegenerateSpan(_) => FaceError::DegenerateSpan,
                LorentzError::NotSpacelike(_) => FaceError::NormalNotSpacelike,
            })?;
        if n.classify(tolerance::CAUSAL_CLASS) != CausalClass::Spacelike {
            return Err(FaceError::NormalNotSpacelike);
        }
        let n = n.normalize_to_de_sitter().map_err(|_| FaceError::NormalNotSpacelike)?;
        let pairings: Vec<f64> = (0..self.n())
            .filter(|w| !f.contains(w))
            .map(|w| n.ip(self.vector(w)))
            .collect();
        let eps = tolerance::ORTHODISK_SIGN;
        let oriented = if pairings.iter().all(|&s| s > eps) {
            n
        } else if pairings.iter().all(|&s| s < -eps) {
            -n
        } else {
            return Err(FaceError::SignAmbiguous);
        };
        Disk::new(oriented).map_err(|_: DiskError| FaceError::NormalNotSpacelike)
    }

    pub fn hyperbolicity(&self) -> HyperbolicReport {
        let orthodisks: Vec<_> = (0..self.tri.faces().len()).map(|f| self.face_orthodisk(f)).collect();
        HyperbolicReport { hyperbolic: orthodisks.iter().all(Result::is_ok), orthodisks }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.hyperbolicity().hyperbolic
    }

    /// Edge indices with `|Inv − 1| < eps`.
    pub fn unitary_edges(&self, eps: f64) -> Vec<usize> {
        self.tri
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| (self.inv(i, j) - 1.0).abs() < eps)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn shallowness(&self) -> Shallowness {
        let eps = tolerance::PAIR_CLASS;
        let shallow = |c: PairClass| match c {
            PairClass::Disjoint | PairClass::ExternallyTangent => true,
            PairClass::Overlapping { deep, .. } => !deep,
            PairClass::InternallyTangent | PairClass::Nested => false,
        };
        let (mut all_disjoint, mut koebe, mut global, mut local) = (true, true, true, true);
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                let c = classify_inv(self.inv(i, j), eps);
                let adjacent = self.tri.are_adjacent(i, j);
                all_disjoint &= c == PairClass::Disjoint;
                koebe &= if adjacent {
                    c == PairClass::ExternallyTangent
                } else {
                    c == PairClass::Disjoint
                };
                global &= shallow(c);
                if adjacent {
                    local &= shallow(c);
                }
            }
        }
        if all_disjoint {
            Shallowness::Hyperideal
        } else if koebe {
            Shallowness::Koebe
        } else if global {
            Shallowness::GloballyShallow
        } else if local {
            Shallowness::LocallyShallowOnly
        } else {
            Shallowness::NotShallow
        }
    }
}

/// Everything the predicates say about one polyhedron.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub strictly_convex: bool,
    pub convex: bool,
    pub edge_determinant_sign: i8,
    pub min_abs_psi: f64,
    pub hyperbolic: bool,
    /// Faces whose orthodisk could not be formed.
    pub non_hyperbolic_faces: Vec<usize>,
    pub orthodisks: Vec<Option<LVec4>>,
    pub unitary_edges: Vec<(usize, usize)>,
    pub shallowness: Shallowness,
    /// `None` when the polyhedron is not convex and hyperbolic, where
    /// properness is undefined.
    pub proper: Option<bool>,
    pub properness_witnesses: Vec<Witness>,
}

pub fn analyze(p: &CPolyhedron) -> AnalysisReport {
    let conv = p.convexity(tolerance::STRICT_CONVEXITY);
    let hyp = p.hyperbolicity();
    let (proper, properness_witnesses) = if hyp.hyperbolic && conv.convex {
        match properness::is_proper(p) {
            Ok(r) => (Some(r.proper), r.witnesses),
            Err(_) => (Some(false), Vec::new()),
        }
    } else {
        (None, Vec::new())
    };
    AnalysisReport {
        n: p.n(),
        strictly_convex: conv.strictly_convex,
        convex: conv.convex,
        edge_determinant_sign: conv.sign,
        min_abs_psi: conv.min_abs_psi,
        hyperbolic: hyp.hyperbolic,
        non_hyperbolic_faces: hyp
            .orthodisks
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_err())
            .map(|(k, _)| k)
            .collect(),
        orthodisks: hyp.orthodisks.iter().map(|r| r.as_ref().ok().map(Disk::vector)).collect(),
        unitary_edges: p
            .unitary_edges(tolerance::UNITARY)
            .into_iter()
            .map(|e| p.triangulation().edges()[e])
            .collect(),
        shallowness: p.shallowness(),
        proper,
        properness_witnesses,
    }
}
