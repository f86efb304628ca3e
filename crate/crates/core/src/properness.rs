//! Properness via pencils of circles, and the hyperbolic link of a vertex.
//!
//! The disk `D_v` is read as a hyperbolic plane. Its points are the
//! timelike unit vectors `X` of `v^⊥` on the sheet where `X + v` is future
//! pointing, via `x ↦ x/⟨x,v⟩ − v`. A disk `d` orthogonal to `D_v` cuts out
//! the half-plane `⟨X, d⟩ > 0`.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cpolyhedron::{CPolyhedron, FaceError};
use crate::disk::{
    inversive_distance, pencil_orthodisk, pencil_point, pencil_roots, Disk, DiskError,
    SpherePoint,
};
use crate::lorentz::{hyperplane_normal, LVec4, LorentzError};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropernessError {
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(usize, usize),
    #[error("disks {0} and {1} are nested (Inv = {2})")]
    NestedPair(usize, usize, f64),
    #[error("vertex {vertex}: face {face} has no orthodisk ({source})")]
    NotHyperbolicAtVertex { vertex: usize, face: usize, source: FaceError },
    #[error("vertex {vertex}: link vertex {index} is too close to ideal to classify")]
    AmbiguousClassification { vertex: usize, index: usize },
    #[error("vertex {vertex} is not proper ({} violations)", witnesses.len())]
    ImproperVertex { vertex: usize, witnesses: Vec<Witness> },
    #[error("law of cosines argument {0} is outside [-1, 1]")]
    NotRealizable(f64),
    #[error(transparent)]
    Disk(#[from] DiskError),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
}

/// The pencil datum attached to an ordered edge `(v, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gadget {
    /// `|Inv| ≥ 1`: the point of `S²` in the pencil.
    Point(SpherePoint),
    /// `|Inv| < 1`: the pencil disk orthogonal to `D_v`.
    HalfPlane(Disk),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairGadget {
    pub v: usize,
    pub w: usize,
    pub gadget: Gadget,
}

/// A pencil point of neighbor `point_neighbor` lying outside the half-plane
/// disk of neighbor `disk_neighbor`, both taken at `vertex`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub vertex: usize,
    pub point_neighbor: usize,
    pub disk_neighbor: usize,
    /// `−⟨p, d⟩`; positive for a violation.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropernessReport {
    pub proper: bool,
    pub witnesses: Vec<Witness>,
    /// Smallest `⟨p, d⟩` over all point/disk pairs, `+∞` if there are none.
    pub min_pairing: f64,
}

/// Which root of the pencil quadratic to use for the point gadgets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Kept,
    Discarded,
}

pub fn pair_gadget(p: &CPolyhedron, v: usize, w: usize) -> Result<PairGadget, PropernessError> {
    pair_gadget_on(p, v, w, Branch::Kept)
}

fn pair_gadget_on(
    p: &CPolyhedron,
    v: usize,
    w: usize,
    branch: Branch,
) -> Result<PairGadget, PropernessError> {
    if !p.triangulation().are_adjacent(v, w) {
        return Err(PropernessError::NotAnEdge(v, w));
    }
    let (dv, dw) = (p.disk(v), p.disk(w));
    let inv = inversive_distance(dv, dw);
    let eps = tolerance::PAIR_CLASS;
    if inv <= -1.0 + eps {
        return Err(PropernessError::NestedPair(v, w, inv));
    }
    let gadget = if inv.abs() >= 1.0 - eps {
        let point = match branch {
            Branch::Kept => pencil_point(dv, dw)?,
            Branch::Discarded => SpherePoint::from_lightlike(pencil_roots(dv, dw, eps)?[1])?,
        };
        Gadget::Point(point)
    } else {
        Gadget::HalfPlane(pencil_orthodisk(dv, dw)?)
    };
    Ok(PairGadget { v, w, gadget })
}

fn vertex_pairings(
    p: &CPolyhedron,
    v: usize,
    branch: Branch,
) -> Result<Vec<(usize, usize, f64)>, PropernessError> {
    let mut points = Vec::new();
    let mut disks = Vec::new();
    for &w in p.triangulation().neighbors(v) {
        match pair_gadget_on(p, v, w, branch)?.gadget {
            Gadget::Point(x) => points.push((w, x)),
            Gadget::HalfPlane(d) => disks.push((w, d)),
        }
    }
    let mut out = Vec::with_capacity(points.len() * disks.len());
    for &(wp, x) in &points {
        for &(wd, d) in &disks {
            out.push((wp, wd, x.vector().ip(d.vector())));
        }
    }
    Ok(out)
}

/// Properness witnesses at a single vertex.
pub fn vertex_witnesses(p: &CPolyhedron, v: usize) -> Result<Vec<Witness>, PropernessError> {
    Ok(vertex_pairings(p, v, Branch::Kept)?
        .into_iter()
        .filter(|&(_, _, s)| s < -tolerance::PROPERNESS)
        .map(|(point_neighbor, disk_neighbor, s)| Witness {
            vertex: v,
            point_neighbor,
            disk_neighbor,
            margin: -s,
        })
        .collect())
}

/// Properness with a chosen pencil root.
pub fn is_proper_on(p: &CPolyhedron, branch: Branch) -> Result<PropernessReport, PropernessError> {
    let mut witnesses = Vec::new();
    let mut min_pairing = f64::INFINITY;
    for v in 0..p.n() {
        for (point_neighbor, disk_neighbor, s) in vertex_pairings(p, v, branch)? {
            min_pairing = min_pairing.min(s);
            if s < -tolerance::PROPERNESS {
                witnesses.push(Witness { vertex: v, point_neighbor, disk_neighbor, margin: -s });
            }
        }
    }
    Ok(PropernessReport { proper: witnesses.is_empty(), witnesses, min_pairing })
}

/// A polyhedron is proper when, at every vertex, every pencil point of a
/// non-overlapping neighbor lies in the closed half-plane disk of every
/// overlapping neighbor.
pub fn is_proper(p: &CPolyhedron) -> Result<PropernessReport, PropernessError> {
    is_proper_on(p, Branch::Kept)
}

/// The face orthodisks around a vertex, in counterclockwise order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexPolygon {
    pub vertex: usize,
    /// Entry `i` belongs to the face `(v, nb[i], nb[i+1])`.
    pub half_planes: Vec<Disk>,
    pub faces: Vec<usize>,
    /// Half-planes whose boundary line contributes no edge to the polygon.
    pub redundant: Vec<usize>,
}

pub fn vertex_polygon(p: &CPolyhedron, v: usize) -> Result<VertexPolygon, PropernessError> {
    let faces = p.triangulation().vertex_faces(v).to_vec();
    let half_planes = faces
        .iter()
        .map(|&f| {
            p.face_orthodisk(f).map_err(|source| PropernessError::NotHyperbolicAtVertex {
                vertex: v,
                face: f,
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let dv = p.vector(v);
    let redundant = (0..half_planes.len())
        .filter(|&i| !supports_edge(dv, &half_planes, i))
        .collect();
    Ok(VertexPolygon { vertex: v, half_planes, faces, redundant })
}

/// Orthonormal pair `(P, U)` spanning `{v, d}^⊥` with `P` a point of the
/// hyperbolic plane and `U` a unit tangent.
fn geodesic_frame(v: LVec4, d: LVec4) -> Option<(LVec4, LVec4)> {
    let (ev, ed) = (v.eta(), d.eta());
    let rows = Matrix4::from_fn(|i, j| match i {
        0 => ev[j],
        1 => ed[j],
        _ => 0.0,
    });
    // The two right singular vectors with vanishing singular value span
    // the Lorentz complement of {v, d}.
    let v_t = rows.svd(false, true).v_t?;
    let basis: Vec<LVec4> = (2..4)
        .map(|k| LVec4::new(v_t[(k, 0)], v_t[(k, 1)], v_t[(k, 2)], v_t[(k, 3)]))
        .collect();
    let gram = Matrix2::new(
        basis[0].ip(basis[0]),
        basis[0].ip(basis[1]),
        basis[1].ip(basis[0]),
        basis[1].ip(basis[1]),
    );
    let eig = SymmetricEigen::new(gram);
    let (neg, pos) = if eig.eigenvalues[0] < eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    if !(eig.eigenvalues[neg] < 0.0 && eig.eigenvalues[pos] > 0.0) {
        return None;
    }
    let comb = |k: usize| basis[0] * eig.eigenvectors[(0, k)] + basis[1] * eig.eigenvectors[(1, k)];
    let mut pt = comb(neg) / (-eig.eigenvalues[neg]).sqrt();
    if (pt + v).t < 0.0 {
        pt = -pt;
    }
    Some((pt, comb(pos) / eig.eigenvalues[pos].sqrt()))
}

/// Whether the boundary line of half-plane `i` meets the open region cut
/// out by all the other half-planes.
fn supports_edge(v: LVec4, half_planes: &[Disk], i: usize) -> bool {
    let Some((pt, tangent)) = geodesic_frame(v, half_planes[i].vector()) else {
        return false;
    };
    // Along X(s) = cosh s · P + sinh s · U each constraint reads a + b·tanh s > 0.
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    for (j, d) in half_planes.iter().enumerate() {
        if j == i {
            continue;
        }
        let (a, b) = (pt.ip(d.vector()), tangent.ip(d.vector()));
        if b.abs() < 1e-14 {
            if a <= 0.0 {
                return false;
            }
        } else if b > 0.0 {
            lo = lo.max(-a / b);
        } else {
            hi = hi.min(-a / b);
        }
    }
    hi - lo > 1e-12
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LinkVertexKind {
    /// Consecutive lines cross inside `D_v`.
    Visible { point: SpherePoint },
    /// Consecutive lines meet on `∂D_v`.
    Ideal { point: SpherePoint },
    /// Consecutive lines are ultraparallel; `perpendicular` is their common
    /// perpendicular, oriented toward the polygon.
    Hyperideal { perpendicular: Disk, green_length: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkVertex {
    /// Between half-planes `index − 1` and `index`.
    pub index: usize,
    /// The neighbor of `v` shared by the two faces.
    pub neighbor: usize,
    /// `⟨O_{i−1}, O_i⟩`.
    pub pairing: f64,
    pub kind: LinkVertexKind,
}

impl LinkVertex {
    pub fn is_visible(&self) -> bool {
        matches!(self.kind, LinkVertexKind::Visible { .. })
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self.kind, LinkVertexKind::Ideal { .. })
    }

    pub fn is_hyperideal(&self) -> bool {
        matches!(self.kind, LinkVertexKind::Hyperideal { .. })
    }
}

/// Lifts a timelike vector of `v^⊥` to the hyperbolic sheet of `D_v`.
fn lift(n: LVec4, v: LVec4) -> LVec4 {
    let x = n / (-n.norm_sq()).sqrt();
    if (x + v).t < 0.0 {
        -x
    } else {
        x
    }
}

pub fn classify_link(p: &CPolyhedron, v: usize) -> Result<Vec<LinkVertex>, PropernessError> {
    let poly = vertex_polygon(p, v)?;
    let ring = p.triangulation().neighbors(v);
    let k = poly.half_planes.len();
    let dv = p.vector(v);
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let a = poly.half_planes[(i + k - 1) % k].vector();
        let b = poly.half_planes[i].vector();
        let c = a.ip(b);
        let n = hyperplane_normal(a, b, dv)?;
        let kind = if (c.abs() - 1.0).abs() <= tolerance::LINK_CLASS {
            let scale = n.euclid_dot(n);
            if n.norm_sq().abs() > tolerance::LINK_IDEAL_RESIDUAL * scale {
                return Err(PropernessError::AmbiguousClassification { vertex: v, index: i });
            }
            let n = if n.t < 0.0 { -n } else { n };
            LinkVertexKind::Ideal { point: SpherePoint::from_lightlike(n)? }
        } else if c.abs() < 1.0 {
            LinkVertexKind::Visible { point: SpherePoint::from_lightlike(lift(n, dv) + dv)? }
        } else {
            let s = n.normalize_to_de_sitter()?;
            let s = if s.ip(p.vector(ring[i])) > 0.0 { -s } else { s };
            LinkVertexKind::Hyperideal { perpendicular: Disk::new(s)?, green_length: c.abs().acosh() }
        };
        out.push(LinkVertex { index: i, neighbor: ring[i], pairing: c, kind });
    }
    Ok(out)
}

/// Length of a black edge; ideal endpoints make it infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BlackLength {
    Finite(f64),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LinkEdge {
    /// A segment of the boundary line of half-plane `half_plane`.
    Black { half_plane: usize, length: BlackLength },
    /// The truncation segment at link vertex `link_vertex`.
    Green { link_vertex: usize, length: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LinkAngle {
    Real(f64),
    Zero,
    /// A hyperideal vertex; the payload is its green length.
    Imaginary(f64),
}

/// The truncated link polygon of a vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkPolygon {
    pub vertex: usize,
    pub vertices: Vec<LinkVertex>,
    /// One per link vertex.
    pub angles: Vec<LinkAngle>,
    /// For each link vertex `i`: its green edge if hyperideal, then the
    /// black edge on half-plane `i`.
    pub edges: Vec<LinkEdge>,
}

impl LinkPolygon {
    /// The black length on half-plane `i`.
    pub fn black(&self, i: usize) -> BlackLength {
        self.edges
            .iter()
            .find_map(|e| match *e {
                LinkEdge::Black { half_plane, length } if half_plane == i => Some(length),
                _ => None,
            })
            .expect("every half-plane has a black edge")
    }
}

pub fn truncation(p: &CPolyhedron, v: usize) -> Result<LinkPolygon, PropernessError> {
    let witnesses = vertex_witnesses(p, v)?;
    if !witnesses.is_empty() {
        return Err(PropernessError::ImproperVertex { vertex: v, witnesses });
    }
    let poly = vertex_polygon(p, v)?;
    let vertices = classify_link(p, v)?;
    let k = vertices.len();
    let dv = p.vector(v);

    // The end of the black edge on line `line` at link vertex `j`.
    let endpoint = |line: usize, j: usize| -> Result<Option<LVec4>, PropernessError> {
        Ok(match vertices[j].kind {
            LinkVertexKind::Ideal { .. } => None,
            LinkVertexKind::Visible { point } => {
                let x = point.vector();
                Some(x / x.ip(dv) - dv)
            }
            LinkVertexKind::Hyperideal { perpendicular, .. } => {
                let o = poly.half_planes[line].vector();
                Some(lift(hyperplane_normal(o, perpendicular.vector(), dv)?, dv))
            }
        })
    };

    let mut angles = Vec::with_capacity(k);
    let mut edges = Vec::with_capacity(2 * k);
    for (i, lv) in vertices.iter().enumerate() {
        angles.push(match lv.kind {
            LinkVertexKind::Visible { .. } => LinkAngle::Real((-lv.pairing).clamp(-1.0, 1.0).acos()),
            LinkVertexKind::Ideal { .. } => LinkAngle::Zero,
            LinkVertexKind::Hyperideal { green_length, .. } => LinkAngle::Imaginary(green_length),
        });
        if let LinkVertexKind::Hyperideal { green_length, .. } = lv.kind {
            edges.push(LinkEdge::Green { link_vertex: i, length: green_length });
        }
        let length = match (endpoint(i, i)?, endpoint(i, (i + 1) % k)?) {
            (Some(x), Some(y)) => BlackLength::Finite((-x.ip(y)).max(1.0).acosh()),
            _ => BlackLength::Infinite,
        };
        edges.push(LinkEdge::Black { half_plane: i, length });
    }
    Ok(LinkPolygon { vertex: v, vertices, angles, edges })
}

/// Angle at a visible vertex of a truncated triangle: `c` is the black edge
/// joining the two visible vertices, `b` the black edge from this vertex to
/// the green edge, and `a` the black edge from the other visible vertex to
/// the green edge.
pub fn law_of_cosines(a: f64, b: f64, c: f64) -> Result<f64, PropernessError> {
    let arg = (b.sinh() * c.cosh() - a.sinh()) / (b.cosh() * c.sinh());
    if !(arg.abs() <= 1.0 + 1e-12) {
        return Err(PropernessError::NotRealizable(arg));
    }
    Ok(arg.clamp(-1.0, 1.0).acos())
}

/// `sinh` of the signed distance from a point at distance `r_u` beyond one
/// line, travelling `r_w` at angle `alpha` to its perpendicular.
pub fn shallow_offset_sinh(r_u: f64, r_w: f64, alpha: f64) -> f64 {
    r_w.sinh() * r_u.cosh() + alpha.cos() * r_w.cosh() * r_u.sinh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::moebius::random_moebius;

    #[test]
    fn koebe_gadgets_are_points() {
        let p = generate::tetra_koebe();
        let g = pair_gadget(&p, 0, 1).unwrap();
        match g.gadget {
            Gadget::Point(x) => {
                assert!((x.vector() - LVec4::new(1.0, 0.0, 0.0, 1.0)).sup_norm() < 1e-14)
            }
            _ => panic!("expected a point"),
        }
        let r = is_proper(&p).unwrap();
        assert!(r.proper);
        assert!(r.witnesses.is_empty());
        assert_eq!(r.min_pairing, f64::INFINITY);
        assert!(matches!(pair_gadget(&generate::octa_koebe(), 0, 1), Err(PropernessError::NotAnEdge(0, 1))));
    }

    #[test]
    fn overlapping_gadget() {
        let p = generate::octa_koebe_overlapping(0.65).unwrap();
        let g = pair_gadget(&p, 0, 2).unwrap();
        let Gadget::HalfPlane(d) = g.gadget else { panic!("expected a half-plane") };
        assert!(d.vector().ip(p.vector(0)).abs() < 1e-12);
    }

    #[test]
    fn hyperideal_gadget() {
        let p = generate::tetra_hyperideal(0.7).unwrap();
        let Gadget::Point(x) = pair_gadget(&p, 0, 1).unwrap().gadget else { panic!() };
        assert!(x.vector().norm_sq().abs() < 1e-10);
    }

    #[test]
    fn star_is_improper() {
        let p = generate::deep_overlap_star();
        let r = is_proper(&p).unwrap();
        assert!(!r.proper);
        let w = r
            .witnesses
            .iter()
            .find(|w| w.vertex == 5 && w.point_neighbor == 0 && w.disk_neighbor == 3)
            .expect("the designed witness is reported");
        assert!(w.margin > 0.29, "{w:?}");
        assert!(matches!(truncation(&p, 5), Err(PropernessError::ImproperVertex { vertex: 5, .. })));
        let link = classify_link(&p, 5).unwrap();
        assert!(link.iter().any(LinkVertex::is_hyperideal));
    }

    #[test]
    fn discarded_root_gives_same_verdict() {
        for p in [
            generate::deep_overlap_star(),
            generate::random_shallow(8, 3).unwrap(),
            generate::octa_koebe(),
        ] {
            let a = is_proper_on(&p, Branch::Kept).unwrap();
            let b = is_proper_on(&p, Branch::Discarded).unwrap();
            assert_eq!(a.proper, b.proper);
        }
    }

    #[test]
    fn koebe_links_are_ideal_triangles() {
        let p = generate::tetra_koebe();
        for v in 0..4 {
            let poly = vertex_polygon(&p, v).unwrap();
            assert_eq!(poly.half_planes.len(), 3);
            assert!(poly.redundant.is_empty());
            let link = classify_link(&p, v).unwrap();
            assert!(link.iter().all(LinkVertex::is_ideal));
            for lv in &link {
                // The link vertex is the tangency point with that neighbor.
                let LinkVertexKind::Ideal { point } = lv.kind else { unreachable!() };
                let t = pencil_point(p.disk(v), p.disk(lv.neighbor)).unwrap();
                assert!((point.vector() - t.vector()).sup_norm() < 1e-9);
            }
            let t = truncation(&p, v).unwrap();
            assert!(t.angles.iter().all(|a| *a == LinkAngle::Zero));
            assert!(t.edges.iter().all(|e| matches!(e, LinkEdge::Black { length: BlackLength::Infinite, .. })));
        }
    }

    #[test]
    fn octahedron_links() {
        let p = generate::octa_koebe();
        for v in 0..6 {
            let poly = vertex_polygon(&p, v).unwrap();
            assert_eq!(poly.half_planes.len(), 4);
            assert!(poly.redundant.is_empty());
        }
    }

    #[test]
    fn hyperideal_links_are_visible() {
        let p = generate::tetra_hyperideal(0.7).unwrap();
        for v in 0..4 {
            let link = classify_link(&p, v).unwrap();
            assert!(link.iter().all(LinkVertex::is_visible));
            for lv in &link {
                // Agreement with the pencil side: disjoint neighbor, point gadget.
                assert!(matches!(pair_gadget(&p, v, lv.neighbor).unwrap().gadget, Gadget::Point(_)));
                let LinkVertexKind::Visible { point } = lv.kind else { unreachable!() };
                assert!(p.disk(v).vector().ip(point.vector()) > 0.0);
            }
            let t = truncation(&p, v).unwrap();
            // A compact triangle: angle sum below π.
            let sum: f64 = t
                .angles
                .iter()
                .map(|a| match a {
                    LinkAngle::Real(x) => *x,
                    _ => panic!("expected real angles"),
                })
                .sum();
            assert!(sum < std::f64::consts::PI && sum > 0.0);
        }
    }

    #[test]
    fn law_of_cosines_examples() {
        let alpha = law_of_cosines(1.0, 1.0, 1.0).unwrap();
        assert!((alpha.cos() - 0.35194572633611460).abs() < 1e-14);
        assert!((alpha - 1.2111473112614116).abs() < 1e-14);
        assert!(matches!(law_of_cosines(10.0, 1.0, 1.0), Err(PropernessError::NotRealizable(_))));
    }

    #[test]
    fn link_is_moebius_invariant() {
        let p = generate::random_shallow(7, 21).unwrap();
        let f = random_moebius(4, 1.0);
        let q = p.transform(&f).unwrap();
        for v in 0..p.n() {
            let a = vertex_polygon(&p, v).unwrap();
            let b = vertex_polygon(&q, v).unwrap();
            for (x, y) in a.half_planes.iter().zip(&b.half_planes) {
                assert!((f.apply(x.vector()) - y.vector()).sup_norm() < 1e-9);
            }
            let (ta, tb) = (truncation(&p, v).unwrap(), truncation(&q, v).unwrap());
            for (x, y) in ta.edges.iter().zip(&tb.edges) {
                match (x, y) {
                    (
                        LinkEdge::Black { length: BlackLength::Finite(a), .. },
                        LinkEdge::Black { length: BlackLength::Finite(b), .. },
                    ) => assert!((a - b).abs() < 1e-8),
                    (LinkEdge::Green { length: a, .. }, LinkEdge::Green { length: b, .. }) => {
                        assert!((a - b).abs() < 1e-8)
                    }
                    (a, b) => assert_eq!(
                        std::mem::discriminant(a),
                        std::mem::discriminant(b)
                    ),
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn shallow_pair_inequality(r_u in 0.01f64..3.0, r_w in 0.01f64..3.0, alpha in 0.0f64..std::f64::consts::FRAC_PI_2) {
                let s = shallow_offset_sinh(r_u, r_w, alpha);
                prop_assert!(s >= r_w.sinh() * r_u.cosh());
                prop_assert!(r_w.sinh() * r_u.cosh() > 0.0);
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn shallow_instances_are_proper(n in 4usize..=10, seed in any::<u64>()) {
                let p = generate::random_shallow(n, seed).unwrap();
                prop_assert!(is_proper(&p).unwrap().proper);
            }

            #[test]
            fn gadget_cases_match_pair_classes(n in 4usize..=10, seed in any::<u64>()) {
                use crate::disk::{classify_pair, PairClass};
                let p = generate::random_shallow(n, seed).unwrap();
                for &(i, j) in p.triangulation().edges() {
                    let g = pair_gadget(&p, i, j).unwrap().gadget;
                    match classify_pair(p.disk(i), p.disk(j), tolerance::PAIR_CLASS) {
                        PairClass::Disjoint | PairClass::ExternallyTangent => prop_assert!(matches!(g, Gadget::Point(_))),
                        PairClass::Overlapping { .. } => prop_assert!(matches!(g, Gadget::HalfPlane(_))),
                        _ => prop_assert!(false),
                    }
                }
            }

            #[test]
            fn properness_is_open(seed in any::<u64>()) {
                let base = generate::random_shallow(6, 77).unwrap();
                let q = generate::perturb(&base, 1e-5, seed).unwrap();
                prop_assert!(is_proper(&q).unwrap().proper);
            }

            #[test]
            fn properness_is_moebius_invariant(seed in any::<u64>()) {
                let p = generate::deep_overlap_star();
                let q = generate::transported(&p, seed, 1.0);
                let (a, b) = (is_proper(&p).unwrap(), is_proper(&q).unwrap());
                prop_assert_eq!(a.proper, b.proper);
                let key = |r: &PropernessReport| -> Vec<(usize, usize, usize)> {
                    r.witnesses.iter().map(|w| (w.vertex, w.point_neighbor, w.disk_neighbor)).collect()
                };
                prop_assert_eq!(key(&a), key(&b));
            }
        }
    }
}
