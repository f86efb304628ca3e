//! Oriented disks on `S²` as unit de Sitter vectors, and sphere points as
//! light-cone rays normalized to `t = 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lorentz::{LVec4, LorentzError};
use crate::moebius::MoebiusMap;
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiskError {
    #[error("cap offset {0} is outside (-1, 1)")]
    OffsetOutOfRange(f64),
    #[error("disk vector has no space part")]
    PolarDegenerate,
    #[error("vector is not a unit de Sitter point (⟨v,v⟩ = {0})")]
    NotDeSitter(f64),
    #[error("disks overlap; their pencil has no point on the sphere (Inv = {0})")]
    PencilHasNoRealPoint(f64),
    #[error("pencil point cannot be scaled to t = 1")]
    NonPositiveTime,
    #[error("disks meet in at most one point; no orthogonal disk in the pencil (Inv = {0})")]
    PencilOrthodiskDegenerate(f64),
    #[error("disks are not disjoint (Inv = {0})")]
    NotDisjoint(f64),
    #[error("sphere point is not on the unit sphere")]
    NotOnSphere,
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
}

/// The oriented disk `{x ∈ S² : ⟨v, (x,1)⟩ > 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Disk {
    v: LVec4,
}

/// The spherical cap `{x ∈ S² : u·x > h}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub u: [f64; 3],
    pub h: f64,
}

/// A point of `S²` lifted to the light cone with `t = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpherePoint {
    p: LVec4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PairClass {
    Disjoint,
    ExternallyTangent,
    /// `theta = arccos(Inv)`; `deep` when the overlap exceeds π/2.
    Overlapping { theta: f64, deep: bool },
    InternallyTangent,
    Nested,
}

impl Disk {
    /// Wraps a de Sitter vector, renormalizing when it drifts by more than
    /// 1e−12 from the unit sphere.
    pub fn new(v: LVec4) -> Result<Self, DiskError> {
        if !v.is_finite() {
            return Err(DiskError::NotDeSitter(f64::NAN));
        }
        let q = v.norm_sq();
        if (q - 1.0).abs() <= 1e-12 {
            return Ok(Self { v });
        }
        match v.normalize_to_de_sitter() {
            Ok(v) => Ok(Self { v }),
            Err(_) => Err(DiskError::NotDeSitter(q)),
        }
    }

    pub fn from_cap(c: Cap) -> Result<Self, DiskError> {
        cap_to_disk(c)
    }

    pub fn vector(&self) -> LVec4 {
        self.v
    }

    /// The complementary disk with the opposite orientation.
    pub fn complement(&self) -> Disk {
        Disk { v: -self.v }
    }

    pub fn to_cap(&self) -> Result<Cap, DiskError> {
        disk_to_cap(*self)
    }

    pub fn transform(&self, f: &MoebiusMap) -> Disk {
        Disk::new(f.apply(self.v)).unwrap_or(Disk { v: f.apply(self.v) })
    }
}

impl Cap {
    pub fn new(u: [f64; 3], h: f64) -> Self {
        let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        Self { u: [u[0] / n, u[1] / n, u[2] / n], h }
    }
}

impl SpherePoint {
    /// The sphere point above the unit vector `x`.
    pub fn from_unit(x: [f64; 3]) -> Result<Self, DiskError> {
        let n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        if !((n2 - 1.0).abs() < 1e-12) {
            return Err(DiskError::NotOnSphere);
        }
        Ok(Self { p: LVec4::from_space(x, 1.0) })
    }

    /// Rescales a future-or-past lightlike vector to `t = 1`.
    pub fn from_lightlike(m: LVec4) -> Result<Self, DiskError> {
        let scale = m.euclid_norm();
        if !(m.t.abs() > 1e-14 * scale) || !m.is_finite() {
            return Err(DiskError::NonPositiveTime);
        }
        let p = m / m.t;
        let s = p.space_norm();
        Ok(Self { p: LVec4::new(p.x / s, p.y / s, p.z / s, 1.0) })
    }

    pub fn vector(&self) -> LVec4 {
        self.p
    }

    pub fn coords(&self) -> [f64; 3] {
        self.p.space()
    }

    pub fn transform(&self, f: &MoebiusMap) -> SpherePoint {
        SpherePoint::from_lightlike(f.apply(self.p)).unwrap_or(*self)
    }
}

pub fn cap_to_disk(c: Cap) -> Result<Disk, DiskError> {
    if !(c.h.abs() < 1.0) {
        return Err(DiskError::OffsetOutOfRange(c.h));
    }
    let s = (1.0 - c.h * c.h).sqrt();
    Ok(Disk { v: LVec4::from_space(c.u, c.h) / s })
}

pub fn disk_to_cap(d: Disk) -> Result<Cap, DiskError> {
    let v = d.vector();
    let r = v.space_norm();
    if !(r >= 1e-12) {
        return Err(DiskError::PolarDegenerate);
    }
    Ok(Cap { u: [v.x / r, v.y / r, v.z / r], h: v.t / r })
}

pub fn inversive_distance(d1: Disk, d2: Disk) -> f64 {
    -d1.v.ip(d2.v)
}

pub fn classify_inv(inv: f64, eps: f64) -> PairClass {
    if inv > 1.0 + eps {
        PairClass::Disjoint
    } else if (inv - 1.0).abs() <= eps {
        PairClass::ExternallyTangent
    } else if (inv + 1.0).abs() <= eps {
        PairClass::InternallyTangent
    } else if inv < -1.0 - eps {
        PairClass::Nested
    } else {
        PairClass::Overlapping { theta: inv.acos(), deep: inv < 0.0 }
    }
}

pub fn classify_pair(d1: Disk, d2: Disk, eps: f64) -> PairClass {
    classify_inv(inversive_distance(d1, d2), eps)
}

/// Membership of `x` in the open disk, with the signed pairing `⟨d, x⟩`.
pub fn contains_point(d: Disk, x: SpherePoint) -> (bool, f64) {
    let m = d.v.ip(x.p);
    (m > 0.0, m)
}

/// Both roots of the pencil quadratic, as unscaled lightlike vectors
/// `(λ−1) d_w − λ d_v`, ordered by decreasing `⟨m, d_v⟩`.
pub fn pencil_roots(d_v: Disk, d_w: Disk, eps: f64) -> Result<[LVec4; 2], DiskError> {
    let t = d_w.v.ip(d_v.v);
    let inv = -t;
    if inv.abs() < 1.0 - eps {
        return Err(DiskError::PencilHasNoRealPoint(inv));
    }
    let a = 2.0 - 2.0 * t;
    if !(a.abs() > 1e-12) {
        return Err(DiskError::NonPositiveTime);
    }
    // Tangent pairs get the double root exactly.
    let root = if (inv.abs() - 1.0).abs() <= eps { 0.0 } else { (t * t - 1.0).max(0.0).sqrt() };
    let roots = [0.5 + root / a, 0.5 - root / a].map(|l| d_w.v * (l - 1.0) - d_v.v * l);
    let key = |m: &LVec4| m.ip(d_v.v);
    Ok(if key(&roots[0]) >= key(&roots[1]) { roots } else { [roots[1], roots[0]] })
}

/// The point of `S²` in the pencil `span{d_v, d_w}` on the branch
/// `⟨m, d_v⟩ ≥ 0`.
pub fn pencil_point(d_v: Disk, d_w: Disk) -> Result<SpherePoint, DiskError> {
    let [m, _] = pencil_roots(d_v, d_w, tolerance::PAIR_CLASS)?;
    SpherePoint::from_lightlike(m)
}

/// The unnormalized pencil member `(μ−1) d_w − μ d_v`, `μ = t/(t−1)`,
/// orthogonal to `d_v`.
pub fn pencil_orthodisk_raw(d_v: Disk, d_w: Disk, eps: f64) -> Result<LVec4, DiskError> {
    let t = d_w.v.ip(d_v.v);
    if t.abs() >= 1.0 - eps {
        return Err(DiskError::PencilOrthodiskDegenerate(-t));
    }
    let mu = t / (t - 1.0);
    Ok(d_w.v * (mu - 1.0) - d_v.v * mu)
}

pub fn pencil_orthodisk(d_v: Disk, d_w: Disk) -> Result<Disk, DiskError> {
    let r = pencil_orthodisk_raw(d_v, d_w, tolerance::PAIR_CLASS)?;
    Ok(Disk { v: r.normalize_to_de_sitter()? })
}

pub fn disjoint_hyperbolic_distance(d1: Disk, d2: Disk) -> Result<f64, DiskError> {
    let inv = inversive_distance(d1, d2);
    if !(inv > 1.0 + tolerance::PAIR_CLASS) {
        return Err(DiskError::NotDisjoint(inv));
    }
    Ok(inv.acosh())
}
