//! The restricted Lorentz group `SO⁺(3,1)`, acting as the Möbius group on
//! disks (de Sitter points) and sphere points (light-cone rays).

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::lorentz::{columns_matrix, hyperplane_normal, CausalClass, LVec4, LorentzError};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoebiusError {
    #[error("basis is degenerate (|det| = {0:e})")]
    DegenerateBasis(f64),
    #[error("Gram matrices disagree by {0:e}")]
    GramMismatch(f64),
    #[error("configurations are related only by an improper or time-reversing Lorentz map")]
    NotRestricted,
    #[error("matrix is not Lorentz (residual {0:e})")]
    NotLorentz(f64),
    #[error("normal to the face is not spacelike")]
    NormalNotSpacelike,
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
}

pub fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0))
}

/// An element of `SO⁺(3,1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    m: Matrix4<f64>,
}

/// Infinitesimal generator of a one-parameter Möbius subgroup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LieGenerator {
    /// 1..=3 rotations about x, y, z; 4..=6 boosts along x, y, z.
    pub index: usize,
    pub matrix: Matrix4<f64>,
}

/// The six generators of the Lorentz algebra, rotations first.
pub fn lie_generators() -> [LieGenerator; 6] {
    let mut out = [LieGenerator { index: 0, matrix: Matrix4::zeros() }; 6];
    // Rotations about x, y, z act on the coordinate pairs (y,z), (z,x), (x,y).
    for (k, (a, b)) in [(1, 2), (2, 0), (0, 1)].into_iter().enumerate() {
        let mut m = Matrix4::zeros();
        m[(b, a)] = 1.0;
        m[(a, b)] = -1.0;
        out[k] = LieGenerator { index: k + 1, matrix: m };
    }
    for i in 0..3 {
        let mut m = Matrix4::zeros();
        m[(i, 3)] = 1.0;
        m[(3, i)] = 1.0;
        out[3 + i] = LieGenerator { index: 4 + i, matrix: m };
    }
    out
}

/// Largest entrywise deviation of `mᵀ η m` from `η`.
pub fn lorentz_residual(m: &Matrix4<f64>) -> f64 {
    let e = eta();
    (m.transpose() * e * m - e).amax()
}

fn form_polar_step(m: &Matrix4<f64>) -> Matrix4<f64> {
    let e = eta();
    m * (Matrix4::identity() * 3.0 - e * m.transpose() * e * m) * 0.5
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(a: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = (0..4)
        .map(|i| (0..4).map(|j| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scaled = norm;
    while scaled > 0.25 {
        scaled *= 0.5;
        squarings += 1;
    }
    let b = a / 2f64.powi(squarings as i32);
    let mut term = Matrix4::identity();
    let mut sum = Matrix4::identity();
    for k in 1..=20 {
        term = term * b / k as f64;
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

impl MoebiusMap {
    pub fn identity() -> Self {
        Self { m: Matrix4::identity() }
    }

    /// Accepts `m` if it lies in `SO⁺(3,1)` within [`tolerance::LORENTZ`].
    pub fn from_matrix(m: Matrix4<f64>) -> Result<Self, MoebiusError> {
        let r = lorentz_residual(&m);
        if !(r <= tolerance::LORENTZ) {
            return Err(MoebiusError::NotLorentz(r));
        }
        if m.determinant() <= 0.0 || m[(3, 3)] <= 0.0 {
            return Err(MoebiusError::NotRestricted);
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Result<Self, MoebiusError> {
        Self::from_matrix(Matrix4::from_fn(|i, j| rows[i][j]))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    pub fn rows(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.m[(i, j)]))
    }

    /// Rotation by `angle` about coordinate axis `axis` (0 = x, 1 = y, 2 = z).
    pub fn rotation(axis: usize, angle: f64) -> Self {
        Self { m: expm(&(lie_generators()[axis].matrix * angle)) }
    }

    /// Boost with rapidity `s` along coordinate axis `axis`.
    pub fn boost(axis: usize, s: f64) -> Self {
        let mut m = Matrix4::identity();
        m[(axis, axis)] = s.cosh();
        m[(3, 3)] = s.cosh();
        m[(axis, 3)] = s.sinh();
        m[(3, axis)] = s.sinh();
        Self { m }
    }

    pub fn apply(&self, u: LVec4) -> LVec4 {
        let v = self.m * nalgebra::Vector4::new(u.x, u.y, u.z, u.t);
        LVec4::new(v[0], v[1], v[2], v[3])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        MoebiusMap { m: self.m * other.m }
    }

    pub fn inverse(&self) -> MoebiusMap {
        let e = eta();
        MoebiusMap { m: e * self.m.transpose() * e }
    }

    pub fn residual(&self) -> f64 {
        lorentz_residual(&self.m)
    }

    /// Largest entrywise difference between two maps.
    pub fn distance(&self, other: &MoebiusMap) -> f64 {
        (self.m - other.m).amax()
    }
}

impl Serialize for MoebiusMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MoebiusMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = <[[f64; 4]; 4]>::deserialize(d)?;
        MoebiusMap::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// `exp(Σ c_k A_k)` with coefficients uniform in `[−scale, scale]`.
pub fn random_moebius(seed: u64, scale: f64) -> MoebiusMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = lie_generators();
    let mut a = Matrix4::zeros();
    for g in &gens {
        let c: f64 = if scale > 0.0 { rng.random_range(-scale..=scale) } else { 0.0 };
        a += g.matrix * c;
    }
    let mut m = expm(&a);
    if lorentz_residual(&m) > 1e-13 {
        m = form_polar_step(&m);
    }
    MoebiusMap { m }
}

/// The map sending `p[i]` to `q[i]` for a basis `p` of `R^{3,1}`.
pub fn from_matched_bases(
    p: [LVec4; 4],
    q: [LVec4; 4],
    eps: f64,
) -> Result<MoebiusMap, MoebiusError> {
    let pm = columns_matrix(p);
    let det = pm.determinant();
    if !(det.abs() > eps) {
        return Err(MoebiusError::DegenerateBasis(det));
    }
    let mut gram = 0.0_f64;
    for i in 0..4 {
        for j in i..4 {
            gram = gram.max((p[i].ip(p[j]) - q[i].ip(q[j])).abs());
        }
    }
    if !(gram < eps) {
        return Err(MoebiusError::GramMismatch(gram));
    }
    let inv = pm.try_inverse().ok_or(MoebiusError::DegenerateBasis(det))?;
    let mut m = columns_matrix(q) * inv;
    let r = lorentz_residual(&m);
    if !(r <= tolerance::LORENTZ_REPAIR_LIMIT) {
        return Err(MoebiusError::NotLorentz(r));
    }
    if r > tolerance::LORENTZ {
        m = form_polar_step(&m);
    }
    MoebiusMap::from_matrix(m)
}

/// Unit Lorentz normal to `span{p1, p2, p3}` with positive time coordinate.
///
/// When the time coordinate vanishes the first nonzero coordinate is made
/// positive instead.
pub fn complete_with_normal(p1: LVec4, p2: LVec4, p3: LVec4) -> Result<LVec4, MoebiusError> {
    let n = hyperplane_normal(p1, p2, p3)?;
    if n.classify(tolerance::CAUSAL_CLASS) != CausalClass::Spacelike {
        return Err(MoebiusError::NormalNotSpacelike);
    }
    let n = n.normalize_to_de_sitter()?;
    let scale = n.euclid_norm();
    let lead = if n.t.abs() > 1e-15 * scale {
        n.t
    } else {
        n.to_array()
            .into_iter()
            .find(|c| c.abs() > 1e-15 * scale)
            .unwrap_or(1.0)
    };
    Ok(if lead < 0.0 { -n } else { n })
}
