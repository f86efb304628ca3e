//! Minkowski 4-space `R^{3,1}` with the form `diag(+1, +1, +1, −1)`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use nalgebra::{Matrix3x4, Matrix4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LorentzError {
    #[error("vector is not spacelike (⟨u,u⟩ = {0:e})")]
    NotSpacelike(f64),
    #[error("vectors are linearly dependent (singular value ratio {0:e})")]
    DegenerateSpan(f64),
}

/// A point of `R^{3,1}`: three space coordinates and one time coordinate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LVec4 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalClass {
    Spacelike,
    Lightlike,
    Timelike,
}

impl LVec4 {
    pub const ZERO: LVec4 = LVec4::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Self { x, y, z, t }
    }

    pub const fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.z, self.t]
    }

    /// Builds a vector from its space part and time coordinate.
    pub fn from_space(space: [f64; 3], t: f64) -> Self {
        Self::new(space[0], space[1], space[2], t)
    }

    pub fn space(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// Lorentzian inner product `x·x' + y·y' + z·z' − t·t'`.
    pub fn ip(self, other: LVec4) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z - self.t * other.t
    }

    pub fn norm_sq(self) -> f64 {
        self.ip(self)
    }

    pub fn euclid_dot(self, other: LVec4) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z + self.t * other.t
    }

    pub fn euclid_norm(self) -> f64 {
        self.euclid_dot(self).sqrt()
    }

    pub fn sup_norm(self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn space_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// `η u`: negates the time coordinate, turning Lorentz pairings into
    /// Euclidean dot products.
    pub fn eta(self) -> LVec4 {
        LVec4::new(self.x, self.y, self.z, -self.t)
    }

    pub fn classify(self, eps_class: f64) -> CausalClass {
        classify(self, eps_class)
    }

    pub fn normalize_to_de_sitter(self) -> Result<LVec4, LorentzError> {
        normalize_to_de_sitter(self)
    }
}

impl fmt::Display for LVec4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.x, self.y, self.z, self.t)
    }
}

impl Index<usize> for LVec4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            3 => &self.t,
            _ => panic!("LVec4 index {i} out of range"),
        }
    }
}

impl Add for LVec4 {
    type Output = LVec4;
    fn add(self, o: LVec4) -> LVec4 {
        LVec4::new(self.x + o.x, self.y + o.y, self.z + o.z, self.t + o.t)
    }
}

impl AddAssign for LVec4 {
    fn add_assign(&mut self, o: LVec4) {
        *self = *self + o;
    }
}

impl Sub for LVec4 {
    type Output = LVec4;
    fn sub(self, o: LVec4) -> LVec4 {
        LVec4::new(self.x - o.x, self.y - o.y, self.z - o.z, self.t - o.t)
    }
}

impl Neg for LVec4 {
    type Output = LVec4;
    fn neg(self) -> LVec4 {
        LVec4::new(-self.x, -self.y, -self.z, -self.t)
    }
}

impl Mul<f64> for LVec4 {
    type Output = LVec4;
    fn mul(self, s: f64) -> LVec4 {
        LVec4::new(self.x * s, self.y * s, self.z * s, self.t * s)
    }
}

impl Mul<LVec4> for f64 {
    type Output = LVec4;
    fn mul(self, v: LVec4) -> LVec4 {
        v * self
    }
}

impl Div<f64> for LVec4 {
    type Output = LVec4;
    fn div(self, s: f64) -> LVec4 {
        LVec4::new(self.x / s, self.y / s, self.z / s, self.t / s)
    }
}

pub fn lorentz_ip(u: LVec4, v: LVec4) -> f64 {
    u.ip(v)
}

/// Causal character of `u` relative to its Euclidean length. The zero vector
/// is lightlike.
pub fn classify(u: LVec4, eps_class: f64) -> CausalClass {
    let q = u.norm_sq();
    let scale = eps_class * u.euclid_dot(u);
    if q.abs() <= scale {
        CausalClass::Lightlike
    } else if q > 0.0 {
        CausalClass::Spacelike
    } else {
        CausalClass::Timelike
    }
}

/// Rescales a spacelike vector onto the unit de Sitter sphere.
pub fn normalize_to_de_sitter(u: LVec4) -> Result<LVec4, LorentzError> {
    let q = u.norm_sq();
    if !(q > 0.0) || classify(u, tolerance::CAUSAL_CLASS) != CausalClass::Spacelike {
        return Err(LorentzError::NotSpacelike(q));
    }
    Ok(u / q.sqrt())
}

/// Lorentz normal of the hyperplane spanned by three vectors.
///
/// The Euclidean cofactor vector `c` of the 3×4 stack satisfies `c·uᵢ = 0`;
/// twisting it by `η` turns that into `⟨n, uᵢ⟩ = 0`.
pub fn hyperplane_normal(u1: LVec4, u2: LVec4, u3: LVec4) -> Result<LVec4, LorentzError> {
    let rows = [u1.to_array(), u2.to_array(), u3.to_array()];
    let stack = Matrix3x4::from_fn(|i, j| rows[i][j]);
    let sv = stack.singular_values();
    let (lo, hi) = sv
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if hi == 0.0 || lo < tolerance::DEGENERATE_SPAN * hi {
        let ratio = if hi == 0.0 { 0.0 } else { lo / hi };
        return Err(LorentzError::DegenerateSpan(ratio));
    }
    let minor = |skip: usize| -> f64 {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        let m = nalgebra::Matrix3::from_fn(|i, j| rows[i][cols[j]]);
        m.determinant()
    };
    let c = [minor(0), -minor(1), minor(2), -minor(3)];
    Ok(LVec4::from_array(c).eta())
}

/// Determinant of the 4×4 matrix whose rows are the four vectors.
pub fn det4(u1: LVec4, u2: LVec4, u3: LVec4, u4: LVec4) -> f64 {
    rows_matrix([u1, u2, u3, u4]).determinant()
}

pub(crate) fn rows_matrix(rows: [LVec4; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| rows[i][j])
}

pub(crate) fn columns_matrix(cols: [LVec4; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| cols[j][i])
}
