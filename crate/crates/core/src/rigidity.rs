//! The inversive measure function `f: R^{4n} → R^{4n−6}`, its Jacobian, and
//! rank certification.
//!
//! Measure vectors list one entry `⟨p_i, p_j⟩` per edge in lexicographic
//! edge order, followed by one entry `⟨p_i, p_i⟩` per vertex.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cpolyhedron::{CPolyhedron, ConvexityReport, PolyhedronError, Triangulation};
use crate::lorentz::LVec4;
use crate::moebius::lie_generators;
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RigidityError {
    #[error("configuration is not strictly convex; rank {} of {} carries no rigidity claim", rank.rank, rank.expected)]
    NotStrictlyConvex { rank: RankReport, convexity: ConvexityReport },
    #[error("expected {expected} coordinates, got {got}")]
    WrongLength { expected: usize, got: usize },
}

/// A point of the configuration space: four coordinates per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigurationState {
    tri: Triangulation,
    coords: DVector<f64>,
}

impl ConfigurationState {
    pub fn new(tri: Triangulation, coords: DVector<f64>) -> Result<Self, RigidityError> {
        let expected = 4 * tri.n();
        if coords.len() != expected {
            return Err(RigidityError::WrongLength { expected, got: coords.len() });
        }
        Ok(Self { tri, coords })
    }

    pub fn from_polyhedron(p: &CPolyhedron) -> Self {
        let coords = DVector::from_iterator(
            4 * p.n(),
            p.vectors().into_iter().flat_map(|v| v.to_array()),
        );
        Self { tri: p.triangulation().clone(), coords }
    }

    pub fn to_polyhedron(&self) -> Result<CPolyhedron, PolyhedronError> {
        CPolyhedron::new(self.tri.clone(), self.blocks())
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.tri.n()
    }

    pub fn block(&self, i: usize) -> LVec4 {
        LVec4::new(
            self.coords[4 * i],
            self.coords[4 * i + 1],
            self.coords[4 * i + 2],
            self.coords[4 * i + 3],
        )
    }

    pub fn blocks(&self) -> Vec<LVec4> {
        (0..self.n()).map(|i| self.block(i)).collect()
    }

    pub fn with_coords(&self, coords: DVector<f64>) -> Self {
        Self { tri: self.tri.clone(), coords }
    }

    /// Whether every block is a unit de Sitter vector to 1e−10.
    pub fn is_normalized(&self) -> bool {
        self.blocks()
            .iter()
            .all(|v| (v.norm_sq() - 1.0).abs() <= tolerance::DE_SITTER_MEMBERSHIP)
    }
}

pub fn measure(state: &ConfigurationState) -> DVector<f64> {
    let tri = state.triangulation();
    let p = state.blocks();
    let m = tri.edges().len();
    let mut out = DVector::zeros(m + tri.n());
    for (k, &(i, j)) in tri.edges().iter().enumerate() {
        out[k] = p[i].ip(p[j]);
    }
    for (i, v) in p.iter().enumerate() {
        out[m + i] = v.norm_sq();
    }
    out
}

pub fn jacobian(state: &ConfigurationState) -> DMatrix<f64> {
    let tri = state.triangulation();
    let p = state.blocks();
    let m = tri.edges().len();
    let n = tri.n();
    let mut j = DMatrix::zeros(m + n, 4 * n);
    for (k, &(a, b)) in tri.edges().iter().enumerate() {
        for c in 0..4 {
            j[(k, 4 * a + c)] = p[b].eta()[c];
            j[(k, 4 * b + c)] = p[a].eta()[c];
        }
    }
    for (i, v) in p.iter().enumerate() {
        for c in 0..4 {
            j[(m + i, 4 * i + c)] = 2.0 * v.eta()[c];
        }
    }
    j
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    /// Number of rows, `4n − 6` for a measure Jacobian.
    pub expected: usize,
    /// Singular values in descending order, padded with zeros to the
    /// column count.
    pub singular_values: Vec<f64>,
    /// `σ_expected / max(σ_{expected+1}, ε_machine·σ_1)`.
    pub gap: f64,
}

impl RankReport {
    pub fn full(&self) -> bool {
        self.rank == self.expected
    }
}

fn padded(j: &DMatrix<f64>) -> DMatrix<f64> {
    let size = j.nrows().max(j.ncols());
    let mut out = DMatrix::zeros(size, size);
    out.view_mut((0, 0), (j.nrows(), j.ncols())).copy_from(j);
    out
}

pub fn numerical_rank(j: &DMatrix<f64>, tau: f64) -> RankReport {
    let sv: Vec<f64> = padded(j).singular_values().iter().copied().collect();
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > tau * top).count();
    let expected = j.nrows().min(j.ncols());
    let below = sv.get(expected).copied().unwrap_or(0.0);
    let gap = if expected == 0 {
        f64::INFINITY
    } else {
        sv[expected - 1] / below.max(f64::EPSILON * top)
    };
    RankReport { rank, expected, singular_values: sv, gap }
}

/// Orthonormal basis of the right null space, from the full SVD of the
/// zero-padded square matrix.
pub fn kernel_basis(j: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let svd = padded(j).svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let top = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = (0..svd.singular_values.len())
        .filter(|&k| !(svd.singular_values[k] > tau * top))
        .map(|k| v_t.row(k).transpose().into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(j.ncols(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// The six infinitesimal Möbius motions; flex `k` assigns `A_k p_i` to
/// block `i`.
pub fn trivial_flex_basis(state: &ConfigurationState) -> Vec<DVector<f64>> {
    let p = state.blocks();
    lie_generators()
        .iter()
        .map(|g| {
            let mut out = DVector::zeros(4 * p.len());
            for (i, v) in p.iter().enumerate() {
                let w = g.matrix * nalgebra::Vector4::new(v.x, v.y, v.z, v.t);
                out.rows_mut(4 * i, 4).copy_from(&w);
            }
            out
        })
        .collect()
}

/// Largest distance of a unit kernel vector from the span of the trivial
/// flexes, together with the kernel dimension.
pub fn kernel_flex_residual(state: &ConfigurationState) -> (usize, f64) {
    let kernel = kernel_basis(&jacobian(state), tolerance::RANK);
    let flexes = DMatrix::from_columns(&trivial_flex_basis(state));
    let q = flexes.qr().q();
    let mut worst = 0.0_f64;
    for c in kernel.column_iter() {
        let r = &c - &q * (q.transpose() * &c);
        worst = worst.max(r.norm());
    }
    (kernel.ncols(), worst)
}

/// Gram determinant of the normalized trivial flexes.
pub fn flex_gram_determinant(state: &ConfigurationState) -> f64 {
    let cols: Vec<DVector<f64>> =
        trivial_flex_basis(state).into_iter().map(|f| f.normalize()).collect();
    let m = DMatrix::from_columns(&cols);
    (m.transpose() * m).determinant()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub rigid: bool,
    pub rank: RankReport,
}

/// Rank `4n − 6` of the measure Jacobian at a strictly convex polyhedron.
pub fn is_infinitesimally_rigid(p: &CPolyhedron) -> Result<RigidityReport, RigidityError> {
    let state = ConfigurationState::from_polyhedron(p);
    let rank = numerical_rank(&jacobian(&state), tolerance::RANK);
    let convexity = p.convexity(tolerance::STRICT_CONVEXITY);
    if !convexity.strictly_convex {
        return Err(RigidityError::NotStrictlyConvex { rank, convexity });
    }
    Ok(RigidityReport { rigid: rank.full(), rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::moebius::random_moebius;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn state(p: &CPolyhedron) -> ConfigurationState {
        ConfigurationState::from_polyhedron(p)
    }

    fn random_state(tri: &Triangulation, seed: u64) -> ConfigurationState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = DVector::from_fn(4 * tri.n(), |_, _| rng.random_range(-2.0..2.0));
        ConfigurationState::new(tri.clone(), coords).unwrap()
    }

    #[test]
    fn measure_examples() {
        let f = measure(&state(&generate::tetra_koebe()));
        assert_eq!(f.len(), 10);
        for k in 0..6 {
            assert!((f[k] + 1.0).abs() < 1e-14);
        }
        for k in 6..10 {
            assert!((f[k] - 1.0).abs() < 1e-14);
        }
        let f = measure(&state(&generate::tetra_hyperideal(0.7).unwrap()));
        for k in 0..6 {
            assert!((f[k] + (0.49 + 1.0 / 3.0) / 0.51).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobian_structure() {
        let s = state(&generate::tetra_koebe());
        let j = jacobian(&s);
        assert_eq!((j.nrows(), j.ncols()), (10, 16));
        for r in 0..10 {
            let nz = j.row(r).iter().filter(|x| **x != 0.0).count();
            assert!(nz <= if r < 6 { 8 } else { 4 });
        }
        // Structural pattern: edge (0,1) touches only blocks 0 and 1.
        assert!(j.row(0).columns(8, 8).iter().all(|x| *x == 0.0));
        let doubled = s.with_coords(s.coords() * 2.0);
        assert!((jacobian(&doubled) - j * 2.0).amax() < 1e-15);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let tri = generate::octahedron_triangulation();
        for seed in 0..5 {
            let s = random_state(&tri, seed);
            let j = jacobian(&s);
            let h = 1e-6;
            for c in 0..s.coords().len() {
                let mut plus = s.coords().clone();
                let mut minus = s.coords().clone();
                plus[c] += h;
                minus[c] -= h;
                let fd = (measure(&s.with_coords(plus)) - measure(&s.with_coords(minus))) / (2.0 * h);
                assert!((fd - j.column(c)).amax() < 1e-7);
            }
        }
    }

    #[test]
    fn koebe_ranks() {
        let r = numerical_rank(&jacobian(&state(&generate::tetra_koebe())), tolerance::RANK);
        assert_eq!(r.rank, 10);
        assert_eq!(r.singular_values.len(), 16);
        assert!(r.singular_values[10] / r.singular_values[0] < 1e-12);
        assert!(r.gap > 1e6);
        let r = numerical_rank(&jacobian(&state(&generate::octa_koebe())), tolerance::RANK);
        assert_eq!(r.rank, 18);
    }

    #[test]
    fn coincident_vertices_drop_rank() {
        let p = generate::tetra_koebe();
        let mut s = state(&p);
        let v0 = s.block(0);
        s.coords.rows_mut(4, 4).copy_from(&nalgebra::Vector4::from(v0.to_array()));
        let r = numerical_rank(&jacobian(&s), tolerance::RANK);
        assert!(r.rank < 10);
    }

    #[test]
    fn flexes_span_the_kernel() {
        for p in [generate::tetra_koebe(), generate::octa_koebe(), generate::tetra_hyperideal(0.7).unwrap()] {
            let s = state(&p);
            let j = jacobian(&s);
            for f in trivial_flex_basis(&s) {
                assert!((&j * f).amax() < 1e-10);
            }
            assert!(flex_gram_determinant(&s) > 1e-9);
            let (dim, resid) = kernel_flex_residual(&s);
            assert_eq!(dim, 6);
            assert!(resid < 1e-8);
        }
    }

    #[test]
    fn rigidity_examples() {
        assert!(is_infinitesimally_rigid(&generate::tetra_koebe()).unwrap().rigid);
        assert!(is_infinitesimally_rigid(&generate::tetra_hyperideal(0.7).unwrap()).unwrap().rigid);
        for seed in 0..5 {
            let p = generate::perturb(&generate::tetra_koebe(), 1e-4, seed).unwrap();
            assert!(is_infinitesimally_rigid(&p).unwrap().rigid);
        }
    }

    #[test]
    fn block_scaling() {
        let p = generate::tetra_hyperideal(0.7).unwrap();
        let s = state(&p);
        let f = measure(&s);
        let mut c = s.coords().clone();
        let scale = 1.7;
        for k in 0..4 {
            c[4 + k] *= scale;
        }
        let g = measure(&s.with_coords(c));
        let tri = s.triangulation();
        for (k, &(i, j)) in tri.edges().iter().enumerate() {
            let expect = if i == 1 || j == 1 { f[k] * scale } else { f[k] };
            assert!((g[k] - expect).abs() < 1e-13);
        }
        for v in 0..4 {
            let expect = if v == 1 { f[6 + v] * scale * scale } else { f[6 + v] };
            assert!((g[6 + v] - expect).abs() < 1e-13);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn measure_is_moebius_invariant(seed in any::<u64>(), which in 0usize..2) {
                let p = if which == 0 { generate::tetra_koebe() } else { generate::octa_koebe() };
                let q = p.transform(&random_moebius(seed, 1.0)).unwrap();
                prop_assert!((measure(&state(&p)) - measure(&state(&q))).amax() < 1e-10);
                let rp = numerical_rank(&jacobian(&state(&p)), tolerance::RANK).rank;
                let rq = numerical_rank(&jacobian(&state(&q)), tolerance::RANK).rank;
                prop_assert_eq!(rp, rq);
            }

            #[test]
            fn flexes_annihilate_measure(seed in any::<u64>()) {
                let s = random_state(&generate::octahedron_triangulation(), seed);
                let j = jacobian(&s);
                for f in trivial_flex_basis(&s) {
                    prop_assert!((&j * &f).amax() <= 1e-9 * j.norm() * f.norm());
                }
            }

            #[test]
            fn derivative_along_a_path(seed in any::<u64>()) {
                let tri = generate::tetrahedron_triangulation();
                let a = random_state(&tri, seed);
                let b = random_state(&tri, seed.wrapping_add(1));
                let dir = b.coords() - a.coords();
                let t = 0.3;
                let at = |s: f64| a.with_coords(a.coords() + &dir * s);
                let h = 1e-6;
                let fd = (measure(&at(t + h)) - measure(&at(t - h))) / (2.0 * h);
                let an = jacobian(&at(t)) * &dir;
                prop_assert!((fd - an).amax() < 1e-6);
            }
        }
    }
}
