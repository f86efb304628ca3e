//! Deformation away from tangency and Möbius congruence fitting.
//!
//! Tangent edges are pulled apart along a straight line in measure space
//! while every other edge measure and every vertex normalization is held
//! fixed. Each point on the line is reached by minimal-norm Gauss–Newton
//! correction, which absorbs the six-dimensional Möbius gauge.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cpolyhedron::{CPolyhedron, PolyhedronError};
use crate::lorentz::{columns_matrix, det4, LVec4};
use crate::moebius::{complete_with_normal, from_matched_bases, MoebiusError, MoebiusMap};
use crate::properness::is_proper;
use crate::rigidity::{jacobian, measure, ConfigurationState};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuationError {
    #[error("edge {0} is not unitary")]
    NotUnitaryEdge(usize),
    #[error("Jacobian rank {rank} below {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("corrector did not converge (residual {residual:e} after {iterations} iterations)")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("corrected state is not certified: {0}")]
    LeftCertifiedRegion(String),
    #[error("step size fell below the minimum at t = {t} ({last_error})")]
    StepUnderflow { t: f64, last_error: String },
    #[error("polyhedra are not locally congruent (measure deviation {0:e})")]
    NotLocallyCongruent(f64),
    #[error("polyhedra have different combinatorics")]
    TriangulationMismatch,
    #[error("no usable anchor face ({0})")]
    FaceDegenerate(String),
    #[error("fitted transformations do not settle (last difference {0:e})")]
    DivergentTransformSequence(f64),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Polyhedron(#[from] PolyhedronError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum DeformDirection {
    /// Inversive distances grow from 1: tangent disks separate.
    #[default]
    Disjoint,
    /// Inversive distances shrink from 1: tangent disks overlap.
    Overlap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    /// Indices into the lexicographic edge list.
    pub unitary_edges: Vec<usize>,
    pub mu: f64,
    pub steps: usize,
    pub direction: DeformDirection,
}

impl PathSpec {
    /// The path moving every currently tangent edge of `p`.
    pub fn away_from_unitary(p: &CPolyhedron, mu: f64, steps: usize) -> Self {
        Self {
            unitary_edges: p.unitary_edges(tolerance::UNITARY),
            mu,
            steps,
            direction: DeformDirection::Disjoint,
        }
    }
}

/// `l(t)`: the measure of `state` with each listed edge moved to inversive
/// distance `1 ± μt`.
pub fn target_measure(
    state: &ConfigurationState,
    spec: &PathSpec,
    t: f64,
) -> Result<DVector<f64>, ContinuationError> {
    shifted_measure(&measure(state), spec, t)
}

fn shifted_measure(
    base: &DVector<f64>,
    spec: &PathSpec,
    t: f64,
) -> Result<DVector<f64>, ContinuationError> {
    let mut out = base.clone();
    let sign = match spec.direction {
        DeformDirection::Disjoint => 1.0,
        DeformDirection::Overlap => -1.0,
    };
    for &e in &spec.unitary_edges {
        if e >= base.len() || (-base[e] - 1.0).abs() >= tolerance::UNITARY {
            return Err(ContinuationError::NotUnitaryEdge(e));
        }
        if t != 0.0 {
            out[e] = -(1.0 + sign * spec.mu * t);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Require the result to be strictly convex, hyperbolic and proper.
    pub certify: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: tolerance::NEWTON, max_iter: tolerance::NEWTON_MAX_ITER, certify: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOutcome {
    pub state: ConfigurationState,
    pub iterations: usize,
    pub residual: f64,
}

/// Gauss–Newton with the minimal-norm step `Δ = −J⁺ r`.
pub fn newton_correct(
    guess: &ConfigurationState,
    target: &DVector<f64>,
    opts: NewtonOptions,
) -> Result<NewtonOutcome, ContinuationError> {
    let mut x = guess.clone();
    let mut iterations = 0;
    loop {
        let r = measure(&x) - target;
        let residual = r.amax();
        if residual < opts.tol {
            if opts.certify {
                certify(&x)?;
            }
            return Ok(NewtonOutcome { state: x, iterations, residual });
        }
        if iterations >= opts.max_iter || !residual.is_finite() || residual > 1e6 {
            return Err(ContinuationError::NoConvergence { residual, iterations });
        }
        let j = jacobian(&x);
        let expected = j.nrows();
        let svd = j.svd(true, true);
        let top = svd.singular_values.max();
        let rank = svd.singular_values.iter().filter(|&&s| s > tolerance::RANK * top).count();
        if rank < expected {
            return Err(ContinuationError::RankDeficient { rank, expected });
        }
        let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested V"));
        let mut coeffs = u.transpose() * &r;
        for (c, s) in coeffs.iter_mut().zip(svd.singular_values.iter()) {
            *c /= s;
        }
        let step = v_t.transpose() * coeffs;
        x = x.with_coords(x.coords() - step);
        iterations += 1;
    }
}

fn certify(x: &ConfigurationState) -> Result<CPolyhedron, ContinuationError> {
    let p = x
        .to_polyhedron()
        .map_err(|e| ContinuationError::LeftCertifiedRegion(e.to_string()))?;
    if !p.is_strictly_convex(tolerance::STRICT_CONVEXITY) {
        return Err(ContinuationError::LeftCertifiedRegion("not strictly convex".into()));
    }
    if !p.is_hyperbolic() {
        return Err(ContinuationError::LeftCertifiedRegion("not hyperbolic".into()));
    }
    match is_proper(&p) {
        Ok(r) if r.proper => Ok(p),
        Ok(_) => Err(ContinuationError::LeftCertifiedRegion("not proper".into())),
        Err(e) => Err(ContinuationError::LeftCertifiedRegion(e.to_string())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCertificate {
    pub t: f64,
    pub strictly_convex: bool,
    pub hyperbolic: bool,
    pub proper: bool,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeformationResult {
    pub ts: Vec<f64>,
    pub states: Vec<ConfigurationState>,
    pub achieved: Vec<DVector<f64>>,
    pub certificates: Vec<StepCertificate>,
    pub max_residual: f64,
}

impl DeformationResult {
    pub fn final_state(&self) -> &ConfigurationState {
        self.states.last().expect("at least the initial state")
    }
}

/// Predictor–corrector continuation over the uniform grid `t_k = k/steps`.
pub fn deform(p: &CPolyhedron, spec: &PathSpec) -> Result<DeformationResult, ContinuationError> {
    let start = ConfigurationState::from_polyhedron(p);
    let base = measure(&start);
    shifted_measure(&base, spec, 0.0)?;
    let steps = spec.steps.max(1);
    let opts = NewtonOptions { certify: true, ..NewtonOptions::default() };

    let mut ts = vec![0.0];
    let mut states = vec![start.clone()];
    let mut achieved = vec![base.clone()];
    let mut certificates = vec![StepCertificate {
        t: 0.0,
        strictly_convex: p.is_strictly_convex(tolerance::STRICT_CONVEXITY),
        hyperbolic: p.is_hyperbolic(),
        proper: is_proper(p).map(|r| r.proper).unwrap_or(false),
        residual: 0.0,
        iterations: 0,
    }];
    let mut max_residual = 0.0_f64;

    let (mut t, mut x) = (0.0_f64, start);
    for k in 1..=steps {
        let goal = k as f64 / steps as f64;
        let mut h = goal - t;
        let mut last = None;
        while t < goal {
            let t_try = if t + h >= goal - 1e-15 { goal } else { t + h };
            let attempt = shifted_measure(&base, spec, t_try)
                .and_then(|target| newton_correct(&x, &target, opts))
                .and_then(|out| {
                    let q = out.state.to_polyhedron()?;
                    let fresh = q.unitary_edges(tolerance::UNITARY);
                    if spec.unitary_edges.iter().any(|e| fresh.contains(e)) {
                        return Err(ContinuationError::LeftCertifiedRegion(
                            "deformed edge is still tangent".into(),
                        ));
                    }
                    Ok(out)
                });
            match attempt {
                Ok(out) => {
                    t = t_try;
                    x = out.state;
                    max_residual = max_residual.max(out.residual);
                    last = Some((out.residual, out.iterations));
                }
                Err(e) => {
                    h *= 0.5;
                    if h < tolerance::MIN_STEP {
                        return Err(ContinuationError::StepUnderflow { t, last_error: e.to_string() });
                    }
                }
            }
        }
        let (residual, iterations) = last.unwrap_or((0.0, 0));
        ts.push(goal);
        achieved.push(measure(&x));
        states.push(x.clone());
        certificates.push(StepCertificate {
            t: goal,
            strictly_convex: true,
            hyperbolic: true,
            proper: true,
            residual,
            iterations,
        });
    }
    Ok(DeformationResult { ts, states, achieved, certificates, max_residual })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CongruenceResult {
    pub congruent: bool,
    pub map: Option<MoebiusMap>,
    /// `max_ℓ ‖φ(p_ℓ) − q_ℓ‖∞`.
    pub residual: f64,
    /// `max |⟨q_i, φ(p_ℓ)⟩ − ⟨q_i, q_ℓ⟩|` over anchor basis vectors `q_i`.
    pub pairing_residual: f64,
    pub anchor_face: usize,
}

fn measure_deviation(p: &ConfigurationState, q: &ConfigurationState) -> Result<f64, ContinuationError> {
    if p.triangulation().faces() != q.triangulation().faces() {
        return Err(ContinuationError::TriangulationMismatch);
    }
    Ok((measure(p) - measure(q)).amax())
}

fn anchor_basis(s: &ConfigurationState, face: [usize; 3]) -> Result<[LVec4; 4], MoebiusError> {
    let [a, b, c] = face.map(|i| s.block(i));
    Ok([complete_with_normal(a, b, c)?, a, b, c])
}

/// Fits the Möbius map carrying the anchor face of `p` to that of `q`,
/// then checks it on every vertex.
pub fn fit_congruence(
    p: &ConfigurationState,
    q: &ConfigurationState,
    anchor_face: usize,
    tol: f64,
) -> Result<CongruenceResult, ContinuationError> {
    let deviation = measure_deviation(p, q)?;
    if !(deviation < tolerance::LOCAL_CONGRUENCE) {
        return Err(ContinuationError::NotLocallyCongruent(deviation));
    }
    let faces = p.triangulation().faces();
    let mut errors = Vec::new();
    for attempt in 0..4.min(faces.len()) {
        let face_id = (anchor_face + attempt) % faces.len();
        let face = faces[face_id];
        let fitted = anchor_basis(p, face).and_then(|pb| {
            let mut qb = anchor_basis(q, face)?;
            // Match orientation of the two frames so that a restricted map
            // exists whenever one does.
            if det4(pb[0], pb[1], pb[2], pb[3]).signum() != det4(qb[0], qb[1], qb[2], qb[3]).signum() {
                qb[0] = -qb[0];
            }
            from_matched_bases(pb, qb, 1e-7).map(|f| (f, pb, qb))
        });
        match fitted {
            Ok((f, pb, qb)) => {
                let mut residual = 0.0_f64;
                let mut pairing_residual = 0.0_f64;
                for l in 0..p.n() {
                    let image = f.apply(p.block(l));
                    residual = residual.max((image - q.block(l)).sup_norm());
                    for b in &qb {
                        pairing_residual =
                            pairing_residual.max((b.ip(image) - b.ip(q.block(l))).abs());
                    }
                }
                let congruent = residual < tol;
                if !congruent && improper_fit(p, q, pb, qb, tol) {
                    return Err(MoebiusError::NotRestricted.into());
                }
                return Ok(CongruenceResult {
                    congruent,
                    map: congruent.then_some(f),
                    residual,
                    pairing_residual,
                    anchor_face: face_id,
                });
            }
            Err(e) => errors.push(e),
        }
    }
    if !errors.is_empty() && errors.iter().all(|e| *e == MoebiusError::NotRestricted) {
        return Err(MoebiusError::NotRestricted.into());
    }
    Err(ContinuationError::FaceDegenerate(
        errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
    ))
}

/// Whether the orientation-reversing map on the same anchor carries every
/// vertex of `p` to `q`.
fn improper_fit(
    p: &ConfigurationState,
    q: &ConfigurationState,
    pb: [LVec4; 4],
    mut qb: [LVec4; 4],
    tol: f64,
) -> bool {
    qb[0] = -qb[0];
    let Some(inv) = columns_matrix(pb).try_inverse() else { return false };
    let m = columns_matrix(qb) * inv;
    (0..p.n()).all(|l| {
        let x = m * nalgebra::Vector4::from(p.block(l).to_array());
        (LVec4::new(x[0], x[1], x[2], x[3]) - q.block(l)).sup_norm() < tol
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViaDeformationOptions {
    pub mu: f64,
    pub steps: usize,
    pub tol: f64,
    pub direction: DeformDirection,
}

impl Default for ViaDeformationOptions {
    fn default() -> Self {
        Self { mu: 0.1, steps: 10, tol: tolerance::CONGRUENCE, direction: DeformDirection::Disjoint }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrailPoint {
    pub t: f64,
    pub congruent: bool,
    pub residual: f64,
    pub map: Option<MoebiusMap>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyPoint {
    pub t: f64,
    /// Entrywise distance to the map fitted at the previous `t`.
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViaDeformation {
    /// The fit at `t = 0`, which decides congruence.
    pub result: CongruenceResult,
    pub unitary_edges: Vec<(usize, usize)>,
    /// No tangent edges: the direct fit is all there is.
    pub skipped: bool,
    /// Fits along the deformation grid, `t > 0`.
    pub grid: Vec<TrailPoint>,
    pub grid_congruent: bool,
    /// Fits at `t₁·2^{−j}`, approaching the unitary polyhedra.
    pub cauchy: Vec<CauchyPoint>,
    pub final_difference: f64,
    pub cauchy_converged: bool,
}

pub const MAX_HALVINGS: usize = 40;

/// Decides congruence of two locally congruent polyhedra, deforming both
/// along the same path away from tangency and following the fitted maps
/// back to `t = 0`.
pub fn congruent_via_deformation(
    p: &CPolyhedron,
    q: &CPolyhedron,
    opts: ViaDeformationOptions,
) -> Result<ViaDeformation, ContinuationError> {
    let (sp, sq) = (ConfigurationState::from_polyhedron(p), ConfigurationState::from_polyhedron(q));
    let deviation = measure_deviation(&sp, &sq)?;
    if !(deviation < tolerance::LOCAL_CONGRUENCE) {
        return Err(ContinuationError::NotLocallyCongruent(deviation));
    }
    let unitary = p.unitary_edges(tolerance::UNITARY);
    let unitary_pairs = unitary.iter().map(|&e| p.triangulation().edges()[e]).collect();
    if unitary.is_empty() {
        let result = fit_congruence(&sp, &sq, 0, opts.tol)?;
        return Ok(ViaDeformation {
            result,
            unitary_edges: unitary_pairs,
            skipped: true,
            grid: Vec::new(),
            grid_congruent: true,
            cauchy: Vec::new(),
            final_difference: 0.0,
            cauchy_converged: true,
        });
    }
    let spec = PathSpec { unitary_edges: unitary, mu: opts.mu, steps: opts.steps, direction: opts.direction };

    let (dp, dq) = std::thread::scope(|s| {
        let hp = s.spawn(|| deform(p, &spec));
        let hq = s.spawn(|| deform(q, &spec));
        (hp.join().expect("deformation thread"), hq.join().expect("deformation thread"))
    });
    let (dp, dq) = (dp?, dq?);

    let mut grid = Vec::new();
    for k in 1..dp.states.len() {
        let r = fit_congruence(&dp.states[k], &dq.states[k], 0, opts.tol)?;
        grid.push(TrailPoint { t: dp.ts[k], congruent: r.congruent, residual: r.residual, map: r.map });
    }
    let grid_congruent = grid.iter().all(|g| g.congruent);

    let base_p = measure(&sp);
    let plain = NewtonOptions::default();
    let mut cauchy = Vec::new();
    let mut previous: Option<MoebiusMap> = None;
    let mut final_difference = f64::INFINITY;
    let mut t = 1.0 / spec.steps.max(1) as f64;
    for _ in 0..=MAX_HALVINGS {
        let target = shifted_measure(&base_p, &spec, t)?;
        let pt = newton_correct(&sp, &target, plain)?;
        let qt = newton_correct(&sq, &target, plain)?;
        let fit = fit_congruence(&pt.state, &qt.state, 0, opts.tol)?;
        let Some(map) = fit.map else { break };
        if let Some(prev) = previous {
            let difference = map.distance(&prev);
            cauchy.push(CauchyPoint { t, difference });
            final_difference = difference;
            if difference < tolerance::CAUCHY {
                break;
            }
        }
        previous = Some(map);
        t *= 0.5;
    }
    let cauchy_converged = final_difference < tolerance::CAUCHY;
    if grid_congruent && !cauchy_converged {
        return Err(ContinuationError::DivergentTransformSequence(final_difference));
    }

    let result = fit_congruence(&sp, &sq, 0, opts.tol)?;
    Ok(ViaDeformation {
        result,
        unitary_edges: unitary_pairs,
        skipped: false,
        grid,
        grid_congruent,
        cauchy,
        final_difference,
        cauchy_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::moebius::random_moebius;

    fn state(p: &CPolyhedron) -> ConfigurationState {
        ConfigurationState::from_polyhedron(p)
    }

    #[test]
    fn target_examples() {
        let p = generate::tetra_koebe();
        let s = state(&p);
        let spec = PathSpec::away_from_unitary(&p, 0.1, 10);
        assert_eq!(target_measure(&s, &spec, 0.0).unwrap(), measure(&s));
        let l = target_measure(&s, &spec, 1.0).unwrap();
        for k in 0..6 {
            assert!((l[k] + 1.1).abs() < 1e-15);
        }
        for k in 6..10 {
            assert!((l[k] - 1.0).abs() < 1e-14);
        }
        let partial = PathSpec { unitary_edges: vec![0, 3], ..spec.clone() };
        let l = target_measure(&s, &partial, 0.5).unwrap();
        let f = measure(&s);
        for k in [1, 2, 4, 5, 6, 7, 8, 9] {
            assert_eq!(l[k].to_bits(), f[k].to_bits());
        }
        let h = generate::tetra_hyperideal(0.7).unwrap();
        assert_eq!(
            target_measure(&state(&h), &partial, 0.5),
            Err(ContinuationError::NotUnitaryEdge(0))
        );
    }

    #[test]
    fn newton_fixed_point() {
        let s = state(&generate::octa_koebe());
        let out = newton_correct(&s, &measure(&s), NewtonOptions::default()).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.state, s);
    }

    #[test]
    fn newton_reaches_closed_form_instance() {
        let p = generate::tetra_koebe();
        let s = state(&p);
        let spec = PathSpec::away_from_unitary(&p, 0.01, 1);
        let target = target_measure(&s, &spec, 1.0).unwrap();
        let out = newton_correct(&s, &target, NewtonOptions::default()).unwrap();
        assert!((measure(&out.state) - &target).amax() < tolerance::NEWTON);
        let oracle = generate::tetra_hyperideal(generate::tetra_offset_for_inv(1.01)).unwrap();
        let r = fit_congruence(&out.state, &state(&oracle), 0, 1e-7).unwrap();
        assert!(r.congruent, "{r:?}");
    }

    #[test]
    fn newton_rejects_a_huge_jump() {
        let p = generate::tetra_koebe();
        let s = state(&p);
        let spec = PathSpec::away_from_unitary(&p, 10.0, 1);
        let target = target_measure(&s, &spec, 1.0).unwrap();
        let opts = NewtonOptions { certify: true, max_iter: 5, ..NewtonOptions::default() };
        assert!(matches!(
            newton_correct(&s, &target, opts),
            Err(ContinuationError::NoConvergence { .. } | ContinuationError::LeftCertifiedRegion(_))
        ));
    }

    #[test]
    fn deform_koebe_tetrahedron() {
        let p = generate::tetra_koebe();
        let spec = PathSpec::away_from_unitary(&p, 0.1, 10);
        let d = deform(&p, &spec).unwrap();
        assert_eq!(d.states.len(), 11);
        let fin = measure(d.final_state());
        for k in 0..6 {
            assert!((fin[k] + 1.1).abs() < 1e-10);
        }
        let oracle = generate::tetra_hyperideal(generate::tetra_offset_for_inv(1.1)).unwrap();
        assert!((generate::tetra_offset_for_inv(1.1) - 0.604217).abs() < 1e-6);
        let r = fit_congruence(d.final_state(), &state(&oracle), 0, 1e-7).unwrap();
        assert!(r.congruent);
        for s in &d.states[1..] {
            assert!(s.to_polyhedron().unwrap().unitary_edges(1e-6).is_empty());
        }
    }

    #[test]
    fn deform_octahedron_and_noop() {
        let p = generate::octa_koebe();
        let spec = PathSpec::away_from_unitary(&p, 0.05, 4);
        assert_eq!(spec.unitary_edges.len(), 12);
        let d = deform(&p, &spec).unwrap();
        assert!(d.max_residual < tolerance::NEWTON);

        let h = generate::tetra_hyperideal(0.7).unwrap();
        let spec = PathSpec::away_from_unitary(&h, 0.1, 3);
        assert!(spec.unitary_edges.is_empty());
        let d = deform(&h, &spec).unwrap();
        for s in &d.states {
            assert_eq!(s, &state(&h));
        }
    }

    #[test]
    fn fit_examples() {
        let p = generate::octa_koebe();
        let f0 = random_moebius(17, 1.0);
        let q = p.transform(&f0).unwrap();
        let r = fit_congruence(&state(&p), &state(&q), 0, tolerance::CONGRUENCE).unwrap();
        assert!(r.congruent);
        assert!(r.residual < 1e-9);
        assert!(r.map.unwrap().distance(&f0) < 1e-8);

        let same = fit_congruence(&state(&p), &state(&p), 3, tolerance::CONGRUENCE).unwrap();
        assert!(same.residual < 1e-12);
        assert!(same.map.unwrap().distance(&MoebiusMap::identity()) < 1e-12);

        let h = generate::tetra_hyperideal(0.7).unwrap();
        assert!(matches!(
            fit_congruence(&state(&generate::tetra_koebe()), &state(&h), 0, tolerance::CONGRUENCE),
            Err(ContinuationError::NotLocallyCongruent(_))
        ));
    }

    #[test]
    fn differently_placed_koebe_tetrahedra() {
        // Same closed form, rotated and boosted independently.
        let a = generate::transported(&generate::tetra_koebe(), 100, 1.5);
        let b = generate::transported(&generate::tetra_koebe(), 200, 0.5);
        let r = fit_congruence(&state(&a), &state(&b), 0, 1e-7).unwrap();
        assert!(r.congruent && r.residual < 1e-7);
    }

    #[test]
    fn mirror_image_is_not_restricted() {
        let p = generate::random_shallow(6, 5).unwrap();
        let mirror = |v: LVec4| LVec4::new(-v.x, v.y, v.z, v.t);
        // Reflecting reverses orientation, so faces must be reversed too.
        let faces: Vec<[usize; 3]> = p.triangulation().faces().iter().map(|f| [f[0], f[2], f[1]]).collect();
        let tri = crate::cpolyhedron::Triangulation::new(p.n(), faces).unwrap();
        let q = CPolyhedron::new(tri.clone(), p.vectors().into_iter().map(mirror).collect()).unwrap();
        let p2 = CPolyhedron::new(tri, p.vectors()).unwrap();
        assert_eq!(
            fit_congruence(&state(&p2), &state(&q), 0, tolerance::CONGRUENCE),
            Err(ContinuationError::Moebius(MoebiusError::NotRestricted))
        );
    }

    #[test]
    fn via_deformation_transport() {
        let p = generate::tetra_koebe();
        let f0 = random_moebius(3, 1.0);
        let q = p.transform(&f0).unwrap();
        let r = congruent_via_deformation(&p, &q, ViaDeformationOptions::default()).unwrap();
        assert!(r.result.congruent);
        assert!(!r.skipped);
        assert!(r.grid_congruent);
        assert!(r.cauchy_converged);
        assert!(r.final_difference < tolerance::CAUCHY);
        assert!(r.result.map.unwrap().distance(&f0) < 1e-7);
    }

    #[test]
    fn via_deformation_without_tangencies() {
        let p = generate::tetra_hyperideal(0.75).unwrap();
        let q = generate::transported(&p, 8, 1.0);
        let r = congruent_via_deformation(&p, &q, ViaDeformationOptions::default()).unwrap();
        assert!(r.skipped && r.result.congruent);
        assert!(r.grid.is_empty() && r.cauchy.is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]
            #[test]
            fn congruence_is_symmetric(seed in any::<u64>(), n in 4usize..9) {
                let p = generate::random_shallow(n, seed).unwrap();
                let q = generate::transported(&p, seed ^ 0x5555, 1.0);
                let (sp, sq) = (state(&p), state(&q));
                let ab = fit_congruence(&sp, &sq, 0, tolerance::CONGRUENCE).unwrap();
                let ba = fit_congruence(&sq, &sp, 0, tolerance::CONGRUENCE).unwrap();
                prop_assert!(ab.congruent && ba.congruent);
                let (f, g) = (ab.map.unwrap(), ba.map.unwrap());
                prop_assert!(f.inverse().distance(&g) < 1e-8);
                let other = fit_congruence(&sp, &sq, 1, tolerance::CONGRUENCE).unwrap();
                prop_assert!(other.map.unwrap().distance(&f) < 1e-7);
            }

            #[test]
            fn deformation_fidelity(seed in any::<u64>()) {
                let p = generate::transported(&generate::octa_koebe(), seed, 0.7);
                let spec = PathSpec::away_from_unitary(&p, 0.05, 3);
                let d = deform(&p, &spec).unwrap();
                let s0 = state(&p);
                for (t, s) in d.ts.iter().zip(&d.states) {
                    let l = target_measure(&s0, &spec, *t).unwrap();
                    prop_assert!((measure(s) - l).amax() < 1e-10);
                    let q = s.to_polyhedron().unwrap();
                    prop_assert!(q.is_strictly_convex(tolerance::STRICT_CONVEXITY));
                    prop_assert!(q.is_hyperbolic());
                    prop_assert!(is_proper(&q).unwrap().proper);
                    if *t > 0.0 {
                        prop_assert!(q.unitary_edges(1e-6).is_empty());
                    }
                }
            }
        }
    }
}
