use proptest::prelude::*;
use serde_json::json;

use cpoly_core::continuation::{congruent_via_deformation, deform, fit_congruence, PathSpec, ViaDeformationOptions};
use cpoly_core::format;
use cpoly_core::generate;
use cpoly_core::properness::is_proper;
use cpoly_core::render::{render, RenderSpec};
use cpoly_core::rigidity::{jacobian, measure, numerical_rank};
use cpoly_core::{analyze, random_moebius, tolerance, ConfigurationState};

#[test]
fn file_round_trip_preserves_analysis() {
    let p = generate::random_shallow(9, 4).unwrap();
    let text = format::to_string(&p, json!({"note": "pipeline"}));
    let back = format::from_str(&text).unwrap();
    assert_eq!(back.metadata["note"], "pipeline");
    let (a, b) = (analyze(&p), analyze(&back.polyhedron));
    assert_eq!(a.proper, b.proper);
    assert_eq!(a.shallowness, b.shallowness);
    assert_eq!(a.strictly_convex, b.strictly_convex);
}

#[test]
fn deformed_koebe_is_rigid_and_matches_transport() {
    let p = generate::tetra_koebe();
    let d = deform(&p, &PathSpec::away_from_unitary(&p, 0.2, 8)).unwrap();
    assert!(d.certificates.iter().all(|c| c.strictly_convex && c.hyperbolic && c.proper));
    let fin = d.final_state().to_polyhedron().unwrap();
    let r = numerical_rank(&jacobian(d.final_state()), tolerance::RANK);
    assert!(r.full());

    let f = random_moebius(21, 0.7);
    let moved = fin.transform(&f).unwrap();
    let fit = fit_congruence(d.final_state(), &ConfigurationState::from_polyhedron(&moved), 0, 1e-9).unwrap();
    assert!(fit.congruent);
    assert!(fit.map.unwrap().distance(&f) < 1e-9);
}

#[test]
fn octahedron_via_deformation() {
    let p = generate::octa_koebe();
    let q = generate::transported(&p, 12, 1.2);
    let r = congruent_via_deformation(&p, &q, ViaDeformationOptions::default()).unwrap();
    assert!(r.result.congruent);
    assert_eq!(r.unitary_edges.len(), 12);
    assert!(r.grid.iter().all(|g| g.congruent));
}

#[test]
fn star_renders_and_fails_properness() {
    let star = generate::deep_overlap_star();
    assert!(!is_proper(&star).unwrap().proper);
    let svg = render(&star, &RenderSpec::default()).unwrap().svg;
    assert!(svg.contains("<metadata>"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transported_shallow_instances_keep_measures(n in 4usize..10, seed in 0u64..500, scale in 0.1f64..1.5) {
        let p = generate::random_shallow(n, seed).unwrap();
        let q = generate::transported(&p, seed + 1, scale);
        let (fp, fq) = (
            measure(&ConfigurationState::from_polyhedron(&p)),
            measure(&ConfigurationState::from_polyhedron(&q)),
        );
        for (a, b) in fp.iter().zip(fq.iter()) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
        }
        prop_assert!(is_proper(&q).unwrap().proper);
    }
}
