use std::f64::consts::{LN_2, PI};
use torsion_core::analytic::{Boundary, ZetaEngine};
use torsion_core::glue::*;
use torsion_core::hodge::hodge_decompose;
use torsion_core::linalg::{c, eye, CMat};
use torsion_core::morse::Variant;
use torsion_core::quadrature::QuadratureSpec;
use torsion_core::TorsionError;

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

const ENGINE: ZetaEngine = ZetaEngine::ClosedForm;

#[test]
fn flagship_values() {
    let s = GluingScenario::circle(2.0, 0.5, eye(1)).unwrap();
    let r = verify_gluing_degree0(&s, &quad(), ENGINE).unwrap();
    assert!((r.torsion_z + LN_2).abs() < 1e-12);
    assert!((r.torsion_z1_abs + 0.5 * LN_2).abs() < 1e-12);
    assert!((r.torsion_z2_rel + 0.5 * LN_2).abs() < 1e-12);
    assert!((r.defect - LN_2).abs() < 1e-15);
    assert!((r.torsion_mv + LN_2).abs() < 1e-9);
    let lhs = r.torsion_z - r.torsion_z1_abs - r.torsion_z2_rel;
    assert!(lhs.abs() < 1e-12);
    assert!(r.residual < 1e-9);
}

/// With `λ ≠ 1` only the connecting map `H⁰(Z₁) → H¹(Z₂, Y)` survives, with
/// orthonormal matrix entry `(λ − 1)/√(ℓ₁ℓ₂)` between degrees 2 and 3.
fn nontrivial_sequence_torsion(theta: f64, l1: f64, l2: f64) -> f64 {
    let lam = torsion_core::linalg::C64::from_polar(1.0, theta);
    -(lam - 1.0).norm().ln() + 0.5 * (l1 * l2).ln()
}

#[test]
fn sequence_torsion_with_holonomy() {
    for &length in &[1.0, 2.5] {
        for &split in &[0.2, 0.5, 0.9] {
            for &theta in &[0.3, PI / 2.0, PI, 5.0] {
                let s = GluingScenario::circle(length, split, holonomy(theta, 1)).unwrap();
                let mv = build_mv(&s, &quad()).unwrap();
                let expected = nontrivial_sequence_torsion(theta, split * length, (1.0 - split) * length);
                assert!((mv.torsion - expected).abs() < 1e-9, "L={length} split={split} θ={theta}");
                assert_eq!(mv.dims().iter().sum::<usize>(), 2);
            }
        }
    }
}

#[test]
fn sequence_torsion_is_additive_in_rank() {
    for &theta in &[0.0, 1.0, PI] {
        let s2 = GluingScenario::circle(3.0, 0.4, holonomy(theta, 2)).unwrap();
        let a = GluingScenario::circle(3.0, 0.4, holonomy(theta, 1)).unwrap();
        let b = GluingScenario::circle(3.0, 0.4, eye(1)).unwrap();
        let t = |s: &GluingScenario| build_mv(s, &quad()).unwrap().torsion;
        assert!((t(&s2) - t(&a) - t(&b)).abs() < 1e-9);
    }
}

#[test]
fn gluing_sweep() {
    let scenarios = sweep();
    assert_eq!(scenarios.len(), 72);
    for s in &scenarios {
        let r = verify_gluing_degree0(s, &quad(), ENGINE).unwrap();
        assert!(r.residual < 1e-7, "{s:?}: {r:?}");
    }
}

#[test]
fn swapped_scenarios_also_glue() {
    for s in sweep().iter().step_by(5) {
        let w = s.swapped().unwrap();
        assert!((w.split - (1.0 - s.split)).abs() < 1e-15);
        let r = verify_gluing_degree0(&w, &quad(), ENGINE).unwrap();
        assert!(r.residual < 1e-7);
    }
    let i = GluingScenario::interval(1.0, 0.3, Boundary::Abs, Boundary::Rel, 1).unwrap();
    assert_eq!(i.swapped().unwrap().shape, Shape::Interval { left: Boundary::Rel, right: Boundary::Abs });
}

#[test]
fn intervals_glue_with_half_defect() {
    for left in [Boundary::Abs, Boundary::Rel] {
        for right in [Boundary::Abs, Boundary::Rel] {
            for rank in 1..=2 {
                let s = GluingScenario::interval(1.7, 0.35, left, right, rank).unwrap();
                assert_eq!(s.chi_y(), 1);
                let r = verify_gluing_degree0(&s, &quad(), ENGINE).unwrap();
                assert!((r.defect - 0.5 * LN_2 * rank as f64).abs() < 1e-15);
                assert!(r.residual < 1e-7, "{left:?} {right:?}: {r:?}");
            }
        }
    }
}

#[test]
fn subdivision_does_not_change_the_sequence_torsion() {
    let base = GluingScenario::circle(2.0, 0.3, holonomy(1.2, 2)).unwrap();
    let t1 = build_mv(&base, &quad()).unwrap().torsion;
    for k in 2..=4 {
        let s = base.clone().with_subdivisions(k).unwrap();
        let model = s.cell_model();
        assert_eq!(model.vertices.len(), 2 * k);
        assert_eq!(model.edges.len(), 2 * k);
        assert!((build_mv(&s, &quad()).unwrap().torsion - t1).abs() < 1e-9);
    }
    let i = GluingScenario::interval(1.0, 0.5, Boundary::Rel, Boundary::Abs, 1).unwrap().with_subdivisions(3).unwrap();
    let model = i.cell_model();
    assert_eq!(model.vertices.len(), 7);
    assert_eq!(model.vertices.iter().filter(|v| v.excluded).count(), 1);
}

#[test]
fn cell_model_cohomology_matches_the_fiber() {
    for &theta in &[0.0, 2.0] {
        let s = GluingScenario::circle(1.0, 0.5, holonomy(theta, 1)).unwrap().with_subdivisions(2).unwrap();
        let data = s.cell_model().morse_data().unwrap();
        let b = |v| hodge_decompose(&data.thom_smale(v).unwrap().complex).unwrap().betti;
        let full = if theta == 0.0 { vec![1, 1] } else { vec![0, 0] };
        assert_eq!(b(Variant::Full), full);
        assert_eq!(b(Variant::AbsoluteZ1), vec![1, 0]);
        assert_eq!(b(Variant::RelativeZ2), vec![0, 1]);
    }
}

#[test]
fn morse_side_identities_hold() {
    let cases = [
        GluingScenario::circle(2.0, 0.5, eye(1)).unwrap(),
        GluingScenario::circle(1.0, 0.25, holonomy(PI / 3.0, 1)).unwrap(),
        GluingScenario::circle(4.0, 0.75, holonomy(PI, 2)).unwrap(),
        GluingScenario::circle(1.5, 0.4, holonomy(0.0, 2)).unwrap().with_subdivisions(2).unwrap(),
    ];
    for s in &cases {
        let ids = verify_morse_side(s, ENGINE).unwrap();
        assert!(ids.len() >= 10);
        for id in &ids {
            assert!(id.residual() < 1e-9, "{}: {} vs {}", id.name, id.lhs, id.rhs);
        }
        let defect = ids.iter().find(|i| i.name == "boundary_defect_plus").unwrap();
        assert!((defect.rhs + LN_2 * s.rank() as f64).abs() < 1e-12);
    }
}

#[test]
fn morse_side_needs_a_circle() {
    let s = GluingScenario::interval(1.0, 0.5, Boundary::Abs, Boundary::Abs, 1).unwrap();
    assert!(matches!(verify_morse_side(&s, ENGINE), Err(TorsionError::Unsupported(_))));
}

#[test]
fn double_formulas() {
    let cases = [
        GluingScenario::circle(2.0, 0.5, eye(1)).unwrap(),
        GluingScenario::circle(1.0, 0.3, holonomy(1.0, 2)).unwrap(),
        GluingScenario::interval(2.0, 0.6, Boundary::Rel, Boundary::Abs, 1).unwrap(),
    ];
    for s in &cases {
        let ids = verify_double_formula(s, ENGINE).unwrap();
        let expected = if s.shape == Shape::Circle { 8 } else { 4 };
        assert_eq!(ids.len(), expected);
        for id in &ids {
            let tol = if id.name.starts_with("analytic") { 1e-7 } else { 1e-12 };
            assert!(id.residual() < tol, "{}", id.name);
        }
    }
}

#[test]
fn scenario_documents() {
    let s = GluingScenario::circle(3.0, 0.25, holonomy(0.8, 2)).unwrap().with_subdivisions(2).unwrap();
    let json = serde_json::to_string(&ScenarioDoc::from_scenario(&s)).unwrap();
    assert!(json.contains(r#""shape":"circle""#));
    let back = serde_json::from_str::<ScenarioDoc>(&json).unwrap().to_scenario().unwrap();
    assert_eq!(back, s);

    let doc: ScenarioDoc =
        serde_json::from_str(r#"{"shape":"interval","left":"abs","right":"rel","L":1.0,"split":0.5}"#).unwrap();
    let s = doc.to_scenario().unwrap();
    assert_eq!(s.shape, Shape::Interval { left: Boundary::Abs, right: Boundary::Rel });
    assert_eq!(s.rank(), 1);
}

#[test]
fn invalid_scenarios() {
    for split in [0.0, 1.0, -0.2, 1.5] {
        assert!(matches!(GluingScenario::circle(1.0, split, eye(1)), Err(TorsionError::Domain(_))));
    }
    let bad = CMat::from_element(1, 1, c(0.5));
    assert!(matches!(GluingScenario::circle(1.0, 0.5, bad), Err(TorsionError::Domain(_))));
    assert!(GluingScenario::circle(1.0, 0.5, eye(1)).unwrap().with_subdivisions(0).is_err());
    let doc: ScenarioDoc = serde_json::from_str(
        r#"{"shape":"interval","left":"abs","right":"abs","L":1.0,"split":0.5,"holonomy":[[-1]]}"#,
    )
    .unwrap();
    assert!(matches!(doc.to_scenario(), Err(TorsionError::Domain(_))));
}
