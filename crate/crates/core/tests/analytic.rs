use std::f64::consts::PI;
use torsion_core::analytic::*;
use torsion_core::linalg::{c, eye, CMat, C64};
use torsion_core::quadrature::QuadratureSpec;
use torsion_core::TorsionError;

/// `∫_0^∞ arctan(t/b) / (e^{2πt} − 1) dt` by composite Simpson on a truncated range.
fn binet_integral(b: f64) -> f64 {
    let (n, upper) = (20_000, 12.0);
    let h = upper / n as f64;
    let f = |t: f64| if t == 0.0 { 1.0 / (2.0 * PI * b) } else { (t / b).atan() / (2.0 * PI * t).exp_m1() };
    let mut s = f(0.0) + f(upper);
    for k in 1..n {
        s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `∂_s ζ_H(0, b)` from Binet's second formula for `log Γ`.
fn hurwitz_derivative(b: f64) -> f64 {
    (b - 0.5) * b.ln() - b + 2.0 * binet_integral(b)
}

/// `log det'` of `{(c(n + a))² : n ∈ ℤ}` with the zero eigenvalue dropped, `0 ≤ a < 1`.
fn lattice_oracle(scale: f64, a: f64) -> f64 {
    let (z0, z1) = if a == 0.0 {
        (-1.0, 2.0 * hurwitz_derivative(1.0))
    } else {
        (0.0, hurwitz_derivative(a) + hurwitz_derivative(1.0 - a))
    };
    2.0 * scale.ln() * z0 - 2.0 * z1
}

fn phase_circle(length: f64, a: f64) -> ModelGeometry {
    let mut u = eye(1);
    u[(0, 0)] = C64::from_polar(1.0, 2.0 * PI * a);
    ModelGeometry::circle(length, u).unwrap()
}

const ENGINES: [ZetaEngine; 2] = [ZetaEngine::ClosedForm, ZetaEngine::EulerMaclaurin { terms: 2000 }];

#[test]
fn oracle_reproduces_known_determinants() {
    for l in [0.5, 1.0, 2.0, 3.7] {
        assert!((lattice_oracle(2.0 * PI / l, 0.0) - 2.0 * l.ln()).abs() < 1e-10);
        // Half of the trivial circle lattice of circumference 2L.
        assert!((0.5 * lattice_oracle(PI / l, 0.0) - (2.0 * l).ln()).abs() < 1e-10);
    }
    for a in [0.1, 0.25, 0.5, 0.83] {
        let expected = (4.0 * (PI * a).sin().powi(2)).ln();
        assert!((lattice_oracle(2.0 * PI / 1.3, a) - expected).abs() < 1e-10);
    }
}

#[test]
fn interval_determinants_are_twice_the_length() {
    for engine in ENGINES {
        for l in [0.3, 1.0, 2.5] {
            for bc in [Boundary::Abs, Boundary::Rel] {
                let s = spectrum(&ModelGeometry::interval(l, bc, 1).unwrap()).unwrap();
                for q in 0..2 {
                    let v = zeta_log_det(&s, q, engine).unwrap();
                    assert!((v - 0.5 * lattice_oracle(PI / l, 0.0)).abs() < 1e-9, "{bc:?} q={q}");
                }
            }
        }
    }
}

#[test]
fn circle_determinants() {
    for engine in ENGINES {
        for l in [0.7, 2.0, 5.0] {
            let s = spectrum(&ModelGeometry::trivial_circle(l, 1).unwrap()).unwrap();
            assert!((zeta_log_det(&s, 0, engine).unwrap() - lattice_oracle(2.0 * PI / l, 0.0)).abs() < 1e-9);
            for a in [0.05, 0.3, 0.5, 0.9] {
                let s = spectrum(&phase_circle(l, a)).unwrap();
                let v = zeta_log_det(&s, 0, engine).unwrap();
                assert!((v - lattice_oracle(2.0 * PI / l, a)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn rank_and_unitary_conjugation() {
    let s1 = scalar_torsion(&phase_circle(1.5, 0.3)).unwrap();
    let s2 = scalar_torsion(&phase_circle(1.5, 0.6)).unwrap();
    let mut d = eye(2);
    d[(0, 0)] = C64::from_polar(1.0, 2.0 * PI * 0.3);
    d[(1, 1)] = C64::from_polar(1.0, 2.0 * PI * 0.6);
    let (co, si) = (0.6, 0.8);
    let r = CMat::from_row_slice(2, 2, &[c(co), c(-si), c(si), c(co)]);
    let u = &r * d * r.adjoint();
    let t = scalar_torsion(&ModelGeometry::circle(1.5, u).unwrap()).unwrap();
    assert!((t - s1 - s2).abs() < 1e-12);
    let t3 = scalar_torsion(&ModelGeometry::interval(2.0, Boundary::Abs, 3).unwrap()).unwrap();
    assert!((t3 + 1.5 * 4f64.ln()).abs() < 1e-12);
}

#[test]
fn torsion_values() {
    assert!((scalar_torsion(&ModelGeometry::trivial_circle(2.0, 1).unwrap()).unwrap() + 2f64.ln()).abs() < 1e-12);
    let t = scalar_torsion(&phase_circle(1.0, 0.5)).unwrap();
    assert!((t + 2f64.ln()).abs() < 1e-12);
    for bc in [Boundary::Abs, Boundary::Rel] {
        let t = scalar_torsion(&ModelGeometry::interval(3.0, bc, 1).unwrap()).unwrap();
        assert!((t + 0.5 * 6f64.ln()).abs() < 1e-12);
    }
    let mixed = ModelGeometry::interval_with_ends(1.0, Boundary::Abs, Boundary::Rel, 1).unwrap();
    // Mixed conditions shift the lattice by one half.
    let s = spectrum(&mixed).unwrap();
    assert!((zeta_log_det(&s, 0, ZetaEngine::ClosedForm).unwrap() - 0.5 * lattice_oracle(PI, 0.5)).abs() < 1e-10);
}

#[test]
fn both_degrees_give_the_same_torsion() {
    let geometries = [
        ModelGeometry::trivial_circle(1.3, 2).unwrap(),
        phase_circle(0.8, 0.2),
        ModelGeometry::interval(2.0, Boundary::Rel, 1).unwrap(),
        ModelGeometry::interval_with_ends(1.1, Boundary::Rel, Boundary::Abs, 2).unwrap(),
    ];
    for g in &geometries {
        for engine in ENGINES {
            let a = scalar_torsion_with(g, engine).unwrap();
            let b = scalar_torsion_from_degree0(g, engine).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn short_euler_maclaurin_sums_are_rejected() {
    let g = ModelGeometry::trivial_circle(1.0, 1).unwrap();
    let r = scalar_torsion_with(&g, ZetaEngine::EulerMaclaurin { terms: 2 });
    assert!(matches!(r, Err(TorsionError::Precision(_))));
}

/// `h(t)` summed over the degree-one spectrum of a circle directly.
fn circle_heat_brute(l: f64, a: f64, t: f64) -> f64 {
    let mut s = 0.0;
    for n in -400i64..=400 {
        let lam = (2.0 * PI * (n as f64 + a) / l).powi(2);
        s += (1.0 - t * lam / 2.0) * (-t * lam / 4.0).exp();
    }
    -0.5 * s
}

#[test]
fn heat_function_matches_eigenvalue_sum() {
    for (l, a) in [(1.0, 0.0), (2.0, 0.0), (1.5, 0.3)] {
        let g = if a == 0.0 { ModelGeometry::trivial_circle(l, 1).unwrap() } else { phase_circle(l, a) };
        let s = spectrum(&g).unwrap();
        for t in [0.05, 0.5, 3.0] {
            assert!((heat_function(&s, t) - circle_heat_brute(l, a, t)).abs() < 1e-10);
        }
    }
}

#[test]
fn heat_limits_and_integral() {
    let quad = QuadratureSpec::default();
    let geometries = [
        ModelGeometry::trivial_circle(2.0, 1).unwrap(),
        phase_circle(1.0, 0.37),
        ModelGeometry::interval(1.5, Boundary::Abs, 1).unwrap(),
        ModelGeometry::interval(0.6, Boundary::Rel, 2).unwrap(),
        ModelGeometry::interval_with_ends(1.0, Boundary::Abs, Boundary::Rel, 1).unwrap(),
    ];
    for g in &geometries {
        let l = g.length();
        let s = spectrum(g).unwrap();
        let (small, large) = heat_limits(g).unwrap();
        assert!((heat_function(&s, 1e-4 * l * l) - small).abs() < 1e-4);
        assert!((heat_function(&s, 400.0 * l * l) - large).abs() < 1e-4);
        let t = torsion_via_heat_integral(g, &quad).unwrap();
        assert!((t - scalar_torsion(g).unwrap()).abs() < 1e-7, "{g:?}");
    }
}

#[test]
fn equivariant_torsion_of_the_double() {
    for l in [0.5, 1.0, 3.0] {
        for bc in [Boundary::Abs, Boundary::Rel] {
            let i = ModelGeometry::interval(l, bc, 1).unwrap();
            let id = equivariant_scalar_torsion(&i, GroupElement::Identity, ZetaEngine::ClosedForm).unwrap();
            let refl = equivariant_scalar_torsion(&i, GroupElement::Reflection, ZetaEngine::ClosedForm).unwrap();
            let double = scalar_torsion(&i.double().unwrap()).unwrap();
            assert!((id - double).abs() < 1e-12);
            assert!((id + (2.0 * l).ln()).abs() < 1e-12);
            assert!(refl.abs() < 1e-12);
        }
    }
    let circle = ModelGeometry::trivial_circle(1.0, 1).unwrap();
    assert!(equivariant_scalar_torsion(&circle, GroupElement::Identity, ZetaEngine::ClosedForm).is_err());
    assert!(circle.double().is_err());
}

#[test]
fn l2_cohomology_dimensions() {
    let cases = [
        (ModelGeometry::trivial_circle(1.0, 2).unwrap(), [2, 2]),
        (phase_circle(1.0, 0.4), [0, 0]),
        (ModelGeometry::interval(1.0, Boundary::Abs, 3).unwrap(), [3, 0]),
        (ModelGeometry::interval(1.0, Boundary::Rel, 2).unwrap(), [0, 2]),
        (ModelGeometry::interval_with_ends(1.0, Boundary::Rel, Boundary::Abs, 1).unwrap(), [0, 0]),
    ];
    for (g, betti) in &cases {
        let h = l2_cohomology(g).unwrap();
        assert_eq!(h.betti(), *betti);
        let zero_modes = spectrum(g).unwrap().zero_modes();
        assert_eq!(zero_modes, *betti);
    }
    let h = l2_cohomology(&ModelGeometry::trivial_circle(4.0, 1).unwrap()).unwrap();
    assert!((h.grams[0][(0, 0)].re - 4.0).abs() < 1e-15);
    assert!((h.grams[1][(0, 0)].re - 0.25).abs() < 1e-15);
}

#[test]
fn euler_characteristics() {
    assert_eq!(ModelGeometry::trivial_circle(1.0, 1).unwrap().euler_characteristic(), 0);
    assert_eq!(ModelGeometry::interval(1.0, Boundary::Abs, 1).unwrap().euler_characteristic(), 1);
    assert_eq!(ModelGeometry::interval(1.0, Boundary::Rel, 1).unwrap().euler_characteristic(), -1);
}

#[test]
fn invalid_geometries() {
    let bad = CMat::from_row_slice(1, 1, &[c(2.0)]);
    assert!(matches!(ModelGeometry::circle(1.0, bad), Err(TorsionError::Domain(_))));
    assert!(matches!(ModelGeometry::trivial_circle(-1.0, 1), Err(TorsionError::Domain(_))));
    assert!(matches!(ModelGeometry::interval(1.0, Boundary::Abs, 0), Err(TorsionError::Domain(_))));
    assert!(matches!(ModelGeometry::circle(1.0, CMat::zeros(1, 2)), Err(TorsionError::Dimension(_))));
    let s = spectrum(&ModelGeometry::trivial_circle(1.0, 1).unwrap()).unwrap();
    assert!(matches!(zeta_log_det(&s, 2, ZetaEngine::ClosedForm), Err(TorsionError::Config(_))));
}

#[test]
fn geometry_documents() {
    let g = ModelGeometry::interval_with_ends(2.0, Boundary::Abs, Boundary::Rel, 2).unwrap();
    let json = serde_json::to_string(&GeometryDoc::from_geometry(&g)).unwrap();
    let back = serde_json::from_str::<GeometryDoc>(&json).unwrap().to_geometry().unwrap();
    assert_eq!(back, g);
    let c = phase_circle(1.5, 0.2);
    let json = serde_json::to_string(&GeometryDoc::from_geometry(&c)).unwrap();
    let back = serde_json::from_str::<GeometryDoc>(&json).unwrap().to_geometry().unwrap();
    assert!((scalar_torsion(&back).unwrap() - scalar_torsion(&c).unwrap()).abs() < 1e-12);

    let doc: GeometryDoc = serde_json::from_str(r#"{"kind":"interval","L":1.0,"bc":"rel"}"#).unwrap();
    assert_eq!(doc.to_geometry().unwrap(), ModelGeometry::interval(1.0, Boundary::Rel, 1).unwrap());
    let doc: GeometryDoc = serde_json::from_str(r#"{"kind":"interval","L":1.0}"#).unwrap();
    assert!(matches!(doc.to_geometry(), Err(TorsionError::Input(_))));
    let doc: GeometryDoc = serde_json::from_str(r#"{"kind":"circle","L":1.0,"rank":2,"holonomy":[[1]]}"#).unwrap();
    assert!(matches!(doc.to_geometry(), Err(TorsionError::Input(_))));
}
