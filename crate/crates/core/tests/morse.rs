use proptest::prelude::*;
use std::f64::consts::{LN_2, PI};
use torsion_core::flat_complex::MetricComplex;
use torsion_core::hodge::{hodge_decompose, scalar_torsion_eigen};
use torsion_core::linalg::{c, eye, max_abs, zeros, CMat, C64};
use torsion_core::morse::*;
use torsion_core::spectral::{self, Filtration};
use torsion_core::{random, TorsionError};

fn phase(theta: f64, r: usize) -> CMat {
    let mut u = eye(r);
    u[(0, 0)] = C64::from_polar(1.0, theta);
    u
}

/// Diagonal holonomy with no eigenvalue equal to one.
fn acyclic(theta: f64, r: usize) -> CMat {
    CMat::from_fn(r, r, |i, j| if i == j { C64::from_polar(1.0, theta + 0.7 * i as f64) } else { c(0.0) })
}

/// Simplicial circle with `n` vertices and `n` edges, the last edge carrying `u`.
fn simplicial_circle(u: &CMat, n: usize) -> MetricComplex {
    let r = u.nrows();
    let mut d = zeros(n * r, n * r);
    for j in 0..n {
        let head = (j + 1) % n;
        let w = if j + 1 == n { u.clone() } else { eye(r) };
        let mut b = d.view_mut((j * r, head * r), (r, r));
        b += &w;
        let mut t = d.view_mut((j * r, j * r), (r, r));
        t -= eye(r);
    }
    MetricComplex::with_unit_metrics(vec![d], &[n * r, n * r]).unwrap()
}

#[test]
fn circle_height_matches_simplicial_circle() {
    for r in 1..=2 {
        for &theta in &[0.4, PI / 2.0, PI, 2.5] {
            let u = acyclic(theta, r);
            let ts = MorseData::circle_height(&u).unwrap().thom_smale(Variant::Full).unwrap();
            let t = scalar_torsion_eigen(&ts.complex).unwrap();
            let expected = -(&u - eye(r)).determinant().norm().ln();
            assert!((t - expected).abs() < 1e-12);
            for n in [3, 5] {
                let s = simplicial_circle(&u, n);
                assert!((scalar_torsion_eigen(&s).unwrap() - t).abs() < 1e-12, "n = {n}, r = {r}");
            }
        }
        let ts = MorseData::circle_height(&eye(r)).unwrap().thom_smale(Variant::Full).unwrap();
        let betti = hodge_decompose(&ts.complex).unwrap().betti;
        assert_eq!(betti, hodge_decompose(&simplicial_circle(&eye(r), 4)).unwrap().betti);
        assert_eq!(betti, vec![r, r]);
    }
}

#[test]
fn coboundary_is_transport_minus_identity() {
    let u = phase(1.0, 2);
    let ts = MorseData::circle_height(&u).unwrap().thom_smale(Variant::Full).unwrap();
    assert!(max_abs(&(&ts.complex.v()[0] - (&u - eye(2)))) < 1e-15);
}

fn point(id: &str, index: usize, region: Region) -> CriticalPoint {
    CriticalPoint { id: id.into(), index, on_boundary: region == Region::Y, region, metric: eye(1) }
}

fn inst(from: usize, to: usize, sign: i32) -> Instanton {
    Instanton { from, to, sign, transport: eye(1) }
}

#[test]
fn validation_errors() {
    let pts = vec![point("a", 0, Region::Z1), point("b", 1, Region::Z1)];
    let bad_index = MorseData::new(1, vec![point("a", 0, Region::Z1), point("b", 2, Region::Z1)], vec![inst(1, 0, 1)]);
    assert!(matches!(bad_index, Err(TorsionError::Inconsistent(_))));
    assert!(matches!(MorseData::new(1, pts.clone(), vec![inst(1, 0, 2)]), Err(TorsionError::Input(_))));
    let mut off = pts.clone();
    off[0].on_boundary = true;
    assert!(matches!(MorseData::new(1, off, vec![]), Err(TorsionError::Config(_))));
    let cross = vec![point("a", 0, Region::Z1), point("b", 1, Region::Z2)];
    assert!(matches!(MorseData::new(1, cross, vec![inst(1, 0, 1)]), Err(TorsionError::Inconsistent(_))));
    let singular = Instanton { from: 1, to: 0, sign: 1, transport: zeros(1, 1) };
    assert!(MorseData::new(1, pts.clone(), vec![singular]).is_err());
    let dup = vec![point("a", 0, Region::Z1), point("a", 1, Region::Z1)];
    assert!(MorseData::new(1, dup, vec![]).is_err());
}

#[test]
fn square_zero_violation_names_the_pair() {
    let pts = vec![point("a", 0, Region::Z1), point("b", 1, Region::Z1), point("t", 2, Region::Z1)];
    let err = MorseData::new(1, pts, vec![inst(1, 0, 1), inst(2, 1, 1)]).unwrap_err();
    match err {
        TorsionError::Inconsistent(msg) => assert!(msg.contains('t') && msg.contains('a'), "{msg}"),
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn relative_complex_must_be_a_subcomplex() {
    let pts = vec![point("y", 0, Region::Y), point("z", 0, Region::Z2), point("m", 1, Region::Y)];
    let m = MorseData::new(1, pts, vec![inst(2, 1, 1), inst(2, 0, -1)]);
    let rejected = match m {
        Ok(m) => m.thom_smale(Variant::RelativeZ2).is_err(),
        Err(_) => true,
    };
    assert!(rejected);
}

#[test]
fn document_round_trip() {
    let m = MorseData::cut_circle(&phase(0.7, 2)).unwrap();
    let doc = m.to_doc();
    let json = serde_json::to_string(&doc).unwrap();
    let back = MorseData::from_doc(&serde_json::from_str(&json).unwrap()).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.to_doc(), doc);
}

#[test]
fn document_errors_are_input_errors() {
    let json = r#"{"rank":1,"points":[{"id":"a","index":0,"on_boundary":false,"region":"Z1"}],
        "instantons":[{"from":"a","to":"nowhere","sign":1}]}"#;
    let doc: MorseDoc = serde_json::from_str(json).unwrap();
    assert!(matches!(MorseData::from_doc(&doc), Err(TorsionError::Input(_))));
}

#[test]
fn cut_circle_columns_and_rows() {
    for r in 1..=2 {
        for &theta in &[0.0, 1.0] {
            let m = MorseData::cut_circle(&phase(theta, r)).unwrap();
            let d = m.three_column().unwrap();
            assert!(spectral::rows_exact_and_split(&d, 1e-12).unwrap());
            let rows = spectral::pages(&d, Filtration::Rows, 1).unwrap();
            assert_eq!(rows[1].total_dim(), 0);
            let full = m.thom_smale(Variant::Full).unwrap();
            let abs = m.thom_smale(Variant::AbsoluteZ1).unwrap();
            let rel = m.thom_smale(Variant::RelativeZ2).unwrap();
            assert_eq!(full.complex.dims(), vec![2 * r, 2 * r]);
            assert_eq!(abs.complex.dims(), vec![2 * r, r]);
            assert_eq!(rel.complex.dims(), vec![0, r]);
            assert_eq!(m.thom_smale(Variant::BoundaryY).unwrap().complex.dims(), vec![2 * r, 0]);
        }
    }
}

#[test]
fn doubling_mirrors_interior_points() {
    let m = MorseData::cut_circle(&phase(0.3, 1)).unwrap();
    let d1 = m.side(Region::Z1).unwrap().double().unwrap();
    assert_eq!(d1.data.points().len(), 4);
    let mirror = d1.data.point_index("m1'").expect("mirror point");
    assert_eq!(d1.data.points()[mirror].region, Region::Z2);
    let phi = &d1.complex.involution;
    for (q, p) in phi.iter().enumerate() {
        assert!(max_abs(&(p * p - eye(p.nrows()))) < 1e-15, "degree {q}");
    }
    // The double of an arc is a circle: H⁰ = H¹ = C.
    assert_eq!(hodge_decompose(&d1.complex.complex).unwrap().betti, vec![1, 1]);
    assert!(m.side(Region::Y).is_err());
}

#[test]
fn psi_maps_are_chain_maps_and_psi_minus_is_isometric() {
    for r in 1..=2 {
        let m = MorseData::cut_circle(&phase(1.1, r)).unwrap();
        let d1 = m.side(Region::Z1).unwrap().double().unwrap();
        let psi = d1.psi_plus().unwrap();
        let z1 = d1.original.thom_smale(Variant::Full).unwrap();
        let vb = d1.thom_smale.complex.v();
        assert!(max_abs(&(&z1.complex.v()[0] * &psi[0] - &psi[1] * &vb[0])) < 1e-14);
        assert!(d1.psi_minus().is_err());

        let d2 = m.side(Region::Z2).unwrap().double().unwrap();
        let pm = d2.psi_minus().unwrap();
        let rel = d2.original.thom_smale(Variant::RelativeZ2).unwrap();
        let vb = d2.thom_smale.complex.v();
        assert!(max_abs(&(&vb[0] * &pm[0] - &pm[1] * &rel.complex.v()[0])) < 1e-14);
        for q in 0..pm.len() {
            let g = pm[q].adjoint() * &d2.thom_smale.complex.h()[q] * &pm[q];
            assert!(max_abs(&(g - &rel.complex.h()[q])) < 1e-12);
        }
        assert!(d2.psi_plus().is_err());
    }
}

#[test]
fn plus_side_rows_carry_the_log_two_defect() {
    for r in 1..=2 {
        let m = MorseData::cut_circle(&phase(0.0, r)).unwrap();
        let d1 = m.side(Region::Z1).unwrap().double().unwrap();
        let (dp, _) = d1.plus_double_complex().unwrap();
        let rows = spectral::pages(&dp, Filtration::Rows, 1).unwrap();
        let t = scalar_torsion_eigen(&rows[0].as_metric_complex().unwrap()).unwrap();
        assert!((t + 0.5 * LN_2 * 2.0 * r as f64).abs() < 1e-12);
        let d2 = m.side(Region::Z2).unwrap().double().unwrap();
        let (dm, _) = d2.minus_double_complex().unwrap();
        let rows = spectral::pages(&dm, Filtration::Rows, 1).unwrap();
        assert!(scalar_torsion_eigen(&rows[0].as_metric_complex().unwrap()).unwrap().abs() < 1e-12);
    }
}

#[test]
fn equivariant_torsion_splits_by_parity() {
    let m = MorseData::cut_circle(&phase(0.9, 2)).unwrap();
    for side in [Region::Z1, Region::Z2] {
        let d = m.side(side).unwrap().double().unwrap();
        let split = z2_split(&d.complex).unwrap();
        let tp = scalar_torsion_eigen(&split.plus).unwrap();
        let tm = scalar_torsion_eigen(&split.minus).unwrap();
        for g in [GroupElement::Identity, GroupElement::Reflection] {
            let lhs = equivariant_torsion(&d.complex, g).unwrap();
            assert!((lhs - tp - g.character() * tm).abs() < 1e-12);
        }
        let total = scalar_torsion_eigen(&d.complex.complex).unwrap();
        assert!((total - tp - tm).abs() < 1e-12);
    }
}

#[test]
fn involution_must_square_to_one() {
    let e = MetricComplex::zero(&[2]);
    let bad = vec![eye(2) * c(2.0)];
    assert!(Z2Complex::new(e, bad).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn holonomy_circle_torsion(theta in 0.05..(2.0 * PI - 0.05), seed in 0u64..1000) {
        let mut rng = random::seeded(seed);
        let q = random::unitary(&mut rng, 2);
        let mut d = eye(2);
        d[(0, 0)] = C64::from_polar(1.0, theta);
        d[(1, 1)] = C64::from_polar(1.0, theta * 0.5 + 0.3);
        let u = &q * d * q.adjoint();
        let ts = MorseData::circle_height(&u).unwrap().thom_smale(Variant::Full).unwrap();
        let det = (&u - eye(2)).determinant().norm();
        prop_assert!((scalar_torsion_eigen(&ts.complex).unwrap() + det.ln()).abs() < 1e-10);
        prop_assert!((scalar_torsion_eigen(&simplicial_circle(&u, 4)).unwrap() + det.ln()).abs() < 1e-10);
    }

    #[test]
    fn instanton_sign_convention_is_gauge(theta in 0.0..PI, flip in any::<bool>()) {
        // Flipping the orientation of a maximum flips both of its instanton signs.
        let u = phase(theta, 1);
        let mut m = MorseData::cut_circle(&u).unwrap().to_doc();
        if flip {
            for g in m.instantons.iter_mut().filter(|g| g.from == "m2") {
                g.sign = -g.sign;
            }
        }
        let m = MorseData::from_doc(&m).unwrap();
        let base = MorseData::cut_circle(&u).unwrap();
        let a = scalar_torsion_eigen(&m.thom_smale(Variant::Full).unwrap().complex).unwrap();
        let b = scalar_torsion_eigen(&base.thom_smale(Variant::Full).unwrap().complex).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }
}
