use proptest::prelude::*;
use torsion_core::flat_complex::MetricComplex;
use torsion_core::hodge::{hodge_decompose, scalar_torsion_eigen};
use torsion_core::linalg::{c, cholesky, column_space, eye, inverse, max_abs, zeros, CMat};
use torsion_core::quadrature::QuadratureSpec;
use torsion_core::random;
use torsion_core::schema::DoubleComplexDoc;
use torsion_core::spectral::{self, DoubleComplexData, Filtration};
use torsion_core::TorsionError;

fn euler(dims: &[Vec<usize>]) -> i64 {
    let mut chi = 0;
    for (p, col) in dims.iter().enumerate() {
        for (q, &d) in col.iter().enumerate() {
            chi += if (p + q) % 2 == 0 { d as i64 } else { -(d as i64) };
        }
    }
    chi
}

fn totals(dims: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for (p, col) in dims.iter().enumerate() {
        for (q, &d) in col.iter().enumerate() {
            out[p + q] += d;
        }
    }
    out
}

#[test]
fn single_column_pages() {
    let mut rng = random::seeded(3);
    let (v, dims) = random::complex_with_ranks(&mut rng, &[1, 2], &[1, 0, 1]);
    let h: Vec<CMat> = dims.iter().map(|&d| random::metric(&mut rng, d)).collect();
    let metrics = vec![h.clone()];
    let d = DoubleComplexData::new(metrics, vec![v.clone()], vec![]).unwrap();
    let cols = spectral::pages(&d, Filtration::Columns, 3).unwrap();
    assert_eq!(cols[1].dims(), vec![vec![1, 0, 1]]);
    let rows = spectral::pages(&d, Filtration::Rows, 3).unwrap();
    assert_eq!(rows[1].total_dim(), dims.iter().sum::<usize>());
    assert_eq!(totals(&rows[2].dims(), 3), vec![1, 0, 1]);
    let e = MetricComplex::new(v, h).unwrap();
    let t = scalar_torsion_eigen(&e).unwrap();
    let t1 = scalar_torsion_eigen(&cols[1].as_metric_complex().unwrap()).unwrap();
    assert!(t1.abs() < 1e-12);
    assert!(t.is_finite());
}

#[test]
fn total_complex_layout_and_square_zero() {
    let mut rng = random::seeded(11);
    let d = random::three_column(&mut rng, 3, 3, false);
    let t = d.total_complex().unwrap();
    let n = d.columns() + d.rows() - 1;
    assert_eq!(t.dims(), totals(&d.dims(), n));
    for i in 0..t.v().len().saturating_sub(1) {
        assert!(max_abs(&(&t.v()[i + 1] * &t.v()[i])) < 1e-10);
    }
}

#[test]
fn rows_filtration_of_exact_rows_vanishes_at_page_one() {
    let mut rng = random::seeded(5);
    for i in 0..10 {
        let d = random::three_column(&mut rng, 2 + i % 2, 3, i % 2 == 0);
        let rows = spectral::pages(&d, Filtration::Rows, 2).unwrap();
        assert_eq!(rows[1].total_dim(), 0);
        assert!(hodge_decompose(&d.total_complex().unwrap()).unwrap().betti.iter().all(|&b| b == 0));
    }
}

#[test]
fn rows_filtration_is_columns_of_transpose() {
    let mut rng = random::seeded(8);
    let d = random::three_column(&mut rng, 3, 3, false);
    let tr = d.transpose();
    assert_eq!(tr.transpose(), d);
    let a = spectral::pages(&d, Filtration::Rows, 4).unwrap();
    let b = spectral::pages(&tr, Filtration::Columns, 4).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(totals(&x.dims(), 8), totals(&y.dims(), 8));
    }
}

#[test]
fn random_metrics_do_not_split_rows() {
    let mut rng = random::seeded(2);
    let d = random::three_column(&mut rng, 2, 3, false);
    assert!(!spectral::rows_exact_and_split(&d, 1e-9).unwrap());
    let two = DoubleComplexData::zero(&[vec![1], vec![1]]).unwrap();
    assert!(matches!(spectral::rows_exact_and_split(&two, 1e-9), Err(TorsionError::Config(_))));
}

#[test]
fn goette_identity_both_filtrations() {
    let quad = QuadratureSpec::default();
    let mut rng = random::seeded(21);
    for i in 0..12 {
        let d = random::three_column(&mut rng, 2 + i % 2, 3, i % 3 == 0);
        for f in [Filtration::Columns, Filtration::Rows] {
            let rep = spectral::goette_identity_check_with(&d, f, &quad).unwrap();
            assert!(rep.residual < 1e-8, "{f:?}: {rep:?}");
        }
    }
}

#[test]
fn goette_identity_needs_acyclic_total() {
    let d = DoubleComplexData::zero(&[vec![1, 1]]).unwrap();
    let quad = QuadratureSpec::default();
    assert!(matches!(spectral::goette_identity_check(&d, &quad), Err(TorsionError::Unsupported(_))));
}

/// Split an acyclic complex at the image in degree `l` into `E` (ending at the
/// image) and `E'` (starting at it), both with the induced metric.
fn split_at(full: &MetricComplex, l: usize) -> (MetricComplex, MetricComplex) {
    let (v, h) = (full.v(), full.h());
    let lt = cholesky(&h[l]).unwrap().adjoint();
    let b = inverse(&lt).unwrap() * column_space(&(&lt * &v[l - 1]));
    let k = b.ncols();
    let to_k = b.adjoint() * &h[l] * &v[l - 1];
    let mut ev: Vec<CMat> = v[..l - 1].to_vec();
    ev.push(to_k);
    let mut eh: Vec<CMat> = h[..l].to_vec();
    eh.push(eye(k));
    let mut pv = vec![b];
    pv.extend_from_slice(&v[l..]);
    let mut ph = vec![eye(k)];
    ph.extend_from_slice(&h[l..]);
    (MetricComplex::new(ev, eh).unwrap(), MetricComplex::new(pv, ph).unwrap())
}

#[test]
fn composition_of_scalar_maps() {
    let e = MetricComplex::with_unit_metrics(vec![eye(1) * c(2.0)], &[1, 1]).unwrap();
    let f = MetricComplex::with_unit_metrics(vec![eye(1) * c(3.0)], &[1, 1]).unwrap();
    let g = spectral::compose(&e, &f).unwrap();
    assert!((g.v()[0][(0, 0)].re - 6.0).abs() < 1e-15);
    assert!((scalar_torsion_eigen(&g).unwrap() + 6f64.ln()).abs() < 1e-12);
}

#[test]
fn composition_rejects_mismatched_junction() {
    let e = MetricComplex::with_unit_metrics(vec![eye(1)], &[1, 1]).unwrap();
    let f = MetricComplex::new(vec![eye(1)], vec![eye(1) * c(2.0), eye(1)]).unwrap();
    assert!(matches!(spectral::compose(&e, &f), Err(TorsionError::Config(_))));
}

#[test]
fn sequence_torsion_is_sum_of_page_torsions() {
    let mut rng = random::seeded(13);
    for i in 0..15 {
        let d = random::three_column(&mut rng, 3, 3, i % 3 == 0);
        let pages = spectral::pages(&d, Filtration::Columns, 4).unwrap();
        let les = spectral::long_exact_sequence(&d, None).unwrap();
        let t = scalar_torsion_eigen(&les.complex).unwrap();
        let t1 = scalar_torsion_eigen(&pages[1].as_metric_complex().unwrap()).unwrap();
        let t2 = scalar_torsion_eigen(&pages[2].as_metric_complex().unwrap()).unwrap();
        assert!((t - t1 - t2).abs() < 1e-9);
        assert_eq!(les.labels.len(), 9);
        assert_eq!(les.labels[4], (1, 1));
    }
}

#[test]
fn long_exact_sequence_needs_three_columns() {
    let d = DoubleComplexData::zero(&[vec![1], vec![1]]).unwrap();
    assert!(matches!(spectral::long_exact_sequence(&d, None), Err(TorsionError::Config(_))));
}

#[test]
fn double_complex_document_round_trip() {
    let mut rng = random::seeded(4);
    let d = random::three_column(&mut rng, 2, 3, false);
    let json = serde_json::to_string(&DoubleComplexDoc::from_data(&d)).unwrap();
    let back = serde_json::from_str::<DoubleComplexDoc>(&json).unwrap().to_data().unwrap();
    assert_eq!(back.dims(), d.dims());
    let t = |x: &DoubleComplexData| scalar_torsion_eigen(&x.total_complex().unwrap()).unwrap();
    assert!((t(&back) - t(&d)).abs() < 1e-12);
}

#[test]
fn anticommutation_is_enforced() {
    // Vertical and horizontal identity maps on a 2x2 square commute instead of anticommuting.
    let one = eye(1);
    let metrics = vec![vec![eye(1), eye(1)], vec![eye(1), eye(1)]];
    let r = DoubleComplexData::new(metrics, vec![vec![one.clone()], vec![one.clone()]], vec![vec![one.clone(), one]]);
    assert!(r.is_err());
    assert!(DoubleComplexData::new(vec![vec![eye(2)]], vec![vec![]], vec![]).is_ok());
    let bad = DoubleComplexData::new(vec![vec![eye(1), eye(1)]], vec![vec![zeros(2, 1)]], vec![]);
    assert!(bad.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn page_euler_characteristic_is_constant(seed in 0u64..10_000, acyclic in any::<bool>()) {
        let mut rng = random::seeded(seed);
        let d = random::three_column(&mut rng, 3, 3, acyclic);
        let chi = euler(&d.dims());
        for f in [Filtration::Columns, Filtration::Rows] {
            for page in spectral::pages(&d, f, 4).unwrap() {
                prop_assert_eq!(euler(&page.dims()), chi);
            }
        }
    }

    #[test]
    fn composition_identity(seed in 0u64..10_000, l in 1usize..4) {
        let mut rng = random::seeded(seed);
        let ranks: Vec<usize> = (0..l + 1).map(|i| if i + 1 == l { 2 } else { 1 + (seed as usize + i) % 2 }).collect();
        let (v, dims) = random::complex_with_ranks(&mut rng, &ranks, &vec![0; l + 2]);
        let h: Vec<CMat> = dims.iter().map(|&d| random::metric(&mut rng, d)).collect();
        let full = MetricComplex::new(v, h).unwrap();
        let (e, e_prime) = split_at(&full, l);
        let composed = spectral::compose(&e, &e_prime).unwrap();
        let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
        let lhs = scalar_torsion_eigen(&composed).unwrap();
        let rhs = scalar_torsion_eigen(&e).unwrap() + sign * scalar_torsion_eigen(&e_prime).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
        prop_assert!((lhs - scalar_torsion_eigen(&full).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn goette_identity_random(seed in 0u64..10_000) {
        let mut rng = random::seeded(seed);
        let d = random::three_column(&mut rng, 3, 3, seed % 2 == 0);
        let rep = spectral::goette_identity_check(&d, &QuadratureSpec::default()).unwrap();
        prop_assert!(rep.residual < 1e-8);
    }
}
