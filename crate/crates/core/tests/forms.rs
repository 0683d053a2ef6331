use proptest::prelude::*;
use std::f64::consts::PI;
use torsion_core::forms::{sqrt_two_i_pi, Form, FormAlgebra, FormMatrix, MatrixFunction};
use torsion_core::linalg::{c, eye, real_matrix, C64};

fn formal_element(alg: FormAlgebra, coeffs: &[f64]) -> Form {
    Form::from_coeffs(alg, coeffs.iter().map(|&x| c(x)).collect()).unwrap()
}

#[test]
fn generators_anticommute() {
    let alg = FormAlgebra::formal(3).unwrap();
    let a = Form::generator(alg, 0).unwrap();
    let b = Form::generator(alg, 2).unwrap();
    let ab = a.wedge(&b).unwrap();
    let ba = b.wedge(&a).unwrap();
    assert_eq!((&ab + &ba).max_abs(), 0.0);
    assert_eq!(a.wedge(&a).unwrap().max_abs(), 0.0);
    assert_eq!(ab.degree(), Some(2));
}

#[test]
fn truncation_kills_high_products() {
    let alg = FormAlgebra::formal_truncated(3, 1).unwrap();
    let a = Form::generator(alg, 0).unwrap();
    let b = Form::generator(alg, 1).unwrap();
    assert_eq!(a.wedge(&b).unwrap().max_abs(), 0.0);
}

#[test]
fn too_many_generators_is_a_config_error() {
    assert!(FormAlgebra::formal(9).is_err());
    assert!(FormAlgebra::circle(12, 1.0).is_err());
    assert!(FormAlgebra::circle(16, -1.0).is_err());
}

#[test]
fn branch_of_square_root() {
    let r = sqrt_two_i_pi();
    assert!((r * r - C64::new(0.0, 2.0 * PI)).norm() < 1e-14);
    assert!(r.re > 0.0 && r.im > 0.0);
}

#[test]
fn phi_rescales_by_degree() {
    let alg = FormAlgebra::formal(2).unwrap();
    let x = formal_element(alg, &[1.0, 1.0, 1.0, 1.0]);
    let y = x.phi_rescale();
    let r = sqrt_two_i_pi().inv();
    assert!((y.coeff(0) - c(1.0)).norm() < 1e-15);
    assert!((y.coeff(1) - r).norm() < 1e-15);
    assert!((y.coeff(3) - r * r).norm() < 1e-15);
}

#[test]
fn circle_dtheta_squares_to_zero() {
    let alg = FormAlgebra::circle(8, 1.0).unwrap();
    let one = vec![c(1.0); 8];
    let zero = vec![c(0.0); 8];
    let dt = Form::from_functions(alg, &zero, &one).unwrap();
    assert_eq!(dt.wedge(&dt).unwrap().max_abs(), 0.0);
}

#[test]
fn exterior_derivative_of_a_trigonometric_function() {
    let l = 3.0;
    let alg = FormAlgebra::circle(32, l).unwrap();
    let k = 2.0 * PI / l;
    let f: Vec<C64> = alg.grid_points().iter().map(|&t| c((2.0 * k * t).sin() + 0.5 * (k * t).cos())).collect();
    let expected: Vec<C64> = alg.grid_points().iter().map(|&t| c(2.0 * k * (2.0 * k * t).cos() - 0.5 * k * (k * t).sin())).collect();
    let form = Form::from_functions(alg, &f, &vec![c(0.0); 32]).unwrap();
    let d = form.exterior_d().unwrap();
    for (a, b) in d.grid_values(1).unwrap().iter().zip(&expected) {
        assert!((a - b).norm() < 1e-12);
    }
    assert_eq!(d.grid_values(0).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max), 0.0);
    let formal = FormAlgebra::formal(1).unwrap();
    assert!(Form::scalar(formal, c(1.0)).exterior_d().is_err());
}

#[test]
fn exponential_of_a_nilpotent_matrix() {
    let alg = FormAlgebra::formal(2).unwrap();
    let grading = vec![0, 1];
    let n = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let xi = Form::generator(alg, 0).unwrap();
    let m = FormMatrix::from_form_times(&xi, grading.clone(), &n);
    let e = m.exp().unwrap();
    let expected = FormMatrix::identity(alg, grading).try_add(&m).unwrap();
    assert!(e.try_add(&expected.scale(c(-1.0))).unwrap().max_abs() < 1e-14);
}

#[test]
fn matrix_functions_agree_on_scalars() {
    let alg = FormAlgebra::point();
    let a = 0.3;
    let m = FormMatrix::from_scalar_matrix(alg, vec![0], &(eye(1) * c(a)));
    let f = m.matrix_function(MatrixFunction::F).unwrap();
    let fp = m.matrix_function(MatrixFunction::FPrime).unwrap();
    assert!((f.degree0(0)[(0, 0)].re - a * (a * a).exp()).abs() < 1e-14);
    assert!((fp.degree0(0)[(0, 0)].re - (1.0 + 2.0 * a * a) * (a * a).exp()).abs() < 1e-14);
}

fn homogeneous(alg: FormAlgebra, coeffs: &[f64], degree: usize) -> Form {
    formal_element(alg, coeffs).component(degree)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_associative(a in prop::collection::vec(-2.0..2.0f64, 16),
                            b in prop::collection::vec(-2.0..2.0f64, 16),
                            d in prop::collection::vec(-2.0..2.0f64, 16)) {
        let alg = FormAlgebra::formal(4).unwrap();
        let (x, y, z) = (formal_element(alg, &a), formal_element(alg, &b), formal_element(alg, &d));
        let left = x.wedge(&y).unwrap().wedge(&z).unwrap();
        let right = x.wedge(&y.wedge(&z).unwrap()).unwrap();
        prop_assert!((&left - &right).max_abs() < 1e-12);
    }

    #[test]
    fn wedge_is_graded_commutative(a in prop::collection::vec(-2.0..2.0f64, 16),
                                   b in prop::collection::vec(-2.0..2.0f64, 16),
                                   p in 0usize..=4, q in 0usize..=4) {
        let alg = FormAlgebra::formal(4).unwrap();
        let x = homogeneous(alg, &a, p);
        let y = homogeneous(alg, &b, q);
        let sign = if p * q % 2 == 0 { 1.0 } else { -1.0 };
        let diff = &x.wedge(&y).unwrap() - &y.wedge(&x).unwrap().scale(c(sign));
        prop_assert!(diff.max_abs() < 1e-12);
    }

    #[test]
    fn circle_leibniz_rule(a in prop::collection::vec(-1.0..1.0f64, 3), b in prop::collection::vec(-1.0..1.0f64, 3)) {
        let l = 2.0;
        let alg = FormAlgebra::circle(64, l).unwrap();
        let sample = |w: &[f64]| -> Vec<C64> {
            alg.grid_points().iter().map(|&t| {
                let x = 2.0 * PI * t / l;
                c(w[0] + w[1] * x.sin() + w[2] * (2.0 * x).cos())
            }).collect()
        };
        let zero = vec![c(0.0); 64];
        let f = Form::from_functions(alg, &sample(&a), &zero).unwrap();
        let g = Form::from_functions(alg, &sample(&b), &zero).unwrap();
        let lhs = f.wedge(&g).unwrap().exterior_d().unwrap();
        let rhs = &f.exterior_d().unwrap().wedge(&g).unwrap() + &f.wedge(&g.exterior_d().unwrap()).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() < 1e-10);
    }
}
