//! Seeded generators of well-conditioned test instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::flat_complex::MetricComplex;
use crate::linalg::{c, eye, inverse, zeros, CMat, C64};

pub type TestRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian matrix with unit-variance real and imaginary parts.
pub fn gaussian(rng: &mut TestRng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

pub fn gaussian_real(rng: &mut TestRng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| c(rng.sample::<f64, _>(StandardNormal)))
}

/// Positive definite Hermitian matrix with eigenvalues roughly in [0.5, 3].
pub fn metric(rng: &mut TestRng, n: usize) -> CMat {
    if n == 0 {
        return zeros(0, 0);
    }
    let a = gaussian(rng, n, n) * c(0.4 / (n as f64).sqrt());
    &a * a.adjoint() + eye(n) * c(0.5 + rng.random::<f64>())
}

/// Small Hermitian perturbation, used as a metric derivative.
pub fn hermitian(rng: &mut TestRng, n: usize, scale: f64) -> CMat {
    let a = gaussian(rng, n, n);
    (&a + a.adjoint()) * c(0.5 * scale)
}

/// Well-conditioned invertible matrix close to a multiple of the identity.
pub fn invertible(rng: &mut TestRng, n: usize) -> CMat {
    eye(n) + gaussian(rng, n, n) * c(0.3 / (n.max(1) as f64).sqrt())
}

/// Haar-like unitary from the QR factorisation of a Gaussian matrix.
pub fn unitary(rng: &mut TestRng, n: usize) -> CMat {
    if n == 0 {
        return zeros(0, 0);
    }
    let qr = gaussian(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 { d / d.norm() } else { c(1.0) }
        }),
    ));
    q * phases
}

/// Singular values drawn from [0.5, 2].
fn spread(rng: &mut TestRng, r: usize) -> Vec<f64> {
    (0..r).map(|_| 0.5 + 1.5 * rng.random::<f64>()).collect()
}

/// Complex with prescribed ranks `ranks[i] = rk v_i` and Betti numbers,
/// conjugated by random well-conditioned frame changes.
pub fn complex_with_ranks(rng: &mut TestRng, ranks: &[usize], betti: &[usize]) -> (Vec<CMat>, Vec<usize>) {
    let k = betti.len();
    assert_eq!(ranks.len() + 1, k);
    let dims: Vec<usize> = (0..k)
        .map(|i| betti[i] + if i > 0 { ranks[i - 1] } else { 0 } + if i + 1 < k { ranks[i] } else { 0 })
        .collect();
    let frames: Vec<CMat> = dims.iter().map(|&d| invertible(rng, d)).collect();
    let mut v = Vec::with_capacity(k - 1);
    for i in 0..k - 1 {
        // E^i = B^i ⊕ H^i ⊕ C^i with v: C^i → B^{i+1}.
        let mut m = zeros(dims[i + 1], dims[i]);
        let col0 = dims[i] - ranks[i];
        for (j, s) in spread(rng, ranks[i]).into_iter().enumerate() {
            m[(j, col0 + j)] = c(s);
        }
        let vi = &frames[i + 1] * m * inverse(&frames[i]).expect("well-conditioned frame");
        v.push(vi);
    }
    (v, dims)
}

/// Random complex of length ≤ `max_len` whose terms have dimension ≤ `max_dim`.
pub fn complex(rng: &mut TestRng, max_len: usize, max_dim: usize, acyclic: bool) -> MetricComplex {
    loop {
        let k = rng.random_range(1..=max_len.max(1));
        let ranks: Vec<usize> = (0..k - 1).map(|_| rng.random_range(0..=max_dim / 2)).collect();
        let betti: Vec<usize> = (0..k)
            .map(|_| if acyclic { 0 } else { rng.random_range(0..=1) })
            .collect();
        let (v, dims) = complex_with_ranks(rng, &ranks, &betti);
        if dims.iter().any(|&d| d > max_dim) || dims.iter().all(|&d| d == 0) {
            continue;
        }
        let h = dims.iter().map(|&d| metric(rng, d)).collect();
        return MetricComplex::new(v, h).expect("generated complex is valid");
    }
}

/// Two-term complex `C^n → C^n` with a random well-conditioned map.
pub fn two_term(rng: &mut TestRng, n: usize) -> CMat {
    let u = unitary(rng, n);
    let w = unitary(rng, n);
    let s = CMat::from_diagonal(&nalgebra::DVector::from_iterator(n, spread(rng, n).into_iter().map(c)));
    u * s * w
}

/// Smooth periodic positive function `exp(Σ a_k cos(kθ') + b_k sin(kθ'))` with `θ' = 2πθ/L`.
pub fn periodic_log_profile(rng: &mut TestRng, modes: usize) -> Vec<(f64, f64)> {
    (0..modes).map(|_| (0.3 * rng.random::<f64>() - 0.15, 0.3 * rng.random::<f64>() - 0.15)).collect()
}

pub fn eval_profile(profile: &[(f64, f64)], theta: f64, circumference: f64) -> f64 {
    let x = 2.0 * std::f64::consts::PI * theta / circumference;
    profile
        .iter()
        .enumerate()
        .map(|(k, (a, b))| a * ((k + 1) as f64 * x).cos() + b * ((k + 1) as f64 * x).sin())
        .sum()
}

/// Random column: ranks and Betti numbers drawn so that every term has dimension ≤ `max_dim`.
fn random_column(rng: &mut TestRng, rows: usize, max_dim: usize) -> (Vec<CMat>, Vec<usize>) {
    loop {
        let ranks: Vec<usize> = (0..rows - 1).map(|_| rng.random_range(0..=1)).collect();
        let betti: Vec<usize> = (0..rows).map(|_| rng.random_range(0..=1)).collect();
        let (v, dims) = complex_with_ranks(rng, &ranks, &betti);
        if dims.iter().all(|&d| d <= max_dim) {
            return (v, dims);
        }
    }
}

/// Three-column double complex `A → B → C` with short exact rows.
///
/// `B = A ⊕ C` twisted by a random `K`, so that `∂_B = [[∂_A, ∂_A K − K ∂_C], [0, ∂_C]]`,
/// seen through a random frame change. The middle column carries `−∂_B` so that
/// the horizontal inclusion and projection anticommute with the vertical maps.
/// With `acyclic_columns` the outer columns have no cohomology.
pub fn three_column(rng: &mut TestRng, rows: usize, max_dim: usize, acyclic_columns: bool) -> crate::spectral::DoubleComplexData {
    let rows = rows.max(1);
    let (a, da, cc, dc) = loop {
        let (a, da) = if acyclic_columns { acyclic_column(rng, rows) } else { random_column(rng, rows, max_dim) };
        let (c, dc) = if acyclic_columns { acyclic_column(rng, rows) } else { random_column(rng, rows, max_dim) };
        if da.iter().chain(&dc).any(|&d| d > 0) {
            break (a, da, c, dc);
        }
    };
    let db: Vec<usize> = da.iter().zip(&dc).map(|(x, y)| x + y).collect();
    let k: Vec<CMat> = (0..rows).map(|q| gaussian(rng, da[q], dc[q]) * c(0.5)).collect();
    let g: Vec<CMat> = db.iter().map(|&n| invertible(rng, n)).collect();
    let ginv: Vec<CMat> = g.iter().map(|m| inverse(m).expect("well-conditioned frame")).collect();
    let mut vertical: Vec<Vec<CMat>> = vec![Vec::new(), Vec::new(), Vec::new()];
    for q in 0..rows - 1 {
        let x = &a[q] * &k[q] - &k[q + 1] * &cc[q];
        let mut m = zeros(db[q + 1], db[q]);
        m.view_mut((0, 0), a[q].shape()).copy_from(&a[q]);
        m.view_mut((0, da[q]), x.shape()).copy_from(&x);
        m.view_mut((da[q + 1], da[q]), cc[q].shape()).copy_from(&cc[q]);
        let b = &g[q + 1] * m * &ginv[q];
        vertical[0].push(a[q].clone());
        vertical[1].push(-b);
        vertical[2].push(cc[q].clone());
    }
    let mut inc = Vec::with_capacity(rows);
    let mut pro = Vec::with_capacity(rows);
    for q in 0..rows {
        let mut i = zeros(db[q], da[q]);
        i.view_mut((0, 0), (da[q], da[q])).copy_from(&eye(da[q]));
        inc.push(&g[q] * i);
        let mut p = zeros(dc[q], db[q]);
        p.view_mut((0, da[q]), (dc[q], dc[q])).copy_from(&eye(dc[q]));
        pro.push(p * &ginv[q]);
    }
    let dims = [da, db, dc];
    let metrics = dims.iter().map(|col| col.iter().map(|&n| metric(rng, n)).collect()).collect();
    crate::spectral::DoubleComplexData::new(metrics, vertical, vec![inc, pro]).expect("generated double complex is valid")
}

fn acyclic_column(rng: &mut TestRng, rows: usize) -> (Vec<CMat>, Vec<usize>) {
    let ranks: Vec<usize> = (0..rows - 1).map(|_| rng.random_range(0..=1)).collect();
    complex_with_ranks(rng, &ranks, &vec![0; rows])
}
