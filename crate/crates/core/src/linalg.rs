//! Dense complex linear algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, TorsionError};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Relative threshold below which singular values count as zero.
pub const RANK_TOL: f64 = 1e-10;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMat {
    CMat::from_row_iterator(rows, cols, data.iter().map(|&x| c(x)))
}

/// Scale used for rank decisions: the largest singular value, floored at 1 so
/// that roundoff-level matrices are recognised as zero.
pub fn rank_scale(smax: f64) -> f64 {
    smax.max(1.0)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5)
}

fn to_faer(m: &CMat) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    })
}

fn from_faer(m: faer::MatRef<'_, faer::c64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        C64::new(z.re, z.im)
    })
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = to_faer(&hermitian_part(m))
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("self-adjoint eigensolver converges");
    let vals = (0..n).map(|i| eig.S()[i].re).collect();
    (vals, from_faer(eig.U()))
}

/// Thin singular value decomposition `a = U diag(s) V^†`, `s` non-increasing.
pub fn svd(a: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return (zeros(m, 0), Vec::new(), zeros(n, 0));
    }
    let d = to_faer(a).thin_svd().expect("SVD converges");
    let s = (0..k).map(|i| d.S()[i].re).collect();
    (from_faer(d.U()), s, from_faer(d.V()))
}

/// Lower-triangular `L` with `h = L L^†`.
pub fn cholesky(h: &CMat) -> Result<CMat> {
    if h.nrows() == 0 {
        return Ok(zeros(0, 0));
    }
    hermitian_part(h)
        .cholesky()
        .map(|ch| ch.l())
        .ok_or_else(|| TorsionError::Domain("metric is not positive definite".into()))
}

/// Check positive definiteness with the relative eigenvalue floor 1e-12.
pub fn check_positive_definite(h: &CMat, what: &str) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(TorsionError::Dimension(format!("{what}: metric is not square")));
    }
    if max_abs(&(h - h.adjoint())) > 1e-9 * max_abs(h).max(1.0) {
        return Err(TorsionError::Domain(format!("{what}: metric is not Hermitian")));
    }
    let (vals, _) = hermitian_eigen(h);
    if let (Some(&lo), Some(&hi)) = (vals.first(), vals.last()) {
        if !(lo > 1e-12 * hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(TorsionError::Domain(format!(
                "{what}: metric is not positive definite (eigenvalues {lo:e}..{hi:e})"
            )));
        }
    }
    Ok(())
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    if m.nrows() == 0 {
        return Ok(zeros(0, 0));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| TorsionError::Numeric("singular matrix".into()))
}

/// Natural log of the determinant of a Hermitian positive definite matrix.
pub fn log_det_hpd(h: &CMat) -> Result<f64> {
    let l = cholesky(h)?;
    Ok((0..l.nrows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum())
}

/// Eigenvalues of a general square matrix (unordered).
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let vals = to_faer(m)
        .eigenvalues()
        .map_err(|e| TorsionError::Numeric(format!("eigenvalue iteration failed: {e:?}")))?;
    Ok(vals.into_iter().map(|z| C64::new(z.re, z.im)).collect())
}

/// Orthonormal basis (columns) of the column space of `a`.
pub fn column_space(a: &CMat) -> CMat {
    let (u, s, _) = svd(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let thr = RANK_TOL * rank_scale(smax);
    let keep = s.iter().filter(|&&x| x > thr).count();
    u.columns(0, keep).into_owned()
}

pub fn rank(a: &CMat) -> usize {
    column_space(a).ncols()
}

/// Orthonormal basis of the orthogonal complement of span(`b`) in C^n; `b`
/// must have orthonormal columns.
pub fn orth_complement(b: &CMat, n: usize) -> CMat {
    if b.ncols() == 0 {
        return eye(n);
    }
    let p = eye(n) - b * b.adjoint();
    let (vals, vecs) = hermitian_eigen(&p);
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] > 0.5).collect();
    let mut out = zeros(n, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &vecs.column(i));
    }
    out
}

/// Orthonormal basis of ker `a` (a has `n` columns).
pub fn kernel(a: &CMat, n: usize) -> CMat {
    if a.nrows() == 0 {
        return eye(n);
    }
    orth_complement(&column_space(&a.adjoint()), n)
}

/// Least-squares (minimum-norm) solution of `a x = b` with the shared rank threshold.
pub fn lstsq(a: &CMat, b: &CMat) -> Result<CMat> {
    let (u, s, v) = svd(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let thr = RANK_TOL * rank_scale(smax);
    let mut x = zeros(a.ncols(), b.ncols());
    let ub = u.adjoint() * b;
    for (i, &si) in s.iter().enumerate() {
        if si > thr {
            x += v.column(i) * (ub.row(i) / c(si));
        }
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(TorsionError::Numeric("least squares produced non-finite values".into()));
    }
    Ok(x)
}

/// Block-diagonal sum of square matrices.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let m: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(n, m);
    let (mut r, mut s) = (0, 0);
    for b in blocks {
        out.view_mut((r, s), b.shape()).copy_from(b);
        r += b.nrows();
        s += b.ncols();
    }
    out
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Matrix of a map expressed between orthonormal frames: with `h_src = L_s L_s^†`
/// and `h_dst = L_d L_d^†`, returns `L_d^† m L_s^{-†}`.
pub fn to_orthonormal_frames(m: &CMat, l_src: &CMat, l_dst: &CMat) -> Result<CMat> {
    let inv_src = inverse(&l_src.adjoint())?;
    Ok(l_dst.adjoint() * m * inv_src)
}
