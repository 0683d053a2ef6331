//! Double complexes, the spectral sequences of their two filtrations, page
//! torsions, and long exact sequences of three-column double complexes.
//!
//! Pages are computed as subquotients of leading components inside each
//! `c^{p,q}`, working in orthonormal coordinates. The representative space of
//! `E_r^{p,q}` is the orthogonal complement of `B_r` in `Z_r`, so the page
//! metric is the one induced by the ambient inner product (iterated Hodge
//! theory).

use crate::error::{Result, TorsionError};
use crate::flat_complex::{MetricComplex, TorsionFormResult};
use crate::hodge::{self, HodgeData};
use crate::linalg::{cholesky, column_space, eye, inverse, kernel, lstsq, max_abs, rank, zeros, CMat};
use crate::quadrature::QuadratureSpec;

/// Bigraded metric spaces `c^{p,q}` with anticommuting differentials.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleComplexData {
    /// `metrics[p][q]` is the Gram matrix of `c^{p,q}`.
    metrics: Vec<Vec<CMat>>,
    /// `vertical[p][q]`: `c^{p,q} → c^{p,q+1}` (q < Q − 1).
    vertical: Vec<Vec<CMat>>,
    /// `horizontal[p][q]`: `c^{p,q} → c^{p+1,q}` (p < P − 1).
    horizontal: Vec<Vec<CMat>>,
}

/// Which filtration defines the spectral sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filtration {
    /// `'F^p`: filtration by column index, `E_1 = H(∂)`.
    Columns,
    /// `''F^q`: filtration by row index, `E_1 = H(v)`.
    Rows,
}

impl DoubleComplexData {
    pub fn new(metrics: Vec<Vec<CMat>>, vertical: Vec<Vec<CMat>>, horizontal: Vec<Vec<CMat>>) -> Result<Self> {
        let d = DoubleComplexData { metrics, vertical, horizontal };
        d.validate()?;
        Ok(d)
    }

    /// Unit metrics on spaces of the given dimensions `dims[p][q]`.
    pub fn with_unit_metrics(dims: &[Vec<usize>], vertical: Vec<Vec<CMat>>, horizontal: Vec<Vec<CMat>>) -> Result<Self> {
        let metrics = dims.iter().map(|col| col.iter().map(|&n| eye(n)).collect()).collect();
        Self::new(metrics, vertical, horizontal)
    }

    pub fn zero(dims: &[Vec<usize>]) -> Result<Self> {
        let p = dims.len();
        let q = dims.first().map_or(0, |c| c.len());
        let vertical = (0..p)
            .map(|i| (0..q.saturating_sub(1)).map(|j| zeros(dims[i][j + 1], dims[i][j])).collect())
            .collect();
        let horizontal = (0..p.saturating_sub(1))
            .map(|i| (0..q).map(|j| zeros(dims[i + 1][j], dims[i][j])).collect())
            .collect();
        Self::with_unit_metrics(dims, vertical, horizontal)
    }

    pub fn columns(&self) -> usize {
        self.metrics.len()
    }

    pub fn rows(&self) -> usize {
        self.metrics.first().map_or(0, |c| c.len())
    }

    pub fn dim(&self, p: isize, q: isize) -> usize {
        if p < 0 || q < 0 || p as usize >= self.columns() || q as usize >= self.rows() {
            0
        } else {
            self.metrics[p as usize][q as usize].nrows()
        }
    }

    pub fn dims(&self) -> Vec<Vec<usize>> {
        self.metrics.iter().map(|c| c.iter().map(|m| m.nrows()).collect()).collect()
    }

    pub fn metric(&self, p: usize, q: usize) -> &CMat {
        &self.metrics[p][q]
    }

    /// `∂: c^{p,q} → c^{p,q+1}`, zero outside the grid.
    pub fn vertical(&self, p: isize, q: isize) -> CMat {
        if p >= 0 && q >= 0 && (p as usize) < self.columns() && (q as usize + 1) < self.rows() {
            self.vertical[p as usize][q as usize].clone()
        } else {
            zeros(self.dim(p, q + 1), self.dim(p, q))
        }
    }

    /// `v: c^{p,q} → c^{p+1,q}`, zero outside the grid.
    pub fn horizontal(&self, p: isize, q: isize) -> CMat {
        if p >= 0 && q >= 0 && (p as usize + 1) < self.columns() && (q as usize) < self.rows() {
            self.horizontal[p as usize][q as usize].clone()
        } else {
            zeros(self.dim(p + 1, q), self.dim(p, q))
        }
    }

    fn validate(&self) -> Result<()> {
        let (pp, qq) = (self.columns(), self.rows());
        if self.metrics.iter().any(|c| c.len() != qq) {
            return Err(TorsionError::Dimension("columns have different lengths".into()));
        }
        if self.vertical.len() != pp || self.vertical.iter().any(|c| c.len() != qq.saturating_sub(1)) {
            return Err(TorsionError::Dimension("vertical differentials have the wrong layout".into()));
        }
        if self.horizontal.len() != pp.saturating_sub(1) || self.horizontal.iter().any(|c| c.len() != qq) {
            return Err(TorsionError::Dimension("horizontal differentials have the wrong layout".into()));
        }
        for p in 0..pp {
            for q in 0..qq {
                crate::linalg::check_positive_definite(&self.metrics[p][q], &format!("metric of c^{{{p},{q}}}"))?;
            }
        }
        let (pi, qi) = (pp as isize, qq as isize);
        for p in 0..pi {
            for q in 0..qi {
                let d = self.vertical(p, q);
                let v = self.horizontal(p, q);
                if p < pi && q + 1 < qi && d.shape() != (self.dim(p, q + 1), self.dim(p, q)) {
                    return Err(TorsionError::Dimension(format!("∂ at ({p},{q}) has shape {:?}", d.shape())));
                }
                if p + 1 < pi && v.shape() != (self.dim(p + 1, q), self.dim(p, q)) {
                    return Err(TorsionError::Dimension(format!("v at ({p},{q}) has shape {:?}", v.shape())));
                }
            }
        }
        let scale = self
            .vertical
            .iter()
            .chain(&self.horizontal)
            .flatten()
            .map(max_abs)
            .fold(1.0, f64::max);
        let tol = 1e-9 * scale * scale;
        for p in 0..pi {
            for q in 0..qi {
                let dd = self.vertical(p, q + 1) * self.vertical(p, q);
                let vv = self.horizontal(p + 1, q) * self.horizontal(p, q);
                let dv = self.vertical(p + 1, q) * self.horizontal(p, q) + self.horizontal(p, q + 1) * self.vertical(p, q);
                for (name, m) in [("∂²", dd), ("v²", vv), ("∂v + v∂", dv)] {
                    if max_abs(&m) > tol {
                        return Err(TorsionError::Inconsistent(format!(
                            "{name} ≠ 0 at ({p},{q}) (max entry {:e})",
                            max_abs(&m)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Swap the roles of `p` and `q` (and of `∂` and `v`).
    pub fn transpose(&self) -> DoubleComplexData {
        let (pp, qq) = (self.columns(), self.rows());
        DoubleComplexData {
            metrics: (0..qq).map(|q| (0..pp).map(|p| self.metrics[p][q].clone()).collect()).collect(),
            vertical: (0..qq)
                .map(|q| (0..pp.saturating_sub(1)).map(|p| self.horizontal[p][q].clone()).collect())
                .collect(),
            horizontal: (0..qq.saturating_sub(1))
                .map(|q| (0..pp).map(|p| self.vertical[p][q].clone()).collect())
                .collect(),
        }
    }

    /// Column `p` as a complex.
    pub fn column_complex(&self, p: usize) -> Result<MetricComplex> {
        MetricComplex::new(self.vertical[p].clone(), self.metrics[p].clone())
    }

    /// Offsets of `c^{p, n−p}` inside `C^n`.
    fn total_layout(&self) -> (Vec<usize>, Vec<Vec<Option<usize>>>) {
        let (pp, qq) = (self.columns(), self.rows());
        let n_max = (pp + qq).saturating_sub(1);
        let mut dims = vec![0; n_max];
        let mut offset = vec![vec![None; qq]; pp];
        for (n, dn) in dims.iter_mut().enumerate() {
            for p in 0..pp {
                if n >= p && n - p < qq {
                    offset[p][n - p] = Some(*dn);
                    *dn += self.metrics[p][n - p].nrows();
                }
            }
        }
        (dims, offset)
    }

    /// `C^n = ⊕_{p+q=n} c^{p,q}` with `D = ∂ + v` and the orthogonal sum metric.
    pub fn total_complex(&self) -> Result<MetricComplex> {
        let (dims, offset) = self.total_layout();
        let (pp, qq) = (self.columns(), self.rows());
        let mut v: Vec<CMat> = (0..dims.len().saturating_sub(1)).map(|n| zeros(dims[n + 1], dims[n])).collect();
        let mut h: Vec<CMat> = dims.iter().map(|&d| zeros(d, d)).collect();
        for p in 0..pp {
            for q in 0..qq {
                let n = p + q;
                let o = offset[p][q].unwrap();
                let m = &self.metrics[p][q];
                h[n].view_mut((o, o), m.shape()).copy_from(m);
                if q + 1 < qq {
                    let o2 = offset[p][q + 1].unwrap();
                    let d = &self.vertical[p][q];
                    let mut blk = v[n].view_mut((o2, o), d.shape());
                    blk += d;
                }
                if p + 1 < pp {
                    let o2 = offset[p + 1][q].unwrap();
                    let d = &self.horizontal[p][q];
                    let mut blk = v[n].view_mut((o2, o), d.shape());
                    blk += d;
                }
            }
        }
        if dims.is_empty() {
            return Ok(MetricComplex::zero(&[0]));
        }
        MetricComplex::new(v, h)
    }

    /// Copy expressed in orthonormal coordinates, with the Cholesky frames.
    fn orthonormal(&self) -> Result<(DoubleComplexData, Vec<Vec<CMat>>)> {
        let frames: Vec<Vec<CMat>> = self
            .metrics
            .iter()
            .map(|c| c.iter().map(cholesky).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let conv = |m: &CMat, src: &CMat, dst: &CMat| -> Result<CMat> { Ok(dst.adjoint() * m * inverse(&src.adjoint())?) };
        let (pp, qq) = (self.columns(), self.rows());
        let mut vertical = Vec::with_capacity(pp);
        for p in 0..pp {
            let mut col = Vec::new();
            for q in 0..qq.saturating_sub(1) {
                col.push(conv(&self.vertical[p][q], &frames[p][q], &frames[p][q + 1])?);
            }
            vertical.push(col);
        }
        let mut horizontal = Vec::with_capacity(pp.saturating_sub(1));
        for p in 0..pp.saturating_sub(1) {
            let mut col = Vec::new();
            for q in 0..qq {
                col.push(conv(&self.horizontal[p][q], &frames[p][q], &frames[p + 1][q])?);
            }
            horizontal.push(col);
        }
        let metrics = self.dims().iter().map(|c| c.iter().map(|&n| eye(n)).collect()).collect();
        Ok((DoubleComplexData { metrics, vertical, horizontal }, frames))
    }
}

/// One page `E_r` of a spectral sequence.
#[derive(Clone, Debug)]
pub struct SpectralPage {
    pub r: usize,
    pub filtration: Filtration,
    /// Orthonormal representatives of `E_r^{p,q}` in orthonormal coordinates of `c^{p,q}`
    /// (indices refer to the filtered double complex, i.e. transposed for rows).
    reps_on: Vec<Vec<CMat>>,
    /// The same representatives in the original coordinates (`h`-orthonormal).
    reps: Vec<Vec<CMat>>,
    /// `d_r: E_r^{p,q} → E_r^{p+r,q−r+1}` in the representative bases.
    differential: Vec<Vec<Option<CMat>>>,
}

impl SpectralPage {
    pub fn dims(&self) -> Vec<Vec<usize>> {
        self.reps_on.iter().map(|c| c.iter().map(|m| m.ncols()).collect()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().flatten().sum()
    }

    /// Representatives of `E_r^{p,q}` as `h`-orthonormal columns in `c^{p,q}`.
    pub fn representatives(&self, p: usize, q: usize) -> &CMat {
        &self.reps[p][q]
    }

    pub fn differential(&self, p: usize, q: usize) -> Option<&CMat> {
        self.differential[p][q].as_ref()
    }

    /// The page as a complex graded by total degree, with the induced
    /// (orthonormal) metric. Pass `grams` to replace the metric on each
    /// `E_r^{p,q}` (Gram matrices in the representative basis).
    pub fn as_metric_complex_with(&self, grams: Option<&[Vec<CMat>]>) -> Result<MetricComplex> {
        let dims = self.dims();
        let pp = dims.len();
        let qq = dims.first().map_or(0, |c| c.len());
        let (tdims, offset) = total_layout(&dims);
        let n_max = tdims.len();
        let mut v: Vec<CMat> = (0..n_max - 1).map(|n| zeros(tdims[n + 1], tdims[n])).collect();
        let mut h: Vec<CMat> = tdims.iter().map(|&d| eye(d)).collect();
        for p in 0..pp {
            for q in 0..qq {
                let n = p + q;
                let o = offset[p][q];
                if let Some(g) = grams {
                    let m = &g[p][q];
                    h[n].view_mut((o, o), m.shape()).copy_from(m);
                }
                if let Some(d) = &self.differential[p][q] {
                    if d.nrows() == 0 || d.ncols() == 0 {
                        continue;
                    }
                    let (tp, tq) = (p + self.r, q + 1 - self.r);
                    let o2 = offset[tp][tq];
                    v[n].view_mut((o2, o), d.shape()).copy_from(d);
                }
            }
        }
        MetricComplex::new(v, h)
    }

    pub fn as_metric_complex(&self) -> Result<MetricComplex> {
        self.as_metric_complex_with(None)
    }
}

/// Dimensions by total degree and the offset of each `(p, q)` block inside its degree.
fn total_layout(dims: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let pp = dims.len();
    let qq = dims.first().map_or(0, |c| c.len());
    let n_max = (pp + qq).saturating_sub(1).max(1);
    let mut tdims = vec![0; n_max];
    let mut offset = vec![vec![0; qq]; pp];
    for (n, dn) in tdims.iter_mut().enumerate() {
        for p in 0..pp {
            if n >= p && n - p < qq {
                offset[p][n - p] = *dn;
                *dn += dims[p][n - p];
            }
        }
    }
    (tdims, offset)
}

/// Gram matrices on `E_{r+1}` induced by Gram matrices `prev_grams` on `E_r`:
/// `E_{r+1}` is the cohomology of `(E_r, d_r)`, metrised by Hodge theory.
/// Results are in the representative bases of `next`.
pub fn next_page_grams(prev: &SpectralPage, prev_grams: &[Vec<CMat>], next: &SpectralPage) -> Result<Vec<Vec<CMat>>> {
    if next.r != prev.r + 1 || next.filtration != prev.filtration {
        return Err(TorsionError::Config("pages are not consecutive".into()));
    }
    let cx = prev.as_metric_complex_with(Some(prev_grams))?;
    let hd = hodge::hodge_decompose(&cx)?;
    let (tdims, offset) = total_layout(&prev.dims());
    let mut out = Vec::with_capacity(next.reps_on.len());
    for (p, col) in next.reps_on.iter().enumerate() {
        let mut grams = Vec::with_capacity(col.len());
        for (q, reps) in col.iter().enumerate() {
            let coords = prev.reps_on[p][q].adjoint() * reps;
            let n = p + q;
            let mut z = zeros(tdims[n], reps.ncols());
            z.view_mut((offset[p][q], 0), coords.shape()).copy_from(&coords);
            grams.push(hd.induced_gram(n, &z));
        }
        out.push(grams);
    }
    Ok(out)
}

/// Pages `E_0, …, E_{r_max}` of the chosen filtration.
pub fn pages(d: &DoubleComplexData, filtration: Filtration, r_max: usize) -> Result<Vec<SpectralPage>> {
    let work = match filtration {
        Filtration::Columns => d.clone(),
        Filtration::Rows => d.transpose(),
    };
    let (on, frames) = work.orthonormal()?;
    let (pp, qq) = (on.columns() as isize, on.rows() as isize);
    let mut out = Vec::with_capacity(r_max + 1);
    for r in 0..=r_max {
        let mut reps_on = Vec::with_capacity(pp as usize);
        for p in 0..pp {
            let mut col = Vec::with_capacity(qq as usize);
            for q in 0..qq {
                let z = cycles_leading(&on, p, q, r)?;
                let b = boundaries_leading(&on, p, q, r)?;
                let comp = if b.ncols() == 0 {
                    z
                } else {
                    let proj = &z - &b * (b.adjoint() * &z);
                    column_space(&proj)
                };
                col.push(comp);
            }
            reps_on.push(col);
        }
        let mut differential = Vec::with_capacity(pp as usize);
        for p in 0..pp {
            let mut col = Vec::with_capacity(qq as usize);
            for q in 0..qq {
                let (tp, tq) = (p + r as isize, q - r as isize + 1);
                if tp >= pp || tq < 0 || tq >= qq {
                    col.push(None);
                    continue;
                }
                let src = &reps_on[p as usize][q as usize];
                let tgt = &reps_on[tp as usize][tq as usize];
                let mut m = zeros(tgt.ncols(), src.ncols());
                for k in 0..src.ncols() {
                    let x = src.column(k).into_owned();
                    let y = zigzag(&on, p, q, r, &CMat::from_column_slice(x.len(), 1, x.as_slice()))?;
                    let coords = tgt.adjoint() * y;
                    m.set_column(k, &coords.column(0));
                }
                col.push(Some(m));
            }
            differential.push(col);
        }
        let reps = reps_on
            .iter()
            .enumerate()
            .map(|(p, col)| {
                col.iter()
                    .enumerate()
                    .map(|(q, m)| Ok(inverse(&frames[p][q].adjoint())? * m))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(SpectralPage { r, filtration, reps_on, reps, differential });
    }
    Ok(out)
}

/// Leading components in `c^{p,q}` of `x ∈ F^p` with `Dx ∈ F^{p+r}`.
fn cycles_leading(d: &DoubleComplexData, p: isize, q: isize, r: usize) -> Result<CMat> {
    let n0 = d.dim(p, q);
    if r == 0 {
        return Ok(eye(n0));
    }
    let cols: Vec<(isize, isize)> = (0..r as isize).map(|j| (p + j, q - j)).collect();
    let rows: Vec<(isize, isize)> = (0..r as isize).map(|j| (p + j, q - j + 1)).collect();
    let sizes: Vec<usize> = cols.iter().map(|&(a, b)| d.dim(a, b)).collect();
    let rsizes: Vec<usize> = rows.iter().map(|&(a, b)| d.dim(a, b)).collect();
    let offs = prefix(&sizes);
    let roffs = prefix(&rsizes);
    let mut m = zeros(*roffs.last().unwrap(), *offs.last().unwrap());
    for j in 0..r {
        let (a, b) = cols[j];
        let blk = d.vertical(a, b);
        m.view_mut((roffs[j], offs[j]), blk.shape()).copy_from(&blk);
        if j > 0 {
            let (a2, b2) = cols[j - 1];
            let blk = d.horizontal(a2, b2);
            m.view_mut((roffs[j], offs[j - 1]), blk.shape()).copy_from(&blk);
        }
    }
    let k = kernel(&m, *offs.last().unwrap());
    Ok(column_space(&k.rows(0, n0).into_owned()))
}

/// Leading components in `c^{p,q}` of `Dy` for `y ∈ F^{p−r+1}` with `Dy ∈ F^p`.
fn boundaries_leading(d: &DoubleComplexData, p: isize, q: isize, r: usize) -> Result<CMat> {
    let n0 = d.dim(p, q);
    if r == 0 {
        return Ok(zeros(n0, 0));
    }
    let r_i = r as isize;
    let cols: Vec<(isize, isize)> = (0..r_i).map(|j| (p - r_i + 1 + j, q - 1 + r_i - 1 - j)).collect();
    let sizes: Vec<usize> = cols.iter().map(|&(a, b)| d.dim(a, b)).collect();
    let offs = prefix(&sizes);
    let total = *offs.last().unwrap();
    let mut blocks = Vec::new();
    for j in 0..r - 1 {
        let (a, b) = cols[j];
        let tgt = d.dim(a, b + 1);
        let mut blk = zeros(tgt, total);
        let dv = d.vertical(a, b);
        blk.view_mut((0, offs[j]), dv.shape()).copy_from(&dv);
        if j > 0 {
            let (a2, b2) = cols[j - 1];
            let hv = d.horizontal(a2, b2);
            blk.view_mut((0, offs[j - 1]), hv.shape()).copy_from(&hv);
        }
        blocks.push(blk);
    }
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut cons = zeros(rows, total);
    let mut at = 0;
    for b in &blocks {
        cons.view_mut((at, 0), b.shape()).copy_from(b);
        at += b.nrows();
    }
    let k = kernel(&cons, total);
    let mut lead = zeros(n0, total);
    let (a, b) = cols[r - 1];
    let dv = d.vertical(a, b);
    lead.view_mut((0, offs[r - 1]), dv.shape()).copy_from(&dv);
    if r > 1 {
        let (a2, b2) = cols[r - 2];
        let hv = d.horizontal(a2, b2);
        lead.view_mut((0, offs[r - 2]), hv.shape()).copy_from(&hv);
    }
    Ok(column_space(&(lead * k)))
}

/// Component in `c^{p+r, q−r+1}` of `D(x + x_{p+1} + … + x_{p+r−1})`, with the
/// tail chosen so that the intermediate components vanish.
fn zigzag(d: &DoubleComplexData, p: isize, q: isize, r: usize, x: &CMat) -> Result<CMat> {
    if r == 0 {
        return Ok(d.vertical(p, q) * x);
    }
    if r == 1 {
        return Ok(d.horizontal(p, q) * x);
    }
    let cols: Vec<(isize, isize)> = (1..r as isize).map(|j| (p + j, q - j)).collect();
    let sizes: Vec<usize> = cols.iter().map(|&(a, b)| d.dim(a, b)).collect();
    let rsizes: Vec<usize> = (1..r as isize).map(|j| d.dim(p + j, q - j + 1)).collect();
    let offs = prefix(&sizes);
    let roffs = prefix(&rsizes);
    let mut m = zeros(*roffs.last().unwrap(), *offs.last().unwrap());
    let mut rhs = zeros(*roffs.last().unwrap(), 1);
    for j in 0..r - 1 {
        let (a, b) = cols[j];
        let dv = d.vertical(a, b);
        m.view_mut((roffs[j], offs[j]), dv.shape()).copy_from(&dv);
        if j == 0 {
            let hx = d.horizontal(p, q) * x;
            let mut blk = rhs.view_mut((roffs[0], 0), hx.shape());
            blk -= &hx;
        } else {
            let (a2, b2) = cols[j - 1];
            let hv = d.horizontal(a2, b2);
            m.view_mut((roffs[j], offs[j - 1]), hv.shape()).copy_from(&hv);
        }
    }
    let sol = lstsq(&m, &rhs)?;
    let resid = &m * &sol - &rhs;
    if max_abs(&resid) > 1e-8 * max_abs(&rhs).max(1.0) {
        return Err(TorsionError::Numeric(format!(
            "zig-zag for d_{r} at ({p},{q}) has no solution (residual {:e})",
            max_abs(&resid)
        )));
    }
    let last = cols.len() - 1;
    let (a, b) = cols[last];
    let tail = sol.rows(offs[last], sizes[last]).into_owned();
    Ok(d.horizontal(a, b) * tail)
}

fn prefix(sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    for s in sizes {
        out.push(out.last().unwrap() + s);
    }
    out
}

/// Torsion of a page, graded by total degree.
pub fn page_torsion(page: &SpectralPage, quad: &QuadratureSpec) -> Result<TorsionFormResult> {
    page.as_metric_complex()?.torsion_form(quad)
}

/// Both sides of the spectral-sequence torsion identity for an acyclic total complex.
#[derive(Clone, Debug, PartialEq)]
pub struct GoetteReport {
    pub total: f64,
    pub pages: Vec<f64>,
    pub residual: f64,
}

/// Compare `T_f(C)` with `Σ_r T_f(E_r)` at degree 0 (columns filtration).
pub fn goette_identity_check(d: &DoubleComplexData, quad: &QuadratureSpec) -> Result<GoetteReport> {
    goette_identity_check_with(d, Filtration::Columns, quad)
}

pub fn goette_identity_check_with(d: &DoubleComplexData, filtration: Filtration, quad: &QuadratureSpec) -> Result<GoetteReport> {
    let total = d.total_complex()?;
    let hd = hodge::hodge_decompose(&total)?;
    if hd.betti.iter().any(|&b| b > 0) {
        return Err(TorsionError::Unsupported(
            "the spectral torsion identity is only checked for acyclic total complexes".into(),
        ));
    }
    let t_total = total.torsion_form(quad)?.degree0();
    let r_max = d.columns().max(d.rows()) + 1;
    let mut page_values = Vec::new();
    for page in pages(d, filtration, r_max)? {
        if page.total_dim() == 0 {
            break;
        }
        page_values.push(page_torsion(&page, quad)?.degree0());
    }
    let sum: f64 = page_values.iter().sum();
    Ok(GoetteReport { total: t_total, residual: (t_total - sum).abs(), pages: page_values })
}

/// `E' ∘ E` for exact sequences sharing the junction term `E^l = E'^0`.
pub fn compose(e: &MetricComplex, e_prime: &MetricComplex) -> Result<MetricComplex> {
    let l = e.len() - 1;
    let junction = &e.h()[l];
    let start = &e_prime.h()[0];
    if junction.shape() != start.shape() || max_abs(&(junction - start)) > 1e-12 * max_abs(junction).max(1.0) {
        return Err(TorsionError::Config("junction spaces carry different metrics".into()));
    }
    if l == 0 || e_prime.len() < 2 {
        return Err(TorsionError::Config("composition needs at least one map on each side".into()));
    }
    let mut v: Vec<CMat> = e.v()[..l - 1].to_vec();
    v.push(&e_prime.v()[0] * &e.v()[l - 1]);
    v.extend_from_slice(&e_prime.v()[1..]);
    let mut h: Vec<CMat> = e.h()[..l].to_vec();
    h.extend_from_slice(&e_prime.h()[1..]);
    MetricComplex::new(v, h)
}

/// Long exact cohomology sequence of a three-column double complex with exact rows.
#[derive(Clone, Debug)]
pub struct LongExactSequence {
    /// Graded so that `H^q` of column `p` sits in degree `3q + p`.
    pub complex: MetricComplex,
    /// `(column, q)` for each degree of `complex`.
    pub labels: Vec<(usize, usize)>,
}

/// Build the long exact sequence `… → H^q(c^{0,•}) → H^q(c^{1,•}) → H^q(c^{2,•}) → H^{q+1}(c^{0,•}) → …`.
///
/// Classes are expressed in the Hodge bases of each column. `grams[p][q]`,
/// if given, replaces the induced metric on `H^q` of column `p` (in that basis).
pub fn long_exact_sequence(d: &DoubleComplexData, grams: Option<&[Vec<CMat>]>) -> Result<LongExactSequence> {
    if d.columns() != 3 {
        return Err(TorsionError::Config("the long exact sequence needs exactly three columns".into()));
    }
    let qq = d.rows();
    let cols: Vec<MetricComplex> = (0..3).map(|p| d.column_complex(p)).collect::<Result<_>>()?;
    let hodge: Vec<HodgeData> = cols.iter().map(hodge::hodge_decompose).collect::<Result<_>>()?;
    let n = 3 * qq;
    let mut dims = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for q in 0..qq {
        for (p, hd) in hodge.iter().enumerate() {
            dims.push(hd.betti[q]);
            labels.push((p, q));
        }
    }
    let mut v = Vec::with_capacity(n - 1);
    for idx in 0..n - 1 {
        let (p, q) = labels[idx];
        let src = &hodge[p].harmonic[q];
        let map = match p {
            0 | 1 => {
                let image = d.horizontal(p as isize, q as isize) * src;
                hodge[p + 1].class_coordinates(q, &image)
            }
            _ => {
                // Connecting map: lift along c^{1,q} → c^{2,q}, apply ∂, pull back along c^{0,q+1} → c^{1,q+1}.
                let lift = lstsq(&d.horizontal(1, q as isize), src)?;
                let db = d.vertical(1, q as isize) * lift;
                let pre = lstsq(&d.horizontal(0, q as isize + 1), &db)?;
                let resid = d.horizontal(0, q as isize + 1) * &pre - &db;
                if max_abs(&resid) > 1e-8 * max_abs(&db).max(1.0) {
                    return Err(TorsionError::Construction(format!(
                        "connecting map at q = {q}: rows are not exact (residual {:e})",
                        max_abs(&resid)
                    )));
                }
                hodge[0].class_coordinates(q + 1, &pre)
            }
        };
        v.push(map);
    }
    let h: Vec<CMat> = labels
        .iter()
        .map(|&(p, q)| match grams {
            Some(g) => g[p][q].clone(),
            None => eye(hodge[p].betti[q]),
        })
        .collect();
    // Exactness at every node.
    for i in 0..n {
        let in_rank = if i > 0 { rank(&v[i - 1]) } else { 0 };
        let out_rank = if i + 1 < n { rank(&v[i]) } else { 0 };
        if in_rank + out_rank != dims[i] {
            return Err(TorsionError::Construction(format!(
                "sequence is not exact at H^{} of column {} (dim {}, ranks in {in_rank}, out {out_rank})",
                labels[i].1, labels[i].0, dims[i]
            )));
        }
    }
    let complex = MetricComplex::new(v, h)?;
    Ok(LongExactSequence { complex, labels })
}

/// Check that the rows `c^{0,q} → c^{1,q} → c^{2,q}` are short exact and
/// orthogonally split: the first map is an isometric embedding, the second a
/// co-isometry onto, and the image of the first is the kernel of the second.
pub fn rows_exact_and_split(d: &DoubleComplexData, tol: f64) -> Result<bool> {
    if d.columns() != 3 {
        return Err(TorsionError::Config("row check needs three columns".into()));
    }
    for q in 0..d.rows() as isize {
        let i = d.horizontal(0, q);
        let j = d.horizontal(1, q);
        let (g0, g1, g2) = (d.metric(0, q as usize), d.metric(1, q as usize), d.metric(2, q as usize));
        let iso = i.adjoint() * g1 * &i - g0;
        if max_abs(&iso) > tol {
            return Ok(false);
        }
        // Adjoint of j for the metrics, then j j* = 1 on c^{2,q}.
        let jstar = inverse(g1)? * j.adjoint() * g2;
        if max_abs(&(&j * &jstar - eye(j.nrows()))) > tol {
            return Ok(false);
        }
        if rank(&i) + rank(&j) != d.dim(1, q) || max_abs(&(&j * &i)) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
