//! Flat complexes with metrics, their characteristic forms, the metric
//! variation class `f̃`, and the torsion form `T_f`.
//!
//! A complex is stored in its flat frame: the differential `v` is constant
//! and the connection is trivial, so all geometry sits in the metric. Over a
//! formal point the metric is a 1-jet `h0 + Σ ξ_j H_j`; over a circle it is
//! sampled on the grid.

use crate::error::{Result, TorsionError};
use crate::forms::{fourier_derivative, sqrt_two_i_pi, Form, FormAlgebra, FormMatrix, MatrixFunction};
use crate::hodge;
use crate::linalg::{block_diag, c, check_positive_definite, hermitian_eigen, inverse, max_abs, zeros, CMat, C64};
use crate::quadrature::{integrate, integrate_dt_over_t, QuadratureSpec};

/// Where the complex lives and how its metric varies.
#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    Point,
    /// Formal neighbourhood of a point: `metric_derivatives[i][j]` is the
    /// derivative of `h^{E^i}` along generator `j`.
    Formal { generators: usize, truncation: usize, metric_derivatives: Vec<Vec<CMat>> },
    /// Circle of the given circumference in the flat frame on `[0, L)`:
    /// `metrics[k][i]` is `h^{E^i}` at grid point `k`, `holonomy[i]` the
    /// monodromy of `E^i`.
    Circle { circumference: f64, metrics: Vec<Vec<CMat>>, holonomy: Vec<CMat> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricComplex {
    v: Vec<CMat>,
    h: Vec<CMat>,
    base: Base,
}

/// Path of metrics used by `tilde_f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricPath {
    Linear,
    LogLinear,
}

fn chain_tolerance(v: &[CMat]) -> f64 {
    1e-9 * v.iter().map(max_abs).fold(1.0, f64::max).powi(2)
}

impl MetricComplex {
    /// A complex over a point. `v[i]` maps `E^i` to `E^{i+1}`.
    pub fn new(v: Vec<CMat>, h: Vec<CMat>) -> Result<Self> {
        let out = MetricComplex { v, h, base: Base::Point };
        out.validate()?;
        Ok(out)
    }

    /// The complex with identity metrics.
    pub fn with_unit_metrics(v: Vec<CMat>, dims: &[usize]) -> Result<Self> {
        Self::new(v, dims.iter().map(|&d| CMat::identity(d, d)).collect())
    }

    /// Zero differentials on spaces of the given dimensions with unit metrics.
    pub fn zero(dims: &[usize]) -> Self {
        let v = dims.windows(2).map(|w| zeros(w[1], w[0])).collect();
        Self::with_unit_metrics(v, dims).expect("zero complex is valid")
    }

    pub fn with_base(mut self, base: Base) -> Result<Self> {
        if let Base::Circle { metrics, .. } = &base {
            if let Some(first) = metrics.first() {
                self.h = first.clone();
            }
        }
        self.base = base;
        self.validate()?;
        Ok(self)
    }

    /// Circle family from a metric function `θ ↦ [h^{E^i}(θ)]`.
    pub fn over_circle(
        v: Vec<CMat>,
        grid: usize,
        circumference: f64,
        holonomy: Vec<CMat>,
        metric: impl Fn(f64) -> Vec<CMat>,
    ) -> Result<Self> {
        let alg = FormAlgebra::circle(grid, circumference)?;
        let metrics: Vec<Vec<CMat>> = alg.grid_points().into_iter().map(metric).collect();
        let h = metrics[0].clone();
        MetricComplex { v, h, base: Base::Point }.with_base(Base::Circle { circumference, metrics, holonomy })
    }

    fn validate(&self) -> Result<()> {
        let k = self.h.len();
        if k == 0 {
            return Err(TorsionError::Dimension("complex has no terms".into()));
        }
        if self.v.len() + 1 != k {
            return Err(TorsionError::Dimension(format!(
                "{} differentials for {} terms",
                self.v.len(),
                k
            )));
        }
        let dims = self.dims();
        for (i, h) in self.h.iter().enumerate() {
            check_positive_definite(h, &format!("h^{{E^{i}}}"))?;
        }
        for (i, v) in self.v.iter().enumerate() {
            if v.shape() != (dims[i + 1], dims[i]) {
                return Err(TorsionError::Dimension(format!(
                    "v_{i} has shape {:?}, expected ({}, {})",
                    v.shape(),
                    dims[i + 1],
                    dims[i]
                )));
            }
        }
        let tol = chain_tolerance(&self.v);
        for i in 0..self.v.len().saturating_sub(1) {
            let sq = &self.v[i + 1] * &self.v[i];
            if max_abs(&sq) > tol {
                return Err(TorsionError::Inconsistent(format!(
                    "v_{} ∘ v_{} ≠ 0 (max entry {:e})",
                    i + 1,
                    i,
                    max_abs(&sq)
                )));
            }
        }
        match &self.base {
            Base::Point => {}
            Base::Formal { generators, truncation, metric_derivatives } => {
                FormAlgebra::formal_truncated(*generators, *truncation)?;
                if metric_derivatives.len() != k {
                    return Err(TorsionError::Dimension("metric jet has wrong length".into()));
                }
                for (i, ders) in metric_derivatives.iter().enumerate() {
                    if ders.len() != *generators {
                        return Err(TorsionError::Dimension(format!(
                            "degree {i}: {} derivatives for {generators} generators",
                            ders.len()
                        )));
                    }
                    for d in ders {
                        if d.shape() != (dims[i], dims[i]) || max_abs(&(d - d.adjoint())) > 1e-12 * max_abs(d).max(1.0) {
                            return Err(TorsionError::Domain(format!(
                                "degree {i}: metric derivative must be a Hermitian {}x{} matrix",
                                dims[i], dims[i]
                            )));
                        }
                    }
                }
            }
            Base::Circle { circumference, metrics, holonomy } => {
                FormAlgebra::circle(metrics.len(), *circumference)?;
                if holonomy.len() != k {
                    return Err(TorsionError::Dimension("one holonomy matrix per degree is required".into()));
                }
                for (g, hs) in metrics.iter().enumerate() {
                    if hs.len() != k || hs.iter().zip(&dims).any(|(h, &d)| h.shape() != (d, d)) {
                        return Err(TorsionError::Dimension(format!("metric family malformed at grid point {g}")));
                    }
                    for (i, h) in hs.iter().enumerate() {
                        check_positive_definite(h, &format!("h^{{E^{i}}} at grid point {g}"))?;
                    }
                }
                for (i, u) in holonomy.iter().enumerate() {
                    if u.shape() != (dims[i], dims[i]) {
                        return Err(TorsionError::Dimension(format!("holonomy of degree {i} has wrong shape")));
                    }
                    let h0 = &metrics[0][i];
                    if max_abs(&(u.adjoint() * h0 * u - h0)) > 1e-9 * max_abs(h0) {
                        return Err(TorsionError::Domain(format!(
                            "holonomy of degree {i} does not preserve the metric at θ = 0"
                        )));
                    }
                }
                for (i, v) in self.v.iter().enumerate() {
                    if max_abs(&(v * &holonomy[i] - &holonomy[i + 1] * v)) > tol.max(1e-9) {
                        return Err(TorsionError::Inconsistent(format!(
                            "v_{i} does not commute with the holonomy"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims().iter().all(|&d| d == 0)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.h.iter().map(|h| h.nrows()).collect()
    }

    pub fn v(&self) -> &[CMat] {
        &self.v
    }

    pub fn h(&self) -> &[CMat] {
        &self.h
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn algebra(&self) -> FormAlgebra {
        match &self.base {
            Base::Point => FormAlgebra::point(),
            Base::Formal { generators, truncation, .. } => {
                FormAlgebra::FormalPoint { generators: *generators, truncation: *truncation }
            }
            Base::Circle { circumference, metrics, .. } => {
                FormAlgebra::CircleBase { grid: metrics.len(), circumference: *circumference }
            }
        }
    }

    /// Same differential over a point, with new metrics.
    pub fn with_metrics(&self, h: Vec<CMat>) -> Result<Self> {
        MetricComplex::new(self.v.clone(), h)
    }

    /// The fibre at a grid point (circle) or at the base point.
    pub fn fiber(&self, grid_point: usize) -> MetricComplex {
        let h = match &self.base {
            Base::Circle { metrics, .. } => metrics[grid_point].clone(),
            _ => self.h.clone(),
        };
        MetricComplex { v: self.v.clone(), h, base: Base::Point }
    }

    /// Degree label of each basis vector of the total space.
    pub fn grading(&self) -> Vec<i32> {
        self.dims()
            .iter()
            .enumerate()
            .flat_map(|(i, &d)| std::iter::repeat(i as i32).take(d))
            .collect()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = vec![0];
        for d in self.dims() {
            off.push(off.last().unwrap() + d);
        }
        off
    }

    /// The differential on the total space `⊕ E^i`.
    pub fn total_v(&self) -> CMat {
        let off = self.offsets();
        let n = *off.last().unwrap();
        let mut out = zeros(n, n);
        for (i, v) in self.v.iter().enumerate() {
            out.view_mut((off[i + 1], off[i]), v.shape()).copy_from(v);
        }
        out
    }

    /// Adjoint of the total differential with respect to metrics `h`.
    fn total_adjoint(&self, h: &[CMat]) -> Result<CMat> {
        let hh = block_diag(h);
        Ok(inverse(&hh)? * self.total_v().adjoint() * hh)
    }

    /// Adjoint `v*` of the total differential for the fibre metric.
    pub fn adjoint_total(&self) -> Result<CMat> {
        self.total_adjoint(&self.h)
    }

    /// `h_t = ⊕ t^i h^{E^i}`.
    pub fn rescale_metric(&self, t: f64) -> Result<MetricComplex> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(TorsionError::Domain(format!("rescaling parameter {t} must be positive")));
        }
        let scale = |i: usize, h: &CMat| h * c(t.powi(i as i32));
        let h = self.h.iter().enumerate().map(|(i, h)| scale(i, h)).collect();
        let base = match &self.base {
            Base::Point => Base::Point,
            Base::Formal { generators, truncation, metric_derivatives } => Base::Formal {
                generators: *generators,
                truncation: *truncation,
                metric_derivatives: metric_derivatives
                    .iter()
                    .enumerate()
                    .map(|(i, ds)| ds.iter().map(|d| scale(i, d)).collect())
                    .collect(),
            },
            Base::Circle { circumference, metrics, holonomy } => Base::Circle {
                circumference: *circumference,
                metrics: metrics
                    .iter()
                    .map(|hs| hs.iter().enumerate().map(|(i, h)| scale(i, h)).collect())
                    .collect(),
                holonomy: holonomy.clone(),
            },
        };
        Ok(MetricComplex { v: self.v.clone(), h, base })
    }

    /// `ω(E, h) = h^{-1} dh` as a matrix of 1-forms.
    pub fn omega(&self) -> Result<FormMatrix> {
        let alg = self.algebra();
        let grading = self.grading();
        let mut out = FormMatrix::zeros(alg, grading);
        match &self.base {
            Base::Point => {}
            Base::Formal { generators, metric_derivatives, truncation } => {
                if *truncation >= 1 {
                    let hinv = inverse(&block_diag(&self.h))?;
                    for j in 0..*generators {
                        let d: Vec<CMat> = metric_derivatives.iter().map(|ds| ds[j].clone()).collect();
                        *out.block_mut(1 << j) = &hinv * block_diag(&d);
                    }
                }
            }
            Base::Circle { circumference, metrics, .. } => {
                let grid = metrics.len();
                let derivs = circle_metric_derivatives(metrics, *circumference);
                for k in 0..grid {
                    let hinv = inverse(&block_diag(&metrics[k]))?;
                    *out.block_mut(grid + k) = hinv * block_diag(&derivs[k]);
                }
            }
        }
        Ok(out)
    }

    /// `X_t = ½(ω + t v* − v)`, where `v*` is the adjoint for the unscaled metric.
    pub fn x_t(&self, t: f64) -> Result<FormMatrix> {
        if !(t > 0.0) {
            return Err(TorsionError::Domain(format!("t = {t} must be positive")));
        }
        let mut out = self.omega()?;
        let v = self.total_v();
        let alg = self.algebra();
        match &self.base {
            Base::Circle { metrics, .. } => {
                for (k, hs) in metrics.iter().enumerate() {
                    let vstar = self.total_adjoint(hs)?;
                    *out.block_mut(k) = vstar * c(t) - &v;
                }
            }
            _ => {
                *out.block_mut(0) = self.adjoint_total()? * c(t) - &v;
            }
        }
        debug_assert_eq!(out.algebra(), alg);
        Ok(out.scale(c(0.5)))
    }

    /// `f(∇, h) = (2iπ)^{1/2} φ tr_s f(ω/2)`.
    pub fn char_form(&self) -> Result<Form> {
        let half = self.omega()?.scale(c(0.5));
        let f = half.matrix_function(MatrixFunction::F)?;
        Ok(f.supertrace().phi_rescale().scale(sqrt_two_i_pi()))
    }

    /// Number operator on the total space.
    fn number_operator(&self) -> CMat {
        let g = self.grading();
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(g.len(), g.iter().map(|&i| c(i as f64))))
    }

    /// `f^∧(A', h_t) = φ tr_s[(N/2) f'(X_t)]`.
    pub fn f_wedge(&self, t: f64) -> Result<Form> {
        let frame = self.adapted_frame()?;
        self.f_wedge_in(&frame, t)
    }

    fn f_wedge_in(&self, frame: &AdaptedFrame, t: f64) -> Result<Form> {
        let x = frame.x_t(t);
        let fp = x.matrix_function(MatrixFunction::FPrime)?;
        let alg = self.algebra();
        let half_n = FormMatrix::from_scalar_matrix(alg, self.grading(), &(self.number_operator() * c(0.5)));
        Ok(half_n.wedge_mul(&fp)?.supertrace().phi_rescale())
    }

    /// Pointwise orthonormal frames diagonalising the Laplacians, with `v`
    /// set exactly to zero on harmonic vectors. Evaluating `X_t` there keeps
    /// roundoff in `exp(X_t²)` from being amplified by the `t Δ` factor.
    fn adapted_frame(&self) -> Result<AdaptedFrame> {
        let alg = self.algebra();
        let omega = self.omega()?;
        let grading = self.grading();
        let mut base = FormMatrix::zeros(alg, grading);
        let mut vhat = Vec::new();
        let scalar_slots = alg.scalar_slots();
        let mut transforms = Vec::new();
        for (k, &slot) in scalar_slots.iter().enumerate() {
            let fiber = self.fiber(k);
            let (t, v) = harmonic_adapted(&fiber)?;
            vhat.push((slot, v));
            transforms.push(t);
        }
        for s in 0..alg.slots() {
            if scalar_slots.contains(&s) {
                continue;
            }
            let k = match alg {
                FormAlgebra::CircleBase { grid, .. } => s % grid,
                _ => 0,
            };
            let (t, tinv) = &transforms[k];
            *base.block_mut(s) = tinv * omega.block(s) * t;
        }
        Ok(AdaptedFrame { base, vhat })
    }

    /// Torsion form of Bismut–Lott type with the counterterms fixed by the
    /// ranks of `E` and of its cohomology.
    pub fn torsion_form(&self, quad: &QuadratureSpec) -> Result<TorsionFormResult> {
        let chi = hodge::chi_primes(&self.fiber(0))?;
        let alg = self.algebra();
        let scalar_slots = alg.scalar_slots();
        let d_e = chi.d_e as f64;
        let d_h = chi.d_h as f64;
        let frame = self.adapted_frame()?;
        let integrand = |t: f64| -> Result<Vec<f64>> {
            let mut coeffs: Vec<C64> = self.f_wedge_in(&frame, t)?.coeffs().to_vec();
            let fp = (1.0 - t / 2.0) * (-t / 4.0).exp();
            let counter = d_h / 2.0 + (d_e - d_h) / 2.0 * fp;
            for &s in &scalar_slots {
                coeffs[s] -= c(counter);
            }
            Ok(coeffs.iter().flat_map(|z| [z.re, z.im]).collect())
        };
        let integral = integrate_dt_over_t(integrand, quad)?;
        let coeffs: Vec<C64> = integral
            .value
            .chunks(2)
            .map(|p| C64::new(-p[0], -p[1]))
            .collect();
        Ok(TorsionFormResult {
            form: Form::from_coeffs(alg, coeffs)?,
            d_e: chi.d_e,
            d_h: chi.d_h,
            error_estimate: integral.error_estimate,
            evaluations: integral.evaluations,
        })
    }

    /// `f̃(∇, h_0, h_1)`, where `self` carries `h_0` and `other` carries `h_1`
    /// on the same differential and base.
    pub fn tilde_f(&self, other: &MetricComplex, path: MetricPath, quad: &QuadratureSpec) -> Result<Form> {
        if self.dims() != other.dims() || self.algebra() != other.algebra() {
            return Err(TorsionError::Config("tilde_f needs two metrics on the same complex".into()));
        }
        let alg = self.algebra();
        let grading = self.grading();
        let integrand = |l: f64| -> Result<Vec<f64>> {
            let (at, rate) = self.metric_path_point(other, path, l)?;
            let alg2 = at.algebra();
            let mut dot = FormMatrix::zeros(alg2, grading.clone());
            match &at.base {
                Base::Circle { metrics, .. } => {
                    for (k, hs) in metrics.iter().enumerate() {
                        *dot.block_mut(k) = inverse(&block_diag(hs))? * block_diag(&rate[k]) * c(0.5);
                    }
                }
                _ => {
                    *dot.block_mut(0) = inverse(&block_diag(&at.h))? * block_diag(&rate[0]) * c(0.5);
                }
            }
            let fp = at.omega()?.scale(c(0.5)).matrix_function(MatrixFunction::FPrime)?;
            let form = dot.wedge_mul(&fp)?.supertrace().phi_rescale();
            Ok(form.coeffs().iter().flat_map(|z| [z.re, z.im]).collect())
        };
        let integral = integrate(integrand, 0.0, 1.0, quad)?;
        let coeffs = integral.value.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
        Form::from_coeffs(alg, coeffs)
    }

    /// The complex with metric `h_l` on the path, and `∂h_l/∂l` per scalar slot.
    fn metric_path_point(&self, other: &MetricComplex, path: MetricPath, l: f64) -> Result<(MetricComplex, Vec<Vec<CMat>>)> {
        let lin = |a: &CMat, b: &CMat| a * c(1.0 - l) + b * c(l);
        match path {
            MetricPath::Linear => {
                let h: Vec<CMat> = self.h.iter().zip(&other.h).map(|(a, b)| lin(a, b)).collect();
                let rate_pt: Vec<CMat> = self.h.iter().zip(&other.h).map(|(a, b)| b - a).collect();
                let (base, rate) = match (&self.base, &other.base) {
                    (Base::Point, Base::Point) => (Base::Point, vec![rate_pt]),
                    (
                        Base::Formal { generators, truncation, metric_derivatives: d0 },
                        Base::Formal { metric_derivatives: d1, .. },
                    ) => (
                        Base::Formal {
                            generators: *generators,
                            truncation: *truncation,
                            metric_derivatives: d0
                                .iter()
                                .zip(d1)
                                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| lin(x, y)).collect())
                                .collect(),
                        },
                        vec![rate_pt],
                    ),
                    (
                        Base::Circle { circumference, metrics: m0, holonomy },
                        Base::Circle { metrics: m1, .. },
                    ) => {
                        let metrics: Vec<Vec<CMat>> = m0
                            .iter()
                            .zip(m1)
                            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| lin(x, y)).collect())
                            .collect();
                        let rate = m0
                            .iter()
                            .zip(m1)
                            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| y - x).collect())
                            .collect();
                        (Base::Circle { circumference: *circumference, metrics, holonomy: holonomy.clone() }, rate)
                    }
                    _ => return Err(TorsionError::Config("metrics live over different bases".into())),
                };
                Ok((MetricComplex { v: self.v.clone(), h, base }, rate))
            }
            MetricPath::LogLinear => {
                let pair = |a: &CMat, b: &CMat| log_linear(a, b, l);
                match (&self.base, &other.base) {
                    (Base::Point, Base::Point) => {
                        let (h, rate): (Vec<CMat>, Vec<CMat>) =
                            self.h.iter().zip(&other.h).map(|(a, b)| pair(a, b)).collect::<Result<Vec<_>>>()?.into_iter().unzip();
                        Ok((MetricComplex { v: self.v.clone(), h, base: Base::Point }, vec![rate]))
                    }
                    (
                        Base::Circle { circumference, metrics: m0, holonomy },
                        Base::Circle { metrics: m1, .. },
                    ) => {
                        let mut metrics = Vec::new();
                        let mut rate = Vec::new();
                        for (a, b) in m0.iter().zip(m1) {
                            let (hs, rs): (Vec<CMat>, Vec<CMat>) =
                                a.iter().zip(b).map(|(x, y)| pair(x, y)).collect::<Result<Vec<_>>>()?.into_iter().unzip();
                            metrics.push(hs);
                            rate.push(rs);
                        }
                        let h = metrics[0].clone();
                        let base = Base::Circle { circumference: *circumference, metrics, holonomy: holonomy.clone() };
                        Ok((MetricComplex { v: self.v.clone(), h, base }, rate))
                    }
                    _ => Err(TorsionError::Unsupported("log-linear paths need a point or circle base".into())),
                }
            }
        }
    }
}

/// `h_l = h0^{1/2} exp(l log(h0^{-1/2} h1 h0^{-1/2})) h0^{1/2}` and its `l`-derivative.
fn log_linear(h0: &CMat, h1: &CMat, l: f64) -> Result<(CMat, CMat)> {
    let (vals, vecs) = hermitian_eigen(h0);
    let sqrt = &vecs * CMat::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|x| c(x.sqrt())))) * vecs.adjoint();
    let isqrt = inverse(&sqrt)?;
    let m = &isqrt * h1 * &isqrt;
    let (mv, mvecs) = hermitian_eigen(&m);
    if mv.iter().any(|&x| !(x > 0.0)) {
        return Err(TorsionError::Domain("metric path leaves the positive cone".into()));
    }
    let diag = |f: &dyn Fn(f64) -> f64| {
        &mvecs * CMat::from_diagonal(&nalgebra::DVector::from_iterator(mv.len(), mv.iter().map(|&x| c(f(x))))) * mvecs.adjoint()
    };
    let e = diag(&|x: f64| x.powf(l));
    let de = diag(&|x: f64| x.ln() * x.powf(l));
    Ok((&sqrt * e * &sqrt, &sqrt * de * &sqrt))
}

/// Fourier derivative of every metric entry along the circle.
fn circle_metric_derivatives(metrics: &[Vec<CMat>], circumference: f64) -> Vec<Vec<CMat>> {
    let grid = metrics.len();
    let k = metrics[0].len();
    let mut out: Vec<Vec<CMat>> = metrics.iter().map(|hs| hs.iter().map(|h| zeros(h.nrows(), h.ncols())).collect()).collect();
    for i in 0..k {
        let d = metrics[0][i].nrows();
        for r in 0..d {
            for s in 0..d {
                let samples: Vec<C64> = (0..grid).map(|g| metrics[g][i][(r, s)]).collect();
                let der = fourier_derivative(&samples, circumference);
                for g in 0..grid {
                    out[g][i][(r, s)] = der[g];
                }
            }
        }
    }
    out
}

struct AdaptedFrame {
    /// `ω` in the adapted frames (scalar slots left empty).
    base: FormMatrix,
    /// `(scalar slot, v̂)` with `v̂` the total differential in the adapted frame.
    vhat: Vec<(usize, CMat)>,
}

impl AdaptedFrame {
    fn x_t(&self, t: f64) -> FormMatrix {
        let mut x = self.base.clone();
        for (slot, v) in &self.vhat {
            *x.block_mut(*slot) = v.adjoint() * c(t) - v;
        }
        x.scale(c(0.5))
    }
}

/// Frame change `T` (original = `T` · adapted) and the total differential in
/// the adapted frame for a complex over a point.
fn harmonic_adapted(e: &MetricComplex) -> Result<((CMat, CMat), CMat)> {
    let data = hodge::hodge_decompose(e)?;
    let dims = e.dims();
    let mut blocks = Vec::with_capacity(dims.len());
    let mut kernel_cols: Vec<Vec<usize>> = Vec::with_capacity(dims.len());
    for (q, h) in e.h().iter().enumerate() {
        let l = crate::linalg::cholesky(h)?;
        let (vals, w) = hermitian_eigen(&(l.adjoint() * &data.laplacians[q] * inverse(&l.adjoint())?));
        kernel_cols.push((0..vals.len()).filter(|&i| vals[i] <= data.threshold).collect());
        blocks.push(inverse(&l.adjoint())? * w);
    }
    let t = block_diag(&blocks);
    let tinv = inverse(&t)?;
    let mut v = &tinv * e.total_v() * &t;
    let mut off = vec![0];
    for d in &dims {
        off.push(off.last().unwrap() + d);
    }
    for (q, cols) in kernel_cols.iter().enumerate() {
        for &i in cols {
            let idx = off[q] + i;
            v.row_mut(idx).fill(c(0.0));
            v.column_mut(idx).fill(c(0.0));
        }
    }
    // v only maps degree q to q + 1.
    for r in 0..v.nrows() {
        for col in 0..v.ncols() {
            let (qr, qc) = (degree_of(&off, r), degree_of(&off, col));
            if qr != qc + 1 {
                v[(r, col)] = c(0.0);
            }
        }
    }
    Ok(((t, tinv), v))
}

fn degree_of(off: &[usize], i: usize) -> usize {
    off.windows(2).position(|w| w[0] <= i && i < w[1]).unwrap_or(0)
}

/// The torsion form with its bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionFormResult {
    pub form: Form,
    pub d_e: i64,
    pub d_h: i64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl TorsionFormResult {
    /// Degree-0 value (at the base point, or at θ = 0 on a circle).
    pub fn degree0(&self) -> f64 {
        self.form.coeff(0).re
    }

    /// Degree-0 values at every scalar slot.
    pub fn degree0_values(&self) -> Vec<f64> {
        self.form.algebra().scalar_slots().iter().map(|&s| self.form.coeff(s).re).collect()
    }

    pub fn max_odd(&self) -> f64 {
        self.form.max_abs_odd()
    }

    pub fn max_imag(&self) -> f64 {
        self.form.max_abs_imag()
    }
}
