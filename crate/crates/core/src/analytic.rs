//! Degree-zero analytic torsion of one-dimensional model fibers.
//!
//! Every model spectrum is a weighted sum of lattices `{(c(n + a))² : n ∈ ℤ}`
//! plus a weight correction at `λ = 0`. Interval spectra are half-weighted
//! lattices (cosine and sine modes pair `n` with `−n`), which reduces all
//! zeta determinants to Hurwitz zeta values at `s = 0`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

use crate::error::{Result, TorsionError};
use crate::linalg::{eigenvalues, eye, kernel, max_abs, CMat};
use crate::quadrature::{integrate_dt_over_t, QuadratureSpec};
use crate::schema::{matrix_from_doc, matrix_to_doc, MatrixDoc};

/// Boundary condition at one end of an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Absolute: Neumann for functions, Dirichlet for the coefficient of `dx`.
    Abs,
    /// Relative: Dirichlet for functions, Neumann for the coefficient of `dx`.
    Rel,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelGeometry {
    /// Circle of circumference `length`; sections satisfy `s(x + L) = U s(x)`.
    Circle { length: f64, holonomy: CMat },
    Interval { length: f64, left: Boundary, right: Boundary, rank: usize },
}

/// Tolerance for unitarity of the holonomy and for zero phases.
const PHASE_TOL: f64 = 1e-10;

impl ModelGeometry {
    pub fn circle(length: f64, holonomy: CMat) -> Result<Self> {
        let g = ModelGeometry::Circle { length, holonomy };
        g.validate()?;
        Ok(g)
    }

    pub fn trivial_circle(length: f64, rank: usize) -> Result<Self> {
        Self::circle(length, eye(rank))
    }

    pub fn interval(length: f64, bc: Boundary, rank: usize) -> Result<Self> {
        Self::interval_with_ends(length, bc, bc, rank)
    }

    pub fn interval_with_ends(length: f64, left: Boundary, right: Boundary, rank: usize) -> Result<Self> {
        let g = ModelGeometry::Interval { length, left, right, rank };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.length() > 0.0 && self.length().is_finite()) {
            return Err(TorsionError::Domain("length must be positive".into()));
        }
        match self {
            ModelGeometry::Circle { holonomy, .. } => {
                let r = holonomy.nrows();
                if r == 0 || holonomy.ncols() != r {
                    return Err(TorsionError::Dimension("holonomy must be a non-empty square matrix".into()));
                }
                if max_abs(&(holonomy.adjoint() * holonomy - eye(r))) > PHASE_TOL {
                    return Err(TorsionError::Domain(
                        "non-unitary holonomy: model spectra need a parallel metric".into(),
                    ));
                }
            }
            ModelGeometry::Interval { rank, .. } => {
                if *rank == 0 {
                    return Err(TorsionError::Domain("rank must be positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        match self {
            ModelGeometry::Circle { length, .. } | ModelGeometry::Interval { length, .. } => *length,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            ModelGeometry::Circle { holonomy, .. } => holonomy.nrows(),
            ModelGeometry::Interval { rank, .. } => *rank,
        }
    }

    /// Euler characteristic of the fiber with these boundary conditions and
    /// trivial coefficients.
    pub fn euler_characteristic(&self) -> i64 {
        match self {
            ModelGeometry::Circle { .. } => 0,
            ModelGeometry::Interval { left, right, .. } => match (left, right) {
                (Boundary::Abs, Boundary::Abs) => 1,
                (Boundary::Rel, Boundary::Rel) => -1,
                _ => 0,
            },
        }
    }

    /// Phases `a_j = α_j / 2π ∈ [0, 1)` of the holonomy eigenvalues `e^{iα_j}`.
    pub fn holonomy_phases(&self) -> Result<Vec<f64>> {
        match self {
            ModelGeometry::Circle { holonomy, .. } => Ok(eigenvalues(holonomy)?
                .into_iter()
                .map(|z| {
                    let a = z.arg().rem_euclid(2.0 * PI) / (2.0 * PI);
                    if a < PHASE_TOL || 1.0 - a < PHASE_TOL {
                        0.0
                    } else {
                        a
                    }
                })
                .collect()),
            ModelGeometry::Interval { rank, .. } => Ok(vec![0.0; *rank]),
        }
    }

    /// The double along the boundary: a circle of twice the length with
    /// trivial holonomy.
    pub fn double(&self) -> Result<ModelGeometry> {
        match self {
            ModelGeometry::Interval { length, rank, .. } => ModelGeometry::trivial_circle(2.0 * length, *rank),
            ModelGeometry::Circle { .. } => Err(TorsionError::Config("only intervals have a double".into())),
        }
    }
}

/// `{(scale·(n + shift))² : n ∈ ℤ}` counted with `weight`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub scale: f64,
    pub shift: f64,
    pub weight: f64,
}

/// Spectrum of `Δ_q` in one degree.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DegreeSpectrum {
    pub lattices: Vec<Lattice>,
    /// Added to the weight of `λ = 0`.
    pub zero_correction: f64,
}

/// Truncation of the Gaussian tails `e^{-x}` at `x = 45`.
const TAIL: f64 = 45.0;

impl DegreeSpectrum {
    pub fn zero_modes(&self) -> usize {
        let w: f64 = self.lattices.iter().filter(|l| l.shift == 0.0).map(|l| l.weight).sum::<f64>() + self.zero_correction;
        w.round().max(0.0) as usize
    }

    /// Eigenvalues up to `max_lambda`, ascending and repeated by multiplicity.
    pub fn enumerate(&self, max_lambda: f64) -> Vec<f64> {
        let mut weighted: Vec<(f64, f64)> = Vec::new();
        for l in &self.lattices {
            let n_max = (max_lambda.sqrt() / l.scale).ceil() as i64 + 2;
            for n in -n_max..=n_max {
                let lam = (l.scale * (n as f64 + l.shift)).powi(2);
                if lam <= max_lambda {
                    weighted.push((lam, l.weight));
                }
            }
        }
        weighted.push((0.0, self.zero_correction));
        weighted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out = Vec::new();
        let mut i = 0;
        while i < weighted.len() {
            let lam = weighted[i].0;
            let mut w = 0.0;
            while i < weighted.len() && (weighted[i].0 - lam).abs() <= 1e-9 * lam.max(1.0) {
                w += weighted[i].1;
                i += 1;
            }
            for _ in 0..w.round().max(0.0) as usize {
                out.push(lam);
            }
        }
        out
    }

    /// `Tr G(tΔ)` with `G(x) = (1 − x/2) e^{−x/4}`, zero modes included.
    pub fn heat_trace_g(&self, t: f64) -> f64 {
        self.zero_correction + self.lattices.iter().map(|l| l.weight * lattice_g_sum(l, t)).sum::<f64>()
    }

    /// `Tr e^{−tΔ}`, zero modes included.
    pub fn heat_trace(&self, t: f64) -> f64 {
        self.zero_correction + self.lattices.iter().map(|l| l.weight * lattice_theta(l, t)).sum::<f64>()
    }
}

/// `Σ_n G(t c²(n+a)²)`: direct summation for large `s = tc²/4`, Poisson
/// summation `√(π/s) Σ_{k≠0} cos(2πka)(2π²k²/s) e^{−π²k²/s}` for small `s`.
fn lattice_g_sum(l: &Lattice, t: f64) -> f64 {
    let s = t * l.scale * l.scale / 4.0;
    if s >= 1.0 {
        let k = (TAIL / s).sqrt().ceil() as i64 + 2;
        (-k..=k)
            .map(|n| {
                let y = (n as f64 + l.shift).powi(2);
                (1.0 - 2.0 * s * y) * (-s * y).exp()
            })
            .sum()
    } else {
        let k_max = ((TAIL * s).sqrt() / PI).ceil() as i64 + 1;
        (1..=k_max)
            .map(|k| {
                let q = PI * PI * (k * k) as f64 / s;
                2.0 * (2.0 * PI * k as f64 * l.shift).cos() * 2.0 * q * (-q).exp()
            })
            .sum::<f64>()
            * (PI / s).sqrt()
    }
}

/// `Σ_n e^{−t c²(n+a)²}` with the same two regimes.
fn lattice_theta(l: &Lattice, t: f64) -> f64 {
    let s = t * l.scale * l.scale;
    if s >= 1.0 {
        let k = (TAIL / s).sqrt().ceil() as i64 + 2;
        (-k..=k).map(|n| (-s * (n as f64 + l.shift).powi(2)).exp()).sum()
    } else {
        let k_max = ((TAIL * s).sqrt() / PI).ceil() as i64 + 1;
        (PI / s).sqrt()
            * (1.0
                + (1..=k_max)
                    .map(|k| 2.0 * (2.0 * PI * k as f64 * l.shift).cos() * (-PI * PI * (k * k) as f64 / s).exp())
                    .sum::<f64>())
    }
}

/// Spectra of `Δ_0` and `Δ_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumData {
    pub degrees: [DegreeSpectrum; 2],
}

impl SpectrumData {
    pub fn zero_modes(&self) -> [usize; 2] {
        [self.degrees[0].zero_modes(), self.degrees[1].zero_modes()]
    }

    /// `χ'_bd = Σ (−1)^q q dim H^q`.
    pub fn chi_prime(&self) -> i64 {
        -(self.degrees[1].zero_modes() as i64)
    }
}

/// Interval modes `cos`/`sin` as half-weighted lattices: Neumann at both ends,
/// Dirichlet at both ends, or mixed (half-integer modes).
fn interval_degree(length: f64, neumann: [bool; 2], rank: usize) -> DegreeSpectrum {
    let r = rank as f64;
    let c = PI / length;
    match neumann {
        [true, true] => DegreeSpectrum { lattices: vec![Lattice { scale: c, shift: 0.0, weight: 0.5 * r }], zero_correction: 0.5 * r },
        [false, false] => DegreeSpectrum { lattices: vec![Lattice { scale: c, shift: 0.0, weight: 0.5 * r }], zero_correction: -0.5 * r },
        _ => DegreeSpectrum { lattices: vec![Lattice { scale: c, shift: 0.5, weight: 0.5 * r }], zero_correction: 0.0 },
    }
}

pub fn spectrum(g: &ModelGeometry) -> Result<SpectrumData> {
    match g {
        ModelGeometry::Circle { length, .. } => {
            let lattices: Vec<Lattice> = g
                .holonomy_phases()?
                .into_iter()
                .map(|a| Lattice { scale: 2.0 * PI / length, shift: a, weight: 1.0 })
                .collect();
            let d = DegreeSpectrum { lattices, zero_correction: 0.0 };
            Ok(SpectrumData { degrees: [d.clone(), d] })
        }
        ModelGeometry::Interval { length, left, right, rank } => {
            let abs = [*left == Boundary::Abs, *right == Boundary::Abs];
            Ok(SpectrumData {
                degrees: [interval_degree(*length, abs, *rank), interval_degree(*length, [!abs[0], !abs[1]], *rank)],
            })
        }
    }
}

/// Even and odd parts of the spectrum of the double `Circle(2L)` of an interval
/// of length `L` under the reflection `x ↦ −x`. Modes `n` and `−n` are swapped,
/// so each pair contributes once to either parity; the constant mode is even
/// on functions and odd on one-forms (`φ* dx = −dx`).
pub fn parity_spectra(length: f64, rank: usize) -> (SpectrumData, SpectrumData) {
    let r = rank as f64;
    let pairs = Lattice { scale: PI / length, shift: 0.0, weight: 0.5 * r };
    let part = |zero: f64| DegreeSpectrum { lattices: vec![pairs], zero_correction: zero };
    // Functions: constant even. One-forms f dx: even iff f is odd.
    let even = SpectrumData { degrees: [part(0.5 * r), part(-0.5 * r)] };
    let odd = SpectrumData { degrees: [part(-0.5 * r), part(0.5 * r)] };
    (even, odd)
}

/// How `ζ'(0)` of a lattice is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZetaEngine {
    /// Hurwitz special values through `log Γ`.
    ClosedForm,
    /// Partial sums of `log(n + b)` with an Euler–Maclaurin tail.
    EulerMaclaurin { terms: usize },
}

impl Default for ZetaEngine {
    fn default() -> Self {
        ZetaEngine::ClosedForm
    }
}

/// `(ζ_H(0, b), ∂_s ζ_H(0, b))` for `b > 0`.
fn hurwitz_at_zero(b: f64, engine: ZetaEngine) -> Result<(f64, f64)> {
    let value = 0.5 - b;
    let derivative = match engine {
        ZetaEngine::ClosedForm => ln_gamma(b) - 0.5 * (2.0 * PI).ln(),
        ZetaEngine::EulerMaclaurin { terms } => {
            let x = terms as f64 + b;
            let tail = 1.0 / (1260.0 * x.powi(5));
            if tail > 1e-10 {
                return Err(TorsionError::Precision(format!(
                    "Euler–Maclaurin tail {tail:e} with {terms} terms exceeds 1e-10"
                )));
            }
            let head: f64 = (0..terms).map(|n| (n as f64 + b).ln()).sum();
            -head + x * x.ln() - x - 0.5 * x.ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        }
    };
    Ok((value, derivative))
}

/// `log det' = −ζ'(0)` of one lattice with its zero eigenvalue removed:
/// `w (2 log c · Z(0) − 2 Z'(0))` with `Z(s) = Σ' |n + a|^{−s}`.
fn lattice_log_det(l: &Lattice, engine: ZetaEngine) -> Result<f64> {
    let pieces = if l.shift == 0.0 { [1.0, 1.0] } else { [l.shift, 1.0 - l.shift] };
    let (mut z0, mut z1) = (0.0, 0.0);
    for b in pieces {
        let (v, d) = hurwitz_at_zero(b, engine)?;
        z0 += v;
        z1 += d;
    }
    Ok(l.weight * (2.0 * l.scale.ln() * z0 - 2.0 * z1))
}

/// `log det' Δ_q`.
pub fn zeta_log_det(s: &SpectrumData, q: usize, engine: ZetaEngine) -> Result<f64> {
    if q > 1 {
        return Err(TorsionError::Config("one-dimensional fibers have form degrees 0 and 1".into()));
    }
    s.degrees[q].lattices.iter().map(|l| lattice_log_det(l, engine)).sum()
}

/// `½ Σ_q (−1)^q q log det' Δ_q = −½ log det' Δ_1`.
pub fn scalar_torsion(g: &ModelGeometry) -> Result<f64> {
    scalar_torsion_with(g, ZetaEngine::ClosedForm)
}

pub fn scalar_torsion_with(g: &ModelGeometry, engine: ZetaEngine) -> Result<f64> {
    Ok(-0.5 * zeta_log_det(&spectrum(g)?, 1, engine)?)
}

/// The same value from `Δ_0`, using that the nonzero spectra of `Δ_0` and `Δ_1` agree.
pub fn scalar_torsion_from_degree0(g: &ModelGeometry, engine: ZetaEngine) -> Result<f64> {
    Ok(-0.5 * zeta_log_det(&spectrum(g)?, 0, engine)?)
}

/// `h(t) = ½ Σ_q (−1)^q q Σ_λ (1 − tλ/2) e^{−tλ/4}`.
pub fn heat_function(s: &SpectrumData, t: f64) -> f64 {
    -0.5 * s.degrees[1].heat_trace_g(t)
}

/// Small-`t` and large-`t` limits of `h`: `¼ m χ_bd rk F` and `χ'_bd / 2`.
pub fn heat_limits(g: &ModelGeometry) -> Result<(f64, f64)> {
    let s = spectrum(g)?;
    Ok((0.25 * g.euler_characteristic() as f64 * g.rank() as f64, 0.5 * s.chi_prime() as f64))
}

/// `−∫_0^∞ [h(t) − χ'/2 − (¼ m rk χ − χ'/2) f'(i√t/2)] dt/t`.
pub fn torsion_via_heat_integral(g: &ModelGeometry, quad: &QuadratureSpec) -> Result<f64> {
    let s = spectrum(g)?;
    let (small, large) = heat_limits(g)?;
    let integrand = |t: f64| -> Result<Vec<f64>> {
        let fp = (1.0 - t / 2.0) * (-t / 4.0).exp();
        Ok(vec![heat_function(&s, t) - large - (small - large) * fp])
    };
    Ok(-integrate_dt_over_t(integrand, quad)?.value[0])
}

/// Element of `ℤ₂` acting on the double.
pub use crate::morse::GroupElement;

/// `𝒯_g` of the double of an interval: `−½ (log det' Δ_1^+ + χ(g) log det' Δ_1^-)`.
pub fn equivariant_scalar_torsion(interval: &ModelGeometry, g: GroupElement, engine: ZetaEngine) -> Result<f64> {
    let (length, rank) = match interval {
        ModelGeometry::Interval { length, rank, .. } => (*length, *rank),
        ModelGeometry::Circle { .. } => return Err(TorsionError::Config("the double is taken of an interval".into())),
    };
    let (even, odd) = parity_spectra(length, rank);
    Ok(-0.5 * (zeta_log_det(&even, 1, engine)? + g.character() * zeta_log_det(&odd, 1, engine)?))
}

/// Harmonic forms in each degree: columns of `sections[q]` are parallel
/// sections `s` (orthonormal in `h^F`), the form being `s` in degree 0 and
/// `coefficient[1] · s dx` in degree 1.
#[derive(Clone, Debug, PartialEq)]
pub struct L2Cohomology {
    pub sections: [CMat; 2],
    pub coefficient: [f64; 2],
    /// L² Gram matrices of those forms.
    pub grams: [CMat; 2],
}

impl L2Cohomology {
    pub fn betti(&self) -> [usize; 2] {
        [self.sections[0].ncols(), self.sections[1].ncols()]
    }
}

pub fn l2_cohomology(g: &ModelGeometry) -> Result<L2Cohomology> {
    let l = g.length();
    let r = g.rank();
    let empty = CMat::zeros(r, 0);
    let gram = |basis: &CMat, norm2: f64| eye(basis.ncols()) * crate::linalg::c(norm2);
    match g {
        ModelGeometry::Circle { holonomy, .. } => {
            let inv = kernel(&(holonomy - eye(r)), r);
            // Classes normalised to have integral one: dθ / L, with ‖·‖² = 1/L.
            Ok(L2Cohomology {
                grams: [gram(&inv, l), gram(&inv, 1.0 / l)],
                sections: [inv.clone(), inv],
                coefficient: [1.0, 1.0 / l],
            })
        }
        ModelGeometry::Interval { left, right, .. } => {
            let full = eye(r);
            let (h0, h1) = match (left, right) {
                (Boundary::Abs, Boundary::Abs) => (full, empty),
                (Boundary::Rel, Boundary::Rel) => (empty, full),
                _ => (empty.clone(), empty),
            };
            Ok(L2Cohomology { grams: [gram(&h0, l), gram(&h1, l)], sections: [h0, h1], coefficient: [1.0, 1.0] })
        }
    }
}

/// Geometry document: `{kind, L, bc, holonomy, rank}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryDoc {
    pub kind: GeometryKind,
    #[serde(rename = "L")]
    pub length: f64,
    /// One condition for both ends, or `[left, right]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc: Option<BoundaryDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Circle,
    Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundaryDoc {
    Both(Boundary),
    Ends([Boundary; 2]),
}

impl GeometryDoc {
    pub fn to_geometry(&self) -> Result<ModelGeometry> {
        match self.kind {
            GeometryKind::Circle => {
                let holonomy = match (&self.holonomy, self.rank) {
                    (Some(m), _) => {
                        let r = m.len();
                        matrix_from_doc(m, r, r, "holonomy")?
                    }
                    (None, Some(r)) => eye(r),
                    (None, None) => eye(1),
                };
                if self.rank.is_some_and(|r| r != holonomy.nrows()) {
                    return Err(TorsionError::Input("rank does not match the holonomy".into()));
                }
                ModelGeometry::circle(self.length, holonomy)
            }
            GeometryKind::Interval => {
                let (left, right) = match self.bc {
                    Some(BoundaryDoc::Both(b)) => (b, b),
                    Some(BoundaryDoc::Ends([a, b])) => (a, b),
                    None => return Err(TorsionError::Input("interval needs bc".into())),
                };
                ModelGeometry::interval_with_ends(self.length, left, right, self.rank.unwrap_or(1))
            }
        }
    }

    pub fn from_geometry(g: &ModelGeometry) -> Self {
        match g {
            ModelGeometry::Circle { length, holonomy } => GeometryDoc {
                kind: GeometryKind::Circle,
                length: *length,
                bc: None,
                holonomy: Some(matrix_to_doc(holonomy)),
                rank: Some(holonomy.nrows()),
            },
            ModelGeometry::Interval { length, left, right, rank } => GeometryDoc {
                kind: GeometryKind::Interval,
                length: *length,
                bc: Some(if left == right { BoundaryDoc::Both(*left) } else { BoundaryDoc::Ends([*left, *right]) }),
                holonomy: None,
                rank: Some(*rank),
            },
        }
    }
}
