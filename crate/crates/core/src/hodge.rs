//! Finite-dimensional Hodge theory of a metric complex over a point.

use crate::error::{Result, TorsionError};
use crate::flat_complex::MetricComplex;
use crate::linalg::{cholesky, hermitian_eigen, inverse, rank_scale, zeros, CMat, RANK_TOL};

/// Laplacians, harmonic spaces and Betti numbers of a complex.
#[derive(Clone, Debug)]
pub struct HodgeData {
    /// `Δ_q = v*v + vv*` in the original coordinates.
    pub laplacians: Vec<CMat>,
    /// Eigenvalues of each `Δ_q`, ascending.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Columns form an `h`-orthonormal basis of `ker Δ_q`.
    pub harmonic: Vec<CMat>,
    pub betti: Vec<usize>,
    /// Eigenvalues at or below this count as zero.
    pub threshold: f64,
    /// Cholesky factors `h_q = L_q L_q^†`.
    frames: Vec<CMat>,
}

/// Euler characteristics and weighted ranks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChiPrimes {
    /// `Σ (-1)^i dim H^i`.
    pub chi: i64,
    /// `Σ (-1)^i i dim H^i`.
    pub chi_prime: i64,
    /// `d(E) = Σ (-1)^i i rk E^i`.
    pub d_e: i64,
    /// `d(H(E))`.
    pub d_h: i64,
}

/// Ratio above the zero threshold inside which a kernel dimension is ambiguous.
const AMBIGUITY_BAND: f64 = 100.0;

pub fn hodge_decompose(e: &MetricComplex) -> Result<HodgeData> {
    let k = e.len();
    let dims = e.dims();
    let frames: Vec<CMat> = e.h().iter().map(cholesky).collect::<Result<_>>()?;
    let mut on = Vec::with_capacity(k.saturating_sub(1));
    for (i, v) in e.v().iter().enumerate() {
        on.push(frames[i + 1].adjoint() * v * inverse(&frames[i].adjoint())?);
    }
    let mut lap_on = Vec::with_capacity(k);
    for q in 0..k {
        let mut d = zeros(dims[q], dims[q]);
        if q + 1 < k {
            d += on[q].adjoint() * &on[q];
        }
        if q > 0 {
            d += &on[q - 1] * on[q - 1].adjoint();
        }
        lap_on.push(d);
    }
    let decomps: Vec<(Vec<f64>, CMat)> = lap_on.iter().map(hermitian_eigen).collect();
    let radius = decomps
        .iter()
        .flat_map(|(vals, _)| vals.iter().map(|x| x.abs()))
        .fold(0.0, f64::max);
    let threshold = RANK_TOL * rank_scale(radius);
    let mut harmonic = Vec::with_capacity(k);
    let mut betti = Vec::with_capacity(k);
    let mut laplacians = Vec::with_capacity(k);
    for q in 0..k {
        let (vals, vecs) = &decomps[q];
        if let Some(&amb) = vals.iter().find(|&&x| x > threshold && x <= AMBIGUITY_BAND * threshold) {
            return Err(TorsionError::IllConditioned { what: format!("kernel of Δ_{q}"), gap: amb });
        }
        let zero: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] <= threshold).collect();
        let back = inverse(&frames[q].adjoint())?;
        let mut basis = zeros(dims[q], zero.len());
        for (col, &i) in zero.iter().enumerate() {
            basis.set_column(col, &(&back * vecs.column(i)));
        }
        harmonic.push(basis);
        betti.push(zero.len());
        // Δ in original coordinates: L^{-†} Δ̃ L^†.
        laplacians.push(&back * &lap_on[q] * frames[q].adjoint());
    }
    Ok(HodgeData {
        laplacians,
        eigenvalues: decomps.into_iter().map(|(v, _)| v).collect(),
        harmonic,
        betti,
        threshold,
        frames,
    })
}

impl HodgeData {
    /// `log det' Δ_q`.
    pub fn log_det_prime(&self, q: usize) -> f64 {
        self.eigenvalues[q].iter().filter(|&&x| x > self.threshold).map(|x| x.ln()).sum()
    }

    /// Coordinates of the classes of the cocycles `z` (columns) in the
    /// harmonic orthonormal basis.
    pub fn class_coordinates(&self, q: usize, z: &CMat) -> CMat {
        let l = &self.frames[q];
        // ⟨x, z⟩_h = x^† L L^† z
        self.harmonic[q].adjoint() * l * l.adjoint() * z
    }

    /// Gram matrix of the induced metric on the classes of the cocycles `z`.
    pub fn induced_gram(&self, q: usize, z: &CMat) -> CMat {
        let coords = self.class_coordinates(q, z);
        coords.adjoint() * coords
    }

    /// Orthogonal projector onto the harmonic space (self-adjoint for `h`).
    pub fn harmonic_projector(&self, q: usize) -> CMat {
        let l = &self.frames[q];
        &self.harmonic[q] * self.harmonic[q].adjoint() * l * l.adjoint()
    }
}

/// `½ Σ_q (-1)^q q log det' Δ_q`.
pub fn scalar_torsion_eigen(e: &MetricComplex) -> Result<f64> {
    let data = hodge_decompose(e)?;
    Ok(torsion_from_hodge(&data))
}

pub fn torsion_from_hodge(data: &HodgeData) -> f64 {
    (0..data.eigenvalues.len())
        .map(|q| {
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            0.5 * sign * q as f64 * data.log_det_prime(q)
        })
        .sum()
}

pub fn chi_primes(e: &MetricComplex) -> Result<ChiPrimes> {
    let data = hodge_decompose(e)?;
    Ok(chi_from_ranks(&e.dims(), &data.betti))
}

pub fn chi_from_ranks(dims: &[usize], betti: &[usize]) -> ChiPrimes {
    let alt = |xs: &[usize], weight: bool| -> i64 {
        xs.iter()
            .enumerate()
            .map(|(i, &d)| {
                let s = if i % 2 == 0 { 1 } else { -1 };
                s * d as i64 * if weight { i as i64 } else { 1 }
            })
            .sum()
    };
    ChiPrimes {
        chi: alt(betti, false),
        chi_prime: alt(betti, true),
        d_e: alt(dims, true),
        d_h: alt(betti, true),
    }
}

/// Degree-0 part of `f̃` for two metrics on the same graded space:
/// `½ Σ (-1)^q log det(h1_q h0_q^{-1})`.
pub fn tilde_f_degree0(h0: &[CMat], h1: &[CMat]) -> Result<f64> {
    if h0.len() != h1.len() {
        return Err(TorsionError::Dimension("metric lists differ in length".into()));
    }
    let mut acc = 0.0;
    for (q, (a, b)) in h0.iter().zip(h1).enumerate() {
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        acc += 0.5 * sign * (crate::linalg::log_det_hpd(b)? - crate::linalg::log_det_hpd(a)?);
    }
    Ok(acc)
}

/// Cohomology of `e` with an `h`-orthonormal class basis (the harmonic
/// representatives) and the Gram matrices of a second metric `h1` induced on
/// those same classes.
pub fn cohomology_gram_change(e0: &MetricComplex, e1: &MetricComplex) -> Result<(Vec<CMat>, Vec<CMat>)> {
    let d0 = hodge_decompose(e0)?;
    let d1 = hodge_decompose(e1)?;
    if d0.betti != d1.betti {
        return Err(TorsionError::Inconsistent("Betti numbers depend on the metric".into()));
    }
    let g0: Vec<CMat> = d0.betti.iter().map(|&b| CMat::identity(b, b)).collect();
    let g1 = (0..d0.betti.len()).map(|q| d1.induced_gram(q, &d0.harmonic[q])).collect();
    Ok((g0, g1))
}
