//! Coefficient algebras for differential forms and matrices over them.
//!
//! Two algebras are provided. `FormalPoint` is the exterior algebra on `n`
//! anticommuting generators, truncated above a fixed degree; it models germs
//! of forms at a point of the base. `CircleBase` holds a degree-0 function
//! and a degree-1 function times `dθ`, both sampled on a uniform grid.
//!
//! Elements are stored as coefficient vectors over "slots". For a formal
//! point the slot is the bitmask of the monomial; for the circle it is
//! `degree * grid + k`. Matrices store one complex matrix per slot, so a
//! product is a short sum of dense matrix products.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rustfft::FftPlanner;

use crate::error::{Result, TorsionError};
use crate::linalg::{c, eye, max_abs, zeros, CMat, C64};

/// The coefficient algebra of a form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FormAlgebra {
    FormalPoint { generators: usize, truncation: usize },
    CircleBase { grid: usize, circumference: f64 },
}

impl FormAlgebra {
    /// A point: the scalars.
    pub fn point() -> Self {
        FormAlgebra::FormalPoint { generators: 0, truncation: 0 }
    }

    pub fn formal(generators: usize) -> Result<Self> {
        Self::formal_truncated(generators, generators)
    }

    pub fn formal_truncated(generators: usize, truncation: usize) -> Result<Self> {
        if generators > 8 {
            return Err(TorsionError::Config(format!(
                "at most 8 formal generators are supported, got {generators}"
            )));
        }
        Ok(FormAlgebra::FormalPoint { generators, truncation: truncation.min(generators) })
    }

    pub fn circle(grid: usize, circumference: f64) -> Result<Self> {
        if grid < 2 || !grid.is_power_of_two() {
            return Err(TorsionError::Config(format!("grid size {grid} is not a power of two")));
        }
        if !(circumference > 0.0) || !circumference.is_finite() {
            return Err(TorsionError::Config(format!("circumference {circumference} is not positive")));
        }
        Ok(FormAlgebra::CircleBase { grid, circumference })
    }

    pub fn slots(&self) -> usize {
        match *self {
            FormAlgebra::FormalPoint { generators, .. } => 1 << generators,
            FormAlgebra::CircleBase { grid, .. } => 2 * grid,
        }
    }

    pub fn slot_degree(&self, slot: usize) -> usize {
        match *self {
            FormAlgebra::FormalPoint { .. } => slot.count_ones() as usize,
            FormAlgebra::CircleBase { grid, .. } => slot / grid,
        }
    }

    pub fn max_degree(&self) -> usize {
        match *self {
            FormAlgebra::FormalPoint { truncation, .. } => truncation,
            FormAlgebra::CircleBase { .. } => 1,
        }
    }

    /// Slots that can hold nonzero coefficients.
    pub fn live_slots(&self) -> Vec<usize> {
        (0..self.slots()).filter(|&s| self.slot_degree(s) <= self.max_degree()).collect()
    }

    /// Slots of the degree-0 part (one for a formal point, one per grid point on the circle).
    pub fn scalar_slots(&self) -> Vec<usize> {
        match *self {
            FormAlgebra::FormalPoint { .. } => vec![0],
            FormAlgebra::CircleBase { grid, .. } => (0..grid).collect(),
        }
    }

    /// Grid abscissae of the circle.
    pub fn grid_points(&self) -> Vec<f64> {
        match *self {
            FormAlgebra::FormalPoint { .. } => vec![0.0],
            FormAlgebra::CircleBase { grid, circumference } => {
                (0..grid).map(|k| circumference * k as f64 / grid as f64).collect()
            }
        }
    }

    /// Visit every nonzero product of basis slots: `(a, b, a∧b slot, sign)`.
    fn for_each_product(&self, mut visit: impl FnMut(usize, usize, usize, f64)) {
        match *self {
            FormAlgebra::FormalPoint { generators, truncation } => {
                let n = 1usize << generators;
                for a in 0..n {
                    if a.count_ones() as usize > truncation {
                        continue;
                    }
                    for b in 0..n {
                        if a & b != 0 || (a | b).count_ones() as usize > truncation {
                            continue;
                        }
                        visit(a, b, a | b, reorder_sign(a, b));
                    }
                }
            }
            FormAlgebra::CircleBase { grid, .. } => {
                for k in 0..grid {
                    visit(k, k, k, 1.0);
                    visit(k, grid + k, grid + k, 1.0);
                    visit(grid + k, k, grid + k, 1.0);
                }
            }
        }
    }

    fn check_same(&self, other: &FormAlgebra) -> Result<()> {
        if self != other {
            return Err(TorsionError::Dimension(format!(
                "algebra mismatch: {self:?} vs {other:?}"
            )));
        }
        Ok(())
    }
}

/// Sign of the permutation sorting the generators of `a` followed by those of `b`.
fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut inversions = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(2iπ)^{1/2}` on the branch `√(2π)·e^{iπ/4}`.
pub fn sqrt_two_i_pi() -> C64 {
    C64::from_polar((2.0 * PI).sqrt(), PI / 4.0)
}

/// An element of a form algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    alg: FormAlgebra,
    coeffs: Vec<C64>,
}

impl Form {
    pub fn zero(alg: FormAlgebra) -> Self {
        Form { alg, coeffs: vec![C64::new(0.0, 0.0); alg.slots()] }
    }

    /// The constant `z` (on the circle: the constant function).
    pub fn scalar(alg: FormAlgebra, z: C64) -> Self {
        let mut f = Self::zero(alg);
        for s in alg.scalar_slots() {
            f.coeffs[s] = z;
        }
        f
    }

    pub fn generator(alg: FormAlgebra, j: usize) -> Result<Self> {
        match alg {
            FormAlgebra::FormalPoint { generators, truncation } if j < generators => {
                let mut f = Self::zero(alg);
                if truncation >= 1 {
                    f.coeffs[1 << j] = c(1.0);
                }
                Ok(f)
            }
            _ => Err(TorsionError::Unsupported(format!("generator {j} of {alg:?}"))),
        }
    }

    pub fn from_coeffs(alg: FormAlgebra, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != alg.slots() {
            return Err(TorsionError::Dimension(format!(
                "expected {} coefficients, got {}",
                alg.slots(),
                coeffs.len()
            )));
        }
        let mut f = Form { alg, coeffs };
        f.truncate();
        Ok(f)
    }

    /// Circle element `f0 + f1 dθ` from grid samples.
    pub fn from_functions(alg: FormAlgebra, f0: &[C64], f1: &[C64]) -> Result<Self> {
        match alg {
            FormAlgebra::CircleBase { grid, .. } if f0.len() == grid && f1.len() == grid => {
                let mut coeffs = f0.to_vec();
                coeffs.extend_from_slice(f1);
                Ok(Form { alg, coeffs })
            }
            _ => Err(TorsionError::Dimension("grid samples do not match the algebra".into())),
        }
    }

    fn truncate(&mut self) {
        let top = self.alg.max_degree();
        for s in 0..self.coeffs.len() {
            if self.alg.slot_degree(s) > top {
                self.coeffs[s] = C64::new(0.0, 0.0);
            }
        }
    }

    pub fn algebra(&self) -> FormAlgebra {
        self.alg
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, slot: usize) -> C64 {
        self.coeffs[slot]
    }

    /// Homogeneous component of the given degree.
    pub fn component(&self, degree: usize) -> Form {
        let mut f = self.clone();
        for s in 0..f.coeffs.len() {
            if self.alg.slot_degree(s) != degree {
                f.coeffs[s] = C64::new(0.0, 0.0);
            }
        }
        f
    }

    /// Grid samples of the degree-`degree` coefficient function (circle only).
    pub fn grid_values(&self, degree: usize) -> Result<Vec<C64>> {
        match self.alg {
            FormAlgebra::CircleBase { grid, .. } if degree <= 1 => {
                Ok(self.coeffs[degree * grid..(degree + 1) * grid].to_vec())
            }
            _ => Err(TorsionError::Unsupported("grid values need a circle base".into())),
        }
    }

    /// The degree-0 coefficient of a formal element.
    pub fn scalar_part(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Largest coefficient among odd-degree components.
    pub fn max_abs_odd(&self) -> f64 {
        (0..self.coeffs.len())
            .filter(|&s| self.alg.slot_degree(s) % 2 == 1)
            .fold(0.0, |m, s| m.max(self.coeffs[s].norm()))
    }

    /// Homogeneous degree, if the element is homogeneous and nonzero.
    pub fn degree(&self) -> Option<usize> {
        let mut deg = None;
        for (s, z) in self.coeffs.iter().enumerate() {
            if z.norm() > 0.0 {
                let d = self.alg.slot_degree(s);
                match deg {
                    None => deg = Some(d),
                    Some(e) if e != d => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    pub fn scale(&self, z: C64) -> Form {
        Form { alg: self.alg, coeffs: self.coeffs.iter().map(|x| x * z).collect() }
    }

    pub fn try_add(&self, other: &Form) -> Result<Form> {
        self.alg.check_same(&other.alg)?;
        Ok(Form {
            alg: self.alg,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.alg.check_same(&other.alg)?;
        let mut out = Form::zero(self.alg);
        self.alg.for_each_product(|a, b, t, sign| {
            out.coeffs[t] += self.coeffs[a] * other.coeffs[b] * sign;
        });
        Ok(out)
    }

    /// `φ`: multiply the degree-k part by `(2iπ)^{-k/2}`.
    pub fn phi_rescale(&self) -> Form {
        let root = sqrt_two_i_pi().inv();
        let mut out = self.clone();
        for (s, z) in out.coeffs.iter_mut().enumerate() {
            *z *= root.powu(self.alg.slot_degree(s) as u32);
        }
        out
    }

    /// Exterior derivative on the circle by Fourier differentiation.
    pub fn exterior_d(&self) -> Result<Form> {
        let FormAlgebra::CircleBase { grid, circumference } = self.alg else {
            return Err(TorsionError::Unsupported("exterior_d needs a circle base".into()));
        };
        let deriv = fourier_derivative(&self.coeffs[..grid], circumference);
        let zero = vec![C64::new(0.0, 0.0); grid];
        Form::from_functions(self.alg, &zero, &deriv)
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.try_add(rhs).expect("form algebra mismatch")
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.try_add(&rhs.scale(c(-1.0))).expect("form algebra mismatch")
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(c(-1.0))
    }
}

impl Mul<C64> for &Form {
    type Output = Form;
    fn mul(self, z: C64) -> Form {
        self.scale(z)
    }
}

/// Spectral derivative of periodic samples on `[0, L)`.
pub fn fourier_derivative(values: &[C64], circumference: f64) -> Vec<C64> {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf = values.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    let base = 2.0 * PI / circumference;
    for (k, z) in buf.iter_mut().enumerate() {
        let freq = if k < n / 2 {
            k as f64
        } else if k == n / 2 {
            0.0
        } else {
            k as f64 - n as f64
        };
        *z *= C64::new(0.0, base * freq);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let norm = 1.0 / n as f64;
    buf.iter().map(|z| z * norm).collect()
}

/// Which scalar function to apply to a form matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFunction {
    Exp,
    /// `f(a) = a·exp(a²)`.
    F,
    /// `f'(a) = (1 + 2a²)·exp(a²)`.
    FPrime,
}

/// A square matrix with entries in a form algebra, acting on a Z-graded space.
#[derive(Clone, Debug, PartialEq)]
pub struct FormMatrix {
    alg: FormAlgebra,
    grading: Vec<i32>,
    blocks: Vec<CMat>,
}

impl FormMatrix {
    pub fn zeros(alg: FormAlgebra, grading: Vec<i32>) -> Self {
        let n = grading.len();
        FormMatrix { alg, grading, blocks: vec![zeros(n, n); alg.slots()] }
    }

    pub fn identity(alg: FormAlgebra, grading: Vec<i32>) -> Self {
        Self::from_scalar_matrix(alg, grading.clone(), &eye(grading.len()))
    }

    /// The constant degree-0 matrix `m` (on the circle: at every grid point).
    pub fn from_scalar_matrix(alg: FormAlgebra, grading: Vec<i32>, m: &CMat) -> Self {
        let mut out = Self::zeros(alg, grading);
        for s in alg.scalar_slots() {
            out.blocks[s] = m.clone();
        }
        out
    }

    /// Build from one coefficient matrix per slot.
    pub fn from_blocks(alg: FormAlgebra, grading: Vec<i32>, blocks: Vec<CMat>) -> Result<Self> {
        let n = grading.len();
        if blocks.len() != alg.slots() || blocks.iter().any(|b| b.shape() != (n, n)) {
            return Err(TorsionError::Dimension("slot blocks do not match the algebra".into()));
        }
        let mut out = FormMatrix { alg, grading, blocks };
        let top = alg.max_degree();
        for s in 0..out.blocks.len() {
            if alg.slot_degree(s) > top {
                out.blocks[s].fill(C64::new(0.0, 0.0));
            }
        }
        Ok(out)
    }

    /// The matrix `ω ⊗ m` for a form `ω` and a complex matrix `m`.
    pub fn from_form_times(form: &Form, grading: Vec<i32>, m: &CMat) -> Self {
        let alg = form.algebra();
        let blocks = (0..alg.slots()).map(|s| m * form.coeff(s)).collect();
        FormMatrix { alg, grading, blocks }
    }

    pub fn size(&self) -> usize {
        self.grading.len()
    }

    pub fn algebra(&self) -> FormAlgebra {
        self.alg
    }

    pub fn grading(&self) -> &[i32] {
        &self.grading
    }

    pub fn block(&self, slot: usize) -> &CMat {
        &self.blocks[slot]
    }

    pub fn block_mut(&mut self, slot: usize) -> &mut CMat {
        &mut self.blocks[slot]
    }

    pub fn entry(&self, i: usize, j: usize) -> Form {
        Form {
            alg: self.alg,
            coeffs: self.blocks.iter().map(|b| b[(i, j)]).collect(),
        }
    }

    pub fn set_entry(&mut self, i: usize, j: usize, value: &Form) -> Result<()> {
        self.alg.check_same(&value.algebra())?;
        for (s, b) in self.blocks.iter_mut().enumerate() {
            b[(i, j)] = value.coeff(s);
        }
        Ok(())
    }

    /// Degree-0 part at a scalar slot (for a formal point use slot 0).
    pub fn degree0(&self, slot: usize) -> &CMat {
        &self.blocks[slot]
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().fold(0.0, |m, b| m.max(max_abs(b)))
    }

    fn check_compatible(&self, other: &FormMatrix) -> Result<()> {
        self.alg.check_same(&other.alg)?;
        if self.grading != other.grading {
            return Err(TorsionError::Dimension(format!(
                "size/grading mismatch: {:?} vs {:?}",
                self.grading, other.grading
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.check_compatible(other)?;
        Ok(FormMatrix {
            alg: self.alg,
            grading: self.grading.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, z: C64) -> FormMatrix {
        FormMatrix {
            alg: self.alg,
            grading: self.grading.clone(),
            blocks: self.blocks.iter().map(|b| b * z).collect(),
        }
    }

    /// `S M S` with `S = diag((-1)^{grading})`: flips entries joining opposite parities.
    fn parity_conjugate(&self, m: &CMat) -> CMat {
        let mut out = m.clone();
        for i in 0..out.nrows() {
            for j in 0..out.ncols() {
                if (self.grading[i] + self.grading[j]).rem_euclid(2) == 1 {
                    out[(i, j)] = -out[(i, j)];
                }
            }
        }
        out
    }

    /// Product over the coefficient algebra with the super sign rule: moving a
    /// form of degree `k` past an entry joining parities `p_i`, `p_j` costs
    /// `(-1)^{k(p_i + p_j)}`.
    pub fn wedge_mul(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.check_compatible(other)?;
        let n = self.size();
        let conj: Vec<CMat> = self.blocks.iter().map(|b| self.parity_conjugate(b)).collect();
        let mut blocks = vec![zeros(n, n); self.alg.slots()];
        let alg = self.alg;
        alg.for_each_product(|a, b, t, sign| {
            let left = if alg.slot_degree(b) % 2 == 1 { &conj[a] } else { &self.blocks[a] };
            if left.iter().all(|z| z.norm() == 0.0) || other.blocks[b].iter().all(|z| z.norm() == 0.0) {
                return;
            }
            blocks[t] += left * &other.blocks[b] * c(sign);
        });
        Ok(FormMatrix { alg, grading: self.grading.clone(), blocks })
    }

    /// Supertrace `Σ_i (-1)^{grading_i} M_ii`.
    pub fn supertrace(&self) -> Form {
        let coeffs = self
            .blocks
            .iter()
            .map(|b| {
                (0..self.size())
                    .map(|i| if self.grading[i].rem_euclid(2) == 0 { b[(i, i)] } else { -b[(i, i)] })
                    .sum()
            })
            .collect();
        Form { alg: self.alg, coeffs }
    }

    /// Largest degree-0 norm over all scalar slots.
    fn degree0_norm(&self) -> f64 {
        self.alg
            .scalar_slots()
            .iter()
            .map(|&s| self.blocks[s].norm())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling and squaring with a degree-16 Taylor polynomial.
    pub fn exp(&self) -> Result<FormMatrix> {
        if self.blocks.iter().any(|b| b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(TorsionError::Numeric("non-finite entries in matrix exponential".into()));
        }
        let norm = self.degree0_norm();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let a = self.scale(c(0.5f64.powi(squarings as i32)));
        let id = FormMatrix::identity(self.alg, self.grading.clone());
        let mut acc = id.clone();
        for k in (1..=16).rev() {
            acc = id.try_add(&a.wedge_mul(&acc)?.scale(c(1.0 / k as f64)))?;
        }
        for _ in 0..squarings {
            acc = acc.wedge_mul(&acc)?;
        }
        Ok(acc)
    }

    pub fn matrix_function(&self, which: MatrixFunction) -> Result<FormMatrix> {
        match which {
            MatrixFunction::Exp => self.exp(),
            MatrixFunction::F => {
                let sq = self.wedge_mul(self)?;
                self.wedge_mul(&sq.exp()?)
            }
            MatrixFunction::FPrime => {
                let sq = self.wedge_mul(self)?;
                let id = FormMatrix::identity(self.alg, self.grading.clone());
                id.try_add(&sq.scale(c(2.0)))?.wedge_mul(&sq.exp()?)
            }
        }
    }

    /// Super-commutator `AB - (-1)^{|A||B|} BA` for homogeneous total parities.
    pub fn supercommutator(&self, other: &FormMatrix, parity_a: u32, parity_b: u32) -> Result<FormMatrix> {
        let ab = self.wedge_mul(other)?;
        let ba = other.wedge_mul(self)?;
        let sign = if (parity_a * parity_b) % 2 == 0 { -1.0 } else { 1.0 };
        ab.try_add(&ba.scale(c(sign)))
    }
}
