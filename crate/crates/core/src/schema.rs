//! JSON documents for complexes, double complexes and matrices.
//!
//! Matrices are row-major lists of rows. An entry is either a real number or
//! a `[re, im]` pair. Shapes are implied by the surrounding dimensions, so an
//! empty list stands for a matrix with zero rows or columns.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TorsionError};
use crate::flat_complex::MetricComplex;
use crate::linalg::{eye, zeros, CMat, C64};
use crate::spectral::DoubleComplexData;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

pub type MatrixDoc = Vec<Vec<Entry>>;

pub fn matrix_to_doc(m: &CMat) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    if z.im == 0.0 {
                        Entry::Real(z.re)
                    } else {
                        Entry::Complex([z.re, z.im])
                    }
                })
                .collect()
        })
        .collect()
}

/// Read a matrix of the expected shape; `what` names it in error messages.
pub fn matrix_from_doc(doc: &MatrixDoc, rows: usize, cols: usize, what: &str) -> Result<CMat> {
    if rows == 0 || cols == 0 {
        if doc.iter().any(|r| !r.is_empty()) && !(doc.len() == rows && cols == 0) {
            return Err(TorsionError::Input(format!("{what}: expected an empty {rows}x{cols} matrix")));
        }
        return Ok(zeros(rows, cols));
    }
    if doc.len() != rows {
        return Err(TorsionError::Input(format!("{what}: expected {rows} rows, found {}", doc.len())));
    }
    let mut m = zeros(rows, cols);
    for (i, row) in doc.iter().enumerate() {
        if row.len() != cols {
            return Err(TorsionError::Input(format!(
                "{what}: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (j, e) in row.iter().enumerate() {
            let z = e.value();
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(TorsionError::Input(format!("{what}: entry ({i},{j}) is not finite")));
            }
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

/// A complex over a point: `{dims, v, h}`; `h` defaults to identity metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub dims: Vec<usize>,
    pub v: Vec<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<MatrixDoc>>,
}

impl ComplexDoc {
    pub fn from_complex(e: &MetricComplex) -> Self {
        ComplexDoc {
            dims: e.dims(),
            v: e.v().iter().map(matrix_to_doc).collect(),
            h: Some(e.h().iter().map(matrix_to_doc).collect()),
        }
    }

    pub fn to_complex(&self) -> Result<MetricComplex> {
        let k = self.dims.len();
        if k == 0 {
            return Err(TorsionError::Input("dims: a complex needs at least one term".into()));
        }
        if self.v.len() + 1 != k {
            return Err(TorsionError::Input(format!("v: expected {} maps, found {}", k - 1, self.v.len())));
        }
        let v = self
            .v
            .iter()
            .enumerate()
            .map(|(i, m)| matrix_from_doc(m, self.dims[i + 1], self.dims[i], &format!("v[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let h = match &self.h {
            Some(hs) => {
                if hs.len() != k {
                    return Err(TorsionError::Input(format!("h: expected {k} metrics, found {}", hs.len())));
                }
                hs.iter()
                    .enumerate()
                    .map(|(i, m)| matrix_from_doc(m, self.dims[i], self.dims[i], &format!("h[{i}]")))
                    .collect::<Result<Vec<_>>>()?
            }
            None => self.dims.iter().map(|&d| eye(d)).collect(),
        };
        MetricComplex::new(v, h)
    }
}

/// A double complex `{dims[p][q], vertical[p][q], horizontal[p][q], metrics[p][q]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleComplexDoc {
    pub dims: Vec<Vec<usize>>,
    pub vertical: Vec<Vec<MatrixDoc>>,
    pub horizontal: Vec<Vec<MatrixDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Vec<Vec<MatrixDoc>>>,
}

impl DoubleComplexDoc {
    pub fn from_data(d: &DoubleComplexData) -> Self {
        let (pp, qq) = (d.columns(), d.rows());
        DoubleComplexDoc {
            dims: d.dims(),
            vertical: (0..pp)
                .map(|p| (0..qq.saturating_sub(1)).map(|q| matrix_to_doc(&d.vertical(p as isize, q as isize))).collect())
                .collect(),
            horizontal: (0..pp.saturating_sub(1))
                .map(|p| (0..qq).map(|q| matrix_to_doc(&d.horizontal(p as isize, q as isize))).collect())
                .collect(),
            metrics: Some((0..pp).map(|p| (0..qq).map(|q| matrix_to_doc(d.metric(p, q))).collect()).collect()),
        }
    }

    pub fn to_data(&self) -> Result<DoubleComplexData> {
        let pp = self.dims.len();
        let qq = self.dims.first().map_or(0, |c| c.len());
        if pp == 0 || qq == 0 || self.dims.iter().any(|c| c.len() != qq) {
            return Err(TorsionError::Input("dims: expected a non-empty rectangular grid".into()));
        }
        let dim = |p: usize, q: usize| self.dims[p][q];
        if self.vertical.len() != pp || self.vertical.iter().any(|c| c.len() != qq - 1) {
            return Err(TorsionError::Input(format!("vertical: expected {pp} columns of {} maps", qq - 1)));
        }
        if self.horizontal.len() != pp - 1 || self.horizontal.iter().any(|c| c.len() != qq) {
            return Err(TorsionError::Input(format!("horizontal: expected {} columns of {qq} maps", pp - 1)));
        }
        let mut vertical = Vec::with_capacity(pp);
        for p in 0..pp {
            let mut col = Vec::new();
            for q in 0..qq - 1 {
                col.push(matrix_from_doc(&self.vertical[p][q], dim(p, q + 1), dim(p, q), &format!("vertical[{p}][{q}]"))?);
            }
            vertical.push(col);
        }
        let mut horizontal = Vec::with_capacity(pp - 1);
        for p in 0..pp - 1 {
            let mut col = Vec::new();
            for q in 0..qq {
                col.push(matrix_from_doc(&self.horizontal[p][q], dim(p + 1, q), dim(p, q), &format!("horizontal[{p}][{q}]"))?);
            }
            horizontal.push(col);
        }
        let metrics = match &self.metrics {
            Some(ms) => {
                if ms.len() != pp || ms.iter().any(|c| c.len() != qq) {
                    return Err(TorsionError::Input("metrics: layout does not match dims".into()));
                }
                let mut out = Vec::with_capacity(pp);
                for p in 0..pp {
                    let mut col = Vec::new();
                    for q in 0..qq {
                        col.push(matrix_from_doc(&ms[p][q], dim(p, q), dim(p, q), &format!("metrics[{p}][{q}]"))?);
                    }
                    out.push(col);
                }
                out
            }
            None => self.dims.iter().map(|c| c.iter().map(|&n| eye(n)).collect()).collect(),
        };
        DoubleComplexData::new(metrics, vertical, horizontal)
    }
}
