//! Thom–Smale complexes of Morse data on a fiber cut along a hypersurface `Y`.
//!
//! Cochain convention: an instanton `γ` from `x` (index `i`) to `x'` (index
//! `i − 1`) with sign `n_γ` and transport `τ_γ: F_{x'} → F_x` contributes
//! `n_γ τ_γ` to the block `[x][x']` of `∂: C^{i−1} → C^i`, i.e.
//! `(∂a)(x) = Σ_γ n_γ τ_γ a(x')`.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Result, TorsionError};
use crate::flat_complex::MetricComplex;
use crate::linalg::{c, check_positive_definite, cholesky, column_space, eye, hermitian_eigen, inverse, max_abs, rank, rank_scale, zeros, CMat, RANK_TOL};
use crate::schema::{matrix_from_doc, matrix_to_doc, MatrixDoc};
use crate::spectral::DoubleComplexData;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Z1,
    Z2,
    Y,
}

impl Region {
    fn other_side(self) -> Region {
        match self {
            Region::Z1 => Region::Z2,
            Region::Z2 => Region::Z1,
            Region::Y => Region::Y,
        }
    }
}

/// Which generators a Thom–Smale complex keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// All critical points of `Z`.
    Full,
    /// Points of `Z₁ ∪ Y` (quotient complex).
    AbsoluteZ1,
    /// Points of `Z₂` off `Y` (subcomplex).
    RelativeZ2,
    /// Points on `Y`.
    BoundaryY,
}

impl Variant {
    fn keeps(self, region: Region) -> bool {
        match self {
            Variant::Full => true,
            Variant::AbsoluteZ1 => region != Region::Z2,
            Variant::RelativeZ2 => region == Region::Z2,
            Variant::BoundaryY => region == Region::Y,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    pub id: String,
    pub index: usize,
    pub on_boundary: bool,
    pub region: Region,
    /// `h^F` at the point.
    pub metric: CMat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instanton {
    pub from: usize,
    pub to: usize,
    pub sign: i32,
    pub transport: CMat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorseData {
    rank: usize,
    points: Vec<CriticalPoint>,
    instantons: Vec<Instanton>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointDoc {
    pub id: String,
    pub index: usize,
    pub on_boundary: bool,
    pub region: Region,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MatrixDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstantonDoc {
    pub from: String,
    pub to: String,
    pub sign: i32,
    /// Defaults to the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transport: Option<MatrixDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseDoc {
    pub rank: usize,
    pub points: Vec<PointDoc>,
    pub instantons: Vec<InstantonDoc>,
}

/// A Thom–Smale complex with the critical points behind each degree.
#[derive(Clone, Debug)]
pub struct ThomSmale {
    pub complex: MetricComplex,
    /// `generators[i]` lists point indices of index `i`, in block order.
    pub generators: Vec<Vec<usize>>,
    rank: usize,
}

impl ThomSmale {
    /// Row offset of the block of `point` in degree `degree`.
    pub fn offset(&self, degree: usize, point: usize) -> Option<usize> {
        self.generators[degree].iter().position(|&p| p == point).map(|k| k * self.rank)
    }
}

impl MorseData {
    pub fn new(rank: usize, points: Vec<CriticalPoint>, instantons: Vec<Instanton>) -> Result<Self> {
        let m = MorseData { rank, points, instantons };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let r = self.rank;
        if r == 0 {
            return Err(TorsionError::Input("rank must be positive".into()));
        }
        if self.points.is_empty() {
            return Err(TorsionError::Input("Morse data needs at least one critical point".into()));
        }
        let mut seen = HashMap::new();
        for (k, p) in self.points.iter().enumerate() {
            if seen.insert(p.id.as_str(), k).is_some() {
                return Err(TorsionError::Input(format!("duplicate critical point id {}", p.id)));
            }
            if p.on_boundary != (p.region == Region::Y) {
                return Err(TorsionError::Config(format!(
                    "point {}: on_boundary must hold exactly for points of region Y",
                    p.id
                )));
            }
            if p.metric.shape() != (r, r) {
                return Err(TorsionError::Dimension(format!("point {}: metric is not {r}x{r}", p.id)));
            }
            check_positive_definite(&p.metric, &format!("metric at {}", p.id))?;
        }
        for g in &self.instantons {
            let (x, y) = (&self.points[g.from], &self.points[g.to]);
            if y.index + 1 != x.index {
                return Err(TorsionError::Inconsistent(format!(
                    "instanton {} -> {} does not lower the index by one",
                    x.id, y.id
                )));
            }
            if g.sign != 1 && g.sign != -1 {
                return Err(TorsionError::Input(format!("instanton {} -> {}: sign must be ±1", x.id, y.id)));
            }
            let crosses = matches!((x.region, y.region), (Region::Z1, Region::Z2) | (Region::Z2, Region::Z1));
            if crosses {
                return Err(TorsionError::Inconsistent(format!("instanton {} -> {} crosses Y", x.id, y.id)));
            }
            if g.transport.shape() != (r, r) || rank(&g.transport) != r {
                return Err(TorsionError::Input(format!(
                    "instanton {} -> {}: transport must be an invertible {r}x{r} matrix",
                    x.id, y.id
                )));
            }
        }
        self.check_square_zero()
    }

    fn check_square_zero(&self) -> Result<()> {
        let (v, generators) = self.coboundary_blocks(Variant::Full);
        for i in 0..v.len().saturating_sub(1) {
            let sq = &v[i + 1] * &v[i];
            let scale = max_abs(&v[i + 1]).max(1.0) * max_abs(&v[i]).max(1.0);
            if max_abs(&sq) <= 1e-12 * scale {
                continue;
            }
            let r = self.rank;
            for (a, &x) in generators[i + 2].iter().enumerate() {
                for (b, &y) in generators[i].iter().enumerate() {
                    if max_abs(&sq.view((a * r, b * r), (r, r)).into_owned()) > 1e-12 * scale {
                        return Err(TorsionError::Inconsistent(format!(
                            "∂² ≠ 0 between {} and {}",
                            self.points[x].id, self.points[y].id
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_doc(doc: &MorseDoc) -> Result<Self> {
        let r = doc.rank;
        let mut ids = HashMap::new();
        let mut points = Vec::with_capacity(doc.points.len());
        for (k, p) in doc.points.iter().enumerate() {
            ids.insert(p.id.clone(), k);
            let metric = match &p.metric {
                Some(m) => matrix_from_doc(m, r, r, &format!("metric of {}", p.id))?,
                None => eye(r),
            };
            points.push(CriticalPoint { id: p.id.clone(), index: p.index, on_boundary: p.on_boundary, region: p.region, metric });
        }
        let lookup = |id: &str| {
            ids.get(id).copied().ok_or_else(|| TorsionError::Input(format!("instanton refers to unknown point {id}")))
        };
        let mut instantons = Vec::with_capacity(doc.instantons.len());
        for g in &doc.instantons {
            let transport = match &g.transport {
                Some(m) => matrix_from_doc(m, r, r, &format!("transport {} -> {}", g.from, g.to))?,
                None => eye(r),
            };
            instantons.push(Instanton { from: lookup(&g.from)?, to: lookup(&g.to)?, sign: g.sign, transport });
        }
        MorseData::new(r, points, instantons)
    }

    pub fn to_doc(&self) -> MorseDoc {
        MorseDoc {
            rank: self.rank,
            points: self
                .points
                .iter()
                .map(|p| PointDoc {
                    id: p.id.clone(),
                    index: p.index,
                    on_boundary: p.on_boundary,
                    region: p.region,
                    metric: if p.metric == eye(self.rank) { None } else { Some(matrix_to_doc(&p.metric)) },
                })
                .collect(),
            instantons: self
                .instantons
                .iter()
                .map(|g| InstantonDoc {
                    from: self.points[g.from].id.clone(),
                    to: self.points[g.to].id.clone(),
                    sign: g.sign,
                    transport: Some(matrix_to_doc(&g.transport)),
                })
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn points(&self) -> &[CriticalPoint] {
        &self.points
    }

    pub fn instantons(&self) -> &[Instanton] {
        &self.instantons
    }

    pub fn point_index(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    /// Number of degrees of every complex built from this datum.
    pub fn degrees(&self) -> usize {
        self.points.iter().map(|p| p.index).max().unwrap_or(0) + 1
    }

    /// Height function on a circle: a minimum `p` and a maximum `q` joined by
    /// two instantons, one carrying the holonomy `u`. `∂ = u − 1`.
    pub fn circle_height(u: &CMat) -> Result<Self> {
        let r = u.nrows();
        let points = vec![
            CriticalPoint { id: "p".into(), index: 0, on_boundary: false, region: Region::Z1, metric: eye(r) },
            CriticalPoint { id: "q".into(), index: 1, on_boundary: false, region: Region::Z1, metric: eye(r) },
        ];
        let instantons = vec![
            Instanton { from: 1, to: 0, sign: 1, transport: u.clone() },
            Instanton { from: 1, to: 0, sign: -1, transport: eye(r) },
        ];
        MorseData::new(r, points, instantons)
    }

    /// Circle cut at two points: minima `y0`, `y1` on `Y`, a maximum `m1` in
    /// `Z₁` and `m2` in `Z₂`. The arc through `m2` carries the holonomy `u`.
    pub fn cut_circle(u: &CMat) -> Result<Self> {
        let r = u.nrows();
        let pt = |id: &str, index, region| CriticalPoint {
            id: id.into(),
            index,
            on_boundary: region == Region::Y,
            region,
            metric: eye(r),
        };
        let points = vec![pt("y0", 0, Region::Y), pt("m1", 1, Region::Z1), pt("y1", 0, Region::Y), pt("m2", 1, Region::Z2)];
        let g = |from, to, sign, transport: CMat| Instanton { from, to, sign, transport };
        let instantons = vec![g(1, 2, 1, eye(r)), g(1, 0, -1, eye(r)), g(3, 0, 1, u.clone()), g(3, 2, -1, eye(r))];
        MorseData::new(r, points, instantons)
    }

    /// The one-sided datum on `side ∪ Y`.
    pub fn side(&self, side: Region) -> Result<Self> {
        if side == Region::Y {
            return Err(TorsionError::Config("a side is Z1 or Z2".into()));
        }
        let keep: Vec<usize> = (0..self.points.len())
            .filter(|&k| self.points[k].region == side || self.points[k].region == Region::Y)
            .collect();
        let new_index: HashMap<usize, usize> = keep.iter().enumerate().map(|(n, &k)| (k, n)).collect();
        let points = keep.iter().map(|&k| self.points[k].clone()).collect();
        let instantons = self
            .instantons
            .iter()
            .filter_map(|g| {
                Some(Instanton { from: *new_index.get(&g.from)?, to: *new_index.get(&g.to)?, sign: g.sign, transport: g.transport.clone() })
            })
            .collect();
        MorseData::new(self.rank, points, instantons)
    }

    fn assemble(&self, variant: Variant) -> ThomSmale {
        let (v, generators) = self.coboundary_blocks(variant);
        let h: Vec<CMat> = generators
            .iter()
            .map(|g| crate::linalg::block_diag(&g.iter().map(|&k| self.points[k].metric.clone()).collect::<Vec<_>>()))
            .collect();
        let complex = MetricComplex::new(v, h).expect("assembled blocks have consistent shapes");
        ThomSmale { complex, generators, rank: self.rank }
    }

    fn coboundary_blocks(&self, variant: Variant) -> (Vec<CMat>, Vec<Vec<usize>>) {
        let r = self.rank;
        let n = self.degrees();
        let mut generators = vec![Vec::new(); n];
        for (k, p) in self.points.iter().enumerate() {
            if variant.keeps(p.region) {
                generators[p.index].push(k);
            }
        }
        let pos: HashMap<usize, usize> =
            generators.iter().flat_map(|g| g.iter().enumerate().map(|(a, &k)| (k, a))).collect();
        let dims: Vec<usize> = generators.iter().map(|g| g.len() * r).collect();
        let mut v: Vec<CMat> = (0..n - 1).map(|i| zeros(dims[i + 1], dims[i])).collect();
        for g in &self.instantons {
            let (Some(&a), Some(&b)) = (pos.get(&g.from), pos.get(&g.to)) else { continue };
            let i = self.points[g.to].index;
            let mut block = v[i].view_mut((a * r, b * r), (r, r));
            block += &g.transport * c(g.sign as f64);
        }
        (v, generators)
    }

    /// `C•(W^u, F)` for the chosen generators.
    pub fn thom_smale(&self, variant: Variant) -> Result<ThomSmale> {
        if variant == Variant::RelativeZ2 {
            self.check_relative_subcomplex()?;
        }
        let ts = self.assemble(variant);
        let v = ts.complex.v();
        for i in 0..v.len().saturating_sub(1) {
            let sq = &v[i + 1] * &v[i];
            if max_abs(&sq) > 1e-12 * max_abs(&v[i + 1]).max(1.0) * max_abs(&v[i]).max(1.0) {
                return Err(TorsionError::Inconsistent(format!("∂² ≠ 0 on the {variant:?} complex in degree {i}")));
            }
        }
        Ok(ts)
    }

    /// Points of `Z₂ \ Y` must span a subcomplex: no instanton may enter them from outside.
    fn check_relative_subcomplex(&self) -> Result<()> {
        for g in &self.instantons {
            let (x, y) = (&self.points[g.from], &self.points[g.to]);
            if y.region == Region::Z2 && x.region != Region::Z2 {
                return Err(TorsionError::Construction(format!(
                    "instanton {} -> {} runs from outside Z2 into Z2 \\ Y",
                    x.id, y.id
                )));
            }
        }
        Ok(())
    }

    /// Double complex `C(Z₂, Y) → C(Z) → C(Z₁)` of inclusion and restriction.
    /// The middle column carries `−∂` so that the squares anticommute.
    pub fn three_column(&self) -> Result<DoubleComplexData> {
        let rel = self.thom_smale(Variant::RelativeZ2)?;
        let full = self.thom_smale(Variant::Full)?;
        let abs = self.thom_smale(Variant::AbsoluteZ1)?;
        let n = self.degrees();
        let r = self.rank;
        let cols = [&rel, &full, &abs];
        let metrics = cols.iter().map(|t| t.complex.h().to_vec()).collect();
        let vertical = vec![rel.complex.v().to_vec(), full.complex.v().iter().map(|m| -m).collect(), abs.complex.v().to_vec()];
        let embed = |src: &ThomSmale, dst: &ThomSmale, q: usize| {
            let mut m = zeros(dst.generators[q].len() * r, src.generators[q].len() * r);
            for (a, &k) in src.generators[q].iter().enumerate() {
                let b = dst.offset(q, k).expect("generator present in the larger complex");
                m.view_mut((b, a * r), (r, r)).copy_from(&eye(r));
            }
            m
        };
        let inc: Vec<CMat> = (0..n).map(|q| embed(&rel, &full, q)).collect();
        let res: Vec<CMat> = (0..n).map(|q| embed(&abs, &full, q).transpose()).collect();
        DoubleComplexData::new(metrics, vertical, vec![inc, res])
    }

    /// Double of a one-sided datum along its boundary points.
    pub fn double(&self) -> Result<Doubled> {
        let sides: Vec<Region> = {
            let mut s: Vec<Region> = self.points.iter().map(|p| p.region).filter(|&r| r != Region::Y).collect();
            s.sort_by_key(|r| *r as u8);
            s.dedup();
            s
        };
        let side = match sides.as_slice() {
            [s] => *s,
            [] => return Err(TorsionError::Config("datum has no interior points".into())),
            _ => return Err(TorsionError::Config("doubling needs a one-sided datum".into())),
        };
        if !self.points.iter().any(|p| p.on_boundary) {
            return Err(TorsionError::Config("no boundary points are marked".into()));
        }
        let n0 = self.points.len();
        let mut points = self.points.clone();
        let mut mirror: Vec<usize> = (0..n0).collect();
        for k in 0..n0 {
            if self.points[k].region != Region::Y {
                mirror[k] = points.len();
                let p = &self.points[k];
                points.push(CriticalPoint {
                    id: format!("{}'", p.id),
                    index: p.index,
                    on_boundary: false,
                    region: side.other_side(),
                    metric: p.metric.clone(),
                });
            }
        }
        let mut full_mirror: Vec<usize> = (0..points.len()).collect();
        for k in 0..n0 {
            full_mirror[k] = mirror[k];
            full_mirror[mirror[k]] = k;
        }
        let mut instantons = self.instantons.clone();
        for g in &self.instantons {
            if self.points[g.from].region == Region::Y && self.points[g.to].region == Region::Y {
                continue;
            }
            instantons.push(Instanton { from: mirror[g.from], to: mirror[g.to], sign: g.sign, transport: g.transport.clone() });
        }
        let data = MorseData::new(self.rank, points, instantons)?;
        let ts = data.thom_smale(Variant::Full)?;
        let r = self.rank;
        let involution = (0..ts.generators.len())
            .map(|q| {
                let d = ts.generators[q].len() * r;
                let mut m = zeros(d, d);
                for (a, &k) in ts.generators[q].iter().enumerate() {
                    let b = ts.offset(q, full_mirror[k]).expect("mirror image has the same index");
                    m.view_mut((b, a * r), (r, r)).copy_from(&eye(r));
                }
                m
            })
            .collect();
        let complex = Z2Complex::new(ts.complex.clone(), involution)?;
        Ok(Doubled { original: self.clone(), side, data, mirror: full_mirror, thom_smale: ts, complex })
    }
}

/// A complex with a metric-preserving involution commuting with the differential.
#[derive(Clone, Debug)]
pub struct Z2Complex {
    pub complex: MetricComplex,
    pub involution: Vec<CMat>,
}

impl Z2Complex {
    pub fn new(complex: MetricComplex, involution: Vec<CMat>) -> Result<Self> {
        let dims = complex.dims();
        if involution.len() != dims.len() || involution.iter().zip(&dims).any(|(m, &d)| m.shape() != (d, d)) {
            return Err(TorsionError::Dimension("involution does not match the complex".into()));
        }
        for (q, g) in involution.iter().enumerate() {
            let d = dims[q];
            if max_abs(&(g * g - eye(d))) > 1e-12 {
                return Err(TorsionError::Inconsistent(format!("involution does not square to one in degree {q}")));
            }
            let h = &complex.h()[q];
            if max_abs(&(g.adjoint() * h * g - h)) > 1e-12 * max_abs(h).max(1.0) {
                return Err(TorsionError::Inconsistent(format!("involution is not an isometry in degree {q}")));
            }
        }
        for (i, v) in complex.v().iter().enumerate() {
            if max_abs(&(v * &involution[i] - &involution[i + 1] * v)) > 1e-12 * max_abs(v).max(1.0) {
                return Err(TorsionError::Inconsistent(format!("involution does not commute with ∂ in degree {i}")));
            }
        }
        Ok(Z2Complex { complex, involution })
    }
}

/// `±1` eigen-subcomplexes with `h`-orthonormal bases (columns in the
/// original coordinates).
#[derive(Clone, Debug)]
pub struct Z2Split {
    pub plus: MetricComplex,
    pub minus: MetricComplex,
    pub basis_plus: Vec<CMat>,
    pub basis_minus: Vec<CMat>,
}

pub fn z2_split(z: &Z2Complex) -> Result<Z2Split> {
    let e = &z.complex;
    let mut bases = [Vec::new(), Vec::new()];
    for (q, g) in z.involution.iter().enumerate() {
        let l = cholesky(&e.h()[q])?;
        let back = inverse(&l.adjoint())?;
        let g_on = l.adjoint() * g * &back;
        let d = g.nrows();
        for (s, sign) in [1.0, -1.0].into_iter().enumerate() {
            let proj = (eye(d) + &g_on * c(sign)) * c(0.5);
            bases[s].push(&back * column_space(&proj));
        }
    }
    let restrict = |b: &[CMat]| -> Result<MetricComplex> {
        let v = e
            .v()
            .iter()
            .enumerate()
            .map(|(i, v)| b[i + 1].adjoint() * &e.h()[i + 1] * v * &b[i])
            .collect();
        let h = b.iter().map(|m| eye(m.ncols())).collect();
        MetricComplex::new(v, h)
    };
    let [bp, bm] = bases;
    Ok(Z2Split { plus: restrict(&bp)?, minus: restrict(&bm)?, basis_plus: bp, basis_minus: bm })
}

/// Group elements of `ℤ₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupElement {
    Identity,
    Reflection,
}

impl GroupElement {
    /// Value of the nontrivial character.
    pub fn character(self) -> f64 {
        match self {
            GroupElement::Identity => 1.0,
            GroupElement::Reflection => -1.0,
        }
    }
}

/// `½ Σ_q (−1)^q q Σ_k ⟨u_k, g u_k⟩ log λ_k` over nonzero eigenvalues of `Δ_q`.
pub fn equivariant_torsion(z: &Z2Complex, g: GroupElement) -> Result<f64> {
    let e = &z.complex;
    let k = e.len();
    let frames: Vec<CMat> = e.h().iter().map(cholesky).collect::<Result<_>>()?;
    let backs: Vec<CMat> = frames.iter().map(|l| inverse(&l.adjoint())).collect::<Result<_>>()?;
    let v_on: Vec<CMat> = e.v().iter().enumerate().map(|(i, v)| frames[i + 1].adjoint() * v * &backs[i]).collect();
    let dims = e.dims();
    let mut decomps = Vec::with_capacity(k);
    for q in 0..k {
        let mut lap = zeros(dims[q], dims[q]);
        if q + 1 < k {
            lap += v_on[q].adjoint() * &v_on[q];
        }
        if q > 0 {
            lap += &v_on[q - 1] * v_on[q - 1].adjoint();
        }
        decomps.push(hermitian_eigen(&lap));
    }
    let radius = decomps.iter().flat_map(|(vals, _)| vals.iter().map(|x| x.abs())).fold(0.0, f64::max);
    let thr = RANK_TOL * rank_scale(radius);
    let mut acc = 0.0;
    for q in 1..k {
        let (vals, vecs) = &decomps[q];
        let g_on = match g {
            GroupElement::Identity => eye(dims[q]),
            GroupElement::Reflection => frames[q].adjoint() * &z.involution[q] * &backs[q],
        };
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        for (i, &lam) in vals.iter().enumerate() {
            if lam > thr {
                let u = vecs.column(i);
                let w = (u.adjoint() * &g_on * u)[(0, 0)].re;
                acc += 0.5 * sign * q as f64 * w * lam.ln();
            }
        }
    }
    Ok(acc)
}

/// A doubled one-sided datum with its involution.
#[derive(Clone, Debug)]
pub struct Doubled {
    pub original: MorseData,
    /// Region of the original interior points.
    pub side: Region,
    pub data: MorseData,
    /// Point permutation of the reflection.
    pub mirror: Vec<usize>,
    pub thom_smale: ThomSmale,
    pub complex: Z2Complex,
}

impl Doubled {
    /// `ψ₁⁺: C̄ → C(Z₁)`, `a ↦ (√2/2)(a|_{Z₁} + φ*(a|_{Z₁'}))`, per degree in the
    /// generator coordinates of both complexes. It vanishes on `C̄⁻`.
    pub fn psi_plus(&self) -> Result<Vec<CMat>> {
        if self.side != Region::Z1 {
            return Err(TorsionError::Config("ψ₁⁺ needs the double of a Z1 datum".into()));
        }
        let src = &self.thom_smale;
        let dst = self.original.thom_smale(Variant::Full)?;
        let r = self.data.rank;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ok((0..dst.generators.len())
            .map(|q| {
                let mut m = zeros(dst.generators[q].len() * r, src.generators[q].len() * r);
                for (a, &k) in dst.generators[q].iter().enumerate() {
                    for image in [k, self.mirror[k]] {
                        let b = src.offset(q, image).expect("point of the double");
                        let mut block = m.view_mut((a * r, b), (r, r));
                        block += eye(r) * c(s);
                    }
                }
                m
            })
            .collect())
    }

    /// `ψ₂⁻: C(Z₂, Y) → C̄`, `b ↦ (√2/2)(b − φ*b)`.
    pub fn psi_minus(&self) -> Result<Vec<CMat>> {
        if self.side != Region::Z2 {
            return Err(TorsionError::Config("ψ₂⁻ needs the double of a Z2 datum".into()));
        }
        let src = self.original.thom_smale(Variant::RelativeZ2)?;
        let dst = &self.thom_smale;
        let r = self.data.rank;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ok((0..src.generators.len())
            .map(|q| {
                let mut m = zeros(dst.generators[q].len() * r, src.generators[q].len() * r);
                for (a, &k) in src.generators[q].iter().enumerate() {
                    for (image, sign) in [(k, s), (self.mirror[k], -s)] {
                        let b = dst.offset(q, image).expect("point of the double");
                        m.view_mut((b, a * r), (r, r)).copy_from(&(eye(r) * c(sign)));
                    }
                }
                m
            })
            .collect())
    }
}

impl Doubled {
    /// `C̄⁺ → C(Z₁)` via `ψ₁⁺`, as a two-column double complex (second column `−∂`).
    pub fn plus_double_complex(&self) -> Result<(DoubleComplexData, Z2Split)> {
        let split = z2_split(&self.complex)?;
        let psi = self.psi_plus()?;
        let target = self.original.thom_smale(Variant::Full)?;
        let horizontal: Vec<CMat> = psi.iter().zip(&split.basis_plus).map(|(m, b)| m * b).collect();
        let d = two_columns(&split.plus, &target.complex, horizontal)?;
        Ok((d, split))
    }

    /// `C(Z₂, Y) → C̄⁻` via `ψ₂⁻`, as a two-column double complex.
    pub fn minus_double_complex(&self) -> Result<(DoubleComplexData, Z2Split)> {
        let split = z2_split(&self.complex)?;
        let psi = self.psi_minus()?;
        let source = self.original.thom_smale(Variant::RelativeZ2)?;
        let h = self.complex.complex.h();
        let horizontal: Vec<CMat> =
            psi.iter().enumerate().map(|(q, m)| split.basis_minus[q].adjoint() * &h[q] * m).collect();
        let d = two_columns(&source.complex, &split.minus, horizontal)?;
        Ok((d, split))
    }
}

fn two_columns(a: &MetricComplex, b: &MetricComplex, horizontal: Vec<CMat>) -> Result<DoubleComplexData> {
    let metrics = vec![a.h().to_vec(), b.h().to_vec()];
    let vertical = vec![a.v().to_vec(), b.v().iter().map(|m| -m).collect()];
    DoubleComplexData::new(metrics, vertical, vec![horizontal])
}
