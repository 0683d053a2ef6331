//! Degree-zero gluing of analytic torsion for one-dimensional models, and
//! the finite-dimensional identities behind it on the Morse side.
//!
//! Every scenario cuts a circle or an interval `Z` into `Z₁` (absolute
//! conditions on `Y`) and `Z₂` (relative conditions on `Y`). A cell model of
//! the cut fiber supplies both the Thom–Smale data (vertices are minima, edges
//! are maxima) and the de Rham map from harmonic forms to cochains, which
//! transports the L² metrics to the combinatorial side.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::analytic::{self, Boundary, L2Cohomology, ModelGeometry, ZetaEngine};
use crate::error::{Result, TorsionError};
use crate::flat_complex::MetricComplex;
use crate::hodge::{self, tilde_f_degree0};
use crate::linalg::{c, eye, inverse, rank, zeros, CMat};
use crate::morse::{CriticalPoint, Doubled, GroupElement, Instanton, MorseData, Region, ThomSmale, Variant, equivariant_torsion};
use crate::quadrature::QuadratureSpec;
use crate::spectral::{self, DoubleComplexData, Filtration, LongExactSequence, SpectralPage};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    /// Circle cut at two points, `χ(Y) = 2`.
    Circle,
    /// Interval `[0, L]` with its own end conditions, cut at one point.
    Interval { left: Boundary, right: Boundary },
}

/// `Z = Z₁ ∪_Y Z₂` with `Z₁` of length `split · L` carrying absolute and `Z₂`
/// carrying relative conditions along `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct GluingScenario {
    pub shape: Shape,
    pub length: f64,
    pub split: f64,
    /// Holonomy of the circle; identity for intervals.
    pub holonomy: CMat,
    /// Edges per arc in the cell model.
    pub subdivisions: usize,
}

impl GluingScenario {
    pub fn circle(length: f64, split: f64, holonomy: CMat) -> Result<Self> {
        let s = GluingScenario { shape: Shape::Circle, length, split, holonomy, subdivisions: 1 };
        s.validate()?;
        Ok(s)
    }

    pub fn interval(length: f64, split: f64, left: Boundary, right: Boundary, rank: usize) -> Result<Self> {
        let s = GluingScenario { shape: Shape::Interval { left, right }, length, split, holonomy: eye(rank), subdivisions: 1 };
        s.validate()?;
        Ok(s)
    }

    pub fn with_subdivisions(mut self, k: usize) -> Result<Self> {
        self.subdivisions = k;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(TorsionError::Domain("split fraction must lie in (0, 1)".into()));
        }
        if self.subdivisions == 0 {
            return Err(TorsionError::Domain("each arc needs at least one edge".into()));
        }
        if matches!(self.shape, Shape::Interval { .. }) && self.holonomy != eye(self.rank()) {
            return Err(TorsionError::Domain("intervals carry no holonomy".into()));
        }
        ModelGeometry::circle(self.length, self.holonomy.clone()).map(|_| ())
    }

    pub fn rank(&self) -> usize {
        self.holonomy.nrows()
    }

    pub fn chi_y(&self) -> i64 {
        match self.shape {
            Shape::Circle => 2,
            Shape::Interval { .. } => 1,
        }
    }

    fn lengths(&self) -> (f64, f64) {
        (self.split * self.length, (1.0 - self.split) * self.length)
    }

    pub fn z(&self) -> Result<ModelGeometry> {
        match self.shape {
            Shape::Circle => ModelGeometry::circle(self.length, self.holonomy.clone()),
            Shape::Interval { left, right } => ModelGeometry::interval_with_ends(self.length, left, right, self.rank()),
        }
    }

    pub fn z1(&self) -> Result<ModelGeometry> {
        let left = match self.shape {
            Shape::Circle => Boundary::Abs,
            Shape::Interval { left, .. } => left,
        };
        ModelGeometry::interval_with_ends(self.lengths().0, left, Boundary::Abs, self.rank())
    }

    pub fn z2(&self) -> Result<ModelGeometry> {
        let right = match self.shape {
            Shape::Circle => Boundary::Rel,
            Shape::Interval { right, .. } => right,
        };
        ModelGeometry::interval_with_ends(self.lengths().1, Boundary::Rel, right, self.rank())
    }

    /// The mirror image: `Z₁` and `Z₂` exchange lengths and outer ends.
    pub fn swapped(&self) -> Result<Self> {
        let shape = match self.shape {
            Shape::Circle => Shape::Circle,
            Shape::Interval { left, right } => Shape::Interval { left: right, right: left },
        };
        let s = GluingScenario { shape, split: 1.0 - self.split, ..self.clone() };
        s.validate()?;
        Ok(s)
    }

    pub fn cell_model(&self) -> CellModel1D {
        CellModel1D::new(self)
    }
}

/// Scenario document: `{shape, L, split, rank, holonomy, subdivisions}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    #[serde(flatten)]
    pub shape: Shape,
    #[serde(rename = "L")]
    pub length: f64,
    pub split: f64,
    #[serde(default = "one")]
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<crate::schema::MatrixDoc>,
    #[serde(default = "one")]
    pub subdivisions: usize,
}

fn one() -> usize {
    1
}

impl ScenarioDoc {
    pub fn to_scenario(&self) -> Result<GluingScenario> {
        let holonomy = match &self.holonomy {
            Some(m) => crate::schema::matrix_from_doc(m, self.rank, self.rank, "holonomy")?,
            None => eye(self.rank),
        };
        let s = GluingScenario { shape: self.shape, length: self.length, split: self.split, holonomy, subdivisions: self.subdivisions };
        s.validate()?;
        Ok(s)
    }

    pub fn from_scenario(s: &GluingScenario) -> Self {
        ScenarioDoc {
            shape: s.shape,
            length: s.length,
            split: s.split,
            rank: s.rank(),
            holonomy: Some(crate::schema::matrix_to_doc(&s.holonomy)),
            subdivisions: s.subdivisions,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub position: f64,
    pub region: Region,
    /// Outer end with relative conditions: no cochains live there.
    pub excluded: bool,
}

/// Oriented edge from `tail` to `head`. `transport` maps the fiber at the head
/// into the frame at the tail (the holonomy on the edge crossing the seam).
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub length: f64,
    pub region: Region,
    pub transport: CMat,
}

/// Cell structure of the cut fiber. The seam of the circle's trivialisation
/// sits at the end of the `Z₂` arc, so flat sections are constant on `Z₁` and
/// along the tails of all `Z₂` edges.
#[derive(Clone, Debug, PartialEq)]
pub struct CellModel1D {
    pub rank: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl CellModel1D {
    fn new(s: &GluingScenario) -> Self {
        let r = s.rank();
        let k = s.subdivisions;
        let (l1, l2) = s.lengths();
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let (left_excluded, right_excluded) = match s.shape {
            Shape::Circle => (false, false),
            Shape::Interval { left, right } => (left == Boundary::Rel, right == Boundary::Rel),
        };
        let is_circle = s.shape == Shape::Circle;
        let start_region = if is_circle { Region::Y } else { Region::Z1 };
        vertices.push(Vertex { id: "a0".into(), position: 0.0, region: start_region, excluded: left_excluded });
        for j in 1..k {
            vertices.push(Vertex { id: format!("a{j}"), position: l1 * j as f64 / k as f64, region: Region::Z1, excluded: false });
        }
        let y = vertices.len();
        vertices.push(Vertex { id: "y".into(), position: l1, region: Region::Y, excluded: false });
        for j in 1..k {
            vertices.push(Vertex { id: format!("b{j}"), position: l1 + l2 * j as f64 / k as f64, region: Region::Z2, excluded: false });
        }
        let end = if is_circle {
            0
        } else {
            vertices.push(Vertex { id: "b_end".into(), position: s.length, region: Region::Z2, excluded: right_excluded });
            vertices.len() - 1
        };
        let chain_a: Vec<usize> = (0..=k).map(|j| if j == k { y } else { j }).collect();
        let chain_b: Vec<usize> = (0..=k).map(|j| if j == 0 { y } else if j == k { end } else { y + j }).collect();
        for j in 0..k {
            edges.push(Edge { id: format!("e_a{j}"), tail: chain_a[j], head: chain_a[j + 1], length: l1 / k as f64, region: Region::Z1, transport: eye(r) });
        }
        for j in 0..k {
            let transport = if j + 1 == k && is_circle { s.holonomy.clone() } else { eye(r) };
            edges.push(Edge { id: format!("e_b{j}"), tail: chain_b[j], head: chain_b[j + 1], length: l2 / k as f64, region: Region::Z2, transport });
        }
        CellModel1D { rank: r, vertices, edges }
    }

    /// Thom–Smale data: vertices of index 0, edges of index 1 with instantons
    /// to the head (`+1`, transport) and to the tail (`−1`, identity).
    pub fn morse_data(&self) -> Result<MorseData> {
        let r = self.rank;
        let mut points = Vec::new();
        let mut vertex_point = vec![None; self.vertices.len()];
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.excluded {
                vertex_point[i] = Some(points.len());
                points.push(CriticalPoint { id: v.id.clone(), index: 0, on_boundary: v.region == Region::Y, region: v.region, metric: eye(r) });
            }
        }
        let mut instantons = Vec::new();
        for e in &self.edges {
            let k = points.len();
            points.push(CriticalPoint { id: e.id.clone(), index: 1, on_boundary: false, region: e.region, metric: eye(r) });
            if let Some(h) = vertex_point[e.head] {
                instantons.push(Instanton { from: k, to: h, sign: 1, transport: e.transport.clone() });
            }
            if let Some(t) = vertex_point[e.tail] {
                instantons.push(Instanton { from: k, to: t, sign: -1, transport: eye(r) });
            }
        }
        MorseData::new(r, points, instantons)
    }

    fn cell_length(&self, id: &str) -> Option<(usize, f64)> {
        if self.vertices.iter().any(|v| v.id == id) {
            return Some((0, 0.0));
        }
        self.edges.iter().find(|e| e.id == id).map(|e| (1, e.length))
    }

    /// de Rham map `σ ↦ (∫_{W^u(x)} σ)_x` on harmonic forms of degree `q`,
    /// columns in the basis of `h`. Mirror points (`id'`) of a double pick up
    /// `parity`, the sign of the reflection on those forms.
    pub fn de_rham(&self, data: &MorseData, ts: &ThomSmale, q: usize, h: &L2Cohomology, parity: f64) -> Result<CMat> {
        let r = self.rank;
        let sections = &h.sections[q.min(1)];
        let b = if q > 1 { 0 } else { sections.ncols() };
        let mut out = zeros(ts.generators[q].len() * r, b);
        if b == 0 {
            return Ok(out);
        }
        for (a, &k) in ts.generators[q].iter().enumerate() {
            let id = &data.points()[k].id;
            let (base, sign) = match id.strip_suffix('\'') {
                Some(base) => (base, parity),
                None => (id.as_str(), 1.0),
            };
            let (dim, len) = self
                .cell_length(base)
                .ok_or_else(|| TorsionError::Config(format!("point {id} is not a cell of the model")))?;
            if dim != q {
                return Err(TorsionError::Config(format!("point {id} has the wrong dimension")));
            }
            let value = if q == 0 { 1.0 } else { h.coefficient[1] * len };
            out.view_mut((a * r, 0), (r, b)).copy_from(&(sections * c(value * sign)));
        }
        Ok(out)
    }
}

/// L² Gram matrix, in the basis `reps` (`h`-orthonormal harmonic
/// representatives), of the classes of the de Rham images `cochains` of
/// harmonic forms with Gram matrix `harm`.
pub fn l2_gram(reps: &CMat, metric: &CMat, cochains: &CMat, harm: &CMat) -> Result<CMat> {
    let m = reps.adjoint() * metric * cochains;
    if m.nrows() != m.ncols() || rank(&m) != m.nrows() {
        return Err(TorsionError::Construction(format!(
            "de Rham map is not an isomorphism on cohomology ({} classes, {} harmonic forms)",
            m.nrows(),
            m.ncols()
        )));
    }
    let mi = inverse(&m)?;
    Ok(mi.adjoint() * harm * mi)
}

/// L² data of one column: de Rham images and harmonic Grams per degree.
#[derive(Clone, Debug)]
struct ColumnL2 {
    cochains: Vec<CMat>,
    harm: Vec<CMat>,
}

impl ColumnL2 {
    fn build(model: &CellModel1D, data: &MorseData, ts: &ThomSmale, h: &L2Cohomology, parity: [f64; 2], keep: [bool; 2]) -> Result<Self> {
        let n = ts.generators.len();
        let mut cochains = Vec::with_capacity(n);
        let mut harm = Vec::with_capacity(n);
        for q in 0..n {
            let r = model.rank;
            if q < 2 && keep[q] {
                cochains.push(model.de_rham(data, ts, q, h, parity[q])?);
                harm.push(h.grams[q].clone());
            } else {
                cochains.push(zeros(ts.generators[q].len() * r, 0));
                harm.push(zeros(0, 0));
            }
        }
        Ok(ColumnL2 { cochains, harm })
    }

    /// Re-express the cochains in the coordinates of a subcomplex with
    /// `h`-orthonormal basis `basis` (columns) of an ambient metric `metric`.
    fn restricted(&self, basis: &[CMat], metric: &[CMat]) -> Self {
        ColumnL2 {
            cochains: self.cochains.iter().enumerate().map(|(q, p)| basis[q].adjoint() * &metric[q] * p).collect(),
            harm: self.harm.clone(),
        }
    }

    /// Grams in the Hodge basis of `e`.
    fn hodge_grams(&self, e: &MetricComplex) -> Result<Vec<CMat>> {
        let hd = hodge::hodge_decompose(e)?;
        (0..e.len()).map(|q| l2_gram(&hd.harmonic[q], &e.h()[q], &self.cochains[q], &self.harm[q])).collect()
    }
}

/// `f̃(H; h_C, h_L²)` at degree 0 from Grams in an `h_C`-orthonormal basis.
fn tilde_f_to_l2(grams: &[CMat]) -> Result<f64> {
    let ids: Vec<CMat> = grams.iter().map(|g| eye(g.nrows())).collect();
    tilde_f_degree0(&ids, grams)
}

/// Page-1 L² Grams of a double complex whose columns carry `columns`.
fn page1_grams(d: &DoubleComplexData, page1: &SpectralPage, columns: &[&ColumnL2]) -> Result<Vec<Vec<CMat>>> {
    (0..d.columns())
        .map(|p| {
            (0..d.rows())
                .map(|q| l2_gram(page1.representatives(p, q), d.metric(p, q), &columns[p].cochains[q], &columns[p].harm[q]))
                .collect()
        })
        .collect()
}

/// `Σ_{r≥1} T(E_r, h_L²)` with metrics induced successively from page 1.
fn l2_page_torsions(pages: &[SpectralPage], grams1: Vec<Vec<CMat>>) -> Result<Vec<f64>> {
    let mut grams = grams1;
    let mut out = Vec::new();
    for r in 1..pages.len() {
        if pages[r].total_dim() == 0 {
            break;
        }
        out.push(hodge::scalar_torsion_eigen(&pages[r].as_metric_complex_with(Some(&grams))?)?);
        if r + 1 < pages.len() {
            grams = spectral::next_page_grams(&pages[r], &grams, &pages[r + 1])?;
        }
    }
    Ok(out)
}

/// The Mayer–Vietoris sequence `𝓗` with L² metrics.
#[derive(Clone, Debug)]
pub struct MayerVietorisData {
    pub sequence: LongExactSequence,
    /// `T_f(𝓗)` at degree 0.
    pub torsion: f64,
}

impl MayerVietorisData {
    pub fn dims(&self) -> Vec<usize> {
        self.sequence.complex.dims()
    }
}

/// Everything the combinatorial side needs about a scenario.
struct Assembled {
    model: CellModel1D,
    data: MorseData,
    d: DoubleComplexData,
    columns: [ColumnL2; 3],
}

fn assemble(s: &GluingScenario) -> Result<Assembled> {
    let model = s.cell_model();
    let data = model.morse_data()?;
    let d = data.three_column()?;
    let geoms = [s.z2()?, s.z()?, s.z1()?];
    let variants = [Variant::RelativeZ2, Variant::Full, Variant::AbsoluteZ1];
    let mut cols = Vec::with_capacity(3);
    for (g, v) in geoms.iter().zip(variants) {
        let ts = data.thom_smale(v)?;
        let h = analytic::l2_cohomology(g)?;
        cols.push(ColumnL2::build(&model, &data, &ts, &h, [1.0, 1.0], [true, true])?);
    }
    let columns: [ColumnL2; 3] = cols.try_into().expect("three columns");
    Ok(Assembled { model, data, d, columns })
}

pub fn build_mv(s: &GluingScenario, quad: &QuadratureSpec) -> Result<MayerVietorisData> {
    let a = assemble(s)?;
    let grams: Vec<Vec<CMat>> = (0..3)
        .map(|p| a.columns[p].hodge_grams(&a.d.column_complex(p)?))
        .collect::<Result<_>>()?;
    let sequence = spectral::long_exact_sequence(&a.d, Some(&grams))?;
    let torsion = sequence.complex.torsion_form(quad)?.degree0();
    Ok(MayerVietorisData { sequence, torsion })
}

/// Both sides of a degree-zero identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Identity {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl Identity {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Identity { name: name.into(), lhs, rhs }
    }

    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GluingReport {
    pub torsion_z: f64,
    pub torsion_z1_abs: f64,
    pub torsion_z2_rel: f64,
    /// `(log 2 / 2) rk F χ(Y)`.
    pub defect: f64,
    pub torsion_mv: f64,
    pub mv_dims: Vec<usize>,
    pub residual: f64,
}

pub fn verify_gluing_degree0(s: &GluingScenario, quad: &QuadratureSpec, engine: ZetaEngine) -> Result<GluingReport> {
    let tz = analytic::scalar_torsion_with(&s.z()?, engine)?;
    let t1 = analytic::scalar_torsion_with(&s.z1()?, engine)?;
    let t2 = analytic::scalar_torsion_with(&s.z2()?, engine)?;
    let defect = 0.5 * LN_2 * s.rank() as f64 * s.chi_y() as f64;
    let mv = build_mv(s, quad)?;
    let residual = (tz - t1 - t2 - defect - mv.torsion).abs();
    Ok(GluingReport {
        torsion_z: tz,
        torsion_z1_abs: t1,
        torsion_z2_rel: t2,
        defect,
        torsion_mv: mv.torsion,
        mv_dims: mv.dims(),
        residual,
    })
}

/// Doubled side data with the L² data of the double.
struct DoubledSide {
    doubled: Doubled,
    double_l2: ColumnL2,
    side_l2: ColumnL2,
}

fn doubled_side(a: &Assembled, s: &GluingScenario, side: Region) -> Result<DoubledSide> {
    let one_sided = a.data.side(side)?;
    let doubled = one_sided.double()?;
    let side_len = if side == Region::Z1 { s.lengths().0 } else { s.lengths().1 };
    let geom = ModelGeometry::trivial_circle(2.0 * side_len, s.rank())?;
    let h = analytic::l2_cohomology(&geom)?;
    // Functions are even, `dx` is odd under the reflection.
    let double_l2 = ColumnL2::build(&a.model, &doubled.data, &doubled.thom_smale, &h, [1.0, -1.0], [side == Region::Z1, side == Region::Z2])?;
    let (variant, g) = if side == Region::Z1 { (Variant::Full, s.z1()?) } else { (Variant::RelativeZ2, s.z2()?) };
    let ts = one_sided.thom_smale(variant)?;
    let side_l2 = ColumnL2::build(&a.model, &one_sided, &ts, &analytic::l2_cohomology(&g)?, [1.0, 1.0], [true, true])?;
    Ok(DoubledSide { doubled, double_l2, side_l2 })
}

/// Morse-side identities at degree 0 for a circle scenario.
pub fn verify_morse_side(s: &GluingScenario, engine: ZetaEngine) -> Result<Vec<Identity>> {
    if s.shape != Shape::Circle {
        return Err(TorsionError::Unsupported("the Morse-side ledger is built for circle scenarios".into()));
    }
    let a = assemble(s)?;
    let r = s.rank() as f64;
    let chi_y = s.chi_y() as f64;
    let torsion = |e: &MetricComplex| hodge::scalar_torsion_eigen(e);
    let mut out = Vec::new();

    // Three-column complex C(Z₂, Y) → C(Z) → C(Z₁).
    let pages = spectral::pages(&a.d, Filtration::Columns, 4)?;
    let t_e0 = torsion(&pages[0].as_metric_complex()?)?;
    let cols: Vec<MetricComplex> = (0..3).map(|p| a.d.column_complex(p)).collect::<Result<_>>()?;
    let t_cols: Vec<f64> = cols.iter().map(|e| torsion(e)).collect::<Result<_>>()?;
    out.push(Identity::new("page0_column_sum", t_e0, t_cols[0] - t_cols[1] + t_cols[2]));

    let refs = [&a.columns[0], &a.columns[1], &a.columns[2]];
    let grams1 = page1_grams(&a.d, &pages[1], &refs)?;
    let l2_by_degree = pages[1].as_metric_complex_with(Some(&grams1))?.h().to_vec();
    let f_e1 = -tilde_f_to_l2(&l2_by_degree)?;
    let f_cols: Vec<f64> = (0..3)
        .map(|p| tilde_f_to_l2(&a.columns[p].hodge_grams(&cols[p])?))
        .collect::<Result<_>>()?;
    // f̃('E₁; h_L², h) = f̃_Z − f̃_{Z₁} − f̃_{(Z₂,Y)} with f̃_X = f̃(H(X); h_C, h_L²).
    out.push(Identity::new("page1_anomaly_split", f_e1, f_cols[1] - f_cols[2] - f_cols[0]));

    let t_l2 = l2_page_torsions(&pages, grams1)?;
    out.push(Identity::new("page_ledger_l2", t_e0 + t_l2.iter().sum::<f64>() + f_e1, 0.0));

    let tz = analytic::scalar_torsion_with(&s.z()?, engine)?;
    let t1 = analytic::scalar_torsion_with(&s.z1()?, engine)?;
    let t2 = analytic::scalar_torsion_with(&s.z2()?, engine)?;
    let defect = 0.5 * LN_2 * r * chi_y;
    out.push(Identity::new("morse_gluing_formula", tz - t1 - t2, defect - t_e0 - f_e1));

    // Long exact sequence with Hodge metrics against pages 1 and 2.
    let les = spectral::long_exact_sequence(&a.d, None)?;
    let t_pages: f64 = pages[1..].iter().filter(|p| p.total_dim() > 0).map(|p| torsion(&p.as_metric_complex()?)).sum::<Result<f64>>()?;
    out.push(Identity::new("sequence_vs_pages", torsion(&les.complex)?, t_pages));

    // Plus side: C̄₁⁺ → C(Z₁).
    let plus = doubled_side(&a, s, Region::Z1)?;
    let (dp, split_p) = plus.doubled.plus_double_complex()?;
    let rows_p = spectral::pages(&dp, Filtration::Rows, 1)?;
    let t_rows0_p = torsion(&rows_p[0].as_metric_complex()?)?;
    out.push(Identity::new("boundary_defect_plus", t_rows0_p, -0.5 * LN_2 * chi_y * r));
    let cols_p = spectral::pages(&dp, Filtration::Columns, 3)?;
    let t_cols_p: f64 = cols_p.iter().filter(|p| p.total_dim() > 0).map(|p| torsion(&p.as_metric_complex()?)).sum::<Result<f64>>()?;
    out.push(Identity::new("plus_rows_vs_columns", t_rows0_p, t_cols_p));
    let bar_plus_l2 = plus.double_l2.restricted(&split_p.basis_plus, plus.doubled.complex.complex.h());
    let grams_p1 = page1_grams(&dp, &cols_p[1], &[&bar_plus_l2, &plus.side_l2])?;
    let t_e1_plus_l2: f64 = l2_page_torsions(&cols_p, grams_p1)?.iter().sum();
    out.push(Identity::new("plus_page1_l2_torsion", t_e1_plus_l2, 0.0));
    let t_bar_plus = torsion(&split_p.plus)?;
    let f_bar_plus = tilde_f_to_l2(&bar_plus_l2.hodge_grams(&split_p.plus)?)?;
    let z1_complex = plus.doubled.original.thom_smale(Variant::Full)?.complex;
    let t_z1 = torsion(&z1_complex)?;
    let f_z1 = tilde_f_to_l2(&plus.side_l2.hodge_grams(&z1_complex)?)?;
    out.push(Identity::new("plus_side_comparison", t_bar_plus - f_bar_plus, t_z1 - f_z1 - t_e1_plus_l2 + t_rows0_p));

    // Minus side: C(Z₂, Y) → C̄₂⁻.
    let minus = doubled_side(&a, s, Region::Z2)?;
    let (dm, split_m) = minus.doubled.minus_double_complex()?;
    let rows_m = spectral::pages(&dm, Filtration::Rows, 1)?;
    out.push(Identity::new("minus_rows_page0_torsion", torsion(&rows_m[0].as_metric_complex()?)?, 0.0));
    let cols_m = spectral::pages(&dm, Filtration::Columns, 3)?;
    let t_e1_minus = if cols_m[1].total_dim() > 0 { torsion(&cols_m[1].as_metric_complex()?)? } else { 0.0 };
    out.push(Identity::new("minus_page1_torsion", t_e1_minus, 0.0));
    let bar_minus_l2 = minus.double_l2.restricted(&split_m.basis_minus, minus.doubled.complex.complex.h());
    let grams_m1 = page1_grams(&dm, &cols_m[1], &[&minus.side_l2, &bar_minus_l2])?;
    let t_e1_minus_l2: f64 = l2_page_torsions(&cols_m, grams_m1)?.iter().sum();
    out.push(Identity::new("minus_page1_l2_torsion", t_e1_minus_l2, 0.0));
    let t_bar_minus = torsion(&split_m.minus)?;
    let f_bar_minus = tilde_f_to_l2(&bar_minus_l2.hodge_grams(&split_m.minus)?)?;
    let rel_complex = minus.doubled.original.thom_smale(Variant::RelativeZ2)?.complex;
    let t_rel = torsion(&rel_complex)?;
    let f_rel = tilde_f_to_l2(&minus.side_l2.hodge_grams(&rel_complex)?)?;
    out.push(Identity::new("minus_side_comparison", t_bar_minus - f_bar_minus, t_rel - f_rel + t_e1_minus_l2));

    // Analytic torsions against the doubled complexes.
    let f_z = f_cols[1];
    out.push(Identity::new(
        "double_comparison_formula",
        tz - t1 - t2,
        t_cols[1] - t_bar_plus - t_bar_minus - f_z + f_bar_plus + f_bar_minus,
    ));
    Ok(out)
}

/// Analytic and combinatorial double formulas for `g ∈ {1, φ}`.
pub fn verify_double_formula(s: &GluingScenario, engine: ZetaEngine) -> Result<Vec<Identity>> {
    let mut out = Vec::new();
    for (label, geom) in [("z1", s.z1()?), ("z2", s.z2()?)] {
        let (len, rank) = (geom.length(), geom.rank());
        let abs = analytic::scalar_torsion_with(&ModelGeometry::interval(len, Boundary::Abs, rank)?, engine)?;
        let rel = analytic::scalar_torsion_with(&ModelGeometry::interval(len, Boundary::Rel, rank)?, engine)?;
        for g in [GroupElement::Identity, GroupElement::Reflection] {
            let lhs = analytic::equivariant_scalar_torsion(&geom, g, engine)?;
            out.push(Identity::new(&format!("analytic_double_{label}_{}", group_label(g)), lhs, abs + g.character() * rel));
        }
    }
    if s.shape == Shape::Circle {
        let data = s.cell_model().morse_data()?;
        for (label, side) in [("z1", Region::Z1), ("z2", Region::Z2)] {
            let doubled = data.side(side)?.double()?;
            let split = crate::morse::z2_split(&doubled.complex)?;
            let tp = hodge::scalar_torsion_eigen(&split.plus)?;
            let tm = hodge::scalar_torsion_eigen(&split.minus)?;
            for g in [GroupElement::Identity, GroupElement::Reflection] {
                let lhs = equivariant_torsion(&doubled.complex, g)?;
                out.push(Identity::new(&format!("combinatorial_double_{label}_{}", group_label(g)), lhs, tp + g.character() * tm));
            }
        }
    }
    Ok(out)
}

fn group_label(g: GroupElement) -> &'static str {
    match g {
        GroupElement::Identity => "identity",
        GroupElement::Reflection => "reflection",
    }
}

/// Scenarios of the gluing sweep: circles of length `L ∈ {1, 2, 4}` split at
/// `{¼, ½, ¾}` with holonomy `e^{iθ}`, `θ ∈ {0, π/3, π/2, π}`, in ranks 1 and 2
/// (rank 2 carries `diag(e^{iθ}, 1)` in a rotated frame).
pub fn sweep() -> Vec<GluingScenario> {
    use std::f64::consts::PI;
    let mut out = Vec::new();
    for &length in &[1.0, 2.0, 4.0] {
        for &split in &[0.25, 0.5, 0.75] {
            for &theta in &[0.0, PI / 3.0, PI / 2.0, PI] {
                for rank in 1..=2usize {
                    let u = holonomy(theta, rank);
                    out.push(GluingScenario::circle(length, split, u).expect("sweep scenario is valid"));
                }
            }
        }
    }
    out
}

/// `e^{iθ}` in rank 1; `R diag(e^{iθ}, 1) R^†` with a fixed rotation `R` in rank 2.
pub fn holonomy(theta: f64, rank: usize) -> CMat {
    let phase = crate::linalg::C64::from_polar(1.0, theta);
    if rank == 1 {
        return CMat::from_element(1, 1, phase);
    }
    let mut d = eye(rank);
    d[(0, 0)] = phase;
    let (cs, sn) = (0.6, 0.8);
    let mut rot = eye(rank);
    rot[(0, 0)] = c(cs);
    rot[(0, 1)] = c(-sn);
    rot[(1, 0)] = c(sn);
    rot[(1, 1)] = c(cs);
    &rot * d * rot.adjoint()
}
