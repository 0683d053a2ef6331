//! Verification suites and their reports.
//!
//! Each suite evaluates a fixed list of checks. A check records the values it
//! compared, its worst residual, the tolerance and a verdict. Reports are
//! deterministic for a fixed seed: timing is only recorded on request.

use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use crate::analytic::{self, Boundary, ModelGeometry, ZetaEngine};
use crate::error::Result;
use crate::flat_complex::{MetricComplex, MetricPath};
use crate::glue::{self, GluingScenario};
use crate::hodge;
use crate::linalg::{c, eye, max_abs, CMat};
use crate::morse::{MorseData, Region, Variant};
use crate::quadrature::QuadratureSpec;
use crate::random::{self, TestRng};
use crate::spectral::{self, Filtration};

/// Default tolerance for finite-dimensional checks.
pub const FINITE_TOLERANCE: f64 = 1e-9;
/// Default tolerance for checks involving zeta determinants or quadrature.
pub const ANALYTIC_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Finite,
    Spectral,
    Morse,
    Analytic,
    Gluing,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "finite" => Suite::Finite,
            "spectral" => Suite::Spectral,
            "morse" => Suite::Morse,
            "analytic" => Suite::Analytic,
            "gluing" => Suite::Gluing,
            "all" => Suite::All,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Finite => "finite",
            Suite::Spectral => "spectral",
            Suite::Morse => "morse",
            Suite::Analytic => "analytic",
            Suite::Gluing => "gluing",
            Suite::All => "all",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Finite, Suite::Spectral, Suite::Morse, Suite::Analytic, Suite::Gluing],
            s => vec![s],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub values: Vec<(String, f64)>,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(name: &str, values: Vec<(&str, f64)>, residual: f64, tolerance: f64) -> Self {
        let verdict = if residual.is_finite() && residual < tolerance { Verdict::Pass } else { Verdict::Fail };
        Check {
            name: name.into(),
            values: values.into_iter().map(|(k, v)| (k.into(), v)).collect(),
            residual,
            tolerance,
            verdict,
            note: None,
        }
    }

    fn failed(name: &str, tolerance: f64, err: impl std::fmt::Display) -> Self {
        Check {
            name: name.into(),
            values: Vec::new(),
            residual: f64::NAN,
            tolerance,
            verdict: Verdict::Fail,
            note: Some(err.to_string()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub suite: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Vec<Timing>>,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: &impl Serialize) -> Self {
        Report { command: command.into(), inputs_digest: digest(inputs), values: Vec::new(), checks: Vec::new(), timing: None }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Fixed-width table, one line per check.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}  inputs {}\n", self.command, &self.inputs_digest[..16]);
        for (k, v) in &self.values {
            let v = if *v == 0.0 { 0.0 } else { *v };
            out += &format!("{k} = {v:.15e}\n");
        }
        if self.checks.is_empty() {
            return out;
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
        out += &format!("{:<width$}  {:>12}  {:>9}  verdict\n", "check", "residual", "tolerance");
        for c in &self.checks {
            let verdict = if c.passed() { "pass" } else { "FAIL" };
            out += &format!("{:<width$}  {:>12.3e}  {:>9.0e}  {}", c.name, c.residual, c.tolerance, verdict);
            if let Some(n) = &c.note {
                out += &format!("  ({n})");
            }
            out.push('\n');
        }
        if let Some(t) = &self.timing {
            for x in t {
                out += &format!("time {} {:.3}s\n", x.suite, x.seconds);
            }
        }
        out
    }
}

/// SHA-256 of the canonical JSON of `inputs`.
pub fn digest(inputs: &impl Serialize) -> String {
    let bytes = serde_json::to_vec(inputs).expect("inputs serialize");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Overrides every default tolerance when set.
    pub tolerance: Option<f64>,
    #[serde(serialize_with = "engine_name")]
    pub engine: ZetaEngine,
    /// Finest grid of the circle transgression check.
    pub grid: usize,
    #[serde(skip)]
    pub timing: bool,
}

fn engine_name<S: serde::Serializer>(e: &ZetaEngine, s: S) -> std::result::Result<S::Ok, S::Error> {
    match e {
        ZetaEngine::ClosedForm => s.serialize_str("closed"),
        ZetaEngine::EulerMaclaurin { terms } => s.serialize_str(&format!("em{terms}")),
    }
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, tolerance: None, engine: ZetaEngine::ClosedForm, grid: 64, timing: false }
    }
}

impl VerifyOptions {
    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }
}

pub fn run(suite: Suite, opts: &VerifyOptions) -> Report {
    #[derive(Serialize)]
    struct Inputs<'a> {
        suite: &'a str,
        options: &'a VerifyOptions,
    }
    let mut report = Report::new(format!("verify {}", suite.name()), &Inputs { suite: suite.name(), options: opts });
    let mut timing = Vec::new();
    for s in suite.members() {
        let start = Instant::now();
        let checks = match s {
            Suite::Finite => finite_suite(opts),
            Suite::Spectral => spectral_suite(opts),
            Suite::Morse => morse_suite(opts),
            Suite::Analytic => analytic_suite(opts),
            Suite::Gluing => gluing_suite(opts),
            Suite::All => unreachable!("expanded above"),
        };
        report.checks.extend(checks);
        timing.push(Timing { suite: s.name().into(), seconds: start.elapsed().as_secs_f64() });
    }
    if opts.timing {
        report.timing = Some(timing);
    }
    report
}

/// Each suite draws from its own stream so suites are reproducible alone.
fn rng_for(opts: &VerifyOptions, suite: u64) -> TestRng {
    random::seeded(opts.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(suite))
}

fn guarded(name: &str, tolerance: f64, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check::failed(name, tolerance, e))
}

fn finite_suite(opts: &VerifyOptions) -> Vec<Check> {
    let mut rng = rng_for(opts, 1);
    let quad = QuadratureSpec::default();
    let tol = opts.tol(FINITE_TOLERANCE);
    let mut out = Vec::new();

    out.push(guarded("two_term_closed_form", tol, || {
        let mut worst = 0.0f64;
        for i in 0..50 {
            let n = 1 + i % 4;
            let tau = random::two_term(&mut rng, n);
            let e = MetricComplex::with_unit_metrics(vec![tau.clone()], &[n, n])?;
            let t = e.torsion_form(&quad)?.degree0();
            let det = tau.determinant().norm();
            worst = worst.max((t + det.ln()).abs());
        }
        Ok(Check::new("two_term_closed_form", vec![("instances", 50.0)], worst, tol))
    }));

    out.push(guarded("eigen_matches_torsion_form", tol, || {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let acyclic = rng.random_bool(0.5);
            let e = random::complex(&mut rng, 4, 5, acyclic);
            let a = hodge::scalar_torsion_eigen(&e)?;
            let b = e.torsion_form(&quad)?.degree0();
            worst = worst.max((a - b).abs());
        }
        Ok(Check::new("eigen_matches_torsion_form", vec![("instances", 100.0)], worst, tol))
    }));

    let anomaly_tol = opts.tol(1e-8);
    out.push(guarded("anomaly_degree0", anomaly_tol, || {
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let e0 = random::complex(&mut rng, 4, 4, false);
            let h1: Vec<CMat> = e0.dims().iter().map(|&d| random::metric(&mut rng, d)).collect();
            let e1 = e0.with_metrics(h1)?;
            let t0 = e0.torsion_form(&quad)?.degree0();
            let t1 = e1.torsion_form(&quad)?.degree0();
            let f_e = e0.tilde_f(&e1, MetricPath::Linear, &quad)?.coeff(0).re;
            let (g0, g1) = hodge::cohomology_gram_change(&e0, &e1)?;
            let f_h = hodge::tilde_f_degree0(&g0, &g1)?;
            worst = worst.max((t1 - t0 - (f_e - f_h)).abs());
        }
        Ok(Check::new("anomaly_degree0", vec![("instances", 50.0)], worst, anomaly_tol))
    }));

    let trans_tol = opts.tol(1e-6);
    out.push(guarded("transgression_circle", trans_tol, || transgression_check(&mut rng, opts.grid, trans_tol)));
    out
}

/// `d T_f = f(∇, h)` in degree 1 for acyclic two-term complexes of rank ≤ 2
/// over a circle, on grids `grid/4`, `grid/2` and `grid`.
fn transgression_check(rng: &mut TestRng, grid: usize, tol: f64) -> Result<Check> {
    let quad = QuadratureSpec::default();
    let grids = [grid / 4, grid / 2, grid];
    let mut per_grid = [0.0f64; 3];
    let length = 2.0;
    for rank in 1..=2usize {
        let tau = random::two_term(rng, rank);
        let profiles: Vec<_> = (0..2).map(|_| random::periodic_log_profile(rng, 3)).collect();
        let shears: Vec<CMat> = (0..2).map(|_| random::hermitian(rng, rank, 1.0)).collect();
        for (slot, &g) in grids.iter().enumerate() {
            let (profiles, shears) = (profiles.clone(), shears.clone());
            let metric = move |th: f64| -> Vec<CMat> {
                (0..2)
                    .map(|i| {
                        let s = random::eval_profile(&profiles[i], th, length);
                        let m = eye(rank) + &shears[i] * c(0.2 * (2.0 * PI * th / length + i as f64).sin());
                        m.adjoint() * &m * c(s.exp())
                    })
                    .collect()
            };
            let e = MetricComplex::over_circle(vec![tau.clone()], g, length, vec![eye(rank), eye(rank)], metric)?;
            let t = e.torsion_form(&quad)?;
            let dt = t.form.component(0).exterior_d()?;
            let cf = e.char_form()?;
            let res = dt
                .grid_values(1)?
                .iter()
                .zip(cf.grid_values(1)?)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            per_grid[slot] = per_grid[slot].max(res);
        }
    }
    // Spectral convergence stalls at roundoff; only demand decrease above it.
    let floor = 1e-10;
    let decreasing = per_grid.windows(2).all(|w| w[1] <= w[0] || w[1] < floor);
    let mut check = Check::new(
        "transgression_circle",
        vec![
            ("residual_coarse", per_grid[0]),
            ("residual_mid", per_grid[1]),
            ("residual_fine", per_grid[2]),
        ],
        per_grid[2],
        tol,
    );
    if !decreasing {
        check.verdict = Verdict::Fail;
        check = check.with_note("residual does not decrease with the grid");
    }
    Ok(check)
}

fn spectral_suite(opts: &VerifyOptions) -> Vec<Check> {
    let mut rng = rng_for(opts, 2);
    let quad = QuadratureSpec::default();
    let mut out = Vec::new();
    let goette_tol = opts.tol(1e-8);
    out.push(guarded("goette_identity", goette_tol, || {
        let mut worst = 0.0f64;
        for i in 0..100 {
            let d = random::three_column(&mut rng, 2 + i % 2, 3, i % 3 == 0);
            worst = worst.max(spectral::goette_identity_check(&d, &quad)?.residual);
        }
        Ok(Check::new("goette_identity", vec![("instances", 100.0)], worst, goette_tol))
    }));
    let tol = opts.tol(FINITE_TOLERANCE);
    out.push(guarded("composition_identity", tol, || {
        let mut worst = 0.0f64;
        for _ in 0..50 {
            worst = worst.max(composition_residual(&mut rng)?);
        }
        Ok(Check::new("composition_identity", vec![("instances", 50.0)], worst, tol))
    }));
    out.push(guarded("sequence_vs_pages", tol, || {
        let mut worst = 0.0f64;
        for i in 0..50 {
            let d = random::three_column(&mut rng, 3, 3, i % 3 == 0);
            let pages = spectral::pages(&d, Filtration::Columns, 4)?;
            let les = spectral::long_exact_sequence(&d, None)?;
            let t_les = hodge::scalar_torsion_eigen(&les.complex)?;
            let t1 = hodge::scalar_torsion_eigen(&pages[1].as_metric_complex()?)?;
            let t2 = hodge::scalar_torsion_eigen(&pages[2].as_metric_complex()?)?;
            worst = worst.max((t_les - t1 - t2).abs());
        }
        Ok(Check::new("sequence_vs_pages", vec![("instances", 50.0)], worst, tol))
    }));
    out
}

/// Split an exact sequence `E⁰ → E¹ → E² → E³` at `K = im(E¹ → E²)` and
/// compare `T(E' ∘ E)` with `T(E) − T(E')`.
fn composition_residual(rng: &mut TestRng) -> Result<f64> {
    let r0 = rng.random_range(0..=2);
    let r1 = rng.random_range(1..=2);
    let r2 = rng.random_range(0..=2);
    let (v, dims) = random::complex_with_ranks(rng, &[r0, r1, r2], &[0, 0, 0, 0]);
    let h: Vec<CMat> = dims.iter().map(|&d| random::metric(rng, d)).collect();
    let full = MetricComplex::new(v.clone(), h.clone())?;
    // h-orthonormal basis B of the image of v_1.
    let l = crate::linalg::cholesky(&h[2])?;
    let lt = l.adjoint();
    let b = crate::linalg::inverse(&lt)? * crate::linalg::column_space(&(&lt * &v[1]));
    let k = b.ncols();
    let to_k = b.adjoint() * &h[2] * &v[1];
    let e = MetricComplex::new(vec![v[0].clone(), to_k], vec![h[0].clone(), h[1].clone(), eye(k)])?;
    let e_prime = MetricComplex::new(vec![b, v[2].clone()], vec![eye(k), h[2].clone(), h[3].clone()])?;
    let composed = spectral::compose(&e, &e_prime)?;
    let lhs = hodge::scalar_torsion_eigen(&composed)?;
    let rhs = hodge::scalar_torsion_eigen(&e)? - hodge::scalar_torsion_eigen(&e_prime)?;
    let direct = hodge::scalar_torsion_eigen(&full)?;
    Ok((lhs - rhs).abs().max((lhs - direct).abs()))
}

/// Circle scenarios used by the Morse suite.
fn morse_scenarios() -> Vec<GluingScenario> {
    let mut out = Vec::new();
    for rank in 1..=2 {
        for &theta in &[0.0, PI / 3.0, PI] {
            for k in 1..=2 {
                let s = GluingScenario::circle(2.0, 0.5, glue::holonomy(theta, rank)).and_then(|s| s.with_subdivisions(k));
                out.push(s.expect("fixed scenario is valid"));
            }
        }
    }
    out
}

fn morse_suite(opts: &VerifyOptions) -> Vec<Check> {
    let exact = opts.tol(1e-12);
    let mut out = Vec::new();
    let scenarios = morse_scenarios();
    let data: Vec<MorseData> = match scenarios.iter().map(|s| s.cell_model().morse_data()).collect::<Result<_>>() {
        Ok(d) => d,
        Err(e) => return vec![Check::failed("morse_square_zero", exact, e)],
    };
    let mut all = data.clone();
    all.push(MorseData::cut_circle(&glue::holonomy(0.7, 2)).expect("fixed data is valid"));

    out.push(guarded("morse_square_zero", exact, || {
        let mut worst = 0.0f64;
        for m in &all {
            for v in [Variant::Full, Variant::AbsoluteZ1, Variant::RelativeZ2, Variant::BoundaryY] {
                let ts = m.thom_smale(v)?;
                for w in ts.complex.v().windows(2) {
                    worst = worst.max(max_abs(&(&w[1] * &w[0])));
                }
            }
        }
        Ok(Check::new("morse_square_zero", vec![("models", all.len() as f64)], worst, exact))
    }));

    out.push(guarded("rows_exact_and_split", 0.5, || {
        let failures = all
            .iter()
            .map(|m| spectral::rows_exact_and_split(&m.three_column()?, 1e-12))
            .collect::<Result<Vec<bool>>>()?
            .iter()
            .filter(|ok| !**ok)
            .count();
        Ok(Check::new("rows_exact_and_split", vec![("failures", failures as f64)], failures as f64, 0.5))
    }));

    out.push(guarded("psi_commutes", exact, || {
        let mut worst = 0.0f64;
        for m in &all {
            let d1 = m.side(Region::Z1)?.double()?;
            let psi = d1.psi_plus()?;
            let z1 = d1.original.thom_smale(Variant::Full)?;
            let vb = d1.thom_smale.complex.v();
            for q in 0..vb.len() {
                worst = worst.max(max_abs(&(&z1.complex.v()[q] * &psi[q] - &psi[q + 1] * &vb[q])));
            }
            let d2 = m.side(Region::Z2)?.double()?;
            let pm = d2.psi_minus()?;
            let rel = d2.original.thom_smale(Variant::RelativeZ2)?;
            let vb = d2.thom_smale.complex.v();
            for q in 0..vb.len() {
                worst = worst.max(max_abs(&(&vb[q] * &pm[q] - &pm[q + 1] * &rel.complex.v()[q])));
            }
        }
        Ok(Check::new("psi_commutes", vec![], worst, exact))
    }));

    out.push(guarded("psi_minus_isometry", exact, || {
        let mut worst = 0.0f64;
        for m in &all {
            let d2 = m.side(Region::Z2)?.double()?;
            let pm = d2.psi_minus()?;
            let hb = d2.thom_smale.complex.h();
            let rel = d2.original.thom_smale(Variant::RelativeZ2)?;
            for q in 0..pm.len() {
                worst = worst.max(max_abs(&(pm[q].adjoint() * &hb[q] * &pm[q] - &rel.complex.h()[q])));
            }
        }
        Ok(Check::new("psi_minus_isometry", vec![], worst, exact))
    }));

    let mut ledger: Vec<(String, f64)> = Vec::new();
    let mut ledger_err = None;
    for s in &scenarios {
        match glue::verify_morse_side(s, opts.engine) {
            Ok(ids) => {
                for id in ids {
                    match ledger.iter_mut().find(|(n, _)| *n == id.name) {
                        Some(e) => e.1 = e.1.max(id.residual()),
                        None => ledger.push((id.name.clone(), id.residual())),
                    }
                }
            }
            Err(e) => ledger_err = Some(e),
        }
    }
    let pick = |name: &str| ledger.iter().find(|(n, _)| n == name).map(|x| x.1).unwrap_or(f64::NAN);
    let fail_note = |c: Check| match &ledger_err {
        Some(e) => {
            let mut c = c.with_note(e.to_string());
            c.verdict = Verdict::Fail;
            c
        }
        None => c,
    };
    out.push(fail_note(Check::new(
        "boundary_defect",
        vec![("expected_per_unit", -0.5 * LN_2)],
        pick("boundary_defect_plus"),
        exact,
    )));
    out.push(fail_note(Check::new(
        "page1_l2_torsions_vanish",
        vec![],
        pick("plus_page1_l2_torsion").max(pick("minus_page1_l2_torsion")),
        exact,
    )));
    let tol = opts.tol(FINITE_TOLERANCE);
    let others = ledger
        .iter()
        .filter(|(n, _)| !matches!(n.as_str(), "boundary_defect_plus" | "plus_page1_l2_torsion" | "minus_page1_l2_torsion"))
        .map(|x| x.1)
        .fold(0.0, f64::max);
    let analytic = ["morse_gluing_formula", "double_comparison_formula"];
    let finite_only = ledger.iter().filter(|(n, _)| !analytic.contains(&n.as_str())).map(|x| x.1).fold(0.0, f64::max);
    out.push(fail_note(Check::new(
        "morse_side_identities",
        vec![("finite_max", finite_only), ("identities", ledger.len() as f64)],
        others,
        tol,
    )));
    out
}

/// Geometries of the analytic suite.
fn model_geometries() -> Vec<ModelGeometry> {
    let mut out = Vec::new();
    for &l in &[0.5, 1.0, 2.0, 3.0] {
        for r in 1..=2 {
            out.push(ModelGeometry::trivial_circle(l, r).expect("valid"));
            out.push(ModelGeometry::interval(l, Boundary::Abs, r).expect("valid"));
            out.push(ModelGeometry::interval(l, Boundary::Rel, r).expect("valid"));
            out.push(ModelGeometry::interval_with_ends(l, Boundary::Abs, Boundary::Rel, r).expect("valid"));
            out.push(ModelGeometry::circle(l, glue::holonomy(1.0 + l, r)).expect("valid"));
        }
    }
    out
}

fn analytic_suite(opts: &VerifyOptions) -> Vec<Check> {
    let tol = opts.tol(FINITE_TOLERANCE);
    let mut out = Vec::new();
    out.push(guarded("zeta_determinants", tol, || {
        let mut worst = 0.0f64;
        let oracle = ZetaEngine::EulerMaclaurin { terms: 2000 };
        for &l in &[0.5, 1.0, 2.0, 3.0] {
            for bc in [Boundary::Abs, Boundary::Rel] {
                let s = analytic::spectrum(&ModelGeometry::interval(l, bc, 1)?)?;
                // Scalar Laplacian: degree 0 for Neumann, degree 1 for Dirichlet.
                let q = if bc == Boundary::Abs { 0 } else { 1 };
                for engine in [opts.engine, oracle] {
                    worst = worst.max((analytic::zeta_log_det(&s, q, engine)? - (2.0 * l).ln()).abs());
                }
            }
            let s = analytic::spectrum(&ModelGeometry::trivial_circle(l, 1)?)?;
            for engine in [opts.engine, oracle] {
                worst = worst.max((analytic::zeta_log_det(&s, 0, engine)? - 2.0 * l.ln()).abs());
            }
            for &theta in &[0.5, PI / 2.0, 2.0] {
                let g = ModelGeometry::circle(l, glue::holonomy(theta, 1))?;
                let s = analytic::spectrum(&g)?;
                let expected = (4.0 * (theta / 2.0).sin().powi(2)).ln();
                for engine in [opts.engine, oracle] {
                    worst = worst.max((analytic::zeta_log_det(&s, 0, engine)? - expected).abs());
                }
            }
        }
        Ok(Check::new("zeta_determinants", vec![], worst, tol))
    }));

    let quad = QuadratureSpec::default();
    let atol = opts.tol(ANALYTIC_TOLERANCE);
    let geoms = model_geometries();
    out.push(guarded("heat_integral_consistency", atol, || {
        let mut worst = 0.0f64;
        for g in &geoms {
            let a = analytic::scalar_torsion_with(g, opts.engine)?;
            let b = analytic::torsion_via_heat_integral(g, &quad)?;
            worst = worst.max((a - b).abs());
        }
        Ok(Check::new("heat_integral_consistency", vec![("geometries", geoms.len() as f64)], worst, atol))
    }));
    let ltol = opts.tol(1e-4);
    out.push(guarded("heat_trace_limits", ltol, || {
        let mut worst = 0.0f64;
        for g in &geoms {
            let s = analytic::spectrum(g)?;
            let (small, large) = analytic::heat_limits(g)?;
            let t_small = 1e-4 * g.length().powi(2);
            let t_large = 400.0 * g.length().powi(2);
            worst = worst
                .max((analytic::heat_function(&s, t_small) - small).abs())
                .max((analytic::heat_function(&s, t_large) - large).abs());
        }
        Ok(Check::new("heat_trace_limits", vec![], worst, ltol))
    }));
    out
}

fn gluing_suite(opts: &VerifyOptions) -> Vec<Check> {
    let quad = QuadratureSpec::default();
    let atol = opts.tol(ANALYTIC_TOLERANCE);
    let mut out = Vec::new();

    out.push(guarded("gluing_flagship", atol, || {
        let s = GluingScenario::circle(2.0, 0.5, eye(1))?;
        let g = glue::verify_gluing_degree0(&s, &quad, opts.engine)?;
        let lhs = g.torsion_z - g.torsion_z1_abs - g.torsion_z2_rel;
        let residual = lhs.abs().max((g.defect - LN_2).abs()).max((g.torsion_mv + LN_2).abs()).max(g.residual);
        Ok(Check::new(
            "gluing_flagship",
            vec![("analytic_lhs", lhs), ("correction", g.defect), ("torsion_mv", g.torsion_mv)],
            residual,
            atol,
        ))
    }));

    let sweep = glue::sweep();
    out.push(guarded("gluing_sweep", atol, || {
        let mut worst = 0.0f64;
        for s in &sweep {
            worst = worst.max(glue::verify_gluing_degree0(s, &quad, opts.engine)?.residual);
        }
        Ok(Check::new("gluing_sweep", vec![("scenarios", sweep.len() as f64)], worst, atol))
    }));

    out.push(guarded("gluing_swap_and_intervals", atol, || {
        let mut worst = 0.0f64;
        let mut count = 0;
        let mut scenarios: Vec<GluingScenario> = sweep.iter().step_by(5).map(|s| s.swapped()).collect::<Result<_>>()?;
        for (l, r) in [(Boundary::Abs, Boundary::Abs), (Boundary::Rel, Boundary::Rel), (Boundary::Abs, Boundary::Rel), (Boundary::Rel, Boundary::Abs)] {
            for &split in &[0.25, 0.5] {
                let s = GluingScenario::interval(3.0, split, l, r, 2)?;
                scenarios.push(s.swapped()?);
                scenarios.push(s.with_subdivisions(2)?);
            }
        }
        for s in &scenarios {
            worst = worst.max(glue::verify_gluing_degree0(s, &quad, opts.engine)?.residual);
            count += 1;
        }
        Ok(Check::new("gluing_swap_and_intervals", vec![("scenarios", count as f64)], worst, atol))
    }));

    let ctol = opts.tol(1e-12);
    let mut analytic_worst = 0.0f64;
    let mut combinatorial_worst = 0.0f64;
    let mut err = None;
    for s in sweep.iter().step_by(3) {
        match glue::verify_double_formula(s, opts.engine) {
            Ok(ids) => {
                for id in ids {
                    if id.name.starts_with("analytic") {
                        analytic_worst = analytic_worst.max(id.residual());
                    } else {
                        combinatorial_worst = combinatorial_worst.max(id.residual());
                    }
                }
            }
            Err(e) => err = Some(e),
        }
    }
    match err {
        Some(e) => {
            out.push(Check::failed("double_formula_analytic", atol, &e));
            out.push(Check::failed("double_formula_combinatorial", ctol, &e));
        }
        None => {
            out.push(Check::new("double_formula_analytic", vec![], analytic_worst, atol));
            out.push(Check::new("double_formula_combinatorial", vec![], combinatorial_worst, ctol));
        }
    }
    out
}

/// Kinds of input document accepted by `torsion_report`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Complex,
    Morse,
    Double,
    Geometry,
    Scenario,
}

impl InputKind {
    pub fn name(self) -> &'static str {
        match self {
            InputKind::Complex => "complex",
            InputKind::Morse => "morse",
            InputKind::Double => "double",
            InputKind::Geometry => "geometry",
            InputKind::Scenario => "scenario",
        }
    }
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, kind: InputKind) -> Result<T> {
    serde_json::from_str(text).map_err(|e| crate::TorsionError::Input(format!("{} document: {e}", kind.name())))
}

/// Torsions of the object described by a JSON document.
pub fn torsion_report(kind: InputKind, text: &str, engine: ZetaEngine) -> Result<Report> {
    use crate::schema::{ComplexDoc, DoubleComplexDoc};
    let quad = QuadratureSpec::default();
    let value: serde_json::Value = parse(text, kind)?;
    let mut report = Report::new(format!("torsion {}", kind.name()), &value);
    let complex_values = |e: &MetricComplex, report: &mut Report| -> Result<()> {
        let t = e.torsion_form(&quad)?;
        let chi = hodge::chi_primes(e)?;
        let betti = hodge::hodge_decompose(e)?.betti;
        report.values.push(("torsion_degree0".into(), t.degree0()));
        report.values.push(("torsion_eigen".into(), hodge::scalar_torsion_eigen(e)?));
        report.values.push(("d_e".into(), chi.d_e as f64));
        report.values.push(("d_h".into(), chi.d_h as f64));
        for (q, b) in betti.iter().enumerate() {
            report.values.push((format!("betti_{q}"), *b as f64));
        }
        Ok(())
    };
    match kind {
        InputKind::Complex => {
            let e = parse::<ComplexDoc>(text, kind)?.to_complex()?;
            complex_values(&e, &mut report)?;
        }
        InputKind::Morse => {
            let m = MorseData::from_doc(&parse(text, kind)?)?;
            let ts = m.thom_smale(Variant::Full)?;
            complex_values(&ts.complex, &mut report)?;
        }
        InputKind::Double => {
            let d = parse::<DoubleComplexDoc>(text, kind)?.to_data()?;
            let total = d.total_complex()?;
            complex_values(&total, &mut report)?;
            let pages = spectral::pages(&d, Filtration::Columns, d.columns().max(d.rows()) + 1)?;
            for p in pages.iter().filter(|p| p.total_dim() > 0) {
                report.values.push((format!("page_{}_torsion", p.r), hodge::scalar_torsion_eigen(&p.as_metric_complex()?)?));
            }
        }
        InputKind::Geometry => {
            let g = parse::<analytic::GeometryDoc>(text, kind)?.to_geometry()?;
            report.values.push(("torsion".into(), analytic::scalar_torsion_with(&g, engine)?));
            report.values.push(("torsion_heat_integral".into(), analytic::torsion_via_heat_integral(&g, &quad)?));
            report.values.push(("euler_characteristic".into(), g.euler_characteristic() as f64));
        }
        InputKind::Scenario => {
            let s = parse::<glue::ScenarioDoc>(text, kind)?.to_scenario()?;
            let g = glue::verify_gluing_degree0(&s, &quad, engine)?;
            report.values.extend([
                ("torsion_z".to_string(), g.torsion_z),
                ("torsion_z1_abs".to_string(), g.torsion_z1_abs),
                ("torsion_z2_rel".to_string(), g.torsion_z2_rel),
                ("defect".to_string(), g.defect),
                ("torsion_mv".to_string(), g.torsion_mv),
            ]);
            report.checks.push(Check::new("gluing_residual", vec![], g.residual, ANALYTIC_TOLERANCE));
            if s.shape == glue::Shape::Circle {
                for id in glue::verify_morse_side(&s, engine)? {
                    report.checks.push(Check::new(&id.name, vec![("lhs", id.lhs), ("rhs", id.rhs)], id.residual(), ANALYTIC_TOLERANCE));
                }
            }
        }
    }
    Ok(report)
}
