//! One line per acceptance criterion. Runs without the test harness so the
//! table is always printed.

use std::time::Instant;
use torsion_core::verify::{run, Report, Suite, VerifyOptions};

struct Line {
    id: usize,
    label: &'static str,
    pass: bool,
    detail: String,
}

fn checks_pass(r: &Report, names: &[&str], tol: &[f64]) -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, &t) in names.iter().zip(tol) {
        match r.check(name) {
            Some(c) => {
                let pass = c.passed() && c.residual <= t;
                ok &= pass;
                detail.push(format!("{name} {:.1e}/{t:.0e}", c.residual));
            }
            None => {
                ok = false;
                detail.push(format!("{name} missing"));
            }
        }
    }
    (ok, detail.join(", "))
}

fn main() {
    let opts = VerifyOptions { seed: 0, timing: true, ..VerifyOptions::default() };
    let start = Instant::now();
    let finite = run(Suite::Finite, &VerifyOptions { timing: false, ..opts });
    let finite_seconds = start.elapsed().as_secs_f64();
    let all = run(Suite::All, &opts);
    let seconds = |suite: &str| all.timing.as_ref().unwrap().iter().find(|t| t.suite == suite).unwrap().seconds;

    let mut lines = Vec::new();
    let mut push = |id, label, (pass, detail): (bool, String)| lines.push(Line { id, label, pass, detail });

    let (ok, d) = checks_pass(&finite, &["two_term_closed_form"], &[1e-9]);
    push(1, "two-term closed form", (ok && finite_seconds < 10.0, format!("{d}, finite suite {finite_seconds:.1}s")));
    push(2, "eigen vs torsion form", checks_pass(&all, &["eigen_matches_torsion_form"], &[1e-9]));
    push(3, "anomaly", checks_pass(&all, &["anomaly_degree0"], &[1e-8]));
    let (ok, d) = checks_pass(&all, &["transgression_circle"], &[1e-6]);
    let grids = all.check("transgression_circle").map(|c| {
        ["residual_coarse", "residual_mid", "residual_fine"].map(|k| c.value(k).unwrap_or(f64::NAN))
    });
    let decreasing = grids.is_some_and(|g| g.windows(2).all(|w| w[1] <= w[0] || w[1] < 1e-10));
    let trail = grids.map_or(String::new(), |g| format!(", grids 16/32/64: {:.1e} {:.1e} {:.1e}", g[0], g[1], g[2]));
    push(4, "transgression on the circle", (ok && decreasing, format!("{d}{trail}")));
    push(
        5,
        "spectral sequence identities",
        checks_pass(&all, &["goette_identity", "composition_identity", "sequence_vs_pages"], &[1e-8, 1e-9, 1e-9]),
    );
    push(
        6,
        "Morse suite",
        checks_pass(
            &all,
            &[
                "morse_square_zero",
                "rows_exact_and_split",
                "psi_commutes",
                "psi_minus_isometry",
                "boundary_defect",
                "page1_l2_torsions_vanish",
            ],
            &[1e-12, 1.0, 1e-12, 1e-12, 1e-12, 1e-12],
        ),
    );
    push(7, "zeta determinants", checks_pass(&all, &["zeta_determinants"], &[1e-9]));
    push(
        8,
        "heat integral and limits",
        checks_pass(&all, &["heat_integral_consistency", "heat_trace_limits"], &[1e-7, 1e-4]),
    );
    let (ok, d) = checks_pass(&all, &["gluing_flagship", "gluing_sweep"], &[1e-7, 1e-7]);
    let ln2 = std::f64::consts::LN_2;
    let flagship = all.check("gluing_flagship");
    let values_ok = flagship.is_some_and(|c| {
        c.value("analytic_lhs").is_some_and(|v| v.abs() < 1e-9)
            && c.value("correction").is_some_and(|v| (v - ln2).abs() < 1e-12)
            && c.value("torsion_mv").is_some_and(|v| (v + ln2).abs() < 1e-7)
    });
    let gluing_seconds = seconds("gluing");
    push(9, "gluing", (ok && values_ok && gluing_seconds < 60.0, format!("{d}, {gluing_seconds:.1}s")));
    push(
        10,
        "double formulas",
        checks_pass(&all, &["double_formula_analytic", "double_formula_combinatorial"], &[1e-7, 1e-12]),
    );
    let plain = VerifyOptions { timing: false, ..opts };
    let a = run(Suite::All, &plain).to_json();
    let b = run(Suite::All, &plain).to_json();
    push(11, "deterministic reports", (a == b, format!("{} bytes", a.len())));

    for l in &lines {
        println!("criterion {:>2}  {}  {:<30} {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.label, l.detail);
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
