//! Adaptive Gauss–Legendre quadrature for vector-valued integrands.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TorsionError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Absolute tolerance on the whole integral (max-norm over components).
    pub tolerance: f64,
    /// Maximum bisection depth.
    pub max_level: usize,
    /// Number of Gauss–Legendre nodes per panel.
    pub order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { tolerance: 1e-10, max_level: 20, order: 10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Integral {
    pub value: Vec<f64>,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn panel<F>(&self, f: &F, a: f64, b: f64, evals: &mut usize) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> Result<Vec<f64>>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc: Vec<f64> = Vec::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x)?;
            *evals += 1;
            if acc.is_empty() {
                acc = vec![0.0; v.len()];
            }
            if v.len() != acc.len() {
                return Err(TorsionError::Dimension("integrand changed length".into()));
            }
            for (s, y) in acc.iter_mut().zip(&v) {
                if !y.is_finite() {
                    return Err(TorsionError::Numeric(format!(
                        "integrand is not finite at {}",
                        mid + half * x
                    )));
                }
                *s += w * half * y;
            }
        }
        Ok(acc)
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Integrate `f` over `[a, b]` by recursive bisection until each panel's
/// two-level difference is below its share of the tolerance.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let (nodes, weights) = gauss_legendre(spec.order.max(2));
    let rule = Rule { nodes, weights };
    let mut evals = 0;
    let total = b - a;
    let whole = rule.panel(&f, a, b, &mut evals)?;
    let mut value = vec![0.0; whole.len()];
    let mut error = 0.0;
    let mut stack = vec![(a, b, whole, 0usize)];
    while let Some((lo, hi, coarse, level)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.panel(&f, lo, mid, &mut evals)?;
        let right = rule.panel(&f, mid, hi, &mut evals)?;
        let fine: Vec<f64> = left.iter().zip(&right).map(|(x, y)| x + y).collect();
        let diff = max_diff(&fine, &coarse);
        let budget = spec.tolerance * (hi - lo) / total;
        if diff <= budget {
            for (v, y) in value.iter_mut().zip(&fine) {
                *v += y;
            }
            error += diff;
        } else if level + 1 >= spec.max_level {
            return Err(TorsionError::Numeric(format!(
                "quadrature did not converge on [{lo:e}, {hi:e}] (difference {diff:e})"
            )));
        } else {
            stack.push((mid, hi, right, level + 1));
            stack.push((lo, mid, left, level + 1));
        }
    }
    Ok(Integral { value, error_estimate: error, evaluations: evals })
}

/// Integrate `g(t) dt/t` over `(0, ∞)`: split at 1, use `t = u²` on (0, 1]
/// and `t = u^{-2}` on [1, ∞). `g` must vanish at 0 and decay at ∞.
pub fn integrate_dt_over_t<F>(g: F, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let integrand = |u: f64| -> Result<Vec<f64>> {
        let near = g(u * u)?;
        let far = g(1.0 / (u * u))?;
        Ok(near.iter().zip(&far).map(|(x, y)| 2.0 * (x + y) / u).collect())
    };
    integrate(integrand, 0.0, 1.0, spec)
}
