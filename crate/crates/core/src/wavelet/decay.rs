//! Finite-grid certification of the profile decay conditions.
//!
//! With `θ = F∘exp` the sufficient conditions read, for `k = 0, 1, 2`,
//!
//! * `max{τ³, τ⁻³} · θ^{(k)}(ln τ) → 0` at both ends of `ℝ⁺`;
//! * `∫ |θ^{(k)}(t)|² e^{(7−2k)|t|} dt < ∞`;
//!
//! where `θ'(ln τ) = τF'(τ)` and `θ''(ln τ) = τF'(τ) + τ²F''(τ)`. The hypothesis on the profile
//! itself, `max{ξ⁵, ξ⁻⁵}·F ∈ C₀ ∩ L²`, is checked alongside. The plain-derivative sups
//! `max{ξ⁴, ξ⁻⁴}·|F^{(k)}|` are reported for reference and do not enter the verdict.

use serde::Serialize;

use super::{MotherWavelet, QuadGrid, WaveletError, WaveletResult};

pub const DEFAULT_DECAY_THRESHOLD: f64 = 1e-8;

/// Sup of a weighted function over the first and last decade of the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCheck {
    pub name: String,
    pub left_sup: f64,
    pub right_sup: f64,
    /// Log-log slope of `|g|` across the end decade; `None` when `g` vanishes there.
    pub left_exponent: Option<f64>,
    pub right_exponent: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedL2Check {
    pub name: String,
    pub value: f64,
    /// Integrand (in `ln ξ`) at each grid end.
    pub left_tail: f64,
    pub right_tail: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub grid: QuadGrid,
    pub threshold: f64,
    pub derivatives: &'static str,
    pub max_derivative_error: f64,
    pub hypothesis_sup: TailCheck,
    pub hypothesis_l2: WeightedL2Check,
    pub theta_sup: Vec<TailCheck>,
    pub theta_l2: Vec<WeightedL2Check>,
    pub derivative_sup: Vec<TailCheck>,
    pub pass: bool,
}

fn slope(g: &[f64], xi: &[f64], a: usize, b: usize) -> Option<f64> {
    let (ga, gb) = (g[a].abs(), g[b].abs());
    (ga > 0.0 && gb > 0.0).then(|| (gb.ln() - ga.ln()) / (xi[b].ln() - xi[a].ln()))
}

fn tail_check(name: String, g: &[f64], xi: &[f64], decade: usize, threshold: f64) -> TailCheck {
    let n = g.len();
    let sup = |r: std::ops::Range<usize>| g[r].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let left_sup = sup(0..decade + 1);
    let right_sup = sup(n - decade - 1..n);
    TailCheck {
        name,
        left_sup,
        right_sup,
        left_exponent: slope(g, xi, decade, 0),
        right_exponent: slope(g, xi, n - decade - 1, n - 1),
        threshold,
        pass: left_sup <= threshold && right_sup <= threshold,
    }
}

/// `integrand` is already expressed per unit `ln ξ`.
fn l2_check(name: String, integrand: &[f64], h: f64, threshold: f64) -> WeightedL2Check {
    let n = integrand.len();
    let inner: f64 = integrand[1..n - 1].iter().sum();
    let value = h * (inner + 0.5 * (integrand[0] + integrand[n - 1]));
    let (left_tail, right_tail) = (integrand[0], integrand[n - 1]);
    let bound = threshold * value.max(1.0);
    WeightedL2Check {
        name,
        value,
        left_tail,
        right_tail,
        pass: value.is_finite() && left_tail <= bound && right_tail <= bound,
    }
}

pub fn decay_condition_report(w: &MotherWavelet, grid: &QuadGrid, threshold: f64) -> WaveletResult<DecayReport> {
    grid.validate()?;
    let xi = grid.nodes();
    let h = grid.log_step();
    let decade = ((10f64.ln() / h).round() as usize).clamp(1, xi.len() / 2 - 1);

    let mut derivs = [vec![0.0; xi.len()], vec![0.0; xi.len()], vec![0.0; xi.len()]];
    let mut max_err = 0.0f64;
    for (k, column) in derivs.iter_mut().enumerate() {
        for (v, &x) in column.iter_mut().zip(&xi) {
            let (value, err) = w.derivative(k as u8, x);
            *v = value;
            max_err = max_err.max(err);
        }
    }
    if !w.has_analytic_derivatives() {
        for (k, column) in derivs.iter().enumerate().skip(1) {
            let scale = column.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (&x, _) in xi.iter().zip(column) {
                let (_, err) = w.richardson_derivative(k as u8, x);
                if err > 1e-6 * scale.max(f64::MIN_POSITIVE) {
                    return Err(WaveletError::DerivativeAccuracy { xi: x, disagreement: err });
                }
            }
        }
    }
    let [f0, f1, f2] = &derivs;

    let weight = |x: f64, e: i32| x.powi(e).max(x.powi(-e));

    let hyp: Vec<f64> = xi.iter().zip(f0).map(|(&x, &f)| weight(x, 5) * f).collect();
    let hypothesis_sup = tail_check("max(xi^5, xi^-5) F".into(), &hyp, &xi, decade, threshold);
    let hyp_l2: Vec<f64> = hyp.iter().zip(&xi).map(|(g, x)| g * g * x).collect();
    let hypothesis_l2 = l2_check("max(xi^5, xi^-5) F in L2".into(), &hyp_l2, h, threshold);

    let theta: [Vec<f64>; 3] = [
        f0.clone(),
        xi.iter().zip(f1).map(|(&x, &d)| x * d).collect(),
        xi.iter().zip(f1).zip(f2).map(|((&x, &d1), &d2)| x * d1 + x * x * d2).collect(),
    ];
    let mut theta_sup = Vec::new();
    let mut theta_l2 = Vec::new();
    for (k, t) in theta.iter().enumerate() {
        let weighted: Vec<f64> = t.iter().zip(&xi).map(|(v, &x)| weight(x, 3) * v).collect();
        theta_sup.push(tail_check(format!("max(tau^3, tau^-3) theta^({k})(ln tau)"), &weighted, &xi, decade, threshold));
        let e = 7 - 2 * k as i32;
        let integrand: Vec<f64> = t.iter().zip(&xi).map(|(v, &x)| v * v * weight(x, 1).powi(e)).collect();
        theta_l2.push(l2_check(format!("theta^({k}) exp({e}|t|/2) in L2"), &integrand, h, threshold));
    }

    let derivative_sup = derivs
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let g: Vec<f64> = d.iter().zip(&xi).map(|(v, &x)| weight(x, 4) * v).collect();
            tail_check(format!("max(xi^4, xi^-4) F^({k})"), &g, &xi, decade, threshold)
        })
        .collect();

    let pass = hypothesis_sup.pass
        && hypothesis_l2.pass
        && theta_sup.iter().all(|c| c.pass)
        && theta_l2.iter().all(|c| c.pass);
    Ok(DecayReport {
        grid: *grid,
        threshold,
        derivatives: if w.has_analytic_derivatives() { "analytic" } else { "richardson" },
        max_derivative_error: max_err,
        hypothesis_sup,
        hypothesis_l2,
        theta_sup,
        theta_l2,
        derivative_sup,
        pass,
    })
}
