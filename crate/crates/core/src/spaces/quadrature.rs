//! Product quadrature for weighted time integrals.
//!
//! The smooth factor is replaced by its piecewise-linear interpolant and
//! integrated exactly against `t^α`: in closed form on an interval touching
//! zero, by high-order Gauss–Legendre elsewhere (the weight is analytic
//! away from the origin).

use crate::error::{Error, Result};
use crate::grid::Field;
use num_complex::Complex64;
use std::sync::OnceLock;

const GAUSS_POINTS: usize = 20;

/// Gauss–Legendre nodes and weights on [-1, 1] via Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
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

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_POINTS))
}

/// Moments `(∫_a^b (b-t) t^α dt, ∫_a^b (t-a) t^α dt)` for `0 <= a < b`.
fn hat_moments(a: f64, b: f64, alpha: f64) -> Result<(f64, f64)> {
    if a == 0.0 {
        if alpha <= -1.0 {
            return Err(Error::DivergentWeight(format!("∫_0 t^{alpha} dt diverges")));
        }
        // ∫_0^b (b-t) t^α = b^{α+2}/((α+1)(α+2)), ∫_0^b t^{α+1} = b^{α+2}/(α+2)
        let p = b.powf(alpha + 2.0);
        return Ok((p / ((alpha + 1.0) * (alpha + 2.0)), p / (alpha + 2.0)));
    }
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let (mut left, mut right) = (0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        let t = mid + half * x;
        let wt = w * half * t.powf(alpha);
        left += wt * (b - t);
        right += wt * (t - a);
    }
    Ok((left, right))
}

/// `∫ P(t) t^α dt` over `[nodes[0], nodes[last]]`, `P` the piecewise-linear
/// interpolant of `values`. Nodes must be non-negative and increasing.
pub fn weighted_integral(nodes: &[f64], values: &[f64], alpha: f64) -> Result<f64> {
    check_nodes(nodes, values.len())?;
    let mut total = 0.0;
    for i in 0..nodes.len() - 1 {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let (va, vb) = (values[i], values[i + 1]);
        if a == 0.0 && alpha <= -1.0 {
            if va != 0.0 {
                return Err(Error::DivergentWeight(format!(
                    "weight t^{alpha} is not integrable at 0 and the integrand does not vanish there"
                )));
            }
            if alpha <= -2.0 {
                return Err(Error::DivergentWeight(format!("weight t^{alpha} too singular at 0")));
            }
            // P(t) = vb·t/b on the first interval
            total += vb / b * b.powf(alpha + 2.0) / (alpha + 2.0);
            continue;
        }
        let (l, r) = hat_moments(a, b, alpha)?;
        total += (va * l + vb * r) / (b - a);
    }
    Ok(total)
}

/// `∫_{t_a}^{t_b} s^β ds` in closed form (`0 <= t_a <= t_b`).
pub fn power_integral(t_a: f64, t_b: f64, beta: f64) -> Result<f64> {
    if t_a == t_b {
        return Ok(0.0);
    }
    if beta == -1.0 {
        if t_a == 0.0 {
            return Err(Error::DivergentWeight("∫_0 s^{-1} ds diverges".into()));
        }
        return Ok((t_b / t_a).ln());
    }
    if t_a == 0.0 && beta < -1.0 {
        return Err(Error::DivergentWeight(format!("∫_0 s^{beta} ds diverges")));
    }
    let e = beta + 1.0;
    if t_a == 0.0 {
        return Ok(t_b.powf(e) / e);
    }
    // t_a^e·(exp(e·ln(t_b/t_a)) - 1)/e keeps digits when t_b ≈ t_a
    Ok(t_a.powf(e) * (e * ((t_b - t_a) / t_a).ln_1p()).exp_m1() / e)
}

fn check_nodes(nodes: &[f64], n_values: usize) -> Result<()> {
    if nodes.len() != n_values {
        return Err(Error::InvalidParameter(format!(
            "{} nodes but {} values",
            nodes.len(),
            n_values
        )));
    }
    if nodes.len() < 2 {
        return Err(Error::InvalidParameter("need at least two time nodes".into()));
    }
    if nodes[0] < 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("time nodes must be non-negative and increasing".into()));
    }
    Ok(())
}

/// Running composite trapezoid `F(t_m) = ∫_{t_0}^{t_m} f`, with `F(t_0) = 0`.
pub fn cumulative_trapezoid(nodes: &[f64], integrand: &[Field]) -> Result<Vec<Field>> {
    check_nodes(nodes, integrand.len())?;
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = Field::zeros(*integrand[0].grid());
    out.push(acc.clone());
    for i in 0..nodes.len() - 1 {
        let half = Complex64::new(0.5 * (nodes[i + 1] - nodes[i]), 0.0);
        acc = acc.axpy(half, &integrand[i])?.axpy(half, &integrand[i + 1])?;
        out.push(acc.clone());
    }
    Ok(out)
}
