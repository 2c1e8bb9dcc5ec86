//! Global-in-time space-time norms `(∫ ‖U(t)φ‖_r^q t^α dt)^{1/q}` of free
//! evolutions.
//!
//! Short times are integrated directly. For `t ≥ t₁` the exact identity
//! `|U(t)φ|(x) = (4πt)^{−1/2} |ĝ_τ(x/2t)|`, `g_τ = e^{iy²τ}φ`, `τ = 1/4t`,
//! turns the slowly decaying tail into an integral over `τ ∈ (0, τ₁]` with
//! the power weight `τ^{−α−e−2}`, `e = r⁻¹q − q/2`, which product
//! quadrature integrates exactly.

use crate::error::{Error, Result};
use crate::grid::{forward_transform, lp_norm, spectral_lp_norm, Field, Grid};
use crate::schrodinger::propagate;
use crate::spaces::quadrature::weighted_integral;
use crate::spaces::TimeGrid;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalNormSettings {
    /// Intervals on each of the direct and pseudo-conformal pieces.
    pub time_intervals: usize,
    /// Switch time `t₁`; defaults to `R²/64` with `R` the data's support radius.
    pub switch_time: Option<f64>,
    /// Zero-padding factor for `ĝ_τ`.
    pub pad: usize,
    /// Include `t < 0` (via `|U(−t)φ| = |U(t)φ̄|`).
    pub both_signs: bool,
}

impl Default for GlobalNormSettings {
    fn default() -> Self {
        GlobalNormSettings { time_intervals: 64, switch_time: None, pad: 4, both_signs: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalNorm {
    pub value: f64,
    pub switch_time: f64,
    /// `∫_0^{t₁}` and `∫_{t₁}^∞` contributions to the `q`-th power, `t > 0`.
    pub direct_part: f64,
    pub tail_part: f64,
}

/// Support radius at relative level `1e−8`, floored at one grid spacing.
fn default_switch_time(phi: &Field) -> f64 {
    let r = phi.support_radius(1e-8).max(phi.grid().spacing());
    r * r / 64.0
}

/// `φ` placed in the middle of a `pad` times longer box, zero outside.
fn zero_padded(phi: &Field, pad: usize) -> Result<Field> {
    let grid = phi.grid().enlarged(pad)?;
    let n = phi.len();
    let offset = (pad - 1) * n / 2;
    let mut samples = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    samples[offset..offset + n].copy_from_slice(phi.samples());
    Field::new(grid, samples, crate::grid::Representation::Physical)
}

struct Exponents {
    q: f64,
    r: f64,
    alpha: f64,
}

impl Exponents {
    fn e(&self) -> f64 {
        self.q / self.r - 0.5 * self.q
    }
}

fn one_sided(phi: &Field, ex: &Exponents, t1: f64, s: &GlobalNormSettings) -> Result<(f64, f64)> {
    // direct piece on [0, t₁], graded toward 0 only when the weight is singular
    let gamma = if ex.alpha < 0.0 { 2.0 } else { 1.0 };
    let tg = TimeGrid::graded(t1, s.time_intervals, gamma)?;
    let direct_vals: Vec<f64> = tg
        .nodes()
        .par_iter()
        .map(|&t| Ok(lp_norm(&propagate(phi, t)?, ex.r)?.powf(ex.q)))
        .collect::<Result<_>>()?;
    let direct = weighted_integral(tg.nodes(), &direct_vals, ex.alpha)?;

    // tail over τ ∈ (0, τ₁]
    let tau1 = 0.25 / t1;
    let weight = -ex.alpha - ex.e() - 2.0;
    if weight <= -1.0 {
        return Err(Error::DivergentWeight(format!(
            "tail weight τ^{weight} is not integrable: the time integral diverges at infinity"
        )));
    }
    let padded = zero_padded(phi, s.pad)?;
    let taus = TimeGrid::graded(tau1, s.time_intervals, 1.0)?;
    let tail_vals: Vec<f64> = taus
        .nodes()
        .par_iter()
        .map(|&tau| {
            let g = padded.map_indexed(|x, z| z * Complex64::from_polar(1.0, tau * x * x));
            Ok(spectral_lp_norm(&forward_transform(&g)?, ex.r)?.powf(ex.q))
        })
        .collect::<Result<_>>()?;
    let inv_r = if ex.r.is_infinite() { 0.0 } else { 1.0 / ex.r };
    let constant = (4.0 * PI).powf(-0.5 * ex.q) * 2f64.powf(ex.q * inv_r) * 4f64.powf(-ex.e() - ex.alpha) / 4.0;
    let tail = constant * weighted_integral(taus.nodes(), &tail_vals, weight)?;
    Ok((direct, tail))
}

/// `(∫ ‖U(t)φ‖_r^q t^α dt)^{1/q}` over `t > 0` or over `ℝ` (with `|t|^α`).
pub fn global_spacetime_norm(phi: &Field, q: f64, r: f64, alpha: f64, settings: &GlobalNormSettings) -> Result<GlobalNorm> {
    if !(q >= 1.0 && r >= 1.0) {
        return Err(Error::InvalidParameter(format!("need q, r ≥ 1, got q={q}, r={r}")));
    }
    if settings.pad == 0 || settings.time_intervals == 0 {
        return Err(Error::InvalidParameter("pad and time_intervals must be positive".into()));
    }
    let t1 = settings.switch_time.unwrap_or_else(|| default_switch_time(phi));
    let ex = Exponents { q, r: if r.is_infinite() { f64::INFINITY } else { r }, alpha };
    let (direct, tail) = one_sided(phi, &ex, t1, settings)?;
    let mut total = direct + tail;
    if settings.both_signs {
        let (d, t) = one_sided(&phi.conj(), &ex, t1, settings)?;
        total += d + t;
    }
    Ok(GlobalNorm { value: total.powf(1.0 / q), switch_time: t1, direct_part: direct, tail_part: tail })
}

/// Exponent `3p'` of the generalized Strichartz estimate.
pub fn diagonal_exponent(p: f64) -> f64 {
    3.0 * p / (p - 1.0)
}

/// `‖U(t)φ‖_{L^{3p'}_{t,x}} / ‖φ̂‖_{L^p}`.
pub fn strichartz_ratio(phi: &Field, p: f64, settings: &GlobalNormSettings) -> Result<f64> {
    let a = diagonal_exponent(p);
    let lhs = global_spacetime_norm(phi, a, a, 0.0, settings)?.value;
    let rhs = spectral_lp_norm(&forward_transform(phi)?, p)?;
    if !(rhs > 0.0) {
        return Err(Error::UndefinedRatio("zero datum".into()));
    }
    Ok(lhs / rhs)
}

/// Twice the box at half the spacing: one step of a refinement study.
pub fn doubled(grid: Grid) -> Result<Grid> {
    Grid::new(4 * grid.n_points(), 2.0 * grid.length())
}
