//! Experiments on the homogeneous profile `ψ_a = |x|^{−a}`: fixed-time `L^p`
//! membership of `U(1)ψ_a`, `L²` smoothing of the Duhamel part, and the
//! local singularity of `⟨D⟩^s ψ_a` behind the second ill-posedness proof.
//!
//! All profiles are regularized as `(x² + ℓ²)^{−a/2}` and truncated by a
//! smooth cutoff; ladders in `L` or `n` expose what the truncation hides.

use crate::data::{smooth_cutoff, DataShape};
use crate::duhamel::{picard_solve, SolverParams, StopReason};
use crate::error::{Error, Result};
use crate::fit::{power_fit, PowerFit};
use crate::grid::{apply_multiplier, lp_norm, lp_norm_samples, Field, Grid};
use crate::schrodinger::propagate;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative change between consecutive ladder values.
pub fn ladder_drifts(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).collect()
}

/// `p > max(1/a, 1/(1−a))`.
pub fn membership_predicted(a: f64, p: f64) -> bool {
    p > (1.0 / a).max(1.0 / (1.0 - a))
}

fn check_a(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("homogeneity exponent must lie in (0,1), got {a}")))
    }
}

/// Truncated profile on a box of length `L`: `ℓ = 2π/L`, cutoff radius
/// `0.4L`, spectral filter at a twelfth of the Nyquist frequency.
pub fn membership_profile(a: f64, length: f64) -> DataShape {
    DataShape::Homogeneous { a, regularization: 2.0 * PI / length, radius: 0.4 * length, filter: Some(length / 24.0) }
}

/// Nyquist `L/2`, enough to carry the `x/2t` chirp of `U(1)` across the box.
pub fn membership_grid(length: f64) -> Result<Grid> {
    let n = ((length * length / (2.0 * PI)).ceil() as usize).next_power_of_two();
    Grid::new(n, length)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipRow {
    pub a: f64,
    pub p: f64,
    pub lengths: Vec<f64>,
    pub norms: Vec<f64>,
    pub drifts: Vec<f64>,
    /// Last drift below the saturation threshold.
    pub saturates: bool,
    pub predicted: bool,
}

impl MembershipRow {
    pub fn matches_criterion(&self) -> bool {
        self.saturates == self.predicted
    }
}

/// `‖U(t)ψ_a‖_p` on the doubling ladder `L_0, 2L_0, …`; one propagation per
/// `(a, L)` serves every `p`. Runs sequentially since each field is large.
pub fn membership_ladder(a: f64, ps: &[f64], base_length: f64, levels: usize, t: f64, threshold: f64) -> Result<Vec<MembershipRow>> {
    check_a(a)?;
    if levels < 2 {
        return Err(Error::InvalidParameter("membership ladder needs two lengths".into()));
    }
    let lengths: Vec<f64> = (0..levels).map(|k| base_length * 2f64.powi(k as i32)).collect();
    let mut norms = vec![Vec::with_capacity(levels); ps.len()];
    for &length in &lengths {
        let psi = membership_profile(a, length).sample(membership_grid(length)?)?;
        let u = propagate(&psi, t)?;
        drop(psi);
        for (row, &p) in norms.iter_mut().zip(ps) {
            row.push(lp_norm(&u, p)?);
        }
    }
    Ok(ps
        .iter()
        .zip(norms)
        .map(|(&p, norms)| {
            let drifts = ladder_drifts(&norms);
            MembershipRow {
                a,
                p,
                lengths: lengths.clone(),
                saturates: *drifts.last().unwrap() < threshold,
                predicted: membership_predicted(a, p),
                norms,
                drifts,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingSettings {
    /// Fixed grid spacing; the box grows around it.
    pub spacing: f64,
    pub base_length: f64,
    pub levels: usize,
    /// Multiplies the truncated profile.
    pub amplitude: f64,
    pub time_intervals: usize,
    pub tolerance: f64,
}

impl Default for SmoothingSettings {
    fn default() -> Self {
        SmoothingSettings { spacing: 1.0 / 16.0, base_length: 64.0, levels: 4, amplitude: 0.5, time_intervals: 64, tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub a: f64,
    pub p: f64,
    pub lengths: Vec<f64>,
    /// Shared ball radius `M`, the largest `‖φ‖_p` on the ladder.
    pub m_bound: f64,
    pub horizon_t: f64,
    pub data_l2: Vec<f64>,
    pub data_lp: Vec<f64>,
    /// `sup_t ‖S φ − U(t)φ‖_2 = sup_t ‖v(t) − φ‖_2`.
    pub duhamel_l2: Vec<f64>,
    pub converged: Vec<bool>,
}

impl SmoothingReport {
    pub fn duhamel_drifts(&self) -> Vec<f64> {
        ladder_drifts(&self.duhamel_l2)
    }

    /// Relative growth of `‖φ‖_2` per doubling.
    pub fn data_growth(&self) -> Vec<f64> {
        self.data_l2.windows(2).map(|w| w[1] / w[0] - 1.0).collect()
    }
}

fn smoothing_profile(a: f64, length: f64, s: &SmoothingSettings) -> DataShape {
    let nyquist = PI / s.spacing;
    DataShape::Homogeneous { a, regularization: 2.0 * s.spacing, radius: 0.4 * length, filter: Some(nyquist / 4.0) }
}

/// Solves from truncated `ψ_a` on growing boxes with a common `M`, hence a
/// common horizon `T_M`, and records the `L²` size of the Duhamel part.
pub fn smoothing_ladder(a: f64, p: f64, s: &SmoothingSettings) -> Result<SmoothingReport> {
    check_a(a)?;
    if s.levels < 2 || s.spacing <= 0.0 {
        return Err(Error::InvalidParameter("smoothing ladder needs two levels and positive spacing".into()));
    }
    let lengths: Vec<f64> = (0..s.levels).map(|k| s.base_length * 2f64.powi(k as i32)).collect();
    let data: Vec<Field> = lengths
        .iter()
        .map(|&l| {
            let n = (l / s.spacing).round() as usize;
            let phi = smoothing_profile(a, l, s).sample(Grid::new(n, l)?)?;
            Ok(phi.scale_real(s.amplitude))
        })
        .collect::<Result<_>>()?;
    let data_lp: Vec<f64> = data.iter().map(|f| lp_norm(f, p)).collect::<Result<_>>()?;
    let data_l2: Vec<f64> = data.iter().map(|f| lp_norm(f, 2.0)).collect::<Result<_>>()?;
    let m_bound = data_lp.iter().copied().fold(0.0, f64::max);
    let solved: Vec<(f64, bool, f64)> = data
        .par_iter()
        .map(|phi| {
            let mut params = SolverParams::new(p, m_bound, *phi.grid());
            params.time_intervals = s.time_intervals;
            params.tolerance = s.tolerance;
            let report = picard_solve(phi, &params)?;
            let traj = &report.final_trajectory;
            let sup = traj
                .values()
                .iter()
                .map(|v| lp_norm(&v.sub(phi)?, 2.0))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok((sup, report.stop_reason == StopReason::Converged, report.horizon_t))
        })
        .collect::<Result<_>>()?;
    Ok(SmoothingReport {
        a,
        p,
        lengths,
        m_bound,
        horizon_t: solved[0].2,
        data_l2,
        data_lp,
        duhamel_l2: solved.iter().map(|x| x.0).collect(),
        converged: solved.iter().map(|x| x.1).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularitySettings {
    pub t0: f64,
    /// Locality scale `δ`; norms are taken over `[−δ/4, δ/4]`.
    pub delta: f64,
    pub length: f64,
    pub base_points: usize,
    pub levels: usize,
}

impl Default for SingularitySettings {
    fn default() -> Self {
        SingularitySettings { t0: 0.5, delta: 1.0, length: 32.0, base_points: 4096, levels: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub a: f64,
    pub s: f64,
    pub p: f64,
    pub n_points: Vec<usize>,
    /// `‖⟨D⟩^s U(t₀)φ_a‖_{L^p([−δ/4,δ/4])}` with `φ_a = U(−t₀)ψ_a`.
    pub window_norms: Vec<f64>,
    /// Same window, data restricted to `|y| ≥ 3δ/4` (the `H₂` part).
    pub far_field_norms: Vec<f64>,
    /// Fit of the increments of `‖·‖^p` against `n`.
    pub increment_fit: Option<PowerFit>,
    /// `(s + a)p − 1`: increments scale like `h^{1−(s+a)p}`.
    pub predicted_increment_exponent: f64,
}

impl SingularityReport {
    pub fn window_drifts(&self) -> Vec<f64> {
        ladder_drifts(&self.window_norms)
    }

    /// Far-field changes per refinement, relative to the coarsest window
    /// norm: the share of the growth the far field could account for.
    pub fn far_field_drifts(&self) -> Vec<f64> {
        let scale = self.window_norms[0];
        self.far_field_norms.windows(2).map(|w| (w[1] - w[0]).abs() / scale).collect()
    }

    pub fn far_field_bounded(&self, tolerance: f64) -> bool {
        self.far_field_drifts().iter().all(|d| *d < tolerance)
    }

    pub fn grows_monotonically(&self) -> bool {
        self.window_norms.windows(2).all(|w| w[1] > w[0])
    }
}

fn windowed_lp(f: &Field, half_width: f64, p: f64) -> Result<f64> {
    f.expect(crate::grid::Representation::Physical)?;
    let grid = f.grid();
    let inside: Vec<Complex64> = grid
        .positions()
        .iter()
        .zip(f.samples())
        .filter(|(x, _)| x.abs() <= half_width)
        .map(|(_, z)| *z)
        .collect();
    lp_norm_samples(&inside, grid.spacing(), p)
}

fn bessel(f: &Field, s: f64) -> Result<Field> {
    apply_multiplier(f, |xi| Complex64::new((1.0 + xi * xi).powf(0.5 * s), 0.0))
}

/// Refines `n` at fixed `L` with regularization `ℓ = h`, so the local
/// singularity `|x|^{−s−a}` is resolved one octave further each level.
pub fn singularity_route(a: f64, s_order: f64, p: f64, settings: &SingularitySettings) -> Result<SingularityReport> {
    check_a(a)?;
    if settings.levels < 3 || settings.delta <= 0.0 {
        return Err(Error::InvalidParameter("singularity route needs three levels and δ > 0".into()));
    }
    let n_points: Vec<usize> = (0..settings.levels).map(|k| settings.base_points << k).collect();
    let half = settings.delta / 4.0;
    let far_radius = 1.5 * settings.delta;
    let rows: Vec<(f64, f64)> = n_points
        .iter()
        .map(|&n| {
            let grid = Grid::new(n, settings.length)?;
            let psi = DataShape::Homogeneous { a, regularization: grid.spacing(), radius: 0.4 * settings.length, filter: None }
                .sample(grid)?;
            let phi = propagate(&psi, -settings.t0)?;
            let focused = propagate(&phi, settings.t0)?;
            let near = windowed_lp(&bessel(&focused, s_order)?, half, p)?;
            // smooth_cutoff(·, R) vanishes beyond R and is 1 inside R/2
            let far_data = focused.map_indexed(|x, z| z * (1.0 - smooth_cutoff(x, far_radius)));
            let far = windowed_lp(&bessel(&far_data, s_order)?, half, p)?;
            Ok((near, far))
        })
        .collect::<Result<_>>()?;
    let window_norms: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let increments: Vec<f64> = window_norms.windows(2).map(|w| w[1].powf(p) - w[0].powf(p)).collect();
    let increment_fit = if increments.iter().all(|d| *d > 0.0) {
        let x: Vec<f64> = n_points[1..].iter().map(|&n| n as f64).collect();
        Some(power_fit(&x, &increments)?)
    } else {
        None
    };
    Ok(SingularityReport {
        a,
        s: s_order,
        p,
        n_points,
        window_norms,
        far_field_norms: rows.iter().map(|r| r.1).collect(),
        increment_fit,
        predicted_increment_exponent: (s_order + a) * p - 1.0,
    })
}
