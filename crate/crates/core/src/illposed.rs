//! Norm inflation of focusing chirps: `φ_N = e^{−ix²/4t₀} χ_N` concentrates
//! at `t = t₀` into a spike of width `~1/N`, so
//! `G(N) = sup_t ‖U(t)φ_N‖_{H^{s,p}} / ‖φ_N‖_p ~ N^{s+1−2/p}`.

use crate::data::DataShape;
use crate::error::{Error, Result};
use crate::fit::{power_fit, PowerFit};
use crate::grid::{lp_norm, Field, Grid};
use crate::schrodinger::propagate;
use crate::spaces::sobolev_norm;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpSettings {
    pub t0: f64,
    /// Coarse scan points over `[0, 2t₀]`.
    pub scan_points: usize,
    /// Relative tolerance of the golden-section refinement in `t`.
    pub time_tolerance: f64,
    /// Spectral margin beyond the chirp's top frequency `N/4t₀`.
    pub frequency_margin: f64,
    /// Multiplies the minimal resolution (≥ 1).
    pub resolution: usize,
}

impl Default for ChirpSettings {
    fn default() -> Self {
        ChirpSettings { t0: 0.1, scan_points: 64, time_tolerance: 1e-6, frequency_margin: 12.0, resolution: 1 }
    }
}

/// Box `2N + 32` with Nyquist at least twice the chirp's top frequency.
pub fn chirp_grid(width: f64, s: &ChirpSettings) -> Result<Grid> {
    let length = 2.0 * width + 32.0;
    let top = width / (4.0 * s.t0.abs()) + s.frequency_margin;
    let n = ((2.0 * top * length / std::f64::consts::PI).ceil() as usize).next_power_of_two().max(256);
    Grid::new(n * s.resolution.max(1), length)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpGrowth {
    pub width: f64,
    pub g: f64,
    pub t_argmax: f64,
    pub n_points: usize,
}

fn ratio_at(phi: &Field, t: f64, s_order: f64, p: f64, base: f64) -> Result<f64> {
    Ok(sobolev_norm(&propagate(phi, t)?, s_order, p)? / base)
}

/// `G(N)` by a scan of `[0, 2t₀]` refined by golden-section search.
pub fn chirp_growth(width: f64, s_order: f64, p: f64, settings: &ChirpSettings) -> Result<ChirpGrowth> {
    if settings.scan_points < 3 {
        return Err(Error::InvalidParameter("scan needs at least three points".into()));
    }
    let grid = chirp_grid(width, settings)?;
    let phi = DataShape::ChirpWindow { width, t0: settings.t0 }.sample(grid)?;
    let base = lp_norm(&phi, p)?;
    let horizon = 2.0 * settings.t0;
    let m = settings.scan_points;
    let times: Vec<f64> = (0..=m).map(|k| horizon * k as f64 / m as f64).collect();
    let values: Vec<f64> = times.par_iter().map(|&t| ratio_at(&phi, t, s_order, p, base)).collect::<Result<_>>()?;
    let best = (0..values.len()).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    // the focal spike lasts ~t₀/N; bracket the best scan point and refine
    let (mut a, mut b) = (times[best.saturating_sub(1)], times[(best + 1).min(m)]);
    let phi_ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi_ratio * (b - a);
    let mut d = a + phi_ratio * (b - a);
    let mut fc = ratio_at(&phi, c, s_order, p, base)?;
    let mut fd = ratio_at(&phi, d, s_order, p, base)?;
    while (b - a) > settings.time_tolerance * settings.t0.abs() {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi_ratio * (b - a);
            fc = ratio_at(&phi, c, s_order, p, base)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi_ratio * (b - a);
            fd = ratio_at(&phi, d, s_order, p, base)?;
        }
    }
    let (t_arg, g) = [(times[best], values[best]), (c, fc), (d, fd)]
        .into_iter()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    Ok(ChirpGrowth { width, g, t_argmax: t_arg, n_points: grid.n_points() })
}

/// Predicted growth exponent `s + 1 − 2/p`.
pub fn predicted_exponent(s_order: f64, p: f64) -> f64 {
    s_order + 1.0 - 2.0 / p
}

pub fn fit_growth(points: &[ChirpGrowth]) -> Result<PowerFit> {
    let x: Vec<f64> = points.iter().map(|q| q.width).collect();
    let y: Vec<f64> = points.iter().map(|q| q.g).collect();
    power_fit(&x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_resolves_top_frequency() {
        let s = ChirpSettings::default();
        let grid = chirp_grid(64.0, &s).unwrap();
        assert!(grid.nyquist() >= 64.0 / (4.0 * s.t0));
        assert_eq!(grid.length(), 160.0);
    }

    #[test]
    fn chirp_focuses_near_t0() {
        let s = ChirpSettings { scan_points: 16, time_tolerance: 1e-4, ..Default::default() };
        let c = chirp_growth(16.0, 0.0, 3.0, &s).unwrap();
        assert!((c.t_argmax - s.t0).abs() < 0.1 * s.t0, "{c:?}");
        assert!(c.g > 1.0);
    }

    #[test]
    fn growth_exponent_near_prediction() {
        let s = ChirpSettings { scan_points: 24, time_tolerance: 1e-5, ..Default::default() };
        let pts: Vec<_> = [16.0, 32.0, 64.0].iter().map(|&n| chirp_growth(n, 0.0, 3.0, &s).unwrap()).collect();
        let fit = fit_growth(&pts).unwrap();
        assert!((fit.exponent - predicted_exponent(0.0, 3.0)).abs() < 0.15, "{fit:?}");
    }

    #[test]
    fn rejects_tiny_scan() {
        let s = ChirpSettings { scan_points: 2, ..Default::default() };
        assert!(chirp_growth(8.0, 0.0, 3.0, &s).is_err());
    }
}
