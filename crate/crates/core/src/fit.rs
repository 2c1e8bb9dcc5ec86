//! Weighted least-squares power-law fits `y ≈ C x^k` in log-log form.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    /// `ln C`.
    pub log_prefactor: f64,
    /// 95% confidence half-width of the exponent (NaN with two points).
    pub halfwidth: f64,
    pub points: usize,
}

impl PowerFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.log_prefactor + self.exponent * x.ln()).exp()
    }
}

/// Unweighted fit of `ln y` against `ln x`.
pub fn power_fit(x: &[f64], y: &[f64]) -> Result<PowerFit> {
    weighted_power_fit(x, y, &vec![1.0; x.len()])
}

/// Weighted fit; points with weight 0 are ignored. Down-weighting noisy
/// points (e.g. the coarsest refinement level) keeps them visible without
/// letting them dominate.
pub fn weighted_power_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<PowerFit> {
    if x.len() != y.len() || x.len() != w.len() {
        return Err(Error::InvalidParameter("fit inputs differ in length".into()));
    }
    let pts: Vec<(f64, f64, f64)> = x
        .iter()
        .zip(y)
        .zip(w)
        .filter(|(_, &w)| w > 0.0)
        .map(|((&x, &y), &w)| (x, y, w))
        .collect();
    if pts.iter().any(|&(x, y, _)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::InvalidParameter("power fit needs positive finite data".into()));
    }
    if pts.len() < 2 {
        return Err(Error::InvalidParameter("power fit needs at least two points".into()));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0.ln()).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1.ln()).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0.ln() - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidParameter("power fit needs distinct abscissae".into()));
    }
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0.ln() - mx) * (p.1.ln() - my)).sum();
    let exponent = sxy / sxx;
    let log_prefactor = my - exponent * mx;
    let dof = pts.len() as f64 - 2.0;
    let halfwidth = if dof > 0.0 {
        let rss: f64 = pts
            .iter()
            .map(|p| p.2 * (p.1.ln() - log_prefactor - exponent * p.0.ln()).powi(2))
            .sum();
        let stderr = (rss / dof / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        t.inverse_cdf(0.975) * stderr
    } else {
        f64::NAN
    };
    Ok(PowerFit { exponent, log_prefactor, halfwidth, points: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        let f = power_fit(&x, &y).unwrap();
        assert!((f.exponent + 1.5).abs() < 1e-12);
        assert!(f.halfwidth < 1e-10);
        assert!((f.predict(16.0) - 3.0 * 16f64.powf(-1.5)).abs() < 1e-12);
    }

    #[test]
    fn weights_and_errors() {
        let x = [1.0, 2.0, 4.0];
        let y = [100.0, 2.0, 4.0];
        let f = weighted_power_fit(&x, &y, &[0.0, 1.0, 1.0]).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-12 && f.halfwidth.is_nan());
        assert!(power_fit(&[1.0], &[1.0]).is_err());
        assert!(power_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(power_fit(&[1.0, 2.0], &[1.0, -2.0]).is_err());
    }

    #[test]
    fn noisy_fit_covers_truth() {
        let x: Vec<f64> = (1..=8).map(|k| k as f64).collect::<Vec<f64>>();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, x)| x.powf(0.7) * (1.0 + 0.02 * if i % 2 == 0 { 1.0 } else { -1.0 })).collect();
        let f = power_fit(&x, &y).unwrap();
        assert!((f.exponent - 0.7).abs() < f.halfwidth.max(0.02));
    }

    proptest! {
        #[test]
        fn scale_invariance(c in 0.01f64..100.0, k in -3.0f64..3.0) {
            let x = [0.5f64, 1.0, 3.0, 7.0];
            let y: Vec<f64> = x.iter().map(|x| c * x.powf(k)).collect();
            let f = power_fit(&x, &y).unwrap();
            prop_assert!((f.exponent - k).abs() < 1e-9);
        }
    }
}
