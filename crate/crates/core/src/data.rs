//! Initial-data families, all evaluable on any grid and under dilation
//! `φ(x) ↦ φ(λx)` so that refinement and scaling studies resample the same
//! continuum function.

use crate::error::{Error, Result};
use crate::grid::{apply_multiplier, lp_norm, Field, Grid};
use crate::spaces::norms::lp_cutoff;
use crate::spaces::{TimeGrid, TwistedTrajectory};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

/// Smooth cutoff equal to 1 on `|x| ≤ R/2` and 0 on `|x| ≥ R`.
pub fn smooth_cutoff(x: f64, radius: f64) -> f64 {
    lp_cutoff(2.0 * x / radius)
}

/// `½[erf(x + N/2) − erf(x − N/2)]`: a plateau of width `N` with unit edges.
pub fn erf_window(x: f64, width: f64) -> f64 {
    0.5 * (erf(x + 0.5 * width) - erf(x - 0.5 * width))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataShape {
    /// `e^{−x²/w²}`.
    Gaussian { width: f64 },
    /// `e^{−x²/w²} e^{iβx²}`.
    ChirpedGaussian { width: f64, chirp: f64 },
    /// `e^{−x²/R²} Σ_k c_k e^{iξ_k x}`, `K` modes with `|ξ_k| < cutoff`.
    BandLimited { seed: u64, modes: usize, cutoff: f64, envelope: f64 },
    /// `(x² + ℓ²)^{−a/2}` times [`smooth_cutoff`] at `radius`, then
    /// optionally smoothed by the Gaussian multiplier `e^{−(ξ/ξ_c)²}`.
    Homogeneous { a: f64, regularization: f64, radius: f64, filter: Option<f64> },
    /// `e^{−ix²/4t₀} χ_N(x)` with the erf plateau of width `N`.
    ChirpWindow { width: f64, t0: f64 },
}

struct Mode {
    xi: f64,
    coefficient: Complex64,
}

fn random_modes(seed: u64, count: usize, cutoff: f64) -> Vec<Mode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Mode {
            xi: rng.gen_range(-cutoff..cutoff),
            coefficient: Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        })
        .collect()
}

impl DataShape {
    pub fn gaussian() -> Self {
        DataShape::Gaussian { width: 1.0 }
    }

    pub fn sample(&self, grid: Grid) -> Result<Field> {
        self.sample_dilated(grid, 1.0)
    }

    /// Samples `φ(λx)`.
    pub fn sample_dilated(&self, grid: Grid, lambda: f64) -> Result<Field> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("dilation must be positive, got {lambda}")));
        }
        let field = match *self {
            DataShape::Gaussian { width } => Field::from_real_fn(grid, |x| (-(lambda * x / width).powi(2)).exp()),
            DataShape::ChirpedGaussian { width, chirp } => Field::from_fn(grid, |x| {
                let y = lambda * x;
                Complex64::from_polar((-(y / width).powi(2)).exp(), chirp * y * y)
            }),
            DataShape::BandLimited { seed, modes, cutoff, envelope } => {
                if !(cutoff > 0.0) || modes == 0 {
                    return Err(Error::InvalidParameter("band-limited data need modes and a positive cutoff".into()));
                }
                let modes = random_modes(seed, modes, cutoff);
                Field::from_fn(grid, |x| {
                    let y = lambda * x;
                    let sum: Complex64 = modes
                        .iter()
                        .map(|m| m.coefficient * Complex64::new(0.0, m.xi * y).exp())
                        .sum();
                    sum * (-(y / envelope).powi(2)).exp()
                })
            }
            DataShape::Homogeneous { a, regularization, radius, filter } => {
                if !(a > 0.0 && regularization > 0.0 && radius > 0.0) {
                    return Err(Error::InvalidParameter("homogeneous data need a, ℓ, R > 0".into()));
                }
                let raw = Field::from_real_fn(grid, |x| {
                    let y = lambda * x;
                    (y * y + regularization * regularization).powf(-0.5 * a) * smooth_cutoff(y, radius)
                });
                match filter {
                    // the filter of φ(λ·) sits at λξ_c
                    Some(xc) => apply_multiplier(&raw, |xi| Complex64::new((-(xi / (lambda * xc)).powi(2)).exp(), 0.0))?,
                    None => raw,
                }
            }
            DataShape::ChirpWindow { width, t0 } => {
                if t0 == 0.0 {
                    return Err(Error::InvalidParameter("chirp focus time must be nonzero".into()));
                }
                Field::from_fn(grid, |x| {
                    let y = lambda * x;
                    Complex64::from_polar(erf_window(y, width), -y * y / (4.0 * t0))
                })
            }
        };
        Ok(field)
    }

    /// Samples the shape and rescales it to `‖φ‖_p = target`.
    pub fn sample_normalized(&self, grid: Grid, p: f64, target: f64) -> Result<Field> {
        normalize(&self.sample(grid)?, p, target)
    }
}

/// `f` rescaled so that `‖f‖_p = target`.
pub fn normalize(f: &Field, p: f64, target: f64) -> Result<Field> {
    let n = lp_norm(f, p)?;
    if !(n > 0.0) {
        return Err(Error::InvalidParameter("cannot normalize a zero field".into()));
    }
    Ok(f.scale_real(target / n))
}

/// `v(t) = c₀ + t c₁ + t² c₂` with exact `∂_t v`.
pub fn quadratic_trajectory(timegrid: &TimeGrid, coefficients: [&Field; 3]) -> Result<TwistedTrajectory> {
    let [c0, c1, c2] = coefficients;
    let mut v = Vec::with_capacity(timegrid.len());
    let mut dv = Vec::with_capacity(timegrid.len());
    for &t in timegrid.nodes() {
        v.push(c0.axpy(Complex64::new(t, 0.0), c1)?.axpy(Complex64::new(t * t, 0.0), c2)?);
        dv.push(c1.axpy(Complex64::new(2.0 * t, 0.0), c2)?);
    }
    TwistedTrajectory::new(timegrid.clone(), v, dv)
}

/// Seeded quadratic-in-time trajectory with band-limited coefficients of
/// random amplitude and shape.
pub fn seeded_trajectory(grid: Grid, timegrid: &TimeGrid, seed: u64) -> Result<TwistedTrajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7a1e);
    let horizon = timegrid.horizon();
    let mut coefficient = |order: i32| -> Result<Field> {
        let shape = DataShape::BandLimited {
            seed: rng.gen(),
            modes: rng.gen_range(2..9),
            cutoff: rng.gen_range(0.5..3.0),
            envelope: rng.gen_range(0.7..3.0),
        };
        let f = shape.sample(grid)?;
        let n = lp_norm(&f, 2.0)?;
        // comparable contributions from each order over [0, T]
        Ok(f.scale_real(rng.gen_range(0.0..2.0) / (n * horizon.powi(order))))
    };
    let c0 = coefficient(0)?;
    let c1 = coefficient(1)?;
    let c2 = coefficient(2)?;
    quadratic_trajectory(timegrid, [&c0, &c1, &c2])
}
