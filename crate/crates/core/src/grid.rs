//! Uniform spatial lattice, its dual frequency lattice, and complex fields
//! living on it.
//!
//! Transforms use the continuum normalization `φ̂(ξ) = ∫ e^{-ixξ} φ(x) dx`
//! with inverse `(2π)^{-1} ∫ e^{ixξ} φ̂(ξ) dξ`. Frequency-space samples are
//! stored in FFT slot order (`0, 1, …, n/2-1, -n/2, …, -1`); use
//! [`Grid::fft_frequencies`] to pair them with wavenumbers.

use crate::error::{Error, Result};
use crate::fft::{self, signed_index, slot};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Spatial domain `[-length/2, length/2)` sampled at `n_points` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_points: usize,
    length: f64,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        if n_points < Self::MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= {}, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        Ok(Grid { n_points, length })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n_points as f64
    }

    /// Frequency lattice spacing `2π/length`.
    pub fn frequency_spacing(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest |x| on the lattice.
    pub fn x_max(&self) -> f64 {
        self.length / 2.0
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.length / 2.0 + j as f64 * self.spacing()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Wavenumber carried by FFT slot `k`.
    pub fn frequency_at_slot(&self, k: usize) -> f64 {
        signed_index(k, self.n_points) as f64 * self.frequency_spacing()
    }

    /// Frequencies in FFT slot order, matching frequency-space samples.
    pub fn fft_frequencies(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.frequency_at_slot(k)).collect()
    }

    /// Frequencies `2πk/length` for `k = -n/2 … n/2-1`, increasing.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n_points as i64;
        (-n / 2..n / 2).map(|k| k as f64 * self.frequency_spacing()).collect()
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    /// Smallest |t| for which the chirp `e^{ix²/4t}` stays below 80% of the
    /// grid Nyquist frequency over the whole domain.
    pub fn chirp_t_min(&self) -> f64 {
        self.chirp_t_min_within(self.x_max())
    }

    /// As [`Grid::chirp_t_min`] but only over `|x| <= radius`.
    pub fn chirp_t_min_within(&self, radius: f64) -> f64 {
        0.625 * radius * self.spacing() / PI
    }

    pub fn chirp_resolved(&self, t: f64) -> bool {
        t != 0.0 && t.abs() >= self.chirp_t_min()
    }

    /// Same domain, `factor` times as many nodes.
    pub fn refined(&self, factor: usize) -> Result<Grid> {
        Grid::new(self.n_points * factor, self.length)
    }

    /// Same spacing, `factor` times the length.
    pub fn enlarged(&self, factor: usize) -> Result<Grid> {
        Grid::new(self.n_points * factor, self.length * factor as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Physical,
    Frequency,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Physical => "physical",
            Representation::Frequency => "frequency",
        }
    }
}

/// Complex samples on a [`Grid`], tagged with their representation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Field {
    grid: Grid,
    samples: Vec<Complex64>,
    repr: Representation,
}

impl Field {
    pub fn new(grid: Grid, samples: Vec<Complex64>, repr: Representation) -> Result<Self> {
        if samples.len() != grid.n_points() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.n_points(),
                samples.len()
            )));
        }
        Ok(Field { grid, samples, repr })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.n_points()],
            repr: Representation::Physical,
        }
    }

    /// Samples `f(x_j)` of a physical-space function.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let samples = (0..grid.n_points()).map(|j| f(grid.x(j))).collect();
        Field { grid, samples, repr: Representation::Physical }
    }

    pub fn from_real_fn(grid: Grid, mut f: impl FnMut(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Frequency-space field `g(ξ_k)` with samples in FFT slot order.
    pub fn from_spectrum_fn(grid: Grid, g: impl Fn(f64) -> Complex64) -> Self {
        let samples = (0..grid.n_points()).map(|k| g(grid.frequency_at_slot(k))).collect();
        Field { grid, samples, repr: Representation::Frequency }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub(crate) fn expect(&self, repr: Representation) -> Result<()> {
        if self.repr != repr {
            return Err(Error::Representation { expected: repr.name(), found: self.repr.name() });
        }
        Ok(())
    }

    pub(crate) fn expect_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.repr != other.repr {
            return Err(Error::Representation { expected: self.repr.name(), found: other.repr.name() });
        }
        Ok(())
    }

    pub(crate) fn with_samples(&self, samples: Vec<Complex64>) -> Field {
        debug_assert_eq!(samples.len(), self.samples.len());
        Field { grid: self.grid, samples, repr: self.repr }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        self.with_samples(self.samples.iter().map(|&z| f(z)).collect())
    }

    /// `f(x_j, sample_j)` over a physical field.
    pub fn map_indexed(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Field {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(j, &z)| f(self.grid.x(j), z))
            .collect();
        self.with_samples(samples)
    }

    pub fn conj(&self) -> Field {
        self.map(|z| z.conj())
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|z| z * c)
    }

    pub fn scale_real(&self, c: f64) -> Field {
        self.map(|z| z * c)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.expect_same_grid(other)?;
        Ok(self.with_samples(self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.expect_same_grid(other)?;
        Ok(self.with_samples(self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect()))
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: Complex64, other: &Field) -> Result<Field> {
        self.expect_same_grid(other)?;
        Ok(self.with_samples(self.samples.iter().zip(&other.samples).map(|(a, b)| a + c * b).collect()))
    }

    /// Pointwise modulus.
    pub fn modulus(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Largest |x| where the modulus exceeds `rel·max|f|`; zero for the zero field.
    pub fn support_radius(&self, rel: f64) -> f64 {
        let cut = rel * self.max_modulus();
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > cut)
            .map(|(j, _)| self.grid.x(j).abs())
            .fold(0.0, f64::max)
    }
}

/// Continuum-normalized forward transform of a physical field.
pub fn forward_transform(f: &Field) -> Result<Field> {
    f.expect(Representation::Physical)?;
    let n = f.grid.n_points();
    let h = f.grid.spacing();
    let mut buf = f.samples.clone();
    fft::forward_in_place(&mut buf);
    // x_j = -L/2 + jh contributes e^{iξ_k L/2} = (-1)^k.
    for (k, z) in buf.iter_mut().enumerate() {
        let s = if k % 2 == 0 { h } else { -h };
        *z *= s;
    }
    debug_assert_eq!(buf.len(), n);
    Ok(Field { grid: f.grid, samples: buf, repr: Representation::Frequency })
}

/// Exact discrete inverse of [`forward_transform`].
pub fn inverse_transform(f: &Field) -> Result<Field> {
    f.expect(Representation::Frequency)?;
    let n = f.grid.n_points();
    let scale = 1.0 / (n as f64 * f.grid.spacing());
    let mut buf: Vec<Complex64> = f
        .samples
        .iter()
        .enumerate()
        .map(|(k, z)| if k % 2 == 0 { z * scale } else { -z * scale })
        .collect();
    fft::inverse_in_place(&mut buf);
    Ok(Field { grid: f.grid, samples: buf, repr: Representation::Physical })
}

/// Applies the Fourier multiplier `m(ξ)` to a physical field.
pub fn apply_multiplier(f: &Field, m: impl Fn(f64) -> Complex64) -> Result<Field> {
    let mut hat = forward_transform(f)?;
    let grid = hat.grid;
    for (k, z) in hat.samples.iter_mut().enumerate() {
        *z *= m(grid.frequency_at_slot(k));
    }
    inverse_transform(&hat)
}

/// Discrete L^p norm `(h Σ|f_j|^p)^{1/p}`; `p = ∞` gives the max modulus.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    f.expect(Representation::Physical)?;
    lp_norm_samples(f.samples(), f.grid.spacing(), p)
}

/// L^p norm of a frequency-space field with respect to `dξ`.
pub fn spectral_lp_norm(f: &Field, p: f64) -> Result<f64> {
    f.expect(Representation::Frequency)?;
    lp_norm_samples(f.samples(), f.grid.frequency_spacing(), p)
}

pub(crate) fn lp_norm_samples(samples: &[Complex64], weight: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("L^p exponent must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(samples.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    // scale by the max modulus so large p does not overflow
    let m = samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = samples.iter().map(|z| (z.norm() / m).powf(p)).sum();
    Ok(m * (weight * s).powf(1.0 / p))
}

/// Continuum convolution `∫ f(x-y) g(y) dy` restricted to the grid window.
///
/// Both inputs are zero-extended to twice the domain before the spectral
/// product, so the result is the linear (non-periodic) convolution of the
/// sampled functions.
pub fn convolve(f: &Field, g: &Field) -> Result<Field> {
    f.expect(Representation::Physical)?;
    f.expect_same_grid(g)?;
    linear_convolution(&[f, g])
}

/// Linear convolution of several physical fields on a common grid, padded
/// so no wrap-around occurs.
pub(crate) fn linear_convolution(fields: &[&Field]) -> Result<Field> {
    let first = fields[0];
    let grid = first.grid;
    let n = grid.n_points();
    let h = grid.spacing();
    let count = fields.len();
    let size = (count * n).next_power_of_two();
    let mut acc: Option<Vec<Complex64>> = None;
    for f in fields {
        f.expect(Representation::Physical)?;
        if f.grid != grid {
            return Err(Error::GridMismatch);
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); size];
        buf[..n].copy_from_slice(&f.samples);
        fft::forward_in_place(&mut buf);
        acc = Some(match acc {
            None => buf,
            Some(mut a) => {
                for (x, y) in a.iter_mut().zip(&buf) {
                    *x *= y;
                }
                a
            }
        });
    }
    let mut a = acc.expect("at least one field");
    fft::inverse_in_place(&mut a);
    // index sums: Σ i_r = m + (count-1)·n/2 lands on x_m
    let offset = (count - 1) * n / 2;
    let scale = h.powi(count as i32 - 1) / size as f64;
    let samples = (0..n).map(|m| a[m + offset] * scale).collect();
    Ok(Field { grid, samples, repr: Representation::Physical })
}

fn padded_samples(f: &Field, size: usize) -> Vec<Complex64> {
    let n = f.grid.n_points();
    let mut coeffs = f.samples.clone();
    fft::forward_in_place(&mut coeffs);
    let mut big = vec![Complex64::new(0.0, 0.0); size];
    let scale = 1.0 / n as f64;
    for (k, c) in coeffs.iter().enumerate() {
        big[slot(signed_index(k, n), size)] = c * scale;
    }
    fft::inverse_in_place(&mut big);
    big
}

fn truncate_back(mut big: Vec<Complex64>, grid: Grid) -> Field {
    let n = grid.n_points();
    let size = big.len();
    fft::forward_in_place(&mut big);
    let mut coeffs: Vec<Complex64> = (0..n)
        .map(|k| big[slot(signed_index(k, n), size)] / size as f64)
        .collect();
    fft::inverse_in_place(&mut coeffs);
    Field { grid, samples: coeffs, repr: Representation::Physical }
}

/// Dealiased pointwise product `f·g` (spectra zero-padded by a factor 2).
pub fn product(f: &Field, g: &Field) -> Result<Field> {
    f.expect(Representation::Physical)?;
    f.expect_same_grid(g)?;
    let size = 2 * f.grid.n_points();
    let a = padded_samples(f, size);
    let b = padded_samples(g, size);
    let prod = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Ok(truncate_back(prod, f.grid))
}

/// Dealiased cubic product `u1·conj(u2)·u3` (spectra padded to at least 3n).
pub fn cubic_product(u1: &Field, u2: &Field, u3: &Field) -> Result<Field> {
    u1.expect(Representation::Physical)?;
    u1.expect_same_grid(u2)?;
    u1.expect_same_grid(u3)?;
    let size = (3 * u1.grid.n_points()).next_power_of_two();
    let a = padded_samples(u1, size);
    let b = if std::ptr::eq(u1, u2) { a.clone() } else { padded_samples(u2, size) };
    let c = if std::ptr::eq(u1, u3) { a.clone() } else { padded_samples(u3, size) };
    let prod = a
        .iter()
        .zip(&b)
        .zip(&c)
        .map(|((x, y), z)| x * y.conj() * z)
        .collect();
    Ok(truncate_back(prod, u1.grid))
}
