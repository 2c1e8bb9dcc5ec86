//! Thin wrappers around `rustfft` with a per-thread plan cache, plus a
//! chirp-z evaluation of continuum Fourier integrals on arbitrary uniform
//! output lattices.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Unnormalized forward DFT in place: `X_k = Σ_j x_j e^{-2πi jk/n}`.
pub fn forward_in_place(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// Unnormalized inverse DFT in place: `x_j = Σ_k X_k e^{+2πi jk/n}`.
pub fn inverse_in_place(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Signed wavenumber index of FFT slot `k` for a transform of length `n`.
#[inline]
pub fn signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// FFT slot of a signed index for a transform of length `n`.
#[inline]
pub fn slot(signed: i64, n: usize) -> usize {
    signed.rem_euclid(n as i64) as usize
}

/// Uniform lattice `start + m·step`, `m = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Lattice {
    pub fn point(&self, m: usize) -> f64 {
        self.start + m as f64 * self.step
    }
}

/// Evaluates `Σ_j f_j exp(i·sign·x_j·ξ_m)` for all output points `ξ_m` of
/// `output`, where `x_j` runs over `input`. Bluestein factorization of the
/// bilinear phase, O((n+m) log(n+m)).
pub fn chirp_z(samples: &[Complex64], input: Lattice, output: Lattice, sign: f64) -> Vec<Complex64> {
    assert_eq!(samples.len(), input.len);
    let n = input.len;
    let m = output.len;
    if n == 0 || m == 0 {
        return vec![Complex64::new(0.0, 0.0); m];
    }
    // x_j ξ_m = x0ξ0 + x0·d·m + ξ0·h·j + h·d·j·m, and jm = (j² + m² - (m-j)²)/2.
    let (x0, h) = (input.start, input.step);
    let (k0, d) = (output.start, output.step);
    let hd = h * d;
    let size = (n + m - 1).next_power_of_two();

    let mut a = vec![Complex64::new(0.0, 0.0); size];
    for (j, (slot_a, f)) in a.iter_mut().zip(samples).enumerate() {
        let jf = j as f64;
        let phase = sign * (k0 * h * jf + 0.5 * hd * jf * jf);
        *slot_a = f * Complex64::from_polar(1.0, phase);
    }
    // kernel c(k) = exp(-i·sign·hd·k²/2) for k in (-(n-1), m-1)
    let mut b = vec![Complex64::new(0.0, 0.0); size];
    for (k, slot) in b.iter_mut().take(m).enumerate() {
        let kf = k as f64;
        *slot = Complex64::from_polar(1.0, -sign * 0.5 * hd * kf * kf);
    }
    for k in 1..n {
        let kf = k as f64;
        b[size - k] = Complex64::from_polar(1.0, -sign * 0.5 * hd * kf * kf);
    }
    forward_in_place(&mut a);
    forward_in_place(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inverse_in_place(&mut a);
    let scale = 1.0 / size as f64;
    (0..m)
        .map(|mi| {
            let mf = mi as f64;
            let phase = sign * (x0 * k0 + x0 * d * mf + 0.5 * hd * mf * mf);
            a[mi] * scale * Complex64::from_polar(1.0, phase)
        })
        .collect()
}
