//! Free Schrödinger group and the chirp / dilation / reflection calculus
//! around it.
//!
//! With the transform convention of [`crate::grid`], the group is the
//! multiplier `U(t) = e^{-itξ²}` and factorizes as
//! `U(t)f(x) = (4πit)^{-1/2} e^{ix²/4t} F[e^{iy²/4t} f](x/2t)`.
//! Tracing the same constants through the cubic term gives
//! `U(-t)[u1 ū2 u3] = (4πt)^{-1} M_t^{-1}[(M_t v1) * R(conj M_t v2) * (M_t v3)]`
//! for `t > 0`, `v_j = U(-t)u_j`; the constant is recovered independently by
//! [`FactorizationCalibration::calibrate`].

use crate::error::{Error, Result};
use crate::fft::{chirp_z, Lattice};
use crate::grid::{self, Field, Grid, Representation};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `U(t)f` via the multiplier `e^{-itξ²}`. Negative times go through
/// `U(-t)f = conj(U(t) conj f)`.
pub fn propagate(f: &Field, t: f64) -> Result<Field> {
    f.expect(Representation::Physical)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    if t < 0.0 {
        return Ok(propagate(&f.conj(), -t)?.conj());
    }
    grid::apply_multiplier(f, |xi| Complex64::from_polar(1.0, -t * xi * xi))
}

/// Sign of the chirp exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChirpSign {
    Forward,
    Inverse,
}

impl ChirpSign {
    fn value(self) -> f64 {
        match self {
            ChirpSign::Forward => 1.0,
            ChirpSign::Inverse => -1.0,
        }
    }
}

/// Pointwise multiplication by `e^{±ix²/4t}` (`M_t` or `M_t^{-1}`).
pub fn chirp(f: &Field, t: f64, sign: ChirpSign) -> Result<Field> {
    f.expect(Representation::Physical)?;
    if t == 0.0 {
        return Err(Error::InvalidParameter("chirp requires t != 0".into()));
    }
    if !f.grid().chirp_resolved(t) {
        log::warn!(
            "unresolved chirp: t = {t} below t_min = {} for this grid",
            f.grid().chirp_t_min()
        );
    }
    let s = sign.value() / (4.0 * t);
    Ok(f.map_indexed(|x, z| z * Complex64::from_polar(1.0, s * x * x)))
}

/// `(Rw)(x) = w(-x)` on the lattice, with `x_0 = -L/2` identified with `+L/2`.
pub fn reflect(f: &Field) -> Field {
    let n = f.len();
    let s = f.samples();
    let samples = (0..n).map(|j| s[(n - j) % n]).collect();
    f.with_samples(samples)
}

/// `(4πit)^{-1/2}` on the principal branch.
fn dilation_prefactor(t: f64) -> Complex64 {
    debug_assert!(t > 0.0);
    Complex64::from_polar((4.0 * PI * t).powf(-0.5), -PI / 4.0)
}

fn require_resolved(grid: &Grid, t: f64) -> Result<()> {
    if t == 0.0 {
        return Err(Error::InvalidParameter("factorized form requires t != 0".into()));
    }
    if !grid.chirp_resolved(t) {
        return Err(Error::UnresolvedChirp { t, t_min: grid.chirp_t_min() });
    }
    Ok(())
}

/// Continuum transform `h Σ_j g_j e^{-i x_j ξ}` evaluated at `ξ = x_m/(2t)`.
fn transform_on_dilated_lattice(g: &Field, t: f64, sign: f64) -> Vec<Complex64> {
    let grid = g.grid();
    let input = Lattice { start: -grid.x_max(), step: grid.spacing(), len: grid.n_points() };
    let output = Lattice {
        start: -grid.x_max() / (2.0 * t),
        step: grid.spacing() / (2.0 * t),
        len: grid.n_points(),
    };
    let h = grid.spacing();
    chirp_z(g.samples(), input, output, sign).into_iter().map(|z| z * h).collect()
}

/// `U(t)f` through chirp, continuum transform and dilation.
pub fn factorized_propagate(f: &Field, t: f64) -> Result<Field> {
    f.expect(Representation::Physical)?;
    require_resolved(f.grid(), t)?;
    if t < 0.0 {
        return Ok(factorized_propagate(&f.conj(), -t)?.conj());
    }
    let g = chirp(f, t, ChirpSign::Forward)?;
    let pref = dilation_prefactor(t);
    let dilated = f.with_samples(
        transform_on_dilated_lattice(&g, t, -1.0).into_iter().map(|z| z * pref).collect(),
    );
    chirp(&dilated, t, ChirpSign::Forward)
}

/// Modulus of the dilated pseudo-conformal image, `2π|D_t U(1/4t) F^{-1} f̄|`,
/// which equals `|U(t)f|` pointwise for `t > 0` under this crate's
/// transform convention.
pub fn pseudo_conformal_modulus(f: &Field, t: f64) -> Result<Vec<f64>> {
    f.expect(Representation::Physical)?;
    require_resolved(f.grid(), t)?;
    if t < 0.0 {
        return Err(Error::InvalidParameter("pseudo-conformal modulus needs t > 0".into()));
    }
    // w = F^{-1}[e^{-iη²/4t} f̄(η)], evaluated at y = x/(2t)
    let g = chirp(&f.conj(), t, ChirpSign::Inverse)?;
    let w = transform_on_dilated_lattice(&g, t, 1.0);
    let scale = (4.0 * PI * t).powf(-0.5); // |D_t| prefactor; 2π cancels the (2π)^{-1} of F^{-1}
    Ok(w.into_iter().map(|z| z.norm() * scale).collect())
}

/// How [`twisted_cubic`] evaluates `U(-t)[u1 ū2 u3]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CubicMode {
    /// `propagate(u1 ū2 u3, -t)`, valid for every t.
    Direct,
    /// The chirped triple convolution scaled by a calibrated constant.
    Factorized(Complex64),
}

/// Triple convolution form for twisted inputs `v_j`, with constant `c`:
/// `c t^{-1} M_t^{-1}[(M_t v1) * R(conj M_t v2) * (M_t v3)]`.
pub(crate) fn factorized_cubic_twisted(
    v1: &Field,
    v2: &Field,
    v3: &Field,
    t: f64,
    c: Complex64,
) -> Result<Field> {
    require_resolved(v1.grid(), t)?;
    if t < 0.0 {
        // the identity is algebraic in t; reduce to t > 0 by conjugation
        return Ok(factorized_cubic_twisted(&v1.conj(), &v2.conj(), &v3.conj(), -t, c.conj())?.conj());
    }
    let w1 = chirp(v1, t, ChirpSign::Forward)?;
    let w2 = reflect(&chirp(v2, t, ChirpSign::Forward)?.conj());
    let w3 = chirp(v3, t, ChirpSign::Forward)?;
    let conv = grid::linear_convolution(&[&w1, &w2, &w3])?;
    Ok(chirp(&conv, t, ChirpSign::Inverse)?.scale(c / t))
}

/// `U(-t)[u1 ū2 u3]` for snapshots `u_j` at a common time `t`.
pub fn twisted_cubic(u1: &Field, u2: &Field, u3: &Field, t: f64, mode: CubicMode) -> Result<Field> {
    match mode {
        CubicMode::Direct => propagate(&grid::cubic_product(u1, u2, u3)?, -t),
        CubicMode::Factorized(c) => {
            require_resolved(u1.grid(), t)?;
            let v1 = propagate(u1, -t)?;
            let v2 = propagate(u2, -t)?;
            let v3 = propagate(u3, -t)?;
            factorized_cubic_twisted(&v1, &v2, &v3, t, c)
        }
    }
}

/// The absolute constant of the cubic factorization, fitted against the
/// direct evaluation on one Gaussian triple at `t = 1` and then frozen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorizationCalibration {
    pub c_factor: Complex64,
    pub calibration_residual: f64,
}

impl FactorizationCalibration {
    pub const CALIBRATION_TIME: f64 = 1.0;

    pub fn calibrate(grid: Grid) -> Result<Self> {
        let t = Self::CALIBRATION_TIME;
        require_resolved(&grid, t)?;
        let g = |x0: f64, w: f64, k: f64| {
            Field::from_fn(grid, move |x| {
                let y = (x - x0) / w;
                Complex64::from_polar((-y * y).exp(), k * x)
            })
        };
        let u: Vec<Field> = [g(0.3, 1.0, 0.0), g(-0.5, 1.3, 0.7), g(0.0, 0.8, -0.4)]
            .iter()
            .map(|f| propagate(f, t))
            .collect::<Result<_>>()?;
        let direct = twisted_cubic(&u[0], &u[1], &u[2], t, CubicMode::Direct)?;
        let raw = twisted_cubic(&u[0], &u[1], &u[2], t, CubicMode::Factorized(Complex64::new(1.0, 0.0)))?;
        let num: Complex64 = raw.samples().iter().zip(direct.samples()).map(|(r, d)| r.conj() * d).sum();
        let den: f64 = raw.samples().iter().map(|r| r.norm_sqr()).sum();
        if den == 0.0 {
            return Err(Error::UndefinedRatio("calibration triple vanished".into()));
        }
        let c_factor = num / den;
        let fitted = raw.scale(c_factor);
        let calibration_residual =
            grid::lp_norm(&fitted.sub(&direct)?, 2.0)? / grid::lp_norm(&direct, 2.0)?;
        Ok(FactorizationCalibration { c_factor, calibration_residual })
    }

    pub fn mode(&self) -> CubicMode {
        CubicMode::Factorized(self.c_factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{lp_norm, Grid};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn rel_l2(a: &Field, b: &Field) -> f64 {
        lp_norm(&a.sub(b).unwrap(), 2.0).unwrap() / lp_norm(b, 2.0).unwrap()
    }

    fn gaussian_solution(grid: Grid, t: f64) -> Field {
        // e^{-x²} evolves to (1+4it)^{-1/2} e^{-x²/(1+4it)}
        let d = Complex64::new(1.0, 4.0 * t);
        Field::from_fn(grid, |x| (-(x * x) / d).exp() / d.sqrt())
    }

    fn band_limited(grid: Grid, seed: u64) -> Field {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<Complex64> = (0..grid.n_points())
            .map(|k| {
                if grid.frequency_at_slot(k).abs() < 0.5 * grid.nyquist() {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        grid::inverse_transform(&Field::new(grid, coeffs, Representation::Frequency).unwrap()).unwrap()
    }

    #[test]
    fn propagate_zero_time_is_identity() {
        let grid = Grid::new(64, 10.0).unwrap();
        let f = band_limited(grid, 1);
        assert_eq!(propagate(&f, 0.0).unwrap(), f);
    }

    #[test]
    fn propagate_matches_gaussian_closed_form() {
        let grid = Grid::new(4096, 80.0).unwrap();
        let phi = Field::from_real_fn(grid, |x| (-x * x).exp());
        for t in [0.25, 0.5, 1.0, 2.0] {
            let err = rel_l2(&propagate(&phi, t).unwrap(), &gaussian_solution(grid, t));
            assert!(err <= 1e-6, "t={t}: {err}");
        }
    }

    #[test]
    fn propagate_is_unitary() {
        let grid = Grid::new(256, 20.0).unwrap();
        for seed in 0..5 {
            let f = band_limited(grid, seed);
            let n0 = lp_norm(&f, 2.0).unwrap();
            for t in [-3.0, 0.1, 2.7] {
                let n1 = lp_norm(&propagate(&f, t).unwrap(), 2.0).unwrap();
                assert!((n1 / n0 - 1.0).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn group_law(seed in 0u64..200, s in -4.0f64..4.0, t in -4.0f64..4.0) {
            let grid = Grid::new(128, 20.0).unwrap();
            let f = band_limited(grid, seed);
            let two = propagate(&propagate(&f, s).unwrap(), t).unwrap();
            let one = propagate(&f, s + t).unwrap();
            prop_assert!(rel_l2(&two, &one) < 1e-12);
        }

        #[test]
        fn trilinearity(seed in 0u64..100, a_re in -2.0f64..2.0, a_im in -2.0f64..2.0) {
            let grid = Grid::new(64, 20.0).unwrap();
            let a = Complex64::new(a_re, a_im);
            let u = band_limited(grid, seed);
            let w = band_limited(grid, seed + 1000);
            let t = 0.7;
            let base = twisted_cubic(&u, &w, &u, t, CubicMode::Direct).unwrap();
            let lin1 = twisted_cubic(&u.scale(a), &w, &u, t, CubicMode::Direct).unwrap();
            let anti2 = twisted_cubic(&u, &w.scale(a), &u, t, CubicMode::Direct).unwrap();
            let scale = base.max_modulus() * (1.0 + a.norm());
            for k in 0..grid.n_points() {
                prop_assert!((lin1.samples()[k] - a * base.samples()[k]).norm() < 1e-12 * scale);
                prop_assert!((anti2.samples()[k] - a.conj() * base.samples()[k]).norm() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn chirp_is_unimodular_and_invertible() {
        let grid = Grid::new(128, 20.0).unwrap();
        let f = band_limited(grid, 3);
        let c = chirp(&f, 0.9, ChirpSign::Forward).unwrap();
        for (a, b) in c.samples().iter().zip(f.samples()) {
            assert!((a.norm() - b.norm()).abs() <= 4.0 * f64::EPSILON * b.norm());
        }
        let back = chirp(&c, 0.9, ChirpSign::Inverse).unwrap();
        for (a, b) in back.samples().iter().zip(f.samples()) {
            assert!((a - b).norm() <= 4.0 * f64::EPSILON * b.norm());
        }
        assert!(chirp(&f, 0.0, ChirpSign::Forward).is_err());
    }

    #[test]
    fn chirp_resolution_bound() {
        let grid = Grid::new(4096, 80.0).unwrap();
        let t_min = grid.chirp_t_min();
        // local chirp frequency x/2t at x_max stays below 0.8 Nyquist exactly at t_min
        assert!((grid.x_max() / (2.0 * t_min) - 0.8 * grid.nyquist()).abs() < 1e-9);
        assert!(grid.chirp_resolved(t_min * 1.01));
        assert!(!grid.chirp_resolved(t_min * 0.99));
    }

    #[test]
    fn reflection_identities() {
        let grid = Grid::new(256, 20.0).unwrap();
        let even = Field::from_real_fn(grid, |x| (-x * x).exp() * (1.0 + x * x));
        let odd = Field::from_real_fn(grid, |x| x * (-x * x).exp());
        assert!(lp_norm(&reflect(&even).sub(&even).unwrap(), 2.0).unwrap() < 1e-12);
        assert!(lp_norm(&reflect(&odd).add(&odd).unwrap(), 2.0).unwrap() < 1e-12);
        let f = band_limited(grid, 9);
        assert_eq!(reflect(&reflect(&f)), f);
        // F^{-1} conj(f) = R conj(F^{-1} f), reading f as a spectrum
        let spec = Field::new(grid, f.samples().to_vec(), Representation::Frequency).unwrap();
        let lhs = grid::inverse_transform(&spec.conj()).unwrap();
        let rhs = reflect(&grid::inverse_transform(&spec).unwrap().conj());
        assert!(rel_l2(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn factorized_propagation_agrees_with_multiplier() {
        let grid = Grid::new(4096, 80.0).unwrap();
        let phi = Field::from_fn(grid, |x| Complex64::from_polar((-x * x).exp(), 0.3 * x));
        for t in [0.25, 1.0, 2.0, -1.0] {
            let fact = factorized_propagate(&phi, t).unwrap();
            let mult = propagate(&phi, t).unwrap();
            assert!(rel_l2(&fact, &mult) <= 1e-6, "t={t}");
        }
        assert!(factorized_propagate(&phi, 0.0).is_err());
        assert!(matches!(
            factorized_propagate(&phi, 0.5 * grid.chirp_t_min()),
            Err(Error::UnresolvedChirp { .. })
        ));
    }

    #[test]
    fn factorized_modulus_ignores_outer_chirp() {
        let grid = Grid::new(2048, 60.0).unwrap();
        let phi = Field::from_real_fn(grid, |x| (-x * x).exp());
        let t = 1.0;
        let full = factorized_propagate(&phi, t).unwrap();
        let inner = chirp(&full, t, ChirpSign::Inverse).unwrap();
        for (a, b) in full.samples().iter().zip(inner.samples()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn modulus_identity_pointwise() {
        let grid = Grid::new(4096, 80.0).unwrap();
        let phi = Field::from_fn(grid, |x| Complex64::from_polar((-x * x / 2.0).exp(), 0.2 * x * x));
        for t in [0.5, 1.0, 2.0] {
            let lhs = propagate(&phi, t).unwrap().modulus();
            let rhs = pseudo_conformal_modulus(&phi, t).unwrap();
            let peak = lhs.iter().cloned().fold(0.0, f64::max);
            let worst = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-8 * peak, "t={t}: {worst}");
        }
    }

    #[test]
    fn calibrated_constant_is_inverse_four_pi() {
        let grid = Grid::new(2048, 60.0).unwrap();
        let cal = FactorizationCalibration::calibrate(grid).unwrap();
        assert!(cal.calibration_residual <= 1e-8, "{cal:?}");
        assert!((cal.c_factor - Complex64::new(1.0 / (4.0 * PI), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn twisted_cubic_zero_and_plane_wave() {
        let grid = Grid::new(64, 4.0 * 2.0 * PI).unwrap();
        let zero = Field::zeros(grid);
        let k = 2.0 * grid.frequency_spacing();
        let e = Field::from_fn(grid, |x| Complex64::from_polar(1.0, k * x));
        assert!(twisted_cubic(&zero, &e, &e, 0.4, CubicMode::Direct).unwrap().is_zero());
        for t in [0.0, 0.3, 1.7] {
            let u = propagate(&e, t).unwrap();
            let out = twisted_cubic(&u, &u, &u, t, CubicMode::Direct).unwrap();
            assert!(lp_norm(&out.sub(&e).unwrap(), f64::INFINITY).unwrap() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn twisted_cubic_direct_vs_factorized_on_gaussians() {
        let grid = Grid::new(4096, 80.0).unwrap();
        let cal = FactorizationCalibration::calibrate(grid).unwrap();
        let g = |x0: f64, w: f64| Field::from_real_fn(grid, move |x| (-((x - x0) / w).powi(2)).exp());
        let t = 1.0;
        let u: Vec<Field> = [g(0.0, 1.0), g(1.0, 0.7), g(-0.4, 1.5)]
            .iter()
            .map(|f| propagate(f, t).unwrap())
            .collect();
        let direct = twisted_cubic(&u[0], &u[1], &u[2], t, CubicMode::Direct).unwrap();
        let fact = twisted_cubic(&u[0], &u[1], &u[2], t, cal.mode()).unwrap();
        assert!(rel_l2(&fact, &direct) <= 1e-6);
        assert!(twisted_cubic(&u[0], &u[1], &u[2], 0.0, cal.mode()).is_err());
    }
}
