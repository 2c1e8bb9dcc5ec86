//! Strang split-step integrator for `iu_t + u_xx + |u|²u = 0`, kept free
//! of any Duhamel machinery so that it can serve as an oracle, and
//! trajectory comparison.

use crate::error::{Error, Result};
use crate::grid::{apply_multiplier, lp_norm, Field, Representation};
use crate::spaces::{PhysicalTrajectory, TimeGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitStepParams {
    /// Largest step; steps shrink to land on every output time.
    pub dt: f64,
}

impl SplitStepParams {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        Ok(SplitStepParams { dt })
    }
}

fn linear_step(u: &Field, tau: f64) -> Result<Field> {
    apply_multiplier(u, |xi| Complex64::from_polar(1.0, -tau * xi * xi))
}

fn nonlinear_step(u: &Field, tau: f64) -> Field {
    u.map(|z| z * Complex64::from_polar(1.0, tau * z.norm_sqr()))
}

fn strang_step(u: &Field, tau: f64) -> Result<Field> {
    linear_step(&nonlinear_step(&linear_step(u, 0.5 * tau)?, tau), 0.5 * tau)
}

/// `∂_t u = i u_xx + i|u|²u`.
fn time_derivative(u: &Field) -> Result<Field> {
    let dispersive = apply_multiplier(u, |xi| Complex64::new(0.0, -xi * xi))?;
    let nonlinear = u.map(|z| Complex64::new(0.0, z.norm_sqr()) * z);
    dispersive.add(&nonlinear)
}

/// Solves from `φ` and samples the solution at the nodes of `output`.
pub fn splitstep_solve(phi: &Field, params: &SplitStepParams, output: &TimeGrid) -> Result<PhysicalTrajectory> {
    phi.expect(Representation::Physical)?;
    let nodes = output.nodes();
    let mut u = phi.clone();
    let mut values = Vec::with_capacity(nodes.len());
    let mut derivs = Vec::with_capacity(nodes.len());
    values.push(u.clone());
    derivs.push(time_derivative(&u)?);
    for w in nodes.windows(2) {
        let span = w[1] - w[0];
        let steps = (span / params.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let tau = span / steps as f64;
        for _ in 0..steps {
            u = strang_step(&u, tau)?;
        }
        derivs.push(time_derivative(&u)?);
        values.push(u.clone());
    }
    PhysicalTrajectory::new(output.clone(), values, derivs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormDistance {
    pub p: f64,
    /// `max_t ‖a(t) − b(t)‖_p`.
    pub sup: f64,
    /// `‖a(T) − b(T)‖_p`.
    pub last: f64,
    /// `sup` divided by `max_t ‖b(t)‖_p` (equal to `sup` when `b ≡ 0`).
    pub sup_relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub distances: Vec<NormDistance>,
}

impl Comparison {
    pub fn get(&self, p: f64) -> Option<&NormDistance> {
        self.distances.iter().find(|d| d.p == p)
    }
}

/// Distances between two trajectories at the nodes of `a`; `b` is
/// interpolated (cubic Hermite) when its nodes differ.
pub fn compare(a: &PhysicalTrajectory, b: &PhysicalTrajectory, norms: &[f64]) -> Result<Comparison> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let same_nodes = a.timegrid() == b.timegrid();
    let b_values: Vec<Field> = if same_nodes {
        b.values().to_vec()
    } else {
        a.nodes().iter().map(|&t| b.value_at(t)).collect::<Result<_>>()?
    };
    let mut distances = Vec::with_capacity(norms.len());
    for &p in norms {
        let (mut sup, mut last, mut scale) = (0.0f64, 0.0, 0.0f64);
        for (x, y) in a.values().iter().zip(&b_values) {
            last = lp_norm(&x.sub(y)?, p)?;
            sup = sup.max(last);
            scale = scale.max(lp_norm(y, p)?);
        }
        let sup_relative = if scale > 0.0 { sup / scale } else { sup };
        distances.push(NormDistance { p, sup, last, sup_relative });
    }
    Ok(Comparison { distances })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn periodic_grid() -> Grid {
        Grid::new(64, 2.0 * std::f64::consts::PI * 4.0).unwrap()
    }

    fn plane_wave(grid: Grid, amp: Complex64, k: f64, t: f64) -> Field {
        let a2 = amp.norm_sqr();
        Field::from_fn(grid, |x| amp * Complex64::new(0.0, k * x - k * k * t + a2 * t).exp())
    }

    #[test]
    fn zero_and_plane_wave() {
        let grid = periodic_grid();
        let tg = TimeGrid::uniform(1.0, 10).unwrap();
        let params = SplitStepParams::new(0.01).unwrap();
        let z = splitstep_solve(&Field::zeros(grid), &params, &tg).unwrap();
        assert!(z.values().iter().all(Field::is_zero));

        let k = 3.0 * grid.frequency_spacing();
        let amp = Complex64::new(0.8, 0.4);
        let u = splitstep_solve(&plane_wave(grid, amp, k, 0.0), &params, &tg).unwrap();
        for (&t, ut) in tg.nodes().iter().zip(u.values()) {
            assert!(ut.sub(&plane_wave(grid, amp, k, t)).unwrap().max_modulus() < 1e-8);
        }

        // zero vs plane wave: distance is the plane wave's norm
        let c = compare(&z, &u, &[2.0]).unwrap();
        let norm = lp_norm(&u.values()[0], 2.0).unwrap();
        assert!((c.get(2.0).unwrap().sup - norm).abs() < 1e-10 * norm);
        let same = compare(&u, &u, &[2.0, 4.0]).unwrap();
        assert!(same.distances.iter().all(|d| d.sup == 0.0 && d.last == 0.0));
    }

    #[test]
    fn l2_conserved() {
        let grid = Grid::new(256, 40.0).unwrap();
        let phi = Field::from_real_fn(grid, |x| 1.5 * (-x * x).exp());
        let tg = TimeGrid::uniform(1.0, 5).unwrap();
        let u = splitstep_solve(&phi, &SplitStepParams::new(0.005).unwrap(), &tg).unwrap();
        let n0 = lp_norm(&phi, 2.0).unwrap();
        for ut in u.values() {
            assert!((lp_norm(ut, 2.0).unwrap() - n0).abs() < 1e-10 * n0);
        }
    }

    #[test]
    fn second_order_self_convergence() {
        let grid = Grid::new(256, 40.0).unwrap();
        let phi = Field::from_real_fn(grid, |x| (-x * x).exp());
        let tg = TimeGrid::uniform(0.5, 5).unwrap();
        let solve = |dt: f64| splitstep_solve(&phi, &SplitStepParams::new(dt).unwrap(), &tg).unwrap();
        let (a, b, c) = (solve(0.02), solve(0.01), solve(0.005));
        let e1 = compare(&a, &b, &[2.0]).unwrap().distances[0].sup;
        let e2 = compare(&b, &c, &[2.0]).unwrap().distances[0].sup;
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.3, "order {order}");
    }
}
