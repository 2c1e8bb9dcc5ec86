use super::quadrature::cumulative_trapezoid;
use super::timegrid::TimeGrid;
use crate::error::{Error, Result};
use crate::grid::{apply_multiplier, lp_norm, Field, Grid, Representation};
use crate::schrodinger::propagate;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

fn check_samples(timegrid: &TimeGrid, a: &[Field], b: &[Field]) -> Result<Grid> {
    if a.len() != timegrid.len() || b.len() != timegrid.len() {
        return Err(Error::InvalidParameter(format!(
            "{} time nodes but {} values and {} derivatives",
            timegrid.len(),
            a.len(),
            b.len()
        )));
    }
    let first = &a[0];
    for f in a.iter().chain(b) {
        f.expect(Representation::Physical)?;
        first.expect_same_grid(f)?;
    }
    Ok(*first.grid())
}

/// Cubic Hermite value at `t` from node values and derivatives.
fn hermite(nodes: &[f64], values: &[Field], derivs: &[Field], t: f64) -> Result<Field> {
    let last = nodes.len() - 1;
    if !(t >= nodes[0] && t <= nodes[last]) {
        return Err(Error::InvalidParameter(format!(
            "time {t} outside [{}, {}]",
            nodes[0], nodes[last]
        )));
    }
    let i = match nodes.partition_point(|&s| s <= t) {
        0 => 0,
        k if k > last => last - 1,
        k => k - 1,
    };
    if t == nodes[i] {
        return Ok(values[i].clone());
    }
    let h = nodes[i + 1] - nodes[i];
    let s = (t - nodes[i]) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    let c = |x: f64| Complex64::new(x, 0.0);
    values[i]
        .scale_real(h00)
        .axpy(c(h10 * h), &derivs[i])?
        .axpy(c(h01), &values[i + 1])?
        .axpy(c(h11 * h), &derivs[i + 1])
}

/// `v(t) = U(−t)u(t)` and `∂_t v` sampled on a time grid.
#[derive(Debug, Clone, Serialize)]
pub struct TwistedTrajectory {
    timegrid: TimeGrid,
    v: Vec<Field>,
    dv: Vec<Field>,
}

impl TwistedTrajectory {
    pub fn new(timegrid: TimeGrid, v: Vec<Field>, dv: Vec<Field>) -> Result<Self> {
        check_samples(&timegrid, &v, &dv)?;
        Ok(TwistedTrajectory { timegrid, v, dv })
    }

    /// `v ≡ φ`: the twisted form of free evolution.
    pub fn constant(timegrid: TimeGrid, phi: &Field) -> Result<Self> {
        phi.expect(Representation::Physical)?;
        let n = timegrid.len();
        Ok(TwistedTrajectory {
            timegrid,
            v: vec![phi.clone(); n],
            dv: vec![Field::zeros(*phi.grid()); n],
        })
    }

    pub fn timegrid(&self) -> &TimeGrid {
        &self.timegrid
    }

    pub fn nodes(&self) -> &[f64] {
        self.timegrid.nodes()
    }

    pub fn grid(&self) -> &Grid {
        self.v[0].grid()
    }

    pub fn values(&self) -> &[Field] {
        &self.v
    }

    pub fn derivatives(&self) -> &[Field] {
        &self.dv
    }

    pub fn initial(&self) -> &Field {
        &self.v[0]
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn into_parts(self) -> (TimeGrid, Vec<Field>, Vec<Field>) {
        (self.timegrid, self.v, self.dv)
    }

    /// `v(t)` off the nodes by cubic Hermite interpolation.
    pub fn value_at(&self, t: f64) -> Result<Field> {
        hermite(self.nodes(), &self.v, &self.dv, t)
    }

    /// Nodewise `self − other` (values and derivatives).
    pub fn sub(&self, other: &TwistedTrajectory) -> Result<TwistedTrajectory> {
        if self.timegrid != other.timegrid {
            return Err(Error::InvalidParameter("trajectories live on different time grids".into()));
        }
        let diff = |a: &[Field], b: &[Field]| a.iter().zip(b).map(|(x, y)| x.sub(y)).collect::<Result<Vec<_>>>();
        Ok(TwistedTrajectory {
            timegrid: self.timegrid.clone(),
            v: diff(&self.v, &other.v)?,
            dv: diff(&self.dv, &other.dv)?,
        })
    }

    /// Nodewise multiplication by a constant.
    pub fn scale(&self, c: Complex64) -> TwistedTrajectory {
        TwistedTrajectory {
            timegrid: self.timegrid.clone(),
            v: self.v.iter().map(|f| f.scale(c)).collect(),
            dv: self.dv.iter().map(|f| f.scale(c)).collect(),
        }
    }

    /// `max_m ‖v(t_m)‖_p`.
    pub fn sup_norm(&self, p: f64) -> Result<f64> {
        let norms: Vec<f64> = self.v.par_iter().map(|f| lp_norm(f, p)).collect::<Result<_>>()?;
        Ok(norms.into_iter().fold(0.0, f64::max))
    }

    /// Largest relative L² gap between `v(t_m) − v(0)` and the trapezoid
    /// integral of `∂_t v` over `[0, t_m]`.
    pub fn consistency_defect(&self) -> Result<f64> {
        let integral = cumulative_trapezoid(self.nodes(), &self.dv)?;
        let scale = self
            .v
            .iter()
            .map(|f| lp_norm(f, 2.0))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for (vm, im) in self.v.iter().zip(&integral) {
            let gap = vm.sub(&self.v[0])?.sub(im)?;
            worst = worst.max(lp_norm(&gap, 2.0)?);
        }
        Ok(if scale > 0.0 { worst / scale } else { worst })
    }

    /// `u = U(t)v`, `∂_t u = U(t)∂_t v − iξ²u`.
    pub fn untwist(&self) -> Result<PhysicalTrajectory> {
        let pairs: Vec<(Field, Field)> = self
            .nodes()
            .par_iter()
            .zip(self.v.par_iter().zip(self.dv.par_iter()))
            .map(|(&t, (v, dv))| {
                let u = propagate(v, t)?;
                let du = propagate(dv, t)?.add(&apply_multiplier(&u, |xi| Complex64::new(0.0, -xi * xi))?)?;
                Ok((u, du))
            })
            .collect::<Result<_>>()?;
        let (u, du) = pairs.into_iter().unzip();
        PhysicalTrajectory::new(self.timegrid.clone(), u, du)
    }
}

/// `u(t)` and `∂_t u` sampled on a time grid.
#[derive(Debug, Clone, Serialize)]
pub struct PhysicalTrajectory {
    timegrid: TimeGrid,
    u: Vec<Field>,
    du: Vec<Field>,
}

impl PhysicalTrajectory {
    pub fn new(timegrid: TimeGrid, u: Vec<Field>, du: Vec<Field>) -> Result<Self> {
        check_samples(&timegrid, &u, &du)?;
        Ok(PhysicalTrajectory { timegrid, u, du })
    }

    /// Free evolution `U(t)φ` with its exact time derivative.
    pub fn free(timegrid: TimeGrid, phi: &Field) -> Result<Self> {
        TwistedTrajectory::constant(timegrid, phi)?.untwist()
    }

    pub fn timegrid(&self) -> &TimeGrid {
        &self.timegrid
    }

    pub fn nodes(&self) -> &[f64] {
        self.timegrid.nodes()
    }

    pub fn grid(&self) -> &Grid {
        self.u[0].grid()
    }

    pub fn values(&self) -> &[Field] {
        &self.u
    }

    pub fn derivatives(&self) -> &[Field] {
        &self.du
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `u(t)` off the nodes by cubic Hermite interpolation.
    pub fn value_at(&self, t: f64) -> Result<Field> {
        hermite(self.nodes(), &self.u, &self.du, t)
    }

    /// `v = U(−t)u`, `∂_t v = U(−t)(∂_t u + iξ²u)`.
    pub fn twist(&self) -> Result<TwistedTrajectory> {
        let pairs: Vec<(Field, Field)> = self
            .nodes()
            .par_iter()
            .zip(self.u.par_iter().zip(self.du.par_iter()))
            .map(|(&t, (u, du))| {
                let v = propagate(u, -t)?;
                let lin = du.add(&apply_multiplier(u, |xi| Complex64::new(0.0, xi * xi))?)?;
                Ok((v, propagate(&lin, -t)?))
            })
            .collect::<Result<_>>()?;
        let (v, dv) = pairs.into_iter().unzip();
        TwistedTrajectory::new(self.timegrid.clone(), v, dv)
    }
}
