//! The trilinear Duhamel operator in twisted variables and the Picard
//! iteration built on it.
//!
//! With `u = U(t)v`, the equation `iu_t + u_xx + |u|²u = 0` becomes
//! `v(t) = φ + i𝒟(v,v,v)(t)`, where
//! `𝒟(v1,v2,v3)(t) = ∫_0^t U(−s)[u1 ū2 u3](s) ds`.

use crate::error::{Error, Result};
use crate::grid::{cubic_product, lp_norm, Field, Grid};
use crate::schrodinger::{propagate, CubicMode, FactorizationCalibration};
use crate::spaces::quadrature::cumulative_trapezoid;
use crate::spaces::{x_norm, SpaceSpec, TimeGrid, TrajectoryNorm, TwistedTrajectory};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Trilinear-estimate constant used for the default ball radius, frozen
/// from the seeded smoke test (see [`trilinear_ratio`]).
pub const DEFAULT_C_EST: f64 = 0.15;

pub const DEFAULT_EPSILON: f64 = 0.01;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `ε M^{−2p/(p−1)}`.
pub fn default_horizon(p: f64, m_bound: f64, epsilon: f64) -> f64 {
    epsilon * m_bound.powf(-2.0 * p / (p - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub p: f64,
    /// Radius `M` of the data ball `‖φ‖_p ≤ M`.
    pub m_bound: f64,
    pub epsilon: f64,
    /// Overrides `ε M^{−2p/(p−1)}`.
    pub horizon_t: Option<f64>,
    /// Overrides `16 C_est M³`.
    pub a_bound: Option<f64>,
    pub c_est: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub grid: Grid,
    pub time_intervals: usize,
    pub gamma: f64,
    /// Stop early once a contraction ratio reaches this value.
    pub abort_ratio: Option<f64>,
}

impl SolverParams {
    pub fn new(p: f64, m_bound: f64, grid: Grid) -> Self {
        SolverParams {
            p,
            m_bound,
            epsilon: DEFAULT_EPSILON,
            horizon_t: None,
            a_bound: None,
            c_est: DEFAULT_C_EST,
            tolerance: 1e-10,
            max_iterations: 60,
            grid,
            time_intervals: 64,
            gamma: 2.0,
            abort_ratio: None,
        }
    }

    pub fn with_horizon(mut self, t: f64) -> Self {
        self.horizon_t = Some(t);
        self
    }

    pub fn horizon(&self) -> f64 {
        self.horizon_t.unwrap_or_else(|| default_horizon(self.p, self.m_bound, self.epsilon))
    }

    pub fn a_bound(&self) -> f64 {
        self.a_bound.unwrap_or(16.0 * self.c_est * self.m_bound.powi(3))
    }

    pub fn timegrid(&self) -> Result<TimeGrid> {
        TimeGrid::graded(self.horizon(), self.time_intervals, self.gamma)
    }

    pub fn space(&self) -> Result<SpaceSpec> {
        SpaceSpec::canonical(self.p, self.horizon())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(2.0..4.0).contains(&self.p) {
            return bad(format!("p must lie in [2, 4), got {}", self.p));
        }
        if !(self.m_bound > 0.0 && self.epsilon > 0.0 && self.c_est > 0.0) {
            return bad("M, ε and C_est must be positive".into());
        }
        if !(self.horizon() > 0.0 && self.horizon().is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon()));
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.max_iterations < 2 {
            return bad("max_iterations must be at least 2".into());
        }
        Ok(())
    }
}

/// `U(−s)[u1 ū2 u3](s)` at one node, `u_j = U(s)v_j`.
pub fn duhamel_integrand(v1: &Field, v2: &Field, v3: &Field, s: f64, mode: CubicMode) -> Result<Field> {
    match mode {
        CubicMode::Direct => {
            let u1 = propagate(v1, s)?;
            let u2 = if std::ptr::eq(v1, v2) { u1.clone() } else { propagate(v2, s)? };
            let u3 = if std::ptr::eq(v1, v3) { u1.clone() } else { propagate(v3, s)? };
            propagate(&cubic_product(&u1, &u2, &u3)?, -s)
        }
        CubicMode::Factorized(c) => crate::schrodinger::factorized_cubic_twisted(v1, v2, v3, s, c),
    }
}

fn check_triple(v1: &TwistedTrajectory, v2: &TwistedTrajectory, v3: &TwistedTrajectory) -> Result<()> {
    if v1.timegrid() != v2.timegrid() || v1.timegrid() != v3.timegrid() {
        return Err(Error::InvalidParameter("trilinear inputs must share a time grid".into()));
    }
    if v1.grid() != v2.grid() || v1.grid() != v3.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Integrand samples at the nodes `indices`, evaluated in parallel.
fn integrand_at(
    v1: &TwistedTrajectory,
    v2: &TwistedTrajectory,
    v3: &TwistedTrajectory,
    indices: &[usize],
    mode: CubicMode,
) -> Result<Vec<Field>> {
    check_triple(v1, v2, v3)?;
    let nodes = v1.nodes();
    indices
        .par_iter()
        .map(|&m| {
            let (a, b, c) = (&v1.values()[m], &v2.values()[m], &v3.values()[m]);
            // keep pointer identity for the symmetric case
            if std::ptr::eq(v1, v2) && std::ptr::eq(v1, v3) {
                duhamel_integrand(a, a, a, nodes[m], mode)
            } else {
                duhamel_integrand(a, b, c, nodes[m], mode)
            }
        })
        .collect()
}

/// `𝒟(v1,v2,v3)` with the integrand as its analytic derivative. The
/// factorized mode fails at unresolved nodes, including `s = 0`; use
/// [`windowed_duhamel`] for comparisons away from the origin.
pub fn trilinear_d(
    v1: &TwistedTrajectory,
    v2: &TwistedTrajectory,
    v3: &TwistedTrajectory,
    mode: CubicMode,
) -> Result<TwistedTrajectory> {
    let all: Vec<usize> = (0..v1.len()).collect();
    let integrand = integrand_at(v1, v2, v3, &all, mode)?;
    let values = cumulative_trapezoid(v1.nodes(), &integrand)?;
    TwistedTrajectory::new(v1.timegrid().clone(), values, integrand)
}

/// `∫_{t_k}^{t_m} U(−s)[u1 ū2 u3] ds` for the nodes `t_m ≥ t_k`, where
/// `t_k` is the first node `≥ t_start`. Returns the nodes, integrals and
/// integrand samples.
pub fn windowed_duhamel(
    v1: &TwistedTrajectory,
    v2: &TwistedTrajectory,
    v3: &TwistedTrajectory,
    t_start: f64,
    mode: CubicMode,
) -> Result<(Vec<f64>, Vec<Field>, Vec<Field>)> {
    let k = v1.nodes().partition_point(|&s| s < t_start);
    let indices: Vec<usize> = (k..v1.len()).collect();
    if indices.len() < 2 {
        return Err(Error::InvalidParameter(format!("window starting at {t_start} holds fewer than two nodes")));
    }
    let integrand = integrand_at(v1, v2, v3, &indices, mode)?;
    let nodes: Vec<f64> = v1.nodes()[k..].to_vec();
    let values = cumulative_trapezoid(&nodes, &integrand)?;
    Ok((nodes, values, integrand))
}

/// `Φ(v) = φ + i𝒟(v,v,v)`; also returns the integrand samples.
fn picard_map(phi: &Field, v: &TwistedTrajectory) -> Result<(TwistedTrajectory, Vec<Field>)> {
    let d = trilinear_d(v, v, v, CubicMode::Direct)?;
    let (tg, values, integrand) = d.into_parts();
    let next_v = values.iter().map(|f| phi.axpy(I, f)).collect::<Result<Vec<_>>>()?;
    let next_dv = integrand.iter().map(|f| f.scale(I)).collect();
    Ok((TwistedTrajectory::new(tg, next_v, next_dv)?, integrand))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIterations,
    /// An iterate's `Ỹ` norm exceeded `10·a`.
    Diverged,
    /// A contraction ratio reached the configured abort threshold.
    RatioExceeded,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// `Ỹ` distances between successive iterates.
    pub iterate_distances: Vec<f64>,
    /// `L^∞_t L^p` distances between successive iterates.
    pub sup_distances: Vec<f64>,
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub iterations: usize,
    /// `Y` norm of the last iterate.
    pub final_y_norm: f64,
    /// `max_m ‖Φ(v)(t_m) − v(t_m)‖_p` for the returned iterate.
    pub residual: f64,
    /// Trapezoid error estimate from the half-resolution time grid.
    pub richardson_error: Option<f64>,
    pub horizon_t: f64,
    pub a_bound: f64,
    pub final_trajectory: TwistedTrajectory,
}

impl SolveReport {
    pub fn max_contraction_ratio(&self) -> Option<f64> {
        self.contraction_ratios.iter().copied().reduce(f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn sup_distance(a: &TwistedTrajectory, b: &TwistedTrajectory, p: f64) -> Result<f64> {
    a.sub(b)?.sup_norm(p)
}

fn richardson_estimate(nodes: &[f64], integrand: &[Field], p: f64) -> Result<Option<f64>> {
    if !(nodes.len() - 1).is_multiple_of(2) {
        return Ok(None);
    }
    let fine = cumulative_trapezoid(nodes, integrand)?;
    let coarse_nodes: Vec<f64> = nodes.iter().step_by(2).copied().collect();
    let coarse_integrand: Vec<Field> = integrand.iter().step_by(2).cloned().collect();
    let coarse = cumulative_trapezoid(&coarse_nodes, &coarse_integrand)?;
    let mut worst: f64 = 0.0;
    for (f, c) in fine.iter().step_by(2).zip(&coarse) {
        worst = worst.max(lp_norm(&f.sub(c)?, p)?);
    }
    Ok(Some(worst / 3.0))
}

/// Picard iteration `v⁰ ≡ φ`, `v^{n+1} = φ + i𝒟(vⁿ,vⁿ,vⁿ)` in the `Ỹ` metric.
pub fn picard_solve(phi: &Field, params: &SolverParams) -> Result<SolveReport> {
    params.validate()?;
    if phi.grid() != &params.grid {
        return Err(Error::GridMismatch);
    }
    let norm = lp_norm(phi, params.p)?;
    if norm > params.m_bound * (1.0 + 1e-12) {
        log::warn!("‖φ‖_p = {norm} exceeds the ball radius M = {}", params.m_bound);
    }
    let spec = params.space()?;
    let a_bound = params.a_bound();
    let tg = params.timegrid()?;

    let mut v = TwistedTrajectory::constant(tg, phi)?;
    let mut distances = Vec::new();
    let mut sup_distances = Vec::new();
    let mut ratios = Vec::new();
    let mut stop = StopReason::MaxIterations;

    for _ in 0..params.max_iterations {
        let (next, _) = picard_map(phi, &v)?;
        let diff = next.sub(&v)?;
        let d = x_norm(&diff, &spec)?.tilde;
        sup_distances.push(diff.sup_norm(params.p)?);
        let mut ratio_exceeded = false;
        if let Some(&prev) = distances.last() {
            if prev > 0.0 {
                ratios.push(d / prev);
                ratio_exceeded = params.abort_ratio.is_some_and(|a| d / prev >= a);
            }
        }
        distances.push(d);
        let size = x_norm(&next, &spec)?.tilde;
        v = next;
        if !size.is_finite() || size > 10.0 * a_bound {
            stop = StopReason::Diverged;
            break;
        }
        if d <= params.tolerance {
            stop = StopReason::Converged;
            break;
        }
        if ratio_exceeded {
            stop = StopReason::RatioExceeded;
            break;
        }
    }

    // one more application measures the integral-equation defect
    let (image, integrand) = picard_map(phi, &v)?;
    let residual = sup_distance(&image, &v, params.p)?;
    let converged = stop == StopReason::Converged && residual <= 10.0 * params.tolerance;
    let TrajectoryNorm { full, .. } = x_norm(&v, &spec)?;
    let richardson_error = richardson_estimate(v.nodes(), &integrand, params.p)?;
    Ok(SolveReport {
        iterations: distances.len(),
        iterate_distances: distances,
        sup_distances,
        contraction_ratios: ratios,
        converged,
        stop_reason: stop,
        final_y_norm: full,
        residual,
        richardson_error,
        horizon_t: params.horizon(),
        a_bound,
        final_trajectory: v,
    })
}

/// One-step Lipschitz ratio of `Φ = Φ_{φ1}` in the `Ỹ` metric.
///
/// The two trajectories `w_j = φ1 + i𝒟(φ_j)` (free-flow seeds) share the
/// data `φ1` and differ through the data `φ_j` of their Duhamel term; the
/// ratio is `‖𝒟(w1) − 𝒟(w2)‖_X̃ / ‖w1 − w2‖_X̃`.
pub fn contraction_probe(phi1: &Field, phi2: &Field, params: &SolverParams) -> Result<f64> {
    params.validate()?;
    let spec = params.space()?;
    let tg = params.timegrid()?;
    let seed = |phi: &Field| -> Result<TwistedTrajectory> {
        let free = TwistedTrajectory::constant(tg.clone(), phi)?;
        Ok(trilinear_d(&free, &free, &free, CubicMode::Direct)?.scale(I))
    };
    let base = TwistedTrajectory::constant(tg.clone(), phi1)?;
    let shift = |d: TwistedTrajectory| -> Result<TwistedTrajectory> {
        let (tg, v, dv) = d.into_parts();
        let v = v.iter().zip(base.values()).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
        TwistedTrajectory::new(tg, v, dv)
    };
    let w1 = shift(seed(phi1)?)?;
    let w2 = shift(seed(phi2)?)?;
    let denominator = x_norm(&w1.sub(&w2)?, &spec)?.tilde;
    if !(denominator > 0.0) {
        return Err(Error::UndefinedRatio(
            "probe trajectories coincide in Ỹ; the data pair must differ with nonzero Duhamel terms".into(),
        ));
    }
    let d1 = trilinear_d(&w1, &w1, &w1, CubicMode::Direct)?;
    let d2 = trilinear_d(&w2, &w2, &w2, CubicMode::Direct)?;
    Ok(x_norm(&d1.sub(&d2)?, &spec)?.tilde / denominator)
}

/// `X̃(𝒟(v1,v2,v3)) / ∏ X^p_{1,0}(v_j)` for one triple, canonical exponents.
pub fn trilinear_ratio(
    v1: &TwistedTrajectory,
    v2: &TwistedTrajectory,
    v3: &TwistedTrajectory,
    p: f64,
) -> Result<f64> {
    let horizon = v1.timegrid().horizon();
    let canonical = SpaceSpec::canonical(p, horizon)?;
    let integrable = SpaceSpec::integrable(p, horizon)?;
    let num = x_norm(&trilinear_d(v1, v2, v3, CubicMode::Direct)?, &canonical)?.tilde;
    let mut den = 1.0;
    for v in [v1, v2, v3] {
        den *= x_norm(v, &integrable)?.full;
    }
    if !(den > 0.0) {
        return Err(Error::UndefinedRatio("a trilinear input has zero X^p_{1,0} norm".into()));
    }
    Ok(num / den)
}

/// Agreement of the direct and factorized integrands over `[t_start, T]`,
/// as the relative `X̃`-type distance of the windowed Duhamel integrals.
pub fn factorization_agreement(
    v1: &TwistedTrajectory,
    v2: &TwistedTrajectory,
    v3: &TwistedTrajectory,
    t_start: f64,
    calibration: &FactorizationCalibration,
    p: f64,
) -> Result<f64> {
    let (nodes, _, direct) = windowed_duhamel(v1, v2, v3, t_start, CubicMode::Direct)?;
    let (_, _, fact) = windowed_duhamel(v1, v2, v3, t_start, calibration.mode())?;
    let spec = SpaceSpec::canonical(p, v1.timegrid().horizon())?;
    let weight = spec.theta * spec.q;
    let mut num = Vec::with_capacity(nodes.len());
    let mut den = Vec::with_capacity(nodes.len());
    for (d, f) in direct.iter().zip(&fact) {
        num.push(lp_norm(&d.sub(f)?, p)?.powf(spec.q));
        den.push(lp_norm(d, p)?.powf(spec.q));
    }
    let n = crate::spaces::quadrature::weighted_integral(&nodes, &num, weight)?;
    let d = crate::spaces::quadrature::weighted_integral(&nodes, &den, weight)?;
    if !(d > 0.0) {
        return Err(Error::UndefinedRatio("direct integrand vanishes on the window".into()));
    }
    Ok((n / d).powf(1.0 / spec.q))
}

/// Settings of [`tmax_scan`], stated at `M = 1`; grid length and
/// tolerance are carried to other `M` by the equation's dilation symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmaxSettings {
    pub base_grid: Grid,
    pub time_intervals: usize,
    pub gamma: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Stop bisecting once `T_hi / T_lo ≤ 1 + bisection_rel`.
    pub bisection_rel: f64,
    /// Initial guess `T = ε M^{−2p/(p−1)}`.
    pub epsilon: f64,
    pub c_est: f64,
}

impl TmaxSettings {
    pub fn new(base_grid: Grid) -> Self {
        TmaxSettings {
            base_grid,
            time_intervals: 32,
            gamma: 2.0,
            tolerance: 1e-9,
            max_iterations: 80,
            bisection_rel: 0.01,
            epsilon: 0.1,
            c_est: DEFAULT_C_EST,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TmaxPoint {
    pub m: f64,
    /// Geometric midpoint of the final bracket.
    pub t_star: Option<f64>,
    pub bracket: Option<(f64, f64)>,
    pub solves: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TmaxScan {
    pub p: f64,
    pub points: Vec<TmaxPoint>,
    pub fit: Option<crate::fit::PowerFit>,
}

const BRACKET_STEPS: usize = 40;

/// Largest `T` for which Picard converges with all contraction ratios
/// below 1/2, for data `φ_M = λφ₀(λx)` with `‖φ₀‖_p = 1` and
/// `λ = M^{p/(p−1)}` so that `‖φ_M‖_p = M`.
pub fn tmax_scan(p: f64, m_values: &[f64], shape: &crate::data::DataShape, settings: &TmaxSettings) -> Result<TmaxScan> {
    if m_values.is_empty() || m_values.iter().any(|&m| !(m > 0.0)) || m_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("M values must be positive and increasing".into()));
    }
    let base_norm = lp_norm(&shape.sample(settings.base_grid)?, p)?;
    if !(base_norm > 0.0) {
        return Err(Error::InvalidParameter("data shape vanishes on the base grid".into()));
    }
    let points: Vec<TmaxPoint> = m_values
        .par_iter()
        .map(|&m| match tmax_point(p, m, shape, base_norm, settings) {
            Ok(point) => point,
            Err(e) => TmaxPoint { m, t_star: None, bracket: None, solves: 0, error: Some(e.to_string()) },
        })
        .collect();
    let (ms, ts): (Vec<f64>, Vec<f64>) = points.iter().filter_map(|pt| pt.t_star.map(|t| (pt.m, t))).unzip();
    let fit = if ms.len() >= 2 { Some(crate::fit::power_fit(&ms, &ts)?) } else { None };
    Ok(TmaxScan { p, points, fit })
}

fn tmax_point(p: f64, m: f64, shape: &crate::data::DataShape, base_norm: f64, s: &TmaxSettings) -> Result<TmaxPoint> {
    let lambda = m.powf(p / (p - 1.0));
    let grid = Grid::new(s.base_grid.n_points(), s.base_grid.length() / lambda)?;
    let phi = shape.sample_dilated(grid, lambda)?.scale_real(lambda / base_norm);
    let mut solves = 0;
    let mut accept = |t: f64| -> Result<bool> {
        solves += 1;
        let mut params = SolverParams::new(p, m, grid).with_horizon(t);
        params.c_est = s.c_est;
        params.tolerance = s.tolerance * m.powi(3);
        params.max_iterations = s.max_iterations;
        params.time_intervals = s.time_intervals;
        params.gamma = s.gamma;
        params.abort_ratio = Some(0.5);
        let report = picard_solve(&phi, &params)?;
        Ok(report.converged && report.max_contraction_ratio().is_none_or(|r| r < 0.5))
    };
    let guess = default_horizon(p, m, s.epsilon);
    let (mut lo, mut hi);
    if accept(guess)? {
        lo = guess;
        hi = 2.0 * guess;
        let mut steps = 0;
        while accept(hi)? {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps == BRACKET_STEPS {
                return Err(Error::Bracket(format!("no failing horizon found up to {hi} for M = {m}")));
            }
        }
    } else {
        hi = guess;
        lo = 0.5 * guess;
        let mut steps = 0;
        while !accept(lo)? {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps == BRACKET_STEPS {
                return Err(Error::Bracket(format!("no converging horizon found down to {lo} for M = {m}")));
            }
        }
    }
    while hi / lo > 1.0 + s.bisection_rel {
        let mid = (lo * hi).sqrt();
        if accept(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(TmaxPoint { m, t_star: Some((lo * hi).sqrt()), bracket: Some((lo, hi)), solves, error: None })
}
