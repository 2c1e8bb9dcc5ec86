//! One runner per experiment. Parameter tuples fan out over rayon and come
//! back in input order; each record's `params` holds its provenance.

use super::config::{ExperimentConfig, HomogeneousPart};
use super::record::ResultRecord;
use crate::data::DataShape;
use crate::duhamel::{default_horizon, picard_solve, tmax_scan, SolverParams, TmaxSettings, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::fit::{weighted_power_fit, PowerFit};
use crate::grid::{forward_transform, lp_norm, spectral_lp_norm, Field, Grid};
use crate::homogeneous::{membership_ladder, singularity_route, smoothing_ladder, SingularitySettings, SmoothingSettings};
use crate::illposed::{chirp_grid, chirp_growth, predicted_exponent, ChirpSettings};
use crate::spaces::{weighted_spacetime_norm, PhysicalTrajectory, StrichartzFamily, StrichartzSpec};
use crate::strichartz::{diagonal_exponent, doubled, global_spacetime_norm, GlobalNormSettings};
use crate::wellposed::{below_threshold, lipschitz_probe, persistence};
use num_rational::Ratio;
use rayon::prelude::*;
use serde_json::{json, Value};

fn list(values: &[f64], default: &[f64]) -> Vec<f64> {
    ExperimentConfig::list_or(values, default)
}

fn grid_json(g: &Grid) -> Value {
    json!({"n_points": g.n_points(), "length": g.length()})
}

fn drift(coarse: f64, fine: f64) -> f64 {
    (fine / coarse - 1.0).abs()
}

/// Log-log fit with the two largest points weighted by 1/4 when their
/// refinement drift exceeds `threshold`; `x` must be increasing.
pub fn fit_with_downweight(x: &[f64], y: &[f64], drifts: &[f64], threshold: f64) -> Result<PowerFit> {
    let n = x.len();
    let w: Vec<f64> = (0..n).map(|k| if k + 2 >= n && drifts[k] > threshold { 0.25 } else { 1.0 }).collect();
    weighted_power_fit(x, y, &w)
}

/// `(ρ, r)` pairs of the config, or the diagonal `3p′` pair.
fn exponent_pairs(c: &ExperimentConfig, p: f64, family: StrichartzFamily) -> Result<Vec<StrichartzSpec>> {
    if c.rho.is_empty() {
        return Ok(vec![StrichartzSpec::diagonal(p)?]);
    }
    c.rho
        .iter()
        .enumerate()
        .map(|(k, &rho)| match c.r.get(k) {
            Some(&r) => StrichartzSpec::new(family, rho, r, p, c.allow_condition_ii),
            None => StrichartzSpec::from_rho(family, rho, p, c.allow_condition_ii),
        })
        .map(|s| {
            s.map_err(|e| match e {
                Error::Inadmissible(m) => Error::Inadmissible(format!("p = {p}: {m}")),
                other => other,
            })
        })
        .collect()
}

fn data_battery(seed: u64) -> Vec<(&'static str, DataShape)> {
    vec![
        ("gaussian", DataShape::gaussian()),
        ("chirped_gaussian", DataShape::ChirpedGaussian { width: 1.5, chirp: 0.5 }),
        ("band_limited", DataShape::BandLimited { seed, modes: 8, cutoff: 2.0, envelope: 2.0 }),
    ]
}

fn space_time_ratio(phi: &Field, spec: &StrichartzSpec, settings: &GlobalNormSettings) -> Result<f64> {
    let lhs = global_spacetime_norm(phi, spec.rho, spec.r, spec.alpha, settings)?.value;
    Ok(lhs / spectral_lp_norm(&forward_transform(phi)?, spec.p)?)
}

fn spec_json(spec: &StrichartzSpec) -> Value {
    // JSON has no infinity
    let r = if spec.r.is_finite() { json!(spec.r) } else { json!("inf") };
    json!({"rho": spec.rho, "r": r, "alpha": spec.alpha})
}

/// Generalized Strichartz ratios `‖U(t)φ‖_{L^ρ_t L^r_x} / ‖φ̂‖_p` with
/// box/grid-doubling drift, the λ-ladder spread, and the exact weight
/// identity `2/(3p′) = (1−θ)/3` at `θ = −(1 − 2/p)`.
pub fn run_strichartz(c: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "strichartz";
    let th = c.thresholds;
    let base = Grid::new(c.grid_points.unwrap_or(2048), c.box_length.unwrap_or(80.0))?;
    let fine_grid = doubled(base)?;
    let intervals = c.time_intervals.unwrap_or(64);
    let coarse = GlobalNormSettings { time_intervals: intervals, ..Default::default() };
    let fine = GlobalNormSettings { time_intervals: 2 * intervals, ..Default::default() };
    let lambdas = list(&c.lambda_values, &[0.25, 0.5, 1.0, 2.0, 4.0]);
    let mut tuples = Vec::new();
    for p in list(&c.p, &[2.0, 2.5, 3.0]) {
        for spec in exponent_pairs(c, p, StrichartzFamily::OffDiagonal)? {
            for (name, shape) in data_battery(c.seed) {
                tuples.push((spec, name, shape));
            }
        }
    }
    let provenance = json!({"grid": grid_json(&base), "refined_grid": grid_json(&fine_grid),
        "time_intervals": intervals, "seed": c.seed});
    let ratios: Vec<(f64, f64)> = tuples
        .par_iter()
        .map(|(spec, _, shape)| {
            let r1 = space_time_ratio(&shape.sample(base)?, spec, &coarse)?;
            let r2 = space_time_ratio(&shape.sample(fine_grid)?, spec, &fine)?;
            Ok((r1, r2))
        })
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    let mut specs: Vec<StrichartzSpec> = Vec::new();
    for ((spec, name, _), (r1, r2)) in tuples.iter().zip(&ratios) {
        let d = drift(*r1, *r2);
        let params = json!({"p": spec.p, "exponents": spec_json(spec), "datum": name, "provenance": provenance});
        records.push(ResultRecord::new(NAME, params, "ratio", *r1, d, r1.is_finite() && d < th.drift));
        if !specs.contains(spec) {
            specs.push(*spec);
        }
    }
    // exact scale invariance: φ_λ = φ(λ·) leaves the ratio unchanged
    let ladders: Vec<Vec<f64>> = specs
        .par_iter()
        .map(|spec| {
            lambdas
                .iter()
                .map(|&l| space_time_ratio(&DataShape::gaussian().sample_dilated(fine_grid, l)?, spec, &coarse))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    for (spec, ladder) in specs.iter().zip(&ladders) {
        let max = ladder.iter().copied().fold(f64::MIN, f64::max);
        let min = ladder.iter().copied().fold(f64::MAX, f64::min);
        let spread = max / min - 1.0;
        let gauss_drift = tuples
            .iter()
            .zip(&ratios)
            .find(|((s, n, _), _)| s == spec && *n == "gaussian")
            .map(|(_, (a, b))| drift(*a, *b))
            .unwrap_or(0.0);
        let params = json!({"p": spec.p, "exponents": spec_json(spec), "datum": "gaussian",
            "lambda_values": lambdas, "grid": grid_json(&fine_grid), "seed": c.seed});
        records.push(ResultRecord::new(NAME, params, "lambda_spread", spread, gauss_drift, spread < th.scaling_spread));
    }
    for p in list(&c.p, &[2.0, 2.5, 3.0]) {
        let exact = Ratio::<i64>::approximate_float(p)
            .ok_or_else(|| Error::InvalidParameter(format!("p = {p} has no rational form")))?;
        let one = Ratio::from_integer(1);
        let p_conj = exact / (exact - one);
        let weight = Ratio::new(2, 3) / p_conj;
        let theta = -(one - Ratio::from_integer(2) / exact);
        let holds = weight == (one - theta) / Ratio::from_integer(3);
        let value = *weight.numer() as f64 / *weight.denom() as f64;
        let params = json!({"p": p, "weight": format!("{weight}"), "theta": format!("{theta}"),
            "space_time_exponent": diagonal_exponent(p)});
        records.push(ResultRecord::new(NAME, params, "str2_weight_exponent", value, 0.0, holds));
    }
    Ok(records)
}

/// Picard solves on a data battery scaled to `‖φ‖_p = M`, `sup_t H^{s,p}`
/// persistence under refinement, and paired-data Lipschitz ratios.
pub fn run_wellposed(c: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "wellposed";
    let th = c.thresholds;
    let grid = Grid::new(c.grid_points.unwrap_or(512), c.box_length.unwrap_or(40.0))?;
    let intervals = c.time_intervals.unwrap_or(64);
    let epsilon = c.epsilon.unwrap_or(DEFAULT_EPSILON);
    let a = c.a.first().copied().unwrap_or(0.3);
    let battery = [
        ("gaussian", DataShape::gaussian()),
        ("homogeneous", DataShape::Homogeneous { a, regularization: 0.05, radius: 10.0, filter: Some(8.0) }),
        ("band_limited", DataShape::BandLimited { seed: c.seed, modes: 8, cutoff: 2.0, envelope: 4.0 }),
    ];
    let params_for = |p: f64, m: f64| {
        let mut params = SolverParams::new(p, m, grid);
        params.time_intervals = intervals;
        params.epsilon = epsilon;
        params
    };
    let mut tuples = Vec::new();
    for p in list(&c.p, &[2.5]) {
        for s in list(&c.s, &[-0.3]) {
            for m in list(&c.m_values, &[1.0]) {
                for (name, shape) in &battery {
                    tuples.push((p, s, m, *name, shape.clone()));
                }
            }
        }
    }
    let provenance = json!({"grid": grid_json(&grid), "time_intervals": intervals, "epsilon": epsilon,
        "refinement": "n x2, intervals x2", "seed": c.seed});
    let outcomes: Vec<_> =
        tuples.par_iter().map(|(p, s, m, _, shape)| persistence(shape, *s, &params_for(*p, *m))).collect::<Result<_>>()?;
    let mut records = Vec::new();
    for ((p, s, m, name, _), r) in tuples.iter().zip(&outcomes) {
        let params = json!({"p": p, "s": s, "M": m, "datum": name, "below_threshold": below_threshold(*s, *p),
            "horizon_t": r.horizon_t, "provenance": provenance});
        let ratio = r.max_contraction_ratio.unwrap_or(0.0);
        records.push(ResultRecord::new(NAME, params.clone(), "converged", r.converged as u8 as f64, r.drift, r.converged));
        records.push(ResultRecord::new(NAME, params.clone(), "max_contraction_ratio", ratio, r.drift, ratio < th.contraction));
        records.push(ResultRecord::new(NAME, params.clone(), "y_norm", r.y_norm, r.drift, r.y_norm.is_finite()));
        let ok = r.sup_sobolev.is_finite() && r.drift < th.refinement_drift;
        records.push(ResultRecord::new(NAME, params, "sup_sobolev", r.sup_sobolev, r.drift, ok));
    }
    // Lipschitz pairs around the Gaussian datum
    let pairs = c.pairs.unwrap_or(10) as u64;
    let mut probes = Vec::new();
    for p in list(&c.p, &[2.5]) {
        for s in list(&c.s, &[-0.3]) {
            for m in list(&c.m_values, &[1.0]) {
                for k in 0..pairs {
                    probes.push((p, s, m, c.seed + k));
                }
            }
        }
    }
    let samples: Vec<_> = probes
        .par_iter()
        .map(|&(p, s, m, seed)| {
            let coarse = params_for(p, m);
            let mut fine = coarse;
            fine.grid = grid.refined(2)?;
            fine.time_intervals = 2 * intervals;
            let probe = |params: &SolverParams| {
                let phi = DataShape::gaussian().sample_normalized(params.grid, p, m)?;
                lipschitz_probe(&phi, s, 0.01, seed, params)
            };
            Ok((probe(&coarse)?, probe(&fine)?))
        })
        .collect::<Result<_>>()?;
    for ((p, s, m, seed), (a, b)) in probes.iter().zip(&samples) {
        let params = json!({"p": p, "s": s, "M": m, "datum": "gaussian", "perturbation_seed": seed,
            "perturbation_size": 0.01, "provenance": provenance});
        let ok = a.converged && a.ratio <= th.lipschitz_bound;
        records.push(ResultRecord::new(NAME, params, "lipschitz_ratio", a.ratio, drift(a.ratio, b.ratio), ok));
    }
    Ok(records)
}

/// Chirp focusing `G(N)` with refinement drift, the growth-exponent fit
/// against `s + 1 − 2/p`, and the regime check of the ladder.
pub fn run_illposed_chirp(c: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "illposed-chirp";
    let th = c.thresholds;
    let settings = ChirpSettings { t0: c.t0.unwrap_or(0.1), ..Default::default() };
    let fine = ChirpSettings { resolution: 2, ..settings };
    let cap = c.grid_points.unwrap_or(1 << 22);
    let widths = list(&c.n_values, &[8.0, 16.0, 32.0, 64.0, 128.0, 256.0]);
    let mut records = Vec::new();
    for p in list(&c.p, &[3.0]) {
        for s in list(&c.s, &[0.0, -1.0 / 3.0, -0.5]) {
            let predicted = predicted_exponent(s, p);
            let mut kept = Vec::new();
            for &n in &widths {
                let needed = chirp_grid(n, &fine)?.n_points();
                if needed > cap {
                    let params = json!({"p": p, "s": s, "N": n, "t0": settings.t0, "required_points": needed, "cap": cap});
                    records.push(ResultRecord::new(NAME, params, "dropped_unresolved", n, 0.0, true));
                } else {
                    kept.push(n);
                }
            }
            let points: Vec<_> = kept
                .par_iter()
                .map(|&n| Ok((chirp_growth(n, s, p, &settings)?, chirp_growth(n, s, p, &fine)?)))
                .collect::<Result<_>>()?;
            let drifts: Vec<f64> = points.iter().map(|(a, b)| drift(a.g, b.g)).collect();
            for ((a, b), d) in points.iter().zip(&drifts) {
                let params = json!({"p": p, "s": s, "N": a.width, "t0": settings.t0, "t_argmax": a.t_argmax,
                    "n_points": a.n_points, "refined_points": b.n_points});
                records.push(ResultRecord::new(NAME, params, "G", a.g, *d, a.g.is_finite()));
            }
            if points.len() < 2 {
                continue;
            }
            let x: Vec<f64> = points.iter().map(|q| q.0.width).collect();
            let g: Vec<f64> = points.iter().map(|q| q.0.g).collect();
            let fit = fit_with_downweight(&x, &g, &drifts, th.drift)?;
            let max_drift = drifts.iter().copied().fold(0.0, f64::max);
            let params = json!({"p": p, "s": s, "t0": settings.t0, "N_values": x, "predicted_exponent": predicted});
            let ok = (fit.exponent - predicted).abs() <= th.exponent_tolerance;
            records.push(
                ResultRecord::new(NAME, params.clone(), "growth_exponent", fit.exponent, max_drift, ok)
                    .with_fit(fit.exponent, fit.halfwidth),
            );
            // beyond the first ladder point G must fall below the threshold
            // and rise above it; at the threshold the fit alone decides
            let threshold = 2.0 / p - 1.0;
            let tail = &g[1..];
            let regime = if s < threshold - 1e-12 {
                Some(("non_increasing", tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + th.drift))))
            } else if s > threshold + 1e-12 {
                Some(("increasing", tail.windows(2).all(|w| w[1] > w[0])))
            } else {
                None
            };
            if let Some((label, ok)) = regime {
                let mut params = params;
                params["regime"] = json!(label);
                records.push(ResultRecord::new(NAME, params, "regime_check", ok as u8 as f64, max_drift, ok));
            }
        }
    }
    Ok(records)
}

/// Membership ladder, `L²` smoothing, and the singularity route.
pub fn run_homogeneous(c: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "homogeneous";
    let th = c.thresholds;
    let parts = c.homogeneous_parts();
    let mut records = Vec::new();
    if parts.contains(&HomogeneousPart::Membership) {
        let ps = list(&c.p, &[1.5, 2.5, 4.0 - 1e-3]);
        let base_length = c.box_length.unwrap_or(2048.0);
        let t = c.t0.unwrap_or(1.0);
        // each ladder holds fields of up to L²/2π points; run them one by one
        for a in list(&c.a, &[0.3, 0.45, 0.6]) {
            for row in membership_ladder(a, &ps, base_length, 3, t, th.drift)? {
                let params = json!({"part": "membership", "a": row.a, "p": row.p, "t": t, "lengths": row.lengths,
                    "norms": row.norms, "saturates": row.saturates, "predicted_saturation": row.predicted});
                let last = *row.norms.last().unwrap();
                let d = *row.drifts.last().unwrap();
                records.push(ResultRecord::new(NAME, params, "lp_norm", last, d, row.matches_criterion()));
            }
        }
    }
    if parts.contains(&HomogeneousPart::Smoothing) {
        let defaults = SmoothingSettings::default();
        let settings = SmoothingSettings {
            base_length: c.box_length.unwrap_or(defaults.base_length),
            time_intervals: c.time_intervals.unwrap_or(defaults.time_intervals),
            ..defaults
        };
        for a in list(&c.a, &[0.45]) {
            for p in list(&c.p, &[2.5]) {
                let r = smoothing_ladder(a, p, &settings)?;
                let drifts = r.duhamel_drifts();
                let growth = r.data_growth();
                let max_drift = drifts.iter().copied().fold(0.0, f64::max);
                let min_growth = growth.iter().copied().fold(f64::INFINITY, f64::min);
                let params = json!({"part": "smoothing", "a": a, "p": p, "lengths": r.lengths, "M": r.m_bound,
                    "horizon_t": r.horizon_t, "spacing": settings.spacing, "amplitude": settings.amplitude,
                    "time_intervals": settings.time_intervals, "duhamel_l2": r.duhamel_l2, "data_l2": r.data_l2,
                    "converged": r.converged});
                let all_converged = r.converged.iter().all(|c| *c);
                records.push(ResultRecord::new(
                    NAME,
                    params.clone(),
                    "duhamel_l2_drift",
                    max_drift,
                    max_drift,
                    all_converged && max_drift < th.refinement_drift,
                ));
                records.push(ResultRecord::new(NAME, params, "data_l2_growth", min_growth, max_drift, min_growth >= th.data_growth));
            }
        }
    }
    if parts.contains(&HomogeneousPart::Singularity) {
        let defaults = SingularitySettings::default();
        let settings = SingularitySettings {
            t0: c.t0.unwrap_or(defaults.t0),
            delta: c.delta.unwrap_or(defaults.delta),
            length: c.box_length.unwrap_or(defaults.length),
            base_points: c.grid_points.unwrap_or(defaults.base_points),
            levels: defaults.levels,
        };
        let mut tuples = Vec::new();
        for a in list(&c.a, &[0.5]) {
            for p in list(&c.p, &[2.5]) {
                for s in list(&c.s, &[0.0]) {
                    tuples.push((a, p, s));
                }
            }
        }
        let reports: Vec<_> =
            tuples.par_iter().map(|&(a, p, s)| singularity_route(a, s, p, &settings)).collect::<Result<_>>()?;
        for r in reports {
            let divergent = r.predicted_increment_exponent > 0.0;
            let params = json!({"part": "singularity", "a": r.a, "p": r.p, "s": r.s, "t0": settings.t0,
                "delta": settings.delta, "length": settings.length, "n_points": r.n_points,
                "window_norms": r.window_norms, "predicted_increment_exponent": r.predicted_increment_exponent,
                "divergent": divergent});
            let last_drift = *r.window_drifts().last().unwrap();
            let record = match &r.increment_fit {
                Some(fit) => {
                    let ok = (fit.exponent - r.predicted_increment_exponent).abs() <= th.exponent_tolerance
                        && (r.grows_monotonically() || !divergent);
                    ResultRecord::new(NAME, params.clone(), "increment_exponent", fit.exponent, last_drift, ok)
                        .with_fit(fit.exponent, fit.halfwidth)
                }
                None => ResultRecord::new(NAME, params.clone(), "increment_exponent", f64::NAN, last_drift, false),
            };
            records.push(record);
            let far = *r.far_field_norms.last().unwrap();
            let far_drift = *r.far_field_drifts().last().unwrap();
            records.push(ResultRecord::new(NAME, params, "far_field_norm", far, far_drift, r.far_field_bounded(th.drift)));
        }
    }
    Ok(records)
}

/// Weighted space-time norms of the free flow (globally in time) and of
/// the solution on `[0, T_M]`, as ratios to `‖φ‖_p`.
pub fn run_strichartz_regularity(c: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "strichartz-reg";
    let th = c.thresholds;
    let grid = Grid::new(c.grid_points.unwrap_or(1024), c.box_length.unwrap_or(40.0))?;
    let fine_grid = doubled(grid)?;
    let intervals = c.time_intervals.unwrap_or(64);
    let m = c.m_values.first().copied().unwrap_or(1.0);
    let mut tuples = Vec::new();
    for p in list(&c.p, &[2.0]) {
        if let Some(alpha) = c.alpha {
            if (alpha - (1.0 / p - 0.5)).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("alpha must equal 1/p - 1/2 = {} at p = {p}", 1.0 / p - 0.5)));
            }
        }
        for spec in exponent_pairs(c, p, StrichartzFamily::Regularity)? {
            for (name, shape) in data_battery(c.seed).into_iter().take(2) {
                tuples.push((spec, name, shape));
            }
        }
    }
    let measure = |spec: &StrichartzSpec, shape: &DataShape, grid: Grid, intervals: usize| -> Result<[f64; 3]> {
        let phi = shape.sample_normalized(grid, spec.p, m)?;
        let settings = GlobalNormSettings { time_intervals: intervals, ..Default::default() };
        let global = global_spacetime_norm(&phi, spec.rho, spec.r, spec.alpha, &settings)?.value;
        let mut params = SolverParams::new(spec.p, m, grid);
        params.time_intervals = intervals;
        let report = picard_solve(&phi, &params)?;
        let solved = weighted_spacetime_norm(&report.final_trajectory.untwist()?, spec)?;
        let free = weighted_spacetime_norm(&PhysicalTrajectory::free(params.timegrid()?, &phi)?, spec)?;
        let base = lp_norm(&phi, spec.p)?;
        let converged = if report.converged { 1.0 } else { 0.0 };
        Ok([global / base, free / base, solved / base * converged])
    };
    let values: Vec<([f64; 3], [f64; 3])> = tuples
        .par_iter()
        .map(|(spec, _, shape)| Ok((measure(spec, shape, grid, intervals)?, measure(spec, shape, fine_grid, 2 * intervals)?)))
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    for ((spec, name, _), (coarse, fine)) in tuples.iter().zip(&values) {
        let params = json!({"p": spec.p, "exponents": spec_json(spec), "datum": name, "M": m,
            "horizon_t": default_horizon(spec.p, m, DEFAULT_EPSILON), "grid": grid_json(&grid),
            "refined_grid": grid_json(&fine_grid), "time_intervals": intervals, "seed": c.seed});
        for (k, label) in ["free_global_ratio", "free_local_ratio", "solution_ratio"].iter().enumerate() {
            let d = drift(coarse[k], fine[k]);
            let ok = coarse[k].is_finite() && coarse[k] > 0.0 && d < th.refinement_drift;
            records.push(ResultRecord::new(NAME, params.clone(), label, coarse[k], d, ok));
        }
    }
    Ok(records)
}

/// `T*(M)` ladders with the slope fit against `−2p/(p−1)` and the dyadic
/// horizon formula.
pub fn run_tmax_scan(c: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "tmax-scan";
    let th = c.thresholds;
    let grid = Grid::new(c.grid_points.unwrap_or(512), c.box_length.unwrap_or(40.0))?;
    let mut settings = TmaxSettings::new(grid);
    if let Some(n) = c.time_intervals {
        settings.time_intervals = n;
    }
    if let Some(eps) = c.epsilon {
        settings.epsilon = eps;
    }
    let ms = list(&c.m_values, &[1.0, 2.0, 4.0, 8.0, 16.0]);
    let mut records = Vec::new();
    for p in list(&c.p, &[2.0, 3.0]) {
        let predicted = -2.0 * p / (p - 1.0);
        let scan = tmax_scan(p, &ms, &DataShape::gaussian(), &settings)?;
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut widths = Vec::new();
        for point in &scan.points {
            // the bracket width bounds the discretization error of T*
            let width = point.bracket.map(|(lo, hi)| hi / lo - 1.0).unwrap_or(f64::NAN);
            let params = json!({"p": p, "M": point.m, "solves": point.solves, "error": point.error,
                "base_grid": grid_json(&grid), "time_intervals": settings.time_intervals,
                "tolerance": settings.tolerance, "epsilon": settings.epsilon, "c_est": settings.c_est});
            let t = point.t_star.unwrap_or(f64::NAN);
            records.push(ResultRecord::new(NAME, params, "t_star", t, width, point.t_star.is_some()));
            if let Some(t) = point.t_star {
                x.push(point.m);
                y.push(t);
                widths.push(width);
            }
        }
        let params = json!({"p": p, "M_values": ms, "predicted_slope": predicted, "base_grid": grid_json(&grid)});
        let max_width = widths.iter().copied().fold(0.0, f64::max);
        if x.len() >= 2 {
            let fit = fit_with_downweight(&x, &y, &widths, th.drift)?;
            let ok = (fit.exponent - predicted).abs() <= th.slope_relative * predicted.abs() && x.len() == ms.len();
            records.push(ResultRecord::new(NAME, params.clone(), "slope", fit.exponent, max_width, ok).with_fit(fit.exponent, fit.halfwidth));
        } else {
            records.push(ResultRecord::new(NAME, params.clone(), "slope", f64::NAN, max_width, false));
        }
        let eps = settings.epsilon;
        let ratio = default_horizon(p, 2.0, eps) / default_horizon(p, 1.0, eps);
        let exact = 2f64.powf(predicted);
        records.push(ResultRecord::new(NAME, params, "dyadic_horizon_ratio", ratio, 0.0, (ratio / exact - 1.0).abs() < 1e-12));
    }
    Ok(records)
}
