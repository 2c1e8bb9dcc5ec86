use super::admissibility::StrichartzSpec;
use super::quadrature::{power_integral, weighted_integral};
use super::trajectory::{PhysicalTrajectory, TwistedTrajectory};
use super::SpaceSpec;
use crate::error::{Error, Result};
use crate::grid::{apply_multiplier, lp_norm, Field, Representation};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `‖F^{-1}[(1+ξ²)^{s/2} f̂]‖_p`.
pub fn sobolev_norm(f: &Field, s: f64, p: f64) -> Result<f64> {
    f.expect(Representation::Physical)?;
    if s == 0.0 {
        return lp_norm(f, p);
    }
    let g = apply_multiplier(f, |xi| Complex64::new((1.0 + xi * xi).powf(0.5 * s), 0.0))?;
    lp_norm(&g, p)
}

fn smooth_step(u: f64) -> f64 {
    // 0 for u ≤ 0, 1 for u ≥ 1, C^∞ in between
    let bump = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let (a, b) = (bump(u), bump(1.0 - u));
    a / (a + b)
}

/// Low-pass cutoff: 1 on `|η| ≤ 1`, 0 on `|η| ≥ 2`.
pub fn lp_cutoff(eta: f64) -> f64 {
    smooth_step(2.0 - eta.abs())
}

/// `ψ_j(ξ) = χ(ξ/2^j) − χ(ξ/2^{j−1})` for `j ≥ 1`, `χ` itself for `j = 0`.
pub fn lp_block_symbol(j: u32, xi: f64) -> f64 {
    if j == 0 {
        return lp_cutoff(xi);
    }
    let scale = (2.0f64).powi(j as i32);
    lp_cutoff(xi / scale) - lp_cutoff(2.0 * xi / scale)
}

/// Littlewood–Paley pieces `P_0 f, P_1 f, …` up to the grid's Nyquist.
pub fn littlewood_paley_blocks(f: &Field) -> Result<Vec<Field>> {
    f.expect(Representation::Physical)?;
    let nyquist = f.grid().nyquist();
    let mut blocks = vec![apply_multiplier(f, |xi| Complex64::new(lp_block_symbol(0, xi), 0.0))?];
    let mut j = 1u32;
    // ψ_j lives on [2^{j−1}, 2^{j+1}]
    while (2.0f64).powi(j as i32 - 1) < nyquist {
        blocks.push(apply_multiplier(f, |xi| Complex64::new(lp_block_symbol(j, xi), 0.0))?);
        j += 1;
    }
    Ok(blocks)
}

/// `B^s_{p,1}` norm: `‖P_0 f‖_p + Σ_{j≥1} 2^{js}‖P_j f‖_p`.
pub fn besov_norm(f: &Field, s: f64, p: f64) -> Result<f64> {
    let blocks = littlewood_paley_blocks(f)?;
    let mut total = 0.0;
    for (j, b) in blocks.iter().enumerate() {
        total += (2.0f64).powf(j as f64 * s) * lp_norm(b, p)?;
    }
    Ok(total)
}

/// `(∫_I ‖u(t)‖_r^ρ t^α dt)^{1/ρ}` over the trajectory's nodes.
pub fn weighted_spacetime_norm(traj: &PhysicalTrajectory, spec: &StrichartzSpec) -> Result<f64> {
    let norms: Vec<f64> = traj
        .values()
        .par_iter()
        .map(|u| lp_norm(u, spec.r))
        .collect::<Result<_>>()?;
    weighted_time_norm(traj.nodes(), &norms, spec.rho, spec.alpha)
}

/// `(∫ n(t)^ρ t^α dt)^{1/ρ}` with `n^ρ` interpolated linearly.
pub fn weighted_time_norm(nodes: &[f64], norms: &[f64], rho: f64, alpha: f64) -> Result<f64> {
    let powered: Vec<f64> = norms.iter().map(|n| n.powf(rho)).collect();
    Ok(weighted_integral(nodes, &powered, alpha)?.powf(1.0 / rho))
}

/// `X̃` seminorm and full `X` norm of a twisted trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryNorm {
    pub tilde: f64,
    pub full: f64,
}

/// Node values and derivative norms restricted to `[0, T]`; the last
/// derivative norm is interpolated when `T` falls between nodes.
fn truncated(nodes: &[f64], values: &[f64], horizon: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let last = *nodes.last().unwrap();
    if horizon > last * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "norm horizon {horizon} exceeds trajectory horizon {last}"
        )));
    }
    let k = nodes.partition_point(|&s| s < horizon * (1.0 - 1e-12));
    let mut t: Vec<f64> = nodes[..k].to_vec();
    let mut v: Vec<f64> = values[..k].to_vec();
    if k < nodes.len() && (nodes[k] - horizon).abs() <= 1e-12 * horizon {
        t.push(nodes[k]);
        v.push(values[k]);
    } else {
        let w = (horizon - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
        t.push(horizon);
        v.push((1.0 - w) * values[k - 1] + w * values[k]);
    }
    Ok((t, v))
}

fn xtilde_from_norms(nodes: &[f64], dv_norms: &[f64], spec: &SpaceSpec) -> Result<f64> {
    let weight = spec.theta * spec.q;
    if weight <= -1.0 {
        return Err(Error::DivergentWeight(format!(
            "s^(θq) = s^{weight} is not integrable at 0 (θq ≤ −1)"
        )));
    }
    let powered: Vec<f64> = dv_norms.iter().map(|n| n.powf(spec.q)).collect();
    let (t, v) = truncated(nodes, &powered, spec.horizon_t)?;
    Ok(weighted_integral(&t, &v, weight)?.powf(1.0 / spec.q))
}

/// `X̃ = (∫_0^T (s^θ ‖∂_s v‖_p)^q ds)^{1/q}`, `X = ‖v(0)‖_p + X̃`.
pub fn x_norm(v: &TwistedTrajectory, spec: &SpaceSpec) -> Result<TrajectoryNorm> {
    let dv_norms: Vec<f64> = v
        .derivatives()
        .par_iter()
        .map(|f| lp_norm(f, spec.p))
        .collect::<Result<_>>()?;
    let tilde = xtilde_from_norms(v.nodes(), &dv_norms, spec)?;
    Ok(TrajectoryNorm { tilde, full: lp_norm(v.initial(), spec.p)? + tilde })
}

/// `Ỹ/Y` norms: `X̃/X` of `U(−t)u(t)`.
pub fn y_norm(u: &PhysicalTrajectory, spec: &SpaceSpec) -> Result<TrajectoryNorm> {
    x_norm(&u.twist()?, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl HolderCheck {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rel_tol)
    }
}

/// `‖v(t) − v(t′)‖_p ≤ X̃ · (∫_t^{t′} s^{−θq′} ds)^{1/q′}`.
pub fn holder_modulus_check(v: &TwistedTrajectory, spec: &SpaceSpec, t: f64, t_prime: f64) -> Result<HolderCheck> {
    if !(0.0 <= t && t <= t_prime && t_prime <= spec.horizon_t) {
        return Err(Error::InvalidParameter(format!(
            "need 0 ≤ t ≤ t′ ≤ T, got t={t}, t′={t_prime}, T={}",
            spec.horizon_t
        )));
    }
    if t == t_prime {
        return Ok(HolderCheck { lhs: 0.0, rhs: 0.0 });
    }
    let xtilde = x_norm(v, spec)?.tilde;
    let lhs = lp_norm(&v.value_at(t)?.sub(&v.value_at(t_prime)?)?, spec.p)?;
    let q_conj = spec.q_conj();
    let factor = if q_conj.is_infinite() {
        // sup of s^{−θ} over [t, t′]
        let (a, b) = (t.powf(-spec.theta), t_prime.powf(-spec.theta));
        if !a.is_finite() {
            return Err(Error::DivergentWeight(format!("s^{} unbounded at 0", -spec.theta)));
        }
        a.max(b)
    } else {
        power_integral(t, t_prime, -spec.theta * q_conj)?.powf(1.0 / q_conj)
    };
    Ok(HolderCheck { lhs, rhs: xtilde * factor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{forward_transform, Grid};
    use crate::spaces::timegrid::TimeGrid;
    use crate::spaces::StrichartzFamily;
    use proptest::prelude::*;

    fn bump(grid: Grid) -> Field {
        Field::from_real_fn(grid, |x| (-x * x).exp() * (1.0 + 0.3 * x))
    }

    fn linear_in_time(tg: TimeGrid, g: &Field) -> TwistedTrajectory {
        let v = tg.nodes().iter().map(|&t| g.scale_real(t)).collect();
        let dv = vec![g.clone(); tg.len()];
        TwistedTrajectory::new(tg, v, dv).unwrap()
    }

    #[test]
    fn sobolev_basic_cases() {
        let grid = Grid::new(256, 20.0).unwrap();
        let f = bump(grid);
        assert!((sobolev_norm(&f, 0.0, 3.0).unwrap() - lp_norm(&f, 3.0).unwrap()).abs() < 1e-12);
        let k = 7.0 * grid.frequency_spacing();
        let mode = Field::from_fn(grid, |x| Complex64::new(0.0, k * x).exp());
        for s in [-0.5, 0.3, 1.0] {
            let ratio = sobolev_norm(&mode, s, 2.5).unwrap() / lp_norm(&mode, 2.5).unwrap();
            assert!((ratio - (1.0 + k * k).powf(0.5 * s)).abs() < 1e-10);
        }
        let mut prev = 0.0;
        for s in [-1.0, -0.3, 0.0, 0.4, 1.5] {
            let n = sobolev_norm(&f, s, 2.0).unwrap();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn sobolev_plancherel_route() {
        let grid = Grid::new(512, 30.0).unwrap();
        let f = bump(grid);
        let hat = forward_transform(&f).unwrap();
        for s in [-0.7, 0.5] {
            let sum: f64 = hat
                .samples()
                .iter()
                .enumerate()
                .map(|(k, z)| (1.0 + grid.frequency_at_slot(k).powi(2)).powf(s) * z.norm_sqr())
                .sum();
            let route = sum * grid.frequency_spacing() / (2.0 * std::f64::consts::PI);
            let direct = sobolev_norm(&f, s, 2.0).unwrap().powi(2);
            assert!((route - direct).abs() < 1e-10 * direct, "{route} {direct}");
        }
    }

    #[test]
    fn partition_of_unity() {
        for xi in [0.0, 0.5, 1.3, 2.0, 3.7, 100.0, 1000.0] {
            let sum: f64 = (0..15).map(|j| lp_block_symbol(j, xi)).sum();
            assert!((sum - 1.0).abs() < 1e-14, "{xi}");
        }
    }

    #[test]
    fn besov_single_shell() {
        // spectrum concentrated just above 2^j sits in block j
        let grid = Grid::new(2048, 400.0).unwrap();
        let j = 4;
        let centre = 1.02 * (2.0f64).powi(j);
        let f = Field::from_fn(grid, |x| Complex64::new(0.0, centre * x).exp() * (-(x / 40.0).powi(2)).exp());
        for (s, p) in [(0.5, 2.0), (-0.4, 3.0), (1.0, 2.5)] {
            let want = (2.0f64).powf(j as f64 * s) * lp_norm(&f, p).unwrap();
            let got = besov_norm(&f, s, p).unwrap();
            assert!((got / want - 1.0).abs() < 0.05, "{got} {want}");
        }
        assert_eq!(besov_norm(&Field::zeros(grid), 0.3, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn besov_frame_bounds_at_l2() {
        let grid = Grid::new(1024, 40.0).unwrap();
        let f = Field::from_real_fn(grid, |x| (-x * x / 0.05).exp());
        let n2 = lp_norm(&f, 2.0).unwrap();
        let blocks = littlewood_paley_blocks(&f).unwrap();
        let b = besov_norm(&f, 0.0, 2.0).unwrap();
        assert!(b >= n2 * (1.0 - 1e-12));
        assert!(b <= n2 * (blocks.len() as f64).sqrt());
    }

    #[test]
    fn weighted_spacetime_examples() {
        let grid = Grid::new(128, 16.0).unwrap();
        let g = bump(grid);
        let r = 6.0;
        let gr = lp_norm(&g, r).unwrap();
        let spec = StrichartzSpec::diagonal(2.0).unwrap();
        let tg = TimeGrid::graded(1.0, 200, 2.0).unwrap();
        let n = tg.len();
        let constant = PhysicalTrajectory::new(tg.clone(), vec![g.clone(); n], vec![Field::zeros(grid); n]).unwrap();
        let got = weighted_spacetime_norm(&constant, &spec).unwrap();
        assert!((got - gr).abs() < 1e-12 * gr);

        // u = t·g, ρ = 2, α = −1/2: closed form (2/5)^{1/2}‖g‖_r
        let norms: Vec<f64> = tg.nodes().iter().map(|t| t * gr).collect();
        let got = weighted_time_norm(tg.nodes(), &norms, 2.0, -0.5).unwrap();
        assert!((got / (0.4f64.sqrt() * gr) - 1.0).abs() < 1e-4);

        let zero = PhysicalTrajectory::new(tg, vec![Field::zeros(grid); n], vec![Field::zeros(grid); n]).unwrap();
        assert_eq!(weighted_spacetime_norm(&zero, &spec).unwrap(), 0.0);

        let nodes = [0.0, 0.5, 1.0];
        assert!(weighted_time_norm(&nodes, &[1.0, 1.0, 1.0], 2.0, -1.5).is_err());
        let reg = StrichartzSpec::from_rho(StrichartzFamily::Regularity, 5.0, 3.0, false).unwrap();
        assert!(reg.alpha < 0.0);
    }

    #[test]
    fn x_norm_examples() {
        let grid = Grid::new(128, 16.0).unwrap();
        let g = bump(grid);
        let tg = TimeGrid::graded(0.7, 20, 2.0).unwrap();

        let constant = TwistedTrajectory::constant(tg.clone(), &g).unwrap();
        let spec = SpaceSpec::canonical(3.0, 0.7).unwrap();
        let n = x_norm(&constant, &spec).unwrap();
        assert_eq!(n.tilde, 0.0);
        assert_eq!(n.full, lp_norm(&g, 3.0).unwrap());

        let lin = linear_in_time(tg, &g);
        let n = x_norm(&lin, &spec).unwrap();
        let want = lp_norm(&g, 3.0).unwrap() * (2.0 * 0.7f64.sqrt()).powf(2.0 / 3.0);
        assert!((n.tilde - want).abs() < 1e-6 * want);

        // shorter horizon between nodes
        let short = SpaceSpec::canonical(3.0, 0.5).unwrap();
        let want = lp_norm(&g, 3.0).unwrap() * (2.0 * 0.5f64.sqrt()).powf(2.0 / 3.0);
        assert!((x_norm(&lin, &short).unwrap().tilde - want).abs() < 1e-6 * want);

        let too_long = SpaceSpec::canonical(3.0, 0.9).unwrap();
        assert!(x_norm(&lin, &too_long).is_err());
        let divergent = SpaceSpec::new(3.0, 2.0, -0.5, 0.5).unwrap();
        assert!(matches!(x_norm(&lin, &divergent), Err(Error::DivergentWeight(_))));
    }

    #[test]
    fn x_norm_q1_two_routes() {
        // X^p_{1,0}: ‖v(0)‖ + ∫‖∂v‖ by product rule and by plain trapezoid
        let grid = Grid::new(128, 16.0).unwrap();
        let g = bump(grid);
        let tg = TimeGrid::graded(1.0, 30, 2.0).unwrap();
        let v: Vec<Field> = tg.nodes().iter().map(|&t| g.scale_real(1.0 + t.sin())).collect();
        let dv: Vec<Field> = tg.nodes().iter().map(|&t| g.scale_real(t.cos() * (1.0 + t))).collect();
        let traj = TwistedTrajectory::new(tg.clone(), v, dv).unwrap();
        let spec = SpaceSpec::integrable(2.5, 1.0).unwrap();
        let n = x_norm(&traj, &spec).unwrap();
        let norms: Vec<f64> = traj.derivatives().iter().map(|f| lp_norm(f, 2.5).unwrap()).collect();
        let trap: f64 = tg.nodes().windows(2).zip(norms.windows(2)).map(|(t, n)| 0.5 * (t[1] - t[0]) * (n[0] + n[1])).sum();
        let want = lp_norm(traj.initial(), 2.5).unwrap() + trap;
        assert!((n.full - want).abs() < 1e-10 * want);
    }

    #[test]
    fn y_norm_examples() {
        let grid = Grid::new(512, 40.0).unwrap();
        let phi = bump(grid);
        let tg = TimeGrid::graded(0.5, 10, 2.0).unwrap();
        let spec = SpaceSpec::canonical(2.5, 0.5).unwrap();
        let free = PhysicalTrajectory::free(tg.clone(), &phi).unwrap();
        let n = y_norm(&free, &spec).unwrap();
        assert!(n.tilde < 1e-10);
        assert!((n.full - lp_norm(&phi, 2.5).unwrap()).abs() < 1e-10);

        let n = tg.len();
        let zero = PhysicalTrajectory::new(tg, vec![Field::zeros(grid); n], vec![Field::zeros(grid); n]).unwrap();
        let z = y_norm(&zero, &spec).unwrap();
        assert_eq!((z.tilde, z.full), (0.0, 0.0));
    }

    #[test]
    fn y_norm_unitarity_at_l2() {
        // at p = 2, U(−t) drops out: compare with norms of ∂_t u + iξ²u
        let grid = Grid::new(512, 40.0).unwrap();
        let tg = TimeGrid::graded(0.6, 12, 2.0).unwrap();
        let u: Vec<Field> = tg.nodes().iter().map(|&t| Field::from_real_fn(grid, |x| (-x * x * (1.0 + t)).exp())).collect();
        let du: Vec<Field> = tg.nodes().iter().map(|&t| Field::from_real_fn(grid, |x| -x * x * (-x * x * (1.0 + t)).exp())).collect();
        let traj = PhysicalTrajectory::new(tg.clone(), u, du).unwrap();
        let spec = SpaceSpec::canonical(2.0, 0.6).unwrap();
        let twisted = y_norm(&traj, &spec).unwrap();
        let norms: Vec<f64> = traj
            .values()
            .iter()
            .zip(traj.derivatives())
            .map(|(u, du)| {
                let lin = apply_multiplier(u, |xi| Complex64::new(0.0, xi * xi)).unwrap();
                lp_norm(&du.add(&lin).unwrap(), 2.0).unwrap()
            })
            .collect();
        let tilde = xtilde_from_norms(tg.nodes(), &norms, &spec).unwrap();
        let full = lp_norm(&traj.values()[0], 2.0).unwrap() + tilde;
        assert!((twisted.tilde - tilde).abs() < 1e-10 * tilde);
        assert!((twisted.full - full).abs() < 1e-10 * full);
    }

    #[test]
    fn holder_examples() {
        let grid = Grid::new(128, 16.0).unwrap();
        let g = bump(grid);
        let tg = TimeGrid::graded(1.0, 16, 2.0).unwrap();
        let spec = SpaceSpec::canonical(3.0, 1.0).unwrap();

        let c = holder_modulus_check(&TwistedTrajectory::constant(tg.clone(), &g).unwrap(), &spec, 0.2, 0.9).unwrap();
        assert!(c.lhs < 1e-15);

        // v = t·g: lhs = (t′−t)‖g‖₃, rhs = ‖g‖₃(2√T)^{2/3}((t′²−t²)/2)^{1/3}
        let lin = linear_in_time(tg, &g);
        let g3 = lp_norm(&g, 3.0).unwrap();
        for (t, tp) in [(0.0, 1.0), (0.1, 0.3), (0.25, 0.5)] {
            let c = holder_modulus_check(&lin, &spec, t, tp).unwrap();
            let lhs = (tp - t) * g3;
            let rhs = g3 * 2.0f64.powf(2.0 / 3.0) * (0.5 * (tp * tp - t * t)).powf(1.0 / 3.0);
            assert!((c.lhs - lhs).abs() < 1e-12 * lhs);
            assert!((c.rhs - rhs).abs() < 1e-9 * rhs);
            assert!(c.lhs / c.rhs <= 1.0);
        }
        let same = holder_modulus_check(&lin, &spec, 0.4, 0.4).unwrap();
        assert_eq!((same.lhs, same.rhs), (0.0, 0.0));
        assert!(holder_modulus_check(&lin, &spec, 0.5, 0.4).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn sobolev_homogeneous(c in 0.1f64..10.0, s in -1.0f64..1.0, p in 1.5f64..4.0) {
            let grid = Grid::new(128, 16.0).unwrap();
            let f = bump(grid);
            let a = sobolev_norm(&f.scale_real(c), s, p).unwrap();
            let b = c * sobolev_norm(&f, s, p).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b);
        }
    }
}
