//! Admissible exponent pairs for the off-diagonal and regularity
//! Strichartz estimates. The predicate is written once over [`Exponent`]
//! so it runs in floating point (with tolerance) or exactly over rationals.

use crate::error::{Error, Result};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

pub trait Exponent:
    Copy
    + PartialOrd
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn ratio(num: i64, den: i64) -> Self;
    /// Equality up to the representation's tolerance.
    fn same(self, other: Self) -> bool;
    /// Strict `<` that is not fooled by rounding.
    fn below(self, other: Self) -> bool;
}

const FLOAT_TOL: f64 = 1e-12;

impl Exponent for f64 {
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn same(self, other: Self) -> bool {
        (self - other).abs() <= FLOAT_TOL
    }
    fn below(self, other: Self) -> bool {
        self < other - FLOAT_TOL
    }
}

impl Exponent for Ratio<i64> {
    fn ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
    fn same(self, other: Self) -> bool {
        self == other
    }
    fn below(self, other: Self) -> bool {
        self < other
    }
}

/// Reciprocal exponents `(1/ρ, 1/r, 1/p)`; `1/r = 0` encodes `r = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reciprocals<E> {
    pub inv_rho: E,
    pub inv_r: E,
    pub inv_p: E,
}

/// Checks `2/ρ + 1/r = 1/p'` with `2 ≤ p < 4` and condition (i)
/// `0 ≤ 1/ρ < min(1/4, 1/2 − 1/r)`, or, when allowed, condition (ii)
/// `r > 4, 1/ρ = 1/4`. The error names the relation that failed.
pub fn check_admissible<E: Exponent>(e: Reciprocals<E>, allow_condition_ii: bool) -> Result<()> {
    let zero = E::ratio(0, 1);
    let one = E::ratio(1, 1);
    let quarter = E::ratio(1, 4);
    let half = E::ratio(1, 2);
    let two = E::ratio(2, 1);
    if !quarter.below(e.inv_p) || half.below(e.inv_p) {
        return Err(Error::Inadmissible(format!("2 ≤ p < 4 fails: 1/p = {:?}", e.inv_p)));
    }
    if e.inv_r.below(zero) || !e.inv_r.below(half) {
        return Err(Error::Inadmissible(format!("2 < r ≤ ∞ fails: 1/r = {:?}", e.inv_r)));
    }
    let scaling = two * e.inv_rho + e.inv_r;
    let target = one - e.inv_p;
    if !scaling.same(target) {
        return Err(Error::Inadmissible(format!(
            "scaling relation 2/ρ + 1/r = 1/p' fails: {:?} vs {:?}",
            scaling, target
        )));
    }
    let cap = if quarter < half - e.inv_r { quarter } else { half - e.inv_r };
    let cond_i = !e.inv_rho.below(zero) && e.inv_rho.below(cap);
    if cond_i {
        return Ok(());
    }
    let cond_ii = e.inv_r.below(quarter) && e.inv_rho.same(quarter);
    if cond_ii {
        if allow_condition_ii {
            return Ok(());
        }
        return Err(Error::Inadmissible(
            "only condition (ii) (r > 4, 1/ρ = 1/4) holds and it was not enabled".into(),
        ));
    }
    Err(Error::Inadmissible(format!(
        "condition (i) 0 ≤ 1/ρ < min(1/4, 1/2 − 1/r) fails: 1/ρ = {:?}, bound {:?}",
        e.inv_rho, cap
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrichartzFamily {
    /// `L^ρ_t L^r_x` of the free evolution, unweighted.
    OffDiagonal,
    /// Solution regularity, weight `t^{1/p − 1/2}`.
    Regularity,
}

/// Exponents `(ρ, r, α)` at data exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzSpec {
    pub rho: f64,
    pub r: f64,
    pub p: f64,
    pub alpha: f64,
    pub family: StrichartzFamily,
}

impl StrichartzSpec {
    /// Validated spec; `r` may be `f64::INFINITY`.
    pub fn new(family: StrichartzFamily, rho: f64, r: f64, p: f64, allow_condition_ii: bool) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) || !(r > 0.0) || !(p > 0.0 && p.is_finite()) {
            return Err(Error::Inadmissible(format!("exponents must be positive: ρ={rho}, r={r}, p={p}")));
        }
        check_admissible(
            Reciprocals { inv_rho: 1.0 / rho, inv_r: 1.0 / r, inv_p: 1.0 / p },
            allow_condition_ii,
        )?;
        let alpha = match family {
            StrichartzFamily::OffDiagonal => 0.0,
            StrichartzFamily::Regularity => 1.0 / p - 0.5,
        };
        Ok(StrichartzSpec { rho, r, p, alpha, family })
    }

    /// `ρ = r = 3p'`.
    pub fn diagonal(p: f64) -> Result<Self> {
        let a = 3.0 * p / (p - 1.0);
        Self::new(StrichartzFamily::OffDiagonal, a, a, p, false)
    }

    /// Pair completed from `ρ` by the scaling relation.
    pub fn from_rho(family: StrichartzFamily, rho: f64, p: f64, allow_condition_ii: bool) -> Result<Self> {
        let inv_r = 1.0 - 1.0 / p - 2.0 / rho;
        let r = if inv_r.abs() < 1e-15 { f64::INFINITY } else { 1.0 / inv_r };
        if !(inv_r >= -1e-15) {
            return Err(Error::Inadmissible(format!("scaling relation forces 1/r = {inv_r} < 0")));
        }
        Self::new(family, rho, r, p, allow_condition_ii)
    }

    pub fn inv_r(&self) -> f64 {
        if self.r.is_infinite() { 0.0 } else { 1.0 / self.r }
    }
}
