//! Norms on fields and trajectories: Bessel potential and dyadic Besov
//! norms of snapshots, weighted space-time norms, and the twisted
//! trajectory norms `X̃/X/Ỹ/Y`.

pub mod admissibility;
pub mod norms;
pub mod quadrature;
pub mod timegrid;
pub mod trajectory;

pub use admissibility::{StrichartzFamily, StrichartzSpec};
pub use norms::{
    besov_norm, holder_modulus_check, sobolev_norm, weighted_spacetime_norm, x_norm, y_norm,
    HolderCheck, TrajectoryNorm,
};
pub use timegrid::TimeGrid;
pub use trajectory::{PhysicalTrajectory, TwistedTrajectory};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Exponents `(p, q, θ)` and horizon of an `X^p_{q,θ}(T)` norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    pub horizon_t: f64,
}

impl SpaceSpec {
    pub fn new(p: f64, q: f64, theta: f64, horizon_t: f64) -> Result<Self> {
        let spec = SpaceSpec { p, q, theta, horizon_t };
        spec.validate()?;
        Ok(spec)
    }

    /// `q = p' = p/(p-1)`, `θ = -(1 - 2/p)`: the exponents that make the
    /// trilinear estimate close.
    pub fn canonical(p: f64, horizon_t: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::InvalidParameter(format!("canonical exponents need p > 1, got {p}")));
        }
        Self::new(p, p / (p - 1.0), -(1.0 - 2.0 / p), horizon_t)
    }

    /// `X^p_{1,0}(T)`.
    pub fn integrable(p: f64, horizon_t: f64) -> Result<Self> {
        Self::new(p, 1.0, 0.0, horizon_t)
    }

    /// Hölder conjugate of `q` (infinite for `q = 1`).
    pub fn q_conj(&self) -> f64 {
        if self.q == 1.0 {
            f64::INFINITY
        } else {
            self.q / (self.q - 1.0)
        }
    }

    /// `q'θ`, with `∞·0 = 0`.
    pub fn q_conj_theta(&self) -> f64 {
        if self.theta == 0.0 {
            0.0
        } else {
            self.q_conj() * self.theta
        }
    }

    /// Hypothesis of the embedding `X^p_{q,θ}(T) ⊂ C([0,T]; L^p)`.
    pub fn satisfies_embedding(&self) -> bool {
        self.q_conj_theta() < 1.0
    }

    fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p must lie in [1, ∞), got {}", self.p)));
        }
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return Err(Error::InvalidParameter(format!("q must lie in [1, ∞), got {}", self.q)));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidParameter("θ must be finite".into()));
        }
        if !(self.horizon_t > 0.0) {
            return Err(Error::InvalidParameter(format!("horizon must be positive, got {}", self.horizon_t)));
        }
        if !self.satisfies_embedding() {
            return Err(Error::InvalidParameter(format!(
                "embedding hypothesis q'θ < 1 fails: q'θ = {}",
                self.q_conj_theta()
            )));
        }
        Ok(())
    }
}
