//! JSON experiment configuration. Scalars and lists are interchangeable
//! for the exponent fields, so `"p": 3` and `"p": [2, 2.5, 3]` both parse.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Strichartz,
    Wellposed,
    IllposedChirp,
    Homogeneous,
    StrichartzReg,
    TmaxScan,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Strichartz,
        Experiment::Wellposed,
        Experiment::IllposedChirp,
        Experiment::Homogeneous,
        Experiment::StrichartzReg,
        Experiment::TmaxScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Strichartz => "strichartz",
            Experiment::Wellposed => "wellposed",
            Experiment::IllposedChirp => "illposed-chirp",
            Experiment::Homogeneous => "homogeneous",
            Experiment::StrichartzReg => "strichartz-reg",
            Experiment::TmaxScan => "tmax-scan",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

/// Parts of the homogeneous-data experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomogeneousPart {
    Membership,
    Smoothing,
    Singularity,
}

/// Pass/fail thresholds; every contract reads its bound from here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Box/grid-doubling drift of Strichartz ratios and `L^p` saturation.
    pub drift: f64,
    /// λ-ladder spread of scale-invariant ratios.
    pub scaling_spread: f64,
    /// Refinement drift of solved quantities.
    pub refinement_drift: f64,
    /// Absolute tolerance on fitted exponents.
    pub exponent_tolerance: f64,
    /// Relative tolerance on fitted slopes.
    pub slope_relative: f64,
    /// Upper bound of Picard contraction ratios.
    pub contraction: f64,
    /// Upper bound of data-to-solution Lipschitz ratios.
    pub lipschitz_bound: f64,
    /// Lower bound on the per-doubling growth of `‖φ‖_2` in smoothing runs.
    pub data_growth: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            drift: 0.02,
            scaling_spread: 0.02,
            refinement_drift: 0.05,
            exponent_tolerance: 0.1,
            slope_relative: 0.2,
            contraction: 0.5,
            lipschitz_bound: 100.0,
            data_growth: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, deserialize_with = "one_or_many")]
    pub p: Vec<f64>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub s: Vec<f64>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub a: Vec<f64>,
    #[serde(rename = "N_values", default)]
    pub n_values: Vec<f64>,
    #[serde(default)]
    pub t0: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub rho: Vec<f64>,
    /// Paired with `rho`; completed from the scaling relation when empty.
    #[serde(default, deserialize_with = "one_or_many")]
    pub r: Vec<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub lambda_values: Vec<f64>,
    #[serde(rename = "M_values", default)]
    pub m_values: Vec<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default)]
    pub box_length: Option<f64>,
    #[serde(default)]
    pub time_intervals: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub allow_condition_ii: bool,
    /// Seeded data pairs of the Lipschitz probe.
    #[serde(default)]
    pub pairs: Option<usize>,
    #[serde(default)]
    pub parts: Vec<HomogeneousPart>,
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn increasing_positive(name: &str, values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(format!("{name} must be positive and strictly increasing")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Exponent list with a default when the config leaves it empty.
    pub(crate) fn list_or(values: &[f64], default: &[f64]) -> Vec<f64> {
        if values.is_empty() { default.to_vec() } else { values.to_vec() }
    }

    pub fn homogeneous_parts(&self) -> Vec<HomogeneousPart> {
        if self.parts.is_empty() {
            vec![HomogeneousPart::Membership, HomogeneousPart::Smoothing, HomogeneousPart::Singularity]
        } else {
            self.parts.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let membership_only = self.experiment == Experiment::Homogeneous
            && self.homogeneous_parts() == [HomogeneousPart::Membership];
        for &p in &self.p {
            // the membership criterion is an L^p statement for every p ≥ 1
            let ok = if membership_only { p >= 1.0 && p.is_finite() } else { (2.0..4.0).contains(&p) };
            if !ok {
                return Err(invalid(format!("p = {p} outside [2, 4)")));
            }
        }
        if let Some(a) = self.a.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(invalid(format!("a = {a} outside (0, 1)")));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0) {
                return Err(invalid("delta must be positive"));
            }
        }
        if let Some(t0) = self.t0 {
            if !(t0 > 0.0 && t0.is_finite()) {
                return Err(invalid("t0 must be positive"));
            }
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0) {
                return Err(invalid("epsilon must be positive"));
            }
        }
        if self.grid_points == Some(0) || self.time_intervals == Some(0) {
            return Err(invalid("grid and time-grid sizes must be positive"));
        }
        if let Some(l) = self.box_length {
            if !(l > 0.0 && l.is_finite()) {
                return Err(invalid("box_length must be positive"));
            }
        }
        if !self.r.is_empty() && self.r.len() != self.rho.len() {
            return Err(invalid("r must be empty or paired one-to-one with rho"));
        }
        increasing_positive("N_values", &self.n_values)?;
        increasing_positive("M_values", &self.m_values)?;
        increasing_positive("lambda_values", &self.lambda_values)?;
        match self.experiment {
            Experiment::IllposedChirp => {
                if let Some(p) = self.p.iter().find(|p| !(**p > 2.0 && **p <= 3.0)) {
                    return Err(invalid(format!("illposed-chirp needs p in (2, 3], got {p}")));
                }
            }
            Experiment::Homogeneous => {
                let parts = self.homogeneous_parts();
                let pairs = self.a.iter().flat_map(|&a| self.p.iter().map(move |&p| (a, p)));
                for (a, p) in pairs {
                    if parts.contains(&HomogeneousPart::Singularity) && !(1.0 / p < a && a < 1.0 - 1.0 / p) {
                        return Err(invalid(format!("singularity route needs 1/p < a < 1 - 1/p, got a = {a}, p = {p}")));
                    }
                    if parts.contains(&HomogeneousPart::Smoothing) && !(1.0 / p < a && a < 0.5) {
                        return Err(invalid(format!("smoothing needs 1/p < a < 1/2, got a = {a}, p = {p}")));
                    }
                }
            }
            Experiment::StrichartzReg if self.rho.is_empty() => {
                return Err(invalid("strichartz-reg needs rho"));
            }
            _ => {}
        }
        Ok(())
    }
}
