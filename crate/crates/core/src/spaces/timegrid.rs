use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Time nodes on `[0, T]`, graded toward zero: `t_m = T (m/M)^γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    gamma: Option<f64>,
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn graded(horizon: f64, intervals: usize, gamma: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidParameter(format!("horizon must be positive, got {horizon}")));
        }
        if intervals == 0 {
            return Err(Error::InvalidParameter("time grid needs at least one interval".into()));
        }
        if !(gamma >= 1.0) {
            return Err(Error::InvalidParameter(format!("grading exponent must be >= 1, got {gamma}")));
        }
        let m = intervals as f64;
        let mut nodes: Vec<f64> = (0..=intervals).map(|i| horizon * (i as f64 / m).powf(gamma)).collect();
        nodes[intervals] = horizon;
        Ok(TimeGrid { horizon, gamma: Some(gamma), nodes })
    }

    pub fn uniform(horizon: f64, intervals: usize) -> Result<Self> {
        Self::graded(horizon, intervals, 1.0)
    }

    /// Arbitrary nodes; must start at 0 and increase strictly.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "time nodes must start at 0 and increase strictly".into(),
            ));
        }
        let horizon = *nodes.last().unwrap();
        Ok(TimeGrid { horizon, gamma: None, nodes })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Grading exponent; `None` for grids built from explicit nodes.
    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Index of the node equal to `t` (to 1e-12 relative), if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * self.horizon.max(1.0);
        self.nodes.iter().position(|&s| (s - t).abs() <= tol)
    }

    /// Every other node; requires an even interval count.
    pub fn coarsened(&self) -> Result<TimeGrid> {
        if !self.intervals().is_multiple_of(2) {
            return Err(Error::InvalidParameter("coarsening needs an even interval count".into()));
        }
        Ok(TimeGrid {
            horizon: self.horizon,
            gamma: self.gamma,
            nodes: self.nodes.iter().step_by(2).copied().collect(),
        })
    }

    /// Same node pattern on `[0, factor·T]`.
    pub fn rescaled(&self, factor: f64) -> TimeGrid {
        TimeGrid {
            horizon: self.horizon * factor,
            gamma: self.gamma,
            nodes: self.nodes.iter().map(|t| t * factor).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_nodes() {
        let g = TimeGrid::graded(2.0, 4, 2.0).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.125, 0.5, 1.125, 2.0]);
        assert_eq!(g.coarsened().unwrap().nodes(), &[0.0, 0.5, 2.0]);
        assert_eq!(g.index_of(1.125), Some(3));
        assert!(TimeGrid::graded(-1.0, 4, 2.0).is_err());
        assert!(TimeGrid::graded(1.0, 4, 0.5).is_err());
        assert!(TimeGrid::from_nodes(vec![0.1, 0.2]).is_err());
        assert!(TimeGrid::from_nodes(vec![0.0, 0.2, 0.2]).is_err());
    }
}
