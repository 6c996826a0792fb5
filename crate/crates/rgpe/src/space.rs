//! Search spaces: bounded continuous dimensions with optional finite grids.
//!
//! All model code works on inputs normalized to the unit cube; log-scaled
//! dimensions are mapped in log space first so that one set of lengthscale
//! bounds is meaningful across problems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamDim {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub scale: Scale,
}

impl ParamDim {
    pub fn linear(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        ParamDim { name: name.into(), lower, upper, scale: Scale::Linear }
    }

    pub fn log(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        ParamDim { name: name.into(), lower, upper, scale: Scale::Log }
    }
}

/// A bounded search space, optionally restricted to a finite candidate grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamSpace {
    pub dims: Vec<ParamDim>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<Vec<f64>>>,
}

impl ParamSpace {
    pub fn new(dims: Vec<ParamDim>) -> Result<Self> {
        let space = ParamSpace { dims, grid: None };
        space.validate()?;
        Ok(space)
    }

    pub fn with_grid(dims: Vec<ParamDim>, grid: Vec<Vec<f64>>) -> Result<Self> {
        let space = ParamSpace { dims, grid: Some(grid) };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::InvalidSpace("space has no dimensions".into()));
        }
        for d in &self.dims {
            if !d.lower.is_finite() || !d.upper.is_finite() {
                return Err(Error::InvalidSpace(format!("dimension `{}` has non-finite bounds", d.name)));
            }
            if d.lower >= d.upper {
                return Err(Error::InvalidSpace(format!(
                    "dimension `{}` needs lower < upper (got [{}, {}])",
                    d.name, d.lower, d.upper
                )));
            }
            if d.scale == Scale::Log && d.lower <= 0.0 {
                return Err(Error::InvalidSpace(format!(
                    "log-scaled dimension `{}` needs lower > 0 (got {})",
                    d.name, d.lower
                )));
            }
        }
        if let Some(grid) = &self.grid {
            for (i, point) in grid.iter().enumerate() {
                if point.len() != self.dims.len() {
                    return Err(Error::InvalidSpace(format!(
                        "grid candidate {} has {} coordinates, space has {} dimensions",
                        i,
                        point.len(),
                        self.dims.len()
                    )));
                }
                if !self.contains(point) {
                    return Err(Error::InvalidSpace(format!("grid candidate {} lies outside the bounds", i)));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn is_grid(&self) -> bool {
        self.grid.is_some()
    }

    pub fn grid_candidates(&self) -> &[Vec<f64>] {
        self.grid.as_deref().unwrap_or(&[])
    }

    /// Bounds check with a small tolerance for round-tripped floats.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dims.len()
            && x.iter().zip(&self.dims).all(|(&v, d)| {
                let tol = 1e-12 * (d.upper - d.lower).abs().max(1.0);
                v.is_finite() && v >= d.lower - tol && v <= d.upper + tol
            })
    }

    /// Maps a raw point into the unit cube (log dims in log space).
    pub fn normalize(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dims.len() {
            return Err(Error::DimensionMismatch { expected: self.dims.len(), got: x.len() });
        }
        Ok(x.iter()
            .zip(&self.dims)
            .map(|(&v, d)| match d.scale {
                Scale::Linear => (v - d.lower) / (d.upper - d.lower),
                Scale::Log => (v.ln() - d.lower.ln()) / (d.upper.ln() - d.lower.ln()),
            })
            .collect())
    }

    /// Inverse of [`normalize`](Self::normalize).
    pub fn denormalize(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.dims.len() {
            return Err(Error::DimensionMismatch { expected: self.dims.len(), got: u.len() });
        }
        Ok(u.iter()
            .zip(&self.dims)
            .map(|(&t, d)| match d.scale {
                Scale::Linear => d.lower + t * (d.upper - d.lower),
                Scale::Log => (d.lower.ln() + t * (d.upper.ln() - d.lower.ln())).exp(),
            })
            .collect())
    }

    /// Clamps a raw point into the bounds, coordinate-wise.
    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.dims).map(|(&v, d)| v.clamp(d.lower, d.upper)).collect()
    }
}

/// One evaluated configuration: raw-scale input and raw-scale outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: Vec<f64>,
    pub y: f64,
}

impl Observation {
    pub fn new(x: Vec<f64>, y: f64) -> Self {
        Observation { x, y }
    }

    pub fn validate(&self, space: &ParamSpace) -> Result<()> {
        if !self.y.is_finite() {
            return Err(Error::InvalidObservation(format!("outcome {} is not finite", self.y)));
        }
        if !space.contains(&self.x) {
            return Err(Error::InvalidObservation(format!("input {:?} outside the space", self.x)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_2d() -> ParamSpace {
        ParamSpace::new(vec![ParamDim::linear("a", 0.0, 10.0), ParamDim::log("b", 0.1, 100.0)]).unwrap()
    }

    #[test]
    fn rejects_inverted_bounds() {
        assert!(ParamSpace::new(vec![ParamDim::linear("a", 2.0, 1.0)]).is_err());
    }

    #[test]
    fn rejects_nonpositive_log_lower() {
        assert!(ParamSpace::new(vec![ParamDim::log("a", 0.0, 1.0)]).is_err());
    }

    #[test]
    fn rejects_grid_point_outside_bounds() {
        let r = ParamSpace::with_grid(vec![ParamDim::linear("a", 0.0, 1.0)], vec![vec![0.5], vec![1.5]]);
        assert!(r.is_err());
    }

    #[test]
    fn normalize_round_trip() {
        let space = unit_2d();
        let x = vec![3.7, 2.5];
        let u = space.normalize(&x).unwrap();
        assert!(u.iter().all(|&t| (0.0..=1.0).contains(&t)));
        let back = space.denormalize(&u).unwrap();
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn log_dim_normalizes_in_log_space() {
        let space = unit_2d();
        // geometric midpoint of [0.1, 100] is sqrt(10) ~ 3.1623
        let u = space.normalize(&[0.0, 10.0f64.sqrt()]).unwrap();
        assert!((u[1] - 0.5).abs() < 1e-12);
    }
}
