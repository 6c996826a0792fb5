//! Per-task outcome standardization.
//!
//! Each task's outcomes are shifted and scaled to zero mean and unit sample
//! standard deviation before modeling, which puts tasks with very different
//! response scales on a common footing.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub mean: f64,
    pub std: f64,
}

impl StandardizationStats {
    pub fn identity() -> Self {
        StandardizationStats { mean: 0.0, std: 1.0 }
    }

    pub fn apply(&self, y: f64) -> f64 {
        (y - self.mean) / self.std
    }

    pub fn invert(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

/// Standardizes with the sample (n-1) convention. Degenerate inputs (a single
/// value, or zero variance) keep the transform invertible: the mean is still
/// subtracted and the scale is clamped to 1.
pub fn standardize(ys: &[f64]) -> (Vec<f64>, StandardizationStats) {
    assert!(!ys.is_empty(), "standardize needs at least one value");
    let n = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let std = if ys.len() < 2 {
        1.0
    } else {
        let ss = ys.iter().map(|&y| (y - mean) * (y - mean)).sum::<f64>();
        let s = (ss / (n - 1.0)).sqrt();
        if s > 0.0 { s } else { 1.0 }
    };
    let stats = StandardizationStats { mean, std };
    (ys.iter().map(|&y| stats.apply(y)).collect(), stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_triple() {
        let (z, stats) = standardize(&[1.0, 2.0, 3.0]);
        assert_eq!(stats.mean, 2.0);
        assert_eq!(stats.std, 1.0);
        assert_eq!(z, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn single_point_clamps_scale() {
        let (z, stats) = standardize(&[5.0]);
        assert_eq!(z, vec![0.0]);
        assert_eq!(stats.mean, 5.0);
        assert_eq!(stats.std, 1.0);
    }

    #[test]
    fn zero_variance_clamps_scale() {
        let (z, stats) = standardize(&[2.0, 2.0, 2.0]);
        assert_eq!(z, vec![0.0, 0.0, 0.0]);
        assert_eq!(stats.mean, 2.0);
        assert_eq!(stats.std, 1.0);
    }

    #[test]
    fn output_has_zero_mean_unit_sample_std() {
        let ys = [3.1, -0.4, 7.7, 2.2, 9.0];
        let (z, _) = standardize(&ys);
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
    }
}
