//! ARD Matérn 5/2 covariance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SQRT5: f64 = 2.23606797749978969;

/// Kernel hyperparameters on normalized (unit-cube) inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelHyperparams {
    /// One positive lengthscale per input dimension.
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl KernelHyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.lengthscales.is_empty() || self.lengthscales.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidObservation("lengthscales must be positive and finite".into()));
        }
        if !(self.signal_variance > 0.0) || !self.signal_variance.is_finite() {
            return Err(Error::InvalidObservation("signal variance must be positive".into()));
        }
        if self.noise_variance < 0.0 || !self.noise_variance.is_finite() {
            return Err(Error::InvalidObservation("noise variance must be non-negative".into()));
        }
        Ok(())
    }
}

/// Matérn 5/2 with automatic relevance determination:
/// `s^2 (1 + sqrt(5) r + 5 r^2 / 3) exp(-sqrt(5) r)` where `r` is the
/// lengthscale-weighted Euclidean distance.
pub fn matern52_ard(x1: &[f64], x2: &[f64], hypers: &KernelHyperparams) -> f64 {
    debug_assert_eq!(x1.len(), hypers.lengthscales.len());
    debug_assert_eq!(x2.len(), hypers.lengthscales.len());
    let mut r2 = 0.0;
    for ((&a, &b), &l) in x1.iter().zip(x2).zip(&hypers.lengthscales) {
        let d = (a - b) / l;
        r2 += d * d;
    }
    let r = r2.sqrt();
    hypers.signal_variance * (1.0 + SQRT5 * r + 5.0 * r2 / 3.0) * (-SQRT5 * r).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hypers(ls: Vec<f64>) -> KernelHyperparams {
        KernelHyperparams { lengthscales: ls, signal_variance: 1.0, noise_variance: 0.0 }
    }

    #[test]
    fn equal_points_give_signal_variance() {
        let mut h = hypers(vec![0.3, 2.0]);
        h.signal_variance = 4.2;
        assert_eq!(matern52_ard(&[0.1, 0.9], &[0.1, 0.9], &h), 4.2);
    }

    #[test]
    fn vanishes_in_the_large_distance_limit() {
        let h = hypers(vec![1e-3]);
        assert!(matern52_ard(&[0.0], &[1.0], &h) < 1e-300);
    }

    #[test]
    fn unit_distance_closed_form() {
        // (1 + sqrt(5) + 5/3) exp(-sqrt(5)), evaluated independently
        let h = hypers(vec![1.0]);
        let expected = 0.5239941088318203;
        assert!((matern52_ard(&[0.0], &[1.0], &h) - expected).abs() < 1e-14);
    }

    #[test]
    fn ard_lengthscales_weight_dimensions() {
        // doubling a dimension's lengthscale matches halving its distance
        let h1 = hypers(vec![2.0, 1.0]);
        let h2 = hypers(vec![1.0, 1.0]);
        let a = matern52_ard(&[0.0, 0.0], &[1.0, 0.4], &h1);
        let b = matern52_ard(&[0.0, 0.0], &[0.5, 0.4], &h2);
        assert!((a - b).abs() < 1e-15);
    }
}
