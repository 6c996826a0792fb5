//! Gaussian process regression on normalized inputs and standardized
//! outcomes: marginal-likelihood fitting, posterior prediction, joint
//! sampling, and leave-one-out predictions with fixed hyperparameters.

mod kernel;
mod standardize;

pub use kernel::{matern52_ard, KernelHyperparams};
pub use standardize::{standardize, StandardizationStats};

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::optim::nelder_mead;
use crate::seedstream::derive_rng;
use crate::space::{Observation, ParamSpace};

/// Noise variance floor keeping Cholesky factorizations stable on
/// deterministic objectives (standardized scale).
pub const JITTER_FLOOR: f64 = 1e-6;

/// Eigenvalues of a predicted covariance below this are a hard error;
/// values in `[NEG_EIGENVALUE_TOL, 0)` are treated as floating-point noise
/// and clamped to zero.
pub const NEG_EIGENVALUE_TOL: f64 = -1e-10;

#[derive(Debug, Clone)]
pub struct FitConfig {
    /// Lengthscale bounds on unit-cube inputs.
    pub lengthscale_bounds: (f64, f64),
    pub signal_bounds: (f64, f64),
    pub noise_bounds: (f64, f64),
    /// Multi-start count for likelihood maximization.
    pub n_starts: usize,
    pub max_opt_iters: usize,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            lengthscale_bounds: (1e-3, 1e3),
            signal_bounds: (1e-3, 1e3),
            noise_bounds: (JITTER_FLOOR, 1.0),
            n_starts: 10,
            max_opt_iters: 150,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn with_seed(seed: u64) -> Self {
        FitConfig { seed, ..Default::default() }
    }
}

/// A fitted GP. Immutable after construction; cheap to share across threads.
#[derive(Debug, Clone)]
pub struct GpModel {
    space: Arc<ParamSpace>,
    x_raw: Vec<Vec<f64>>,
    x_norm: Vec<Vec<f64>>,
    y_std: DVector<f64>,
    stats: StandardizationStats,
    hypers: KernelHyperparams,
    /// Noise actually used in the Gram matrix; exceeds
    /// `hypers.noise_variance` only when jitter had to be raised.
    effective_noise: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    log_marginal: f64,
}

impl GpModel {
    /// Fits hyperparameters by maximizing the log marginal likelihood with
    /// multi-start local search, then caches the Gram factorization.
    pub fn fit(space: Arc<ParamSpace>, obs: &[Observation], config: &FitConfig) -> Result<GpModel> {
        if obs.is_empty() {
            return Err(Error::EmptyObservations);
        }
        for o in obs {
            o.validate(&space)?;
        }
        let ys: Vec<f64> = obs.iter().map(|o| o.y).collect();
        let (_, stats) = standardize(&ys);
        Self::fit_with_stats(space, obs, stats, config)
    }

    /// Fits with caller-supplied standardization statistics (used when
    /// rebuilding models whose stats were frozen by an earlier run).
    pub fn fit_with_stats(
        space: Arc<ParamSpace>,
        obs: &[Observation],
        stats: StandardizationStats,
        config: &FitConfig,
    ) -> Result<GpModel> {
        if obs.is_empty() {
            return Err(Error::EmptyObservations);
        }
        let d = space.dim();
        let x_raw: Vec<Vec<f64>> = obs.iter().map(|o| o.x.clone()).collect();
        let x_norm: Vec<Vec<f64>> = x_raw.iter().map(|x| space.normalize(x)).collect::<Result<_>>()?;
        let y_std = DVector::from_iterator(obs.len(), obs.iter().map(|o| stats.apply(o.y)));

        let heuristic_ls = median_heuristic_lengthscales(&x_norm, d, config.lengthscale_bounds);

        // log-space parameter vector: [ln l_1..d, ln signal, ln noise]
        let lb: Vec<f64> = std::iter::repeat(config.lengthscale_bounds.0.ln())
            .take(d)
            .chain([config.signal_bounds.0.ln(), config.noise_bounds.0.ln()])
            .collect();
        let ub: Vec<f64> = std::iter::repeat(config.lengthscale_bounds.1.ln())
            .take(d)
            .chain([config.signal_bounds.1.ln(), config.noise_bounds.1.ln()])
            .collect();
        let clamp = |theta: &[f64]| -> Vec<f64> {
            theta.iter().zip(&lb).zip(&ub).map(|((&t, &l), &u)| t.clamp(l, u)).collect()
        };
        let theta_to_hypers = |theta: &[f64]| -> KernelHyperparams {
            KernelHyperparams {
                lengthscales: theta[..d].iter().map(|t| t.exp()).collect(),
                signal_variance: theta[d].exp(),
                noise_variance: theta[d + 1].exp(),
            }
        };

        let objective = |theta: &[f64]| -> f64 {
            let h = theta_to_hypers(&clamp(theta));
            match log_marginal_likelihood(&x_norm, &y_std, &h) {
                Some(mll) if mll.is_finite() => -mll,
                _ => 1e100,
            }
        };

        let mut starts: Vec<Vec<f64>> = Vec::with_capacity(config.n_starts);
        let mut start0: Vec<f64> = heuristic_ls.iter().map(|l| l.ln()).collect();
        start0.push(0.0); // signal 1.0
        start0.push(1e-4f64.ln().max(lb[d + 1]));
        starts.push(clamp(&start0));
        let mut rng = derive_rng(config.seed, &[0x6f70_74]);
        while starts.len() < config.n_starts.max(1) {
            let theta: Vec<f64> =
                lb.iter().zip(&ub).map(|(&l, &u)| l + rng.gen::<f64>() * (u - l)).collect();
            starts.push(theta);
        }

        let mut best: Option<(Vec<f64>, f64)> = None;
        for start in &starts {
            let (theta, value) = nelder_mead(objective, start, 0.7, config.max_opt_iters, 1e-8);
            if best.as_ref().map_or(true, |(_, v)| value < *v) {
                best = Some((clamp(&theta), value));
            }
        }

        let hypers = match best {
            Some((theta, value)) if value < 1e99 => {
                let mut h = theta_to_hypers(&theta);
                h.noise_variance = h.noise_variance.max(JITTER_FLOOR);
                h
            }
            // every start diverged; fall back to the median heuristic
            _ => KernelHyperparams {
                lengthscales: heuristic_ls,
                signal_variance: 1.0,
                noise_variance: JITTER_FLOOR,
            },
        };

        Self::build(space, x_raw, x_norm, y_std, stats, hypers)
    }

    /// Rebuilds a model from frozen parts without re-estimating anything.
    /// Outcomes are standardized with the supplied statistics.
    pub fn from_parts(
        space: Arc<ParamSpace>,
        obs: &[Observation],
        stats: StandardizationStats,
        hypers: KernelHyperparams,
    ) -> Result<GpModel> {
        if obs.is_empty() {
            return Err(Error::EmptyObservations);
        }
        hypers.validate()?;
        if hypers.lengthscales.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: hypers.lengthscales.len() });
        }
        let x_raw: Vec<Vec<f64>> = obs.iter().map(|o| o.x.clone()).collect();
        let x_norm: Vec<Vec<f64>> = x_raw.iter().map(|x| space.normalize(x)).collect::<Result<_>>()?;
        let y_std = DVector::from_iterator(obs.len(), obs.iter().map(|o| stats.apply(o.y)));
        Self::build(space, x_raw, x_norm, y_std, stats, hypers)
    }

    fn build(
        space: Arc<ParamSpace>,
        x_raw: Vec<Vec<f64>>,
        x_norm: Vec<Vec<f64>>,
        y_std: DVector<f64>,
        stats: StandardizationStats,
        hypers: KernelHyperparams,
    ) -> Result<GpModel> {
        let n = x_norm.len();
        let mut noise = hypers.noise_variance.max(JITTER_FLOOR);
        loop {
            let mut gram = DMatrix::from_fn(n, n, |i, j| matern52_ard(&x_norm[i], &x_norm[j], &hypers));
            for i in 0..n {
                gram[(i, i)] += noise;
            }
            if let Some(chol) = Cholesky::new(gram) {
                let alpha = chol.solve(&y_std);
                let log_det: f64 = (0..n).map(|i| chol.l_dirty()[(i, i)].ln()).sum();
                let log_marginal = -0.5 * y_std.dot(&alpha)
                    - log_det
                    - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
                return Ok(GpModel {
                    space,
                    x_raw,
                    x_norm,
                    y_std,
                    stats,
                    hypers,
                    effective_noise: noise,
                    chol,
                    alpha,
                    log_marginal,
                });
            }
            noise *= 10.0;
            if noise > 1e2 {
                return Err(Error::SingularKernel { jitter: noise });
            }
        }
    }

    pub fn len(&self) -> usize {
        self.x_norm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_norm.is_empty()
    }

    pub fn space(&self) -> &Arc<ParamSpace> {
        &self.space
    }

    pub fn stats(&self) -> StandardizationStats {
        self.stats
    }

    pub fn hypers(&self) -> &KernelHyperparams {
        &self.hypers
    }

    /// Noise variance used in the Gram matrix; larger than the fitted noise
    /// only when jitter was raised to factorize.
    pub fn effective_noise(&self) -> f64 {
        self.effective_noise
    }

    pub fn jitter_raised(&self) -> bool {
        self.effective_noise > self.hypers.noise_variance.max(JITTER_FLOOR)
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.log_marginal
    }

    pub fn train_inputs(&self) -> &[Vec<f64>] {
        &self.x_raw
    }

    pub fn train_targets_std(&self) -> &DVector<f64> {
        &self.y_std
    }

    /// Smallest standardized training outcome (the incumbent for EI).
    pub fn min_target_std(&self) -> f64 {
        self.y_std.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn cross_covariance(&self, xs_norm: &[Vec<f64>]) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), xs_norm.len(), |i, j| {
            matern52_ard(&self.x_norm[i], &xs_norm[j], &self.hypers)
        })
    }

    fn normalize_all(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        xs.iter().map(|x| self.space.normalize(x)).collect()
    }

    /// Joint posterior at `xs` on the standardized scale. The covariance is
    /// symmetrized and eigenvalue-repaired before being returned.
    pub fn predict(&self, xs: &[Vec<f64>]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let xs_norm = self.normalize_all(xs)?;
        let kstar = self.cross_covariance(&xs_norm);
        let mean = kstar.transpose() * &self.alpha;
        let m = xs_norm.len();
        let prior = DMatrix::from_fn(m, m, |i, j| matern52_ard(&xs_norm[i], &xs_norm[j], &self.hypers));
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&kstar)
            .expect("triangular solve of a valid Cholesky factor");
        let cov = prior - v.transpose() * v;
        let (cov, _) = psd_repair(cov)?;
        Ok((mean, cov))
    }

    /// Pointwise posterior means and variances (variances clamped at zero).
    pub fn predict_marginal(&self, xs: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
        let xs_norm = self.normalize_all(xs)?;
        let kstar = self.cross_covariance(&xs_norm);
        let mean = kstar.transpose() * &self.alpha;
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&kstar)
            .expect("triangular solve of a valid Cholesky factor");
        let vars: Vec<f64> = (0..xs_norm.len())
            .map(|j| {
                let prior = self.hypers.signal_variance;
                (prior - v.column(j).norm_squared()).max(0.0)
            })
            .collect();
        Ok((mean.iter().copied().collect(), vars))
    }

    /// Draws joint samples from the posterior at `xs`; one row per sample.
    /// Deterministic for a fixed generator state.
    pub fn sample_joint<R: Rng + ?Sized>(
        &self,
        xs: &[Vec<f64>],
        n_samples: usize,
        rng: &mut R,
    ) -> Result<DMatrix<f64>> {
        let (mean, cov) = self.predict(xs)?;
        sample_mvn(&mean, &cov, n_samples, rng)
    }

    /// Leave-one-out submodels: model `j` drops training point `j` but keeps
    /// this model's hyperparameters, standardization, and noise level.
    pub fn loo_models(&self) -> Result<Vec<GpModel>> {
        let n = self.len();
        if n < 2 {
            return Err(Error::LooUndefined(n));
        }
        (0..n)
            .map(|j| {
                let keep = |v: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
                    v.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, x)| x.clone()).collect()
                };
                let y: DVector<f64> = DVector::from_iterator(
                    n - 1,
                    self.y_std.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, &v)| v),
                );
                // keep the parent's effective noise so the only difference is
                // the removed observation
                let mut hypers = self.hypers.clone();
                hypers.noise_variance = self.effective_noise;
                Self::build(
                    Arc::clone(&self.space),
                    keep(&self.x_raw),
                    keep(&self.x_norm),
                    y,
                    self.stats,
                    hypers,
                )
            })
            .collect()
    }

    /// Posterior of each held-out point under its own leave-one-out model:
    /// entry `j` is `(mean, variance)` of `f_{-j}` at `x_j`.
    pub fn predict_loo(&self) -> Result<Vec<(f64, f64)>> {
        let models = self.loo_models()?;
        models
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let (mean, var) = m.predict_marginal(std::slice::from_ref(&self.x_raw[j]))?;
                Ok((mean[0], var[0]))
            })
            .collect()
    }

    /// Leave-one-out predictive means at every training input:
    /// `out[j][k]` is the mean of `f_{-j}` at `x_k`.
    pub fn predict_loo_means(&self) -> Result<Vec<Vec<f64>>> {
        let models = self.loo_models()?;
        models.iter().map(|m| Ok(m.predict_marginal(&self.x_raw)?.0)).collect()
    }

    /// Extends the model with extra observations already on the standardized
    /// scale, keeping hyperparameters and statistics fixed. Used to condition
    /// on fantasized outcomes.
    pub fn conditioned_std(&self, xs: &[Vec<f64>], ys_std: &[f64]) -> Result<GpModel> {
        debug_assert_eq!(xs.len(), ys_std.len());
        let mut x_raw = self.x_raw.clone();
        let mut x_norm = self.x_norm.clone();
        for x in xs {
            x_norm.push(self.space.normalize(x)?);
            x_raw.push(x.clone());
        }
        let y: DVector<f64> =
            DVector::from_iterator(self.len() + ys_std.len(), self.y_std.iter().copied().chain(ys_std.iter().copied()));
        let mut hypers = self.hypers.clone();
        hypers.noise_variance = self.effective_noise;
        Self::build(Arc::clone(&self.space), x_raw, x_norm, y, self.stats, hypers)
    }
}

fn median_heuristic_lengthscales(x_norm: &[Vec<f64>], d: usize, bounds: (f64, f64)) -> Vec<f64> {
    (0..d)
        .map(|k| {
            let mut dists: Vec<f64> = Vec::new();
            for i in 0..x_norm.len() {
                for j in (i + 1)..x_norm.len() {
                    let dist = (x_norm[i][k] - x_norm[j][k]).abs();
                    if dist > 0.0 {
                        dists.push(dist);
                    }
                }
            }
            if dists.is_empty() {
                return 0.3f64.clamp(bounds.0, bounds.1);
            }
            dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
            dists[dists.len() / 2].clamp(bounds.0, bounds.1)
        })
        .collect()
}

/// Log marginal likelihood of standardized targets under the kernel; `None`
/// when the Gram matrix cannot be factorized.
fn log_marginal_likelihood(x_norm: &[Vec<f64>], y_std: &DVector<f64>, hypers: &KernelHyperparams) -> Option<f64> {
    let n = x_norm.len();
    let noise = hypers.noise_variance.max(JITTER_FLOOR);
    let mut gram = DMatrix::from_fn(n, n, |i, j| matern52_ard(&x_norm[i], &x_norm[j], hypers));
    for i in 0..n {
        gram[(i, i)] += noise;
    }
    let chol = Cholesky::new(gram)?;
    let alpha = chol.solve(y_std);
    let log_det: f64 = (0..n).map(|i| chol.l_dirty()[(i, i)].ln()).sum();
    Some(-0.5 * y_std.dot(&alpha) - log_det - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln())
}

/// Symmetrizes a covariance and clamps slightly negative eigenvalues to
/// zero. Eigenvalues below [`NEG_EIGENVALUE_TOL`] indicate a real defect and
/// are an error. Returns the repaired matrix and its eigen square root.
pub fn psd_repair(cov: DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let sym = (&cov + cov.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut values = eig.eigenvalues.clone();
    for v in values.iter_mut() {
        if *v < NEG_EIGENVALUE_TOL {
            return Err(Error::NotPositiveSemiDefinite { eigenvalue: *v });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let q = &eig.eigenvectors;
    let repaired = q * DMatrix::from_diagonal(&values) * q.transpose();
    let sqrt = q * DMatrix::from_diagonal(&values.map(f64::sqrt));
    Ok((repaired, sqrt))
}

/// Draws `n_samples` joint normal samples (rows) with the given mean and
/// PSD-repaired covariance.
pub fn sample_mvn<R: Rng + ?Sized>(
    mean: &DVector<f64>,
    cov: &DMatrix<f64>,
    n_samples: usize,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let m = mean.len();
    let (_, factor) = psd_repair(cov.clone())?;
    let mut out = DMatrix::zeros(n_samples, m);
    let mut z = DVector::zeros(m);
    for s in 0..n_samples {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        let draw = mean + &factor * &z;
        out.row_mut(s).copy_from(&draw.transpose());
    }
    Ok(out)
}
