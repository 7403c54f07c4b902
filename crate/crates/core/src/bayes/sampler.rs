//! Single-site random-walk Metropolis within a Gibbs sweep.
//!
//! Each sweep visits the coordinates in index order. Positive coordinates
//! are proposed on the log scale, `x' = x * exp(step * N(0, 1))`, with the
//! log-normal Jacobian `ln x' - ln x` added to the acceptance ratio;
//! unconstrained coordinates use a plain normal random walk.
//!
//! During burn-in, step sizes follow a Robbins-Monro recursion on
//! `ln step` toward the target acceptance rate. They are frozen once burn-in
//! ends, so the retained draws come from a time-homogeneous Markov chain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unnormalized log density the sampler explores.
pub trait LogTarget: Sync {
    /// Per-chain scratch state for [`LogTarget::log_density_cached`]; `()`
    /// for targets without one.
    type Cache: Default;

    fn dim(&self) -> usize;

    /// May return `-inf` for points outside the support.
    fn log_density(&self, x: &[f64]) -> f64;

    /// Same value as [`LogTarget::log_density`], possibly reusing work
    /// stored in `cache` by earlier calls of the same chain.
    fn log_density_cached(&self, x: &[f64], cache: &mut Self::Cache) -> f64 {
        let _ = cache;
        self.log_density(x)
    }

    /// Whether coordinate `i` is constrained to `(0, inf)`.
    fn is_positive(&self, i: usize) -> bool;

    fn names(&self) -> Vec<String> {
        (1..=self.dim()).map(|i| format!("x{i}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McmcConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub chains: usize,
    /// Initial proposal standard deviations (log scale for positive
    /// coordinates). Derived from the data when absent.
    pub step_sizes: Option<Vec<f64>>,
    pub adapt: bool,
    pub target_acceptance: f64,
    pub seed: u64,
    /// Report progress every this many iterations; zero disables reports.
    pub progress_interval: usize,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            iterations: 100_000,
            burn_in: 6_900,
            thin: 400,
            chains: 2,
            step_sizes: None,
            adapt: true,
            target_acceptance: 0.30,
            seed: 1,
            progress_interval: 0,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::config("thin must be at least 1"));
        }
        if self.chains == 0 {
            return Err(Error::config("at least one chain is required"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::config(format!(
                "burn_in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.retained() == 0 {
            return Err(Error::config(format!(
                "iterations - burn_in ({}) is smaller than thin ({}); no draws would be kept",
                self.iterations - self.burn_in,
                self.thin
            )));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(Error::config("target_acceptance must lie in (0, 1)"));
        }
        if let Some(steps) = &self.step_sizes {
            if steps.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                return Err(Error::config("step sizes must be positive and finite"));
            }
        }
        Ok(())
    }

    /// Number of draws kept after burn-in and thinning.
    pub fn retained(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin
    }
}

/// Snapshot passed to progress observers.
#[derive(Debug, Clone)]
pub struct Progress<'a> {
    pub chain: usize,
    pub iteration: usize,
    pub total: usize,
    pub acceptance_rates: &'a [f64],
}

pub type Observer<'a> = &'a (dyn Fn(&Progress<'_>) + Sync);

/// Output of one sampler run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub draws: Vec<Vec<f64>>,
    pub log_densities: Vec<f64>,
    /// Per-coordinate acceptance fractions over the post-burn-in iterations.
    pub acceptance_rates: Vec<f64>,
    /// Step sizes in force after burn-in.
    pub step_sizes: Vec<f64>,
}

const LOG_STEP_BOUNDS: (f64, f64) = (-12.0, 4.0);

/// Runs one chain on `target` from `init`. `chain_index` only labels
/// progress reports.
pub fn sample<T: LogTarget + ?Sized>(
    target: &T,
    cfg: &McmcConfig,
    init: &[f64],
    seed: u64,
    chain_index: usize,
    observer: Option<Observer<'_>>,
) -> Result<Trace> {
    cfg.validate()?;
    let dim = target.dim();
    if init.len() != dim {
        return Err(Error::Dimension {
            expected: dim,
            got: init.len(),
        });
    }
    let mut x = init.to_vec();
    let mut cache = T::Cache::default();
    let mut lp = target.log_density_cached(&x, &mut cache);
    if !lp.is_finite() {
        return Err(Error::config(format!(
            "initial point has non-finite log posterior ({lp})"
        )));
    }
    let mut log_steps: Vec<f64> = match &cfg.step_sizes {
        Some(s) if s.len() == dim => s.iter().map(|v| v.ln()).collect(),
        Some(s) => {
            return Err(Error::Dimension {
                expected: dim,
                got: s.len(),
            })
        }
        None => vec![0.1f64.ln(); dim],
    };
    let positive: Vec<bool> = (0..dim).map(|i| target.is_positive(i)).collect();
    if let Some(i) = (0..dim).find(|&i| positive[i] && !(x[i] > 0.0)) {
        return Err(Error::config(format!(
            "initial value of coordinate {i} must be positive, got {}",
            x[i]
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = vec![0usize; dim];
    let mut draws = Vec::with_capacity(cfg.retained());
    let mut log_densities = Vec::with_capacity(cfg.retained());
    let mut rates = vec![0.0; dim];

    for t in 1..=cfg.iterations {
        let adapting = cfg.adapt && t <= cfg.burn_in;
        for i in 0..dim {
            let old = x[i];
            let z: f64 = rng.sample(StandardNormal);
            let step = log_steps[i].exp();
            let (proposal, log_jacobian) = if positive[i] {
                let y = old.ln() + step * z;
                (y.exp(), y - old.ln())
            } else {
                (old + step * z, 0.0)
            };
            x[i] = proposal;
            let lp_new = if proposal.is_finite() && (!positive[i] || proposal > 0.0) {
                target.log_density_cached(&x, &mut cache)
            } else {
                f64::NEG_INFINITY
            };
            let log_alpha = lp_new - lp + log_jacobian;
            let u: f64 = rng.random();
            let accept = lp_new.is_finite() && (log_alpha >= 0.0 || u.ln() < log_alpha);
            if accept {
                lp = lp_new;
            } else {
                x[i] = old;
            }
            if adapting {
                let gain = (t as f64).powf(-0.6);
                let a = if accept { 1.0 } else { 0.0 };
                log_steps[i] = (log_steps[i] + gain * (a - cfg.target_acceptance))
                    .clamp(LOG_STEP_BOUNDS.0, LOG_STEP_BOUNDS.1);
            } else if t > cfg.burn_in && accept {
                accepted[i] += 1;
            }
        }
        if t > cfg.burn_in {
            let kept = t - cfg.burn_in;
            if kept.is_multiple_of(cfg.thin) {
                draws.push(x.clone());
                log_densities.push(lp);
            }
        }
        if let Some(obs) = observer {
            if cfg.progress_interval > 0 && t % cfg.progress_interval == 0 {
                let done = t.saturating_sub(cfg.burn_in).max(1) as f64;
                for (r, a) in rates.iter_mut().zip(&accepted) {
                    *r = if t > cfg.burn_in { *a as f64 / done } else { f64::NAN };
                }
                obs(&Progress {
                    chain: chain_index,
                    iteration: t,
                    total: cfg.iterations,
                    acceptance_rates: &rates,
                });
            }
        }
    }

    let post = (cfg.iterations - cfg.burn_in) as f64;
    Ok(Trace {
        draws,
        log_densities,
        acceptance_rates: accepted.iter().map(|&a| a as f64 / post).collect(),
        step_sizes: log_steps.iter().map(|s| s.exp()).collect(),
    })
}
