//! Posterior inference for the frailty models.

mod prior;
pub mod sampler;

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use prior::{log_prior, NormalPrior, PriorConfig, ScalarPrior};
pub use sampler::{LogTarget, McmcConfig, Observer, Progress, Trace};

use crate::error::{Error, Result};
use crate::models::{self, BaselineCache, ModelKind, ModelParams, SurvivalRecord};

/// Unnormalized log posterior: log-likelihood plus log prior.
pub fn log_posterior(
    kind: ModelKind,
    data: &[SurvivalRecord],
    params: &ModelParams,
    priors: &PriorConfig,
) -> Result<f64> {
    let lp = log_prior(params, priors);
    if lp == f64::NEG_INFINITY {
        return Ok(lp);
    }
    Ok(models::log_likelihood(kind, data, params)? + lp)
}

/// The model posterior as a sampler target over the flattened parameter
/// vector (see [`ModelKind::param_names`]).
pub struct PosteriorTarget<'a> {
    pub kind: ModelKind,
    pub data: &'a [SurvivalRecord],
    pub priors: &'a PriorConfig,
    num_covariates: usize,
}

impl<'a> PosteriorTarget<'a> {
    fn log_prior_slice(&self, x: &[f64]) -> f64 {
        let nf = self.kind.num_frailty_params();
        let p = self.priors;
        let mut lp = p.zeta.ln_pdf(x[0]) + p.delta.ln_pdf(x[1]) + p.xi.ln_pdf(x[2]);
        lp += x[3..3 + nf].iter().map(|&v| p.frailty.ln_pdf(v)).sum::<f64>();
        lp + x[3 + nf..].iter().map(|&b| p.beta.ln_pdf(b)).sum::<f64>()
    }

    pub fn new(kind: ModelKind, data: &'a [SurvivalRecord], priors: &'a PriorConfig) -> Result<Self> {
        let num_covariates = check_data(data)?;
        priors.validate()?;
        Ok(PosteriorTarget {
            kind,
            data,
            priors,
            num_covariates,
        })
    }
}

impl LogTarget for PosteriorTarget<'_> {
    type Cache = BaselineCache;

    fn dim(&self) -> usize {
        self.kind.num_params(self.num_covariates)
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let lp = self.log_prior_slice(x);
        if !lp.is_finite() {
            return f64::NEG_INFINITY;
        }
        lp + models::log_likelihood_slice(self.kind, self.data, x)
    }

    fn log_density_cached(&self, x: &[f64], cache: &mut BaselineCache) -> f64 {
        let lp = self.log_prior_slice(x);
        if !lp.is_finite() {
            return f64::NEG_INFINITY;
        }
        lp + models::log_likelihood_cached(self.kind, self.data, x, cache)
    }

    fn is_positive(&self, i: usize) -> bool {
        i < 3 + self.kind.num_frailty_params()
    }

    fn names(&self) -> Vec<String> {
        self.kind.param_names(self.num_covariates)
    }
}

/// Covariate dimension of a non-empty, uniform dataset.
fn check_data(data: &[SurvivalRecord]) -> Result<usize> {
    let first = data
        .first()
        .ok_or_else(|| Error::data(None, "dataset is empty"))?;
    let m = first.covariates.len();
    if let Some(i) = data.iter().position(|r| r.covariates.len() != m) {
        return Err(Error::data(
            Some(i + 1),
            format!(
                "record has {} covariates, expected {m}",
                data[i].covariates.len()
            ),
        ));
    }
    Ok(m)
}

/// Posterior draws of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    /// `None` when the chain does not come from a model posterior, e.g. a
    /// calibration target or an imported CSV with unrecognized columns.
    pub kind: Option<ModelKind>,
    pub names: Vec<String>,
    pub draws: Vec<Vec<f64>>,
    pub log_posteriors: Vec<f64>,
    pub acceptance_rates: Vec<f64>,
    pub step_sizes: Vec<f64>,
    pub seed: u64,
    pub config: Option<McmcConfig>,
}

impl Chain {
    pub fn from_trace(kind: Option<ModelKind>, names: Vec<String>, trace: Trace, seed: u64, cfg: &McmcConfig) -> Self {
        Chain {
            kind,
            names,
            draws: trace.draws,
            log_posteriors: trace.log_densities,
            acceptance_rates: trace.acceptance_rates,
            step_sizes: trace.step_sizes,
            seed,
            config: Some(cfg.clone()),
        }
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d[j]).collect()
    }

    pub fn params(&self, i: usize) -> Result<ModelParams> {
        let kind = self
            .kind
            .ok_or_else(|| Error::config("chain is not attached to a model"))?;
        ModelParams::from_slice(kind, &self.draws[i])
    }

    pub fn posterior_mean(&self) -> Vec<f64> {
        let n = self.draws.len() as f64;
        (0..self.names.len())
            .map(|j| self.draws.iter().map(|d| d[j]).sum::<f64>() / n)
            .collect()
    }

    pub fn posterior_mean_params(&self) -> Result<ModelParams> {
        let kind = self
            .kind
            .ok_or_else(|| Error::config("chain is not attached to a model"))?;
        if self.is_empty() {
            return Err(Error::Diagnostics("chain has no draws".into()));
        }
        ModelParams::from_slice(kind, &self.posterior_mean())
    }

    /// One row per draw: the parameter columns followed by `log_posterior`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = self.names.clone();
        header.push("log_posterior".into());
        out.write_record(&header)?;
        for (d, lp) in self.draws.iter().zip(&self.log_posteriors) {
            out.write_record(d.iter().chain(std::iter::once(lp)).map(|v| v.to_string()))?;
        }
        out.flush().map_err(|e| Error::io("chain csv", e))?;
        Ok(())
    }

    /// Reads a chain written by [`Chain::write_csv`]. The model kind is
    /// recovered from the column names when they match one of the models.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let lp_col = header.iter().position(|h| h == "log_posterior");
        let names: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != lp_col)
            .map(|(_, h)| h.clone())
            .collect();
        let mut draws = Vec::new();
        let mut log_posteriors = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut d = Vec::with_capacity(names.len());
            for (i, cell) in rec.iter().enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| {
                    Error::data(Some(row + 1), format!("cannot parse {cell:?} as a number"))
                })?;
                if Some(i) == lp_col {
                    log_posteriors.push(v);
                } else {
                    d.push(v);
                }
            }
            draws.push(d);
        }
        let kind = ModelKind::ALL.into_iter().find(|k| {
            let m = names.len().saturating_sub(3 + k.num_frailty_params());
            k.param_names(m) == names
        });
        Ok(Chain {
            kind,
            names,
            draws,
            log_posteriors,
            acceptance_rates: Vec::new(),
            step_sizes: Vec::new(),
            seed: 0,
            config: None,
        })
    }
}

/// Starting point from the data: exponential rate for the baseline
/// (`zeta = xi = 1`, `delta` = events per unit time at risk), frailty
/// parameters at one and no covariate effect.
pub fn default_init(kind: ModelKind, data: &[SurvivalRecord]) -> Result<ModelParams> {
    let m = check_data(data)?;
    let events = data.iter().filter(|r| r.event).count().max(1) as f64;
    let exposure: f64 = data.iter().map(|r| r.time).sum();
    let mut v = vec![1.0, events / exposure, 1.0, 1.0];
    if kind == ModelKind::GlGw {
        v.push(1.0);
    }
    v.extend(std::iter::repeat_n(0.0, m));
    ModelParams::from_slice(kind, &v)
}

/// Default proposal scales: 0.1 on the log scale for positive parameters,
/// and 0.1 covariate standard deviations for regression coefficients.
pub fn default_step_sizes(kind: ModelKind, data: &[SurvivalRecord]) -> Result<Vec<f64>> {
    let m = check_data(data)?;
    let mut steps = vec![0.1; 3 + kind.num_frailty_params()];
    let n = data.len() as f64;
    for j in 0..m {
        let mean = data.iter().map(|r| r.covariates[j]).sum::<f64>() / n;
        let var = data
            .iter()
            .map(|r| (r.covariates[j] - mean).powi(2))
            .sum::<f64>()
            / n;
        let sd = var.sqrt();
        steps.push(if sd > 1e-12 { 0.1 / sd } else { 0.1 });
    }
    Ok(steps)
}

fn resolve_steps(kind: ModelKind, data: &[SurvivalRecord], cfg: &McmcConfig) -> Result<McmcConfig> {
    let mut cfg = cfg.clone();
    if cfg.step_sizes.is_none() {
        cfg.step_sizes = Some(default_step_sizes(kind, data)?);
    }
    Ok(cfg)
}

/// Runs a single chain from `init` with seed `cfg.seed`.
pub fn run_chain(
    kind: ModelKind,
    data: &[SurvivalRecord],
    cfg: &McmcConfig,
    priors: &PriorConfig,
    init: &ModelParams,
) -> Result<Chain> {
    run_chain_seeded(kind, data, cfg, priors, init, cfg.seed, 0, None)
}

#[allow(clippy::too_many_arguments)]
fn run_chain_seeded(
    kind: ModelKind,
    data: &[SurvivalRecord],
    cfg: &McmcConfig,
    priors: &PriorConfig,
    init: &ModelParams,
    seed: u64,
    index: usize,
    observer: Option<Observer<'_>>,
) -> Result<Chain> {
    if init.kind() != kind {
        return Err(Error::config(format!(
            "{kind} chain started from {} parameters",
            init.kind()
        )));
    }
    let target = PosteriorTarget::new(kind, data, priors)?;
    let start = init.to_vec();
    if start.len() != target.dim() {
        return Err(Error::Dimension {
            expected: target.dim(),
            got: start.len(),
        });
    }
    let cfg = resolve_steps(kind, data, cfg)?;
    let trace = sampler::sample(&target, &cfg, &start, seed, index, observer)?;
    Ok(Chain::from_trace(Some(kind), target.names(), trace, seed, &cfg))
}

/// Seed of chain `index`; chain 0 uses the configured seed unchanged.
pub fn chain_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Over-dispersed starting point for chain `index >= 1`: positive
/// parameters scaled by a factor in [0.5, 1.5], coefficients shifted by up
/// to half a proposal scale times five.
fn jittered_init(
    base: &ModelParams,
    steps: &[f64],
    target: &PosteriorTarget<'_>,
    seed: u64,
) -> ModelParams {
    let kind = base.kind();
    let v0 = base.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_1A17);
    for _ in 0..100 {
        let v: Vec<f64> = v0
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let u: f64 = rng.random_range(-0.5..0.5);
                if target.is_positive(i) {
                    x * (1.0 + u)
                } else {
                    x + 5.0 * steps[i] * u
                }
            })
            .collect();
        if target.log_density(&v).is_finite() {
            if let Ok(p) = ModelParams::from_slice(kind, &v) {
                return p;
            }
        }
    }
    base.clone()
}

/// Runs `cfg.chains` chains concurrently, one thread each. Chain 0 starts
/// at [`default_init`], later chains at jittered copies of it.
pub fn run_fit(
    kind: ModelKind,
    data: &[SurvivalRecord],
    cfg: &McmcConfig,
    priors: &PriorConfig,
) -> Result<Vec<Chain>> {
    run_fit_with(kind, data, cfg, priors, None, None)
}

/// [`run_fit`] with an optional explicit starting point and progress observer.
pub fn run_fit_with(
    kind: ModelKind,
    data: &[SurvivalRecord],
    cfg: &McmcConfig,
    priors: &PriorConfig,
    init: Option<&ModelParams>,
    observer: Option<Observer<'_>>,
) -> Result<Vec<Chain>> {
    cfg.validate()?;
    let base = match init {
        Some(p) => p.clone(),
        None => default_init(kind, data)?,
    };
    let cfg = resolve_steps(kind, data, cfg)?;
    let target = PosteriorTarget::new(kind, data, priors)?;
    let steps = cfg.step_sizes.clone().unwrap_or_default();
    let inits: Vec<ModelParams> = (0..cfg.chains)
        .map(|c| {
            if c == 0 {
                base.clone()
            } else {
                jittered_init(&base, &steps, &target, chain_seed(cfg.seed, c))
            }
        })
        .collect();
    let cfg = &cfg;
    std::thread::scope(|scope| {
        let handles: Vec<_> = inits
            .iter()
            .enumerate()
            .map(|(c, init)| {
                scope.spawn(move || {
                    run_chain_seeded(kind, data, cfg, priors, init, chain_seed(cfg.seed, c), c, observer)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampler thread panicked"))
            .collect()
    })
}
