//! Synthetic right-censored data from either frailty model.
//!
//! For each subject: draw a frailty `w`, covariates `K`, compute
//! `rho = exp(K' beta)`, invert the conditional survival
//! `exp(-w Phi0(z) rho) = v` at a uniform `v`, draw an exponential censoring
//! time and keep the smaller of the two.
//!
//! Frailties, covariates, uniforms and censoring times each come from their
//! own ChaCha stream of the master seed, so the first `n` records of a
//! dataset do not change when `n` grows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::baseline::{gw_quantile_from_cumhazard, GwParams};
use crate::error::{Error, Result};
use crate::frailty::FrailtyLaw;
use crate::models::{linear_predictor, ModelKind, ModelParams, SurvivalRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum CovariateLaw {
    Bernoulli { p: f64 },
    Normal { mean: f64, sd: f64 },
}

impl Default for CovariateLaw {
    fn default() -> Self {
        CovariateLaw::Bernoulli { p: 0.6 }
    }
}

impl CovariateLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            CovariateLaw::Bernoulli { p } if !(0.0..=1.0).contains(&p) => Err(Error::config(
                format!("Bernoulli covariate probability must lie in [0, 1], got {p}"),
            )),
            CovariateLaw::Normal { mean, sd } if !(mean.is_finite() && sd.is_finite() && sd >= 0.0) => {
                Err(Error::config(format!(
                    "normal covariate law needs finite mean and sd >= 0, got ({mean}, {sd})"
                )))
            }
            _ => Ok(()),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            CovariateLaw::Bernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            CovariateLaw::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub kind: ModelKind,
    pub n: usize,
    pub true_params: ModelParams,
    #[serde(default)]
    pub covariate_law: CovariateLaw,
    /// Rate of the exponential censoring distribution.
    pub censoring_rate: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("simulation needs n >= 1"));
        }
        if !(self.censoring_rate > 0.0 && self.censoring_rate.is_finite()) {
            return Err(Error::config(format!(
                "censoring rate must be positive, got {}",
                self.censoring_rate
            )));
        }
        if self.true_params.kind() != self.kind {
            return Err(Error::config(format!(
                "{} simulation given {} parameters",
                self.kind,
                self.true_params.kind()
            )));
        }
        self.covariate_law.validate()
    }
}

/// Lifetime `z` solving `exp(-w Phi0(z) rho) = v`.
pub fn invert_lifetime(v: f64, w: f64, rho: f64, p: &GwParams) -> Result<f64> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::domain(format!("uniform draw must lie in (0, 1), got {v}")));
    }
    if !(w > 0.0 && rho > 0.0) {
        return Err(Error::domain(format!(
            "frailty and covariate multiplier must be positive, got {w} and {rho}"
        )));
    }
    gw_quantile_from_cumhazard(-v.ln() / (w * rho), p)
}

const STREAM_FRAILTY: u64 = 1;
const STREAM_COVARIATES: u64 = 2;
const STREAM_UNIFORM: u64 = 3;
const STREAM_CENSORING: u64 = 4;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// A generated dataset together with the latent frailties, for validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub records: Vec<SurvivalRecord>,
    pub frailties: Vec<f64>,
}

pub fn generate(cfg: &SimConfig) -> Result<Vec<SurvivalRecord>> {
    Ok(generate_with_frailties(cfg)?.records)
}

pub fn generate_with_frailties(cfg: &SimConfig) -> Result<Simulated> {
    cfg.validate()?;
    let params = &cfg.true_params;
    let m = params.beta.len();
    let mut frailty_rng = stream(cfg.seed, STREAM_FRAILTY);
    let mut cov_rng = stream(cfg.seed, STREAM_COVARIATES);
    let mut unif_rng = stream(cfg.seed, STREAM_UNIFORM);
    let mut cens_rng = stream(cfg.seed, STREAM_CENSORING);
    let censoring = Exp::new(cfg.censoring_rate).map_err(|e| Error::config(e.to_string()))?;

    let mut out = Simulated {
        records: Vec::with_capacity(cfg.n),
        frailties: Vec::with_capacity(cfg.n),
    };
    while out.records.len() < cfg.n {
        let w = params.frailty.sample(&mut frailty_rng);
        let k: Vec<f64> = (0..m).map(|_| cfg.covariate_law.draw(&mut cov_rng)).collect();
        let rho = linear_predictor(&k, &params.beta)?;
        let v: f64 = unif_rng.random();
        let c: f64 = censoring.sample(&mut cens_rng);
        if !(v > 0.0 && w > 0.0 && c > 0.0) {
            // boundary draws give zero or infinite lifetimes
            continue;
        }
        let z = invert_lifetime(v, w, rho, &params.baseline)?;
        let (time, event) = if z < c { (z, true) } else { (c, false) };
        if !(time > 0.0 && time.is_finite()) {
            continue;
        }
        out.records.push(SurvivalRecord::new(time, event, k)?);
        out.frailties.push(w);
    }
    Ok(out)
}
